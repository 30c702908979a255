"""A finite, checkable model of a reflexive homotopy domain K∞ ≃ [K∞→K∞]."""

from .hpo import WeakDomain, build_N_plus
from .lambda_ import Interpreter, equivalent_conversions, interpret, parse
from .tower import Tower, TowerConfig, TowerElement

__all__ = ["WeakDomain", "build_N_plus", "Interpreter", "equivalent_conversions", "interpret",
           "parse", "Tower", "TowerConfig", "TowerElement"]
