"""Function spaces [K → K'] represented by finite joins of step functors.

A :class:`StepFunctor` is kept in a canonical normal form: its pairs are exactly
the essential jump points ``(c, f(c))`` of the induced function: points ``c``
where ``f(c)`` is not already reached strictly below ``c``.  Such points are
always among the step thresholds.  Two step functors are therefore ≃ iff their pair tuples are equal.

Any object with ``leq``, ``join`` (raising :class:`NoSupremum`), ``try_join`` and
``canon`` can serve as a domain, so function spaces nest into tower levels.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence

from .hpo import DomainError, NoSupremum, WeakDomain, discrete_carrier, is_directed


class InconsistentSteps(DomainError):
    """The outputs fired at ``point`` have no common upper bound."""

    def __init__(self, point, values):
        self.point = point
        self.values = tuple(values)
        super().__init__(f"outputs {{{', '.join(map(str, self.values))}}} fired at {point} "
                         "have no supremum")


class NotMonotone(DomainError):
    def __init__(self, x, y, fx, fy):
        self.pair = (x, y)
        super().__init__(f"{x} ≾ {y} but f({x}) = {fx} is not below f({y}) = {fy}")


@dataclass(frozen=True, order=True)
class StepFunctor:
    pairs: tuple[tuple[Any, Any], ...]
    space: "FunctionSpace" = field(compare=False, repr=False, default=None)

    def __hash__(self) -> int:
        # nested pair tuples are deep at higher tower levels
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash(self.pairs)
            object.__setattr__(self, "_hash", h)
        return h

    def __call__(self, x):
        return self.space.apply(self, x)

    def __str__(self) -> str:
        if not self.pairs:
            return "⊥"
        return " ∨ ".join(f"({a}⇒{b})" for a, b in self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


def bottom_of(D):
    return D.join(())


class FunctionSpace:
    """Continuous functors ``dom → cod`` as step functors, ordered pointwise."""

    def __init__(self, dom, cod, name: str | None = None):
        self.dom = dom
        self.cod = cod
        self.name = name or "[K→K']"
        self.bottom = StepFunctor((), self)
        self._cod_bottom = bottom_of(cod)
        self._apply: dict = {}
        self._leq: dict = {}
        self._join: dict = {}

    def __repr__(self) -> str:
        return f"FunctionSpace({self.name})"

    # -- construction --------------------------------------------------

    def make(self, pairs: Iterable[tuple[Any, Any]], check: bool = True) -> StepFunctor:
        """Normal form of ``⋁ (a ⇒ b)``; raises InconsistentSteps if it does not exist.

        ``check=False`` skips the consistency check at joins of thresholds, for
        pairs known to come from a genuine function.
        """
        dom, cod = self.dom, self.cod
        ps = {(dom.canon(a), cod.canon(b)) for a, b in pairs}
        ps = {(a, b) for a, b in ps if not cod.leq(b, self._cod_bottom)}
        if not ps:
            return self.bottom
        # a pair below another's threshold with a smaller output adds nothing
        ps = [(a, b) for a, b in ps
              if not any((a2, b2) != (a, b) and dom.leq(a2, a) and cod.leq(b, b2) for a2, b2 in ps)]
        if check:
            self._check_consistent(ps)
        value = {}
        for c in {a for a, _ in ps}:
            fired = [b for a, b in ps if dom.leq(a, c)]
            try:
                value[c] = cod.join(fired)
            except NoSupremum:
                raise InconsistentSteps(c, fired) from None
        # every jump point of the function is a threshold; what is reached strictly
        # below c is the join of the outputs of thresholds strictly below c
        essential = []
        for c, v in value.items():
            below = cod.try_join([b for a, b in ps if dom.leq(a, c) and not dom.leq(c, a)])
            if below is None or not cod.leq(v, below):
                essential.append((c, v))
        return StepFunctor(tuple(sorted(essential)), self)

    def _check_consistent(self, ps: list[tuple[Any, Any]]) -> None:
        dom, cod = self.dom, self.cod
        critical = set(a for a, _ in ps)
        frontier = list(critical)
        while frontier:
            new = []
            for x in frontier:
                for y in list(critical):
                    j = dom.try_join((x, y))
                    if j is not None and j not in critical:
                        critical.add(j)
                        new.append(j)
            frontier = new
        for c in critical:
            fired = [b for a, b in ps if dom.leq(a, c)]
            if cod.try_join(fired) is None:
                raise InconsistentSteps(c, fired)

    def step(self, a, b) -> StepFunctor:
        return self.make([(a, b)])

    def canon(self, f: StepFunctor) -> StepFunctor:
        return f if f.space is self else self.make(f.pairs)

    # -- order structure -----------------------------------------------

    def apply(self, f: StepFunctor, x):
        key = (f.pairs, x)
        out = self._apply.get(key)
        if out is None:
            fired = [b for a, b in f.pairs if self.dom.leq(a, x)]
            try:
                out = self.cod.join(fired)
            except NoSupremum:
                raise InconsistentSteps(x, fired) from None
            self._apply[key] = out
        return out

    def leq(self, f: StepFunctor, g: StepFunctor) -> bool:
        key = (f.pairs, g.pairs)
        out = self._leq.get(key)
        if out is None:
            out = all(self.cod.leq(b, self.apply(g, a)) for a, b in f.pairs)
            self._leq[key] = out
        return out

    def equiv(self, f: StepFunctor, g: StepFunctor) -> bool:
        return self.leq(f, g) and self.leq(g, f)

    def join(self, fs: Iterable[StepFunctor]) -> StepFunctor:
        fs = tuple(fs)
        key = frozenset(f.pairs for f in fs)
        out = self._join.get(key)
        if out is None:
            if len(key) == 1:
                out = fs[0] if fs[0].space is self else self.make(fs[0].pairs)
            else:
                try:
                    out = self.make(p for f in fs for p in f.pairs)
                except InconsistentSteps as exc:
                    out = NoSupremum(fs, f"unbounded at {exc.point}")
            self._join[key] = out
        if isinstance(out, NoSupremum):
            raise NoSupremum(out.members, out.reason)
        return out

    def try_join(self, fs: Iterable[StepFunctor]) -> StepFunctor | None:
        try:
            return self.join(fs)
        except NoSupremum:
            return None


@functools.lru_cache(maxsize=None)
def function_space(dom, cod) -> FunctionSpace:
    return FunctionSpace(dom, cod)


def step(a, b, K, K2=None) -> StepFunctor:
    """The step functor ``(a ⇒ b)``: ``b`` above ``a``, bottom elsewhere."""
    space = K if isinstance(K, FunctionSpace) else function_space(K, K2 if K2 is not None else K)
    return space.step(a, b)


def apply(f: StepFunctor, x):
    return f.space.apply(f, x)


def join_steps(f: StepFunctor, g: StepFunctor) -> StepFunctor:
    if f.space is not g.space:
        raise DomainError("step functors live in different function spaces")
    return f.space.make(f.pairs + g.pairs)


def pointwise_leq(f: StepFunctor, g: StepFunctor) -> bool:
    return f.space.leq(f, g)


def sup_directed_functors(F: Iterable[StepFunctor]) -> StepFunctor:
    F = list(F)
    if not F:
        raise DomainError("empty family is not directed")
    space = F[0].space
    if not all(any(space.leq(f, h) and space.leq(g, h) for h in F) for f in F for g in F):
        raise DomainError("family is not directed under the pointwise order")
    return space.join(F)


def edge_image(f: StepFunctor, x, y):
    """Image of the order witness ``x ≾ y``: the canonical witness ``f(x) ≾ f(y)``."""
    D, C = f.space.dom, f.space.cod
    if not D.leq(x, y):
        raise DomainError(f"{x} is not below {y}")
    fx, fy = apply(f, x), apply(f, y)
    if isinstance(C, WeakDomain):
        return C.witness(fx, fy)
    return (fx, fy)


# -- tables: the brute-force oracle side -------------------------------------

@dataclass
class FunctionTable:
    """An explicit map on a finite list of domain points."""

    domain: Any
    codomain: Any
    mapping: dict

    def __call__(self, x):
        return self.mapping[x]

    @property
    def points(self) -> list:
        return list(self.mapping)

    def monotone_witness(self):
        D, C = self.domain, self.codomain
        for x, y in itertools.product(self.mapping, repeat=2):
            if D.leq(x, y) and not C.leq(self.mapping[x], self.mapping[y]):
                return x, y
        return None

    def is_monotone(self) -> bool:
        return self.monotone_witness() is None

    def require_monotone(self) -> None:
        w = self.monotone_witness()
        if w is not None:
            x, y = w
            raise NotMonotone(x, y, self.mapping[x], self.mapping[y])

    def edge_action(self, x, y):
        self.require_monotone()
        fx, fy = self.mapping[x], self.mapping[y]
        if not self.domain.leq(x, y):
            raise DomainError(f"{x} is not below {y}")
        return self.codomain.witness(fx, fy) if isinstance(self.codomain, WeakDomain) else (fx, fy)


def domain_points(D) -> list:
    if isinstance(D, WeakDomain):
        return D.elements()
    if hasattr(D, "points"):
        return list(D.points)
    raise DomainError(f"{D!r} has no finite point list")


def tabulate(f: StepFunctor | Callable, domain=None, codomain=None,
             points: Sequence | None = None) -> FunctionTable:
    if isinstance(f, StepFunctor):
        domain, codomain = f.space.dom, f.space.cod
    pts = list(points) if points is not None else domain_points(domain)
    return FunctionTable(domain, codomain, {x: f(x) for x in pts})


def to_steps(t: FunctionTable, space: FunctionSpace | None = None) -> StepFunctor:
    """Step normal form of ``⋁ (e ⇒ t(e))`` over the table's points."""
    t.require_monotone()
    space = space or function_space(t.domain, t.codomain)
    return space.make(t.mapping.items())


def continuity_witness(t: FunctionTable):
    """A directed X with t(⋁X) ≄ ⋁t(X), or None; the brute-force continuity oracle."""
    C = t.codomain
    for X, s in _directed_subsets(t.domain, tuple(t.points)):
        if s not in t.mapping:
            continue
        image = C.try_join([t(x) for x in X])
        if image is None or not (C.leq(image, t(s)) and C.leq(t(s), image)):
            return X
    return None


@functools.lru_cache(maxsize=256)
def _directed_subsets(D, pts: tuple) -> list[tuple[tuple, Any]]:
    # every nonempty directed subset of the points with its supremum
    if len(pts) > 16:
        raise DomainError(f"{len(pts)} points is too many for subset enumeration")
    out = []
    for r in range(1, len(pts) + 1):
        for X in itertools.combinations(pts, r):
            if is_directed(D, X):
                s = D.try_join(X)
                if s is not None:
                    out.append((X, s))
    return out


def continuity_oracle(t: FunctionTable) -> bool:
    return continuity_witness(t) is None


def compose_tables(g: FunctionTable, f: FunctionTable) -> FunctionTable:
    return FunctionTable(f.domain, g.codomain, {x: g(f(x)) for x in f.points})


# -- currying on finite product domains ----------------------------------------

def curry(t: FunctionTable, K: WeakDomain, L: WeakDomain) -> dict[str, StepFunctor]:
    """``x ↦ λy. t(x, y)`` for a table on ``product_domain(K, L)``."""
    P = t.domain
    space = function_space(L, t.codomain)
    out = {}
    for x in K.elements():
        slice_ = {}
        for v in P.elements():
            vx, vy = P.carrier.origin[v]
            if vx.name == x:
                slice_[vy.name] = t(v)
        out[x] = to_steps(FunctionTable(L, t.codomain, slice_), space)
    return out


def uncurry(family: Mapping[str, StepFunctor], P: WeakDomain) -> FunctionTable:
    some = next(iter(family.values()))
    mapping = {}
    for v in P.elements():
        x, y = (s.name for s in P.carrier.origin[v])
        mapping[v] = apply(family[x], y)
    return FunctionTable(P, some.space.cod, mapping)


# -- finite materialisation ----------------------------------------------------

def monotone_maps(K: WeakDomain, L: WeakDomain) -> list[FunctionTable]:
    """Every monotone map between the element sets, by backtracking."""
    xs = sorted(K.elements(), key=lambda x: sum(K.leq(y, x) for y in K.elements()))
    ys = L.elements()
    out: list[FunctionTable] = []
    chosen: dict = {}

    def extend(i: int) -> None:
        if i == len(xs):
            out.append(FunctionTable(K, L, dict(chosen)))
            return
        x = xs[i]
        below = [chosen[y] for y in xs[:i] if K.leq(y, x)]
        above = [chosen[y] for y in xs[:i] if K.leq(x, y)]
        for v in ys:
            if all(L.leq(b, v) for b in below) and all(L.leq(v, a) for a in above):
                chosen[x] = v
                extend(i + 1)
        chosen.pop(x, None)

    extend(0)
    return out


def function_space_domain(K: WeakDomain, L: WeakDomain) -> tuple[WeakDomain, dict[str, StepFunctor]]:
    """All continuous maps ``K → L`` as an explicit finite weak domain."""
    space = function_space(K, L)
    fs = sorted({to_steps(t, space) for t in monotone_maps(K, L)})
    names = {str(f): f for f in fs}
    rels = [(str(f), str(g)) for f in fs for g in fs if f != g and space.leq(f, g)]
    D = WeakDomain(discrete_carrier(list(names)), rels, str(space.bottom))
    return D, names

