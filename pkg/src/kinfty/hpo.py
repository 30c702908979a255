"""Weakly ordered finite complexes (finite homotopy partial orders).

The order is a single bit per pair of vertices: ``x ≾ y`` iff the hom-space is
non-empty.  Elements are compared up to ``≃`` (mutual ``≾``) and every
operation returns the lexicographically least representative of a class.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .simplicial import (DEFAULT_DIM_BOUND, FiniteComplex, ParseError, boundary_complex,
                         disjoint_union, parse_complex, product)


class DomainError(ValueError):
    pass


class NoSupremum(DomainError):
    """A subset has no least upper bound; ``members`` is the offending set."""

    def __init__(self, members: Iterable, reason: str = "no least upper bound"):
        self.members = tuple(members)
        self.reason = reason
        super().__init__(reason)

    def __str__(self) -> str:
        return f"{self.reason} for {{{', '.join(map(str, self.members))}}}"


class WeakDomain:
    """A finite complex with a preorder on its vertices and an optional bottom."""

    def __init__(self, carrier: FiniteComplex, relations: Iterable[tuple[str, str]] = (),
                 bottom: str | None = None, *, bottom_below_all: bool = False):
        self.carrier = carrier
        self.vertices = tuple(sorted(carrier.vertices))
        self._vertex_set = frozenset(self.vertices)
        rels = set(relations)
        if bottom_below_all and bottom is not None:
            rels |= {(bottom, v) for v in self.vertices if v != bottom}
        for x, y in rels:
            for v in (x, y):
                if v not in self.vertices:
                    raise DomainError(f"unknown vertex {v!r}")
        self.generators = frozenset((x, y) for x, y in rels if x != y)
        self._witness = self._close()
        self.bottom = bottom
        if bottom is not None:
            if bottom not in self.vertices:
                raise DomainError(f"unknown bottom {bottom!r}")
            above = [v for v in self.vertices if not self.leq(bottom, v)]
            if above:
                raise DomainError(f"bottom {bottom!r} is not below {above[0]!r}")
        self._canon = {}
        for v in self.vertices:
            self._canon[v] = min(w for w in self.vertices if self.equiv(v, w))
        self._join_cache: dict[frozenset, str] = {}

    def _close(self) -> dict[tuple[str, str], tuple[tuple[str, str], ...]]:
        # BFS gives each related pair one formal composite of generating relations
        succ: dict[str, list[str]] = {v: [] for v in self.vertices}
        for x, y in sorted(self.generators):
            succ[x].append(y)
        witness = {}
        for x in self.vertices:
            prev = {x: None}
            queue = deque([x])
            while queue:
                v = queue.popleft()
                for w in succ[v]:
                    if w not in prev:
                        prev[w] = v
                        queue.append(w)
            for y in prev:
                word = []
                v = y
                while prev[v] is not None:
                    word.append((prev[v], v))
                    v = prev[v]
                witness[(x, y)] = tuple(reversed(word))
        return witness

    # -- order queries ---------------------------------------------------

    def _check(self, *xs: str) -> None:
        for x in xs:
            if x not in self._vertex_set:
                raise DomainError(f"unknown vertex {x!r}")

    def leq(self, x: str, y: str) -> bool:
        self._check(x, y)
        return (x, y) in self._witness

    def equiv(self, x: str, y: str) -> bool:
        return self.leq(x, y) and self.leq(y, x)

    def witness(self, x: str, y: str) -> tuple[tuple[str, str], ...] | None:
        """Generating relations composing to ``x ≾ y``; ``()`` is the identity."""
        self._check(x, y)
        return self._witness.get((x, y))

    def canon(self, x: str) -> str:
        self._check(x)
        return self._canon[x]

    def elements(self) -> list[str]:
        return sorted(set(self._canon.values()))

    def equiv_classes(self) -> list[frozenset[str]]:
        classes: dict[str, set[str]] = {}
        for v, c in self._canon.items():
            classes.setdefault(c, set()).add(v)
        return [frozenset(classes[c]) for c in sorted(classes)]

    def upper_bounds(self, xs: Iterable[str]) -> list[str]:
        xs = list(xs)
        return [z for z in self.vertices if all(self.leq(x, z) for x in xs)]

    def join(self, xs: Iterable[str]) -> str:
        """Least upper bound up to ≃ of a finite set; the empty join is ⊥."""
        key = frozenset(xs)
        if key in self._join_cache:
            out = self._join_cache[key]
            if isinstance(out, NoSupremum):
                raise NoSupremum(out.members, out.reason)
            return out
        if not key:
            if self.bottom is None:
                raise NoSupremum((), "empty join in a domain without bottom")
            return self.canon(self.bottom)
        ubs = self.upper_bounds(key)
        least = [z for z in ubs if all(self.leq(z, w) for w in ubs)]
        if not least:
            exc = NoSupremum(sorted(key), "no least upper bound" if ubs else "no upper bound")
            self._join_cache[key] = exc
            raise exc
        out = self.canon(least[0])
        self._join_cache[key] = out
        return out

    def try_join(self, xs: Iterable[str]) -> str | None:
        try:
            return self.join(xs)
        except NoSupremum:
            return None

    # -- invariants --------------------------------------------------------

    def is_preorder(self) -> bool:
        vs = self.vertices
        if not all(self.leq(v, v) for v in vs):
            return False
        return all(self.leq(x, z) for x in vs for y in vs for z in vs
                   if self.leq(x, y) and self.leq(y, z))

    def hom_discipline_holds(self) -> bool:
        # one witness per related pair, none for unrelated pairs
        return all(((x, y) in self._witness) == (self.witness(x, y) is not None)
                   for x in self.vertices for y in self.vertices)

    def __repr__(self) -> str:
        return f"WeakDomain({len(self.vertices)} vertices, bottom={self.bottom!r})"


def discrete_carrier(names: Sequence[str]) -> FiniteComplex:
    return FiniteComplex({0: tuple(names)} if names else {}, {n: () for n in names})


def poset_domain(names: Sequence[str], relations: Iterable[tuple[str, str]],
                 bottom: str | None = None) -> WeakDomain:
    """A domain on a discrete carrier; handy for chains and counterexamples."""
    return WeakDomain(discrete_carrier(names), relations, bottom)


def chain(n: int) -> WeakDomain:
    names = [f"c{k}" for k in range(n)]
    return poset_domain(names, zip(names, names[1:]), names[0])


def butterfly(with_bottom: bool = True) -> WeakDomain:
    """a, b both below c and d, with c and d incomparable."""
    names = ["a", "b", "c", "d"] + (["bot"] if with_bottom else [])
    rels = [(x, y) for x in "ab" for y in "cd"]
    if with_bottom:
        rels += [("bot", v) for v in "abcd"]
    return poset_domain(names, rels, "bot" if with_bottom else None)


def build_N_plus(max_sphere_dim: int, dim_bound: int = DEFAULT_DIM_BOUND) -> WeakDomain:
    """Spheres S^0..S^d (as boundaries of simplexes) plus a bottom ``bot`` below all."""
    if not 0 <= max_sphere_dim <= dim_bound - 1:
        raise DomainError(f"max_sphere_dim must lie in [0, {dim_bound - 1}]")
    spheres = [(f"S{d}", boundary_complex(d + 1, dim_bound)) for d in range(max_sphere_dim + 1)]
    body = disjoint_union(spheres, dim_bound=dim_bound)
    carrier = FiniteComplex({**body.simplexes, 0: ("bot",) + body.vertices},
                            {**body.faces, "bot": ()}, dim_bound=dim_bound)
    carrier.check()
    return WeakDomain(carrier, (), "bot", bottom_below_all=True)


def product_domain(K: WeakDomain, L: WeakDomain) -> WeakDomain:
    if K.bottom is None or L.bottom is None:
        raise DomainError("product_domain needs pointed factors")
    P = product(K.carrier, L.carrier)
    name = {}
    for v in P.vertices:
        x, y = P.origin[v]
        name[(x.name, y.name)] = v
    rels = [(name[(x, y)], name[(x2, y2)])
            for (x, y) in name for (x2, y2) in name
            if (x, y) != (x2, y2) and K.leq(x, x2) and L.leq(y, y2)]
    return WeakDomain(P, rels, name[(K.bottom, L.bottom)])


def components(P: WeakDomain, v: str) -> tuple[str, str]:
    x, y = P.carrier.origin[v]
    return x.name, y.name


# -- directed sets and suprema -------------------------------------------------

def is_directed(K: WeakDomain, X: Iterable[str]) -> bool:
    X = list(X)
    if not X:
        return False
    return all(any(K.leq(x, z) and K.leq(y, z) for z in X) for x in X for y in X)


@dataclass(frozen=True)
class DirectedSet:
    parent: WeakDomain = field(compare=False)
    members: frozenset[str]

    def __post_init__(self):
        if not is_directed(self.parent, self.members):
            raise DomainError(f"{sorted(self.members)} is not directed")


def sup(K: WeakDomain, X: DirectedSet | Iterable[str]) -> str:
    members = X.members if isinstance(X, DirectedSet) else frozenset(X)
    if not is_directed(K, members):
        raise DomainError(f"{sorted(members)} is not directed")
    return K.join(members)


def directed_subsets(K: WeakDomain, limit: int = 16):
    vs = K.elements()
    if len(vs) > limit:
        raise DomainError(f"{len(vs)} elements is too many for subset enumeration")
    for r in range(1, len(vs) + 1):
        for X in itertools.combinations(vs, r):
            if is_directed(K, X):
                yield X


# -- Scott-domain predicates ---------------------------------------------------

@dataclass
class PropertyReport:
    name: str
    passed: bool
    failures: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed

    def __str__(self) -> str:
        if self.passed:
            return f"{self.name}: pass"
        return f"{self.name}: FAIL ({self.failures[0]})"


def compact_witness(K: WeakDomain, x: str) -> tuple[tuple[str, ...], str] | None:
    """A directed X with x ≾ ⋁X but no member above x, or None if x is compact."""
    for X in directed_subsets(K):
        s = K.try_join(X)
        if s is not None and K.leq(x, s) and not any(K.leq(x, m) for m in X):
            return X, s
    return None


def is_compact(K: WeakDomain, x: str) -> bool:
    return compact_witness(K, x) is None


def is_algebraic(K: WeakDomain) -> PropertyReport:
    report = PropertyReport("algebraic", True)
    if K.bottom is None:
        report.passed = False
        report.failures.append("precondition: no bottom, x↓ may be empty")
        return report
    compacts = [v for v in K.elements() if is_compact(K, v)]
    for x in K.elements():
        below = [c for c in compacts if K.leq(c, x)]
        if not is_directed(K, below):
            report.failures.append(f"{x}↓ = {below} is not directed")
        elif not K.equiv(K.join(below), x):
            report.failures.append(f"⋁({x}↓) = {K.join(below)} differs from {x}")
    report.passed = not report.failures
    return report


def is_bounded_complete(K: WeakDomain) -> PropertyReport:
    report = PropertyReport("bounded complete", True)
    vs = K.elements()
    if len(vs) > 16:
        raise DomainError(f"{len(vs)} elements is too many for subset enumeration")
    for r in range(1, len(vs) + 1):
        for X in itertools.combinations(vs, r):
            if K.upper_bounds(X) and K.try_join(X) is None:
                report.failures.append(f"{{{', '.join(X)}}} is bounded but has no supremum")
                report.passed = False
                return report
    return report


def hom_discipline(K: WeakDomain) -> PropertyReport:
    ok = K.is_preorder() and K.hom_discipline_holds()
    return PropertyReport("hom-discipline", ok, [] if ok else ["relation is not a preorder"])


def is_homotopy_scott_domain(K: WeakDomain) -> list[PropertyReport]:
    return [hom_discipline(K), is_algebraic(K), is_bounded_complete(K)]


# -- text format -------------------------------------------------------------

def parse_domain(text: str, dim_bound: int = DEFAULT_DIM_BOUND) -> WeakDomain:
    """Complex lines plus ``order x <= y`` and ``bottom x`` lines."""
    extra: list[tuple[int, str]] = []
    carrier = parse_complex(text, dim_bound, extra=extra)
    rels, bottom = [], None
    for lineno, line in extra:
        toks = line.split()
        if toks[0] == "order" and len(toks) == 4 and toks[2] == "<=":
            rels.append((toks[1], toks[3]))
        elif toks[0] == "bottom" and len(toks) == 2:
            bottom = toks[1]
        else:
            raise ParseError(lineno, f"unrecognised line {line!r}")
    return WeakDomain(carrier, rels, bottom)


def dump_domain(K: WeakDomain) -> str:
    from .simplicial import dump_complex
    lines = [dump_complex(K.carrier).rstrip("\n")]
    lines += [f"order {x} <= {y}" for x, y in sorted(K.generators)]
    if K.bottom is not None:
        lines.append(f"bottom {K.bottom}")
    return "\n".join(lines) + "\n"

