"""The tower K0, K1 = [K0→K0], ... truncated at level N, and its limit K∞.

Level ``n+1`` is a :class:`FunctionSpace` over level ``n``.  The h-projection
pairs ``f_n⁺ = λh. f⁺∘h∘f⁻`` and ``f_n⁻ = λh. f⁻∘h∘f⁺`` are computed exactly
on step normal forms: a pair ``(a, b)`` of ``h`` fires at ``f⁻(y)`` iff ``y``
lies above one of the minimal points ``m`` with ``a ≾ f⁻(m)``, so the composite
is again a finite join of steps whose thresholds are joins of such points.

Elements of K∞ are only represented through compact elements
``(n, x)`` = ``f_{n,∞}(x)``.  Infinite suprema over levels are replaced by
stabilisation: a value is accepted once two consecutive levels agree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .funcspace import FunctionSpace, InconsistentSteps, StepFunctor, monotone_maps, to_steps
from .hpo import DomainError, NoSupremum, WeakDomain, build_N_plus
from .simplicial import PathClass, compose as compose_paths, path_endpoints

EXAMPLE41_REP = {"S1.0": "S1.1", "S1.1": "S1.1"}


class TruncationOverflow(DomainError):
    def __init__(self, needed: int, N: int, what: str = "computation"):
        self.needed = needed
        self.N = N
        super().__init__(f"{what} needs level {needed} but the tower is truncated at N={N}; "
                         "raise N")


@dataclass(frozen=True)
class TowerConfig:
    """``rep`` chooses the edge ``x → x′`` of the initial embedding ``f₀⁺(x) = λy.x′``.

    ``"identity"`` takes ``x′ = x``; ``"example41"`` sends both S¹ vertices 0 and 1
    to 1, and any mapping may be given explicitly (unlisted vertices are fixed).
    """

    K0: WeakDomain = field(default_factory=lambda: build_N_plus(1))
    N: int = 3
    rep: str | Mapping[str, str] = "identity"

    def __post_init__(self):
        if self.N < 1:
            raise DomainError("truncation level N must be >= 1")
        if self.K0.bottom is None:
            raise DomainError("K0 must be pointed")

    def rep_map(self) -> dict[str, str]:
        if self.rep == "identity":
            return {}
        if self.rep == "example41":
            return dict(EXAMPLE41_REP)
        if isinstance(self.rep, str):
            raise DomainError(f"unknown rep {self.rep!r}")
        return dict(self.rep)


@dataclass(frozen=True, order=True)
class TowerElement:
    """The compact element ``f_{level,∞}(base)`` of K∞."""

    level: int
    base: object

    def __str__(self) -> str:
        return f"⟨{self.level}: {self.base}⟩"


@dataclass(frozen=True)
class LawReport:
    n: int
    passed: bool
    checked_retraction: int
    checked_deflation: int
    witness: str | None = None

    def __str__(self) -> str:
        head = (f"level {self.n}: f⁻∘f⁺ ≃ id on {self.checked_retraction} elements, "
                f"f⁺∘f⁻ ≾ id on {self.checked_deflation} elements")
        return head + (": pass" if self.passed else f": FAIL at {self.witness}")


class Tower:
    def __init__(self, config: TowerConfig | None = None, *,
                 minus0: Callable[[StepFunctor], str] | None = None):
        self.config = config or TowerConfig()
        self.N = self.config.N
        K0 = self.config.K0
        self.levels: list = [K0]
        for n in range(1, self.N + 1):
            prev = self.levels[-1]
            self.levels.append(FunctionSpace(prev, prev, name=f"K{n}"))
        self.bottoms = [K0.canon(K0.bottom)] + [L.bottom for L in self.levels[1:]]
        rep = self.config.rep_map()
        for x, y in rep.items():
            if x not in K0.vertices or y not in K0.vertices:
                raise DomainError(f"rep {x!r} -> {y!r} mentions a vertex outside K0")
        self._rep = {v: K0.canon(rep.get(v, v)) for v in K0.elements()}
        self._minus0 = minus0
        self._plus_additive = self._rep_preserves_joins()
        self._plus: dict = {}
        self._minus: dict = {}
        self._up: dict = {}
        self._dn: dict = {}
        self._basis: dict = {}

    @property
    def K0(self) -> WeakDomain:
        return self.levels[0]

    def level(self, n: int):
        if not 0 <= n <= self.N:
            raise TruncationOverflow(n, self.N, "level access")
        return self.levels[n]

    def rep(self, x: str) -> str:
        return self._rep[self.K0.canon(x)]

    # -- the h-projection pairs ------------------------------------------------

    def _rep_preserves_joins(self) -> bool:
        # then every f_n⁺ preserves existing joins, since it is built pointwise from f_0⁺
        K0 = self.K0
        if self.rep(K0.bottom) != self.bottoms[0]:
            return False
        elems = K0.elements()
        for i, x in enumerate(elems):
            for y in elems[i + 1:]:
                j = K0.try_join((x, y))
                if j is not None and self.rep(j) != K0.try_join((self.rep(x), self.rep(y))):
                    return False
        return True

    def plus(self, n: int, x):
        """f_n⁺ : K_n → K_{n+1}."""
        key = (n, x)
        if key in self._plus:
            return self._plus[key]
        target = self.level(n + 1)
        if n == 0:
            out = target.make([(self.bottoms[0], self.rep(x))])
        else:
            src = self.levels[n - 1]
            if self._plus_additive:
                # f⁺∘x∘f⁻ = ⋁ (t ⇒ f⁺(b)) over the minimal points t where (a ⇒ b) fires
                out = target.make([(t, self.plus(n - 1, b)) for a, b in x.pairs
                                   for t in self.dn(n - 1, a)], check=False)
                self._plus[key] = out
                return out
            out = self._conjugate(x.pairs, lambda a: self.dn(n - 1, a),
                                  lambda a, c: src.leq(a, self.minus(n - 1, c)),
                                  lambda b: self.plus(n - 1, b), src, target)
        self._plus[key] = out
        return out

    def minus(self, n: int, y):
        """f_n⁻ : K_{n+1} → K_n."""
        key = (n, y)
        if key in self._minus:
            return self._minus[key]
        target = self.level(n)
        if n == 0:
            out = self._minus0(y) if self._minus0 else self.levels[1].apply(y, self.bottoms[0])
        else:
            src = self.levels[n]
            out = self._conjugate(y.pairs, lambda a: self.up(n - 1, a),
                                  lambda a, c: src.leq(a, self.plus(n - 1, c)),
                                  lambda b: self.minus(n - 1, b), src, target)
        self._minus[key] = out
        return out

    def _conjugate(self, pairs, thresholds, fires, value, source_level, target: FunctionSpace):
        # the composite jumps only at joins of minimal firing points; evaluate it there
        dom = target.dom
        points = set()
        for a, _ in pairs:
            points.update(thresholds(a))
        frontier = list(points)
        while frontier:
            new = []
            for x in frontier:
                for y in list(points):
                    j = dom.try_join((x, y))
                    if j is not None and j not in points:
                        points.add(j)
                        new.append(j)
            frontier = new
        out = [(c, value(source_level.join([b for a, b in pairs if fires(a, c)]))) for c in points]
        return target.make(out, check=False)

    def up(self, n: int, a):
        """Minimal x in K_n with a ≾ f_n⁺(x), for a in K_{n+1}."""
        key = (n, a)
        if key in self._up:
            return self._up[key]
        Ln, Ln1 = self.level(n), self.level(n + 1)
        if not a.pairs:
            out = [self.bottoms[n]]
        elif n == 0:
            out = _minimal(Ln, [x for x in Ln.elements() if Ln1.leq(a, self.plus(0, x))])
        else:
            options = [[(self.minus(n - 1, p), m) for m in self.up(n - 1, q)] for p, q in a.pairs]
            out = _minimal(Ln, _joins_of_steps(Ln, options))
        self._up[key] = out
        return out

    def dn(self, n: int, a):
        """Minimal y in K_{n+1} with a ≾ f_n⁻(y), for a in K_n."""
        key = (n, a)
        if key in self._dn:
            return self._dn[key]
        Ln1 = self.level(n + 1)
        if a == self.bottoms[n]:
            out = [Ln1.bottom]
        elif n == 0 and self._minus0 is None:
            out = [Ln1.make([(self.bottoms[0], a)])]
        elif n == 0:
            out = _minimal(Ln1, [y for y in self.level_elements(1)
                                 if self.K0.leq(a, self.minus(0, y))])
        else:
            options = [[(self.plus(n - 1, p), m) for m in self.dn(n - 1, q)] for p, q in a.pairs]
            out = _minimal(Ln1, _joins_of_steps(Ln1, options))
        self._dn[key] = out
        return out

    def f_nm(self, n: int, m: int, x):
        """Composite of embeddings (n < m) or projections (n > m)."""
        self.level(n), self.level(m)
        while n < m:
            x, n = self.plus(n, x), n + 1
        while n > m:
            x, n = self.minus(n - 1, x), n - 1
        return x

    # -- bases -----------------------------------------------------------------

    def basis(self, n: int) -> list:
        """Step basis: K0's elements; then ⊥ and the single steps (a⇒b), a, b in basis(n-1)."""
        if n in self._basis:
            return self._basis[n]
        L = self.level(n)
        if n == 0:
            out = L.elements()
        else:
            prev = self.basis(n - 1)
            out = [L.bottom] + [L.step(a, b) for a in prev for b in prev
                                if b != self.bottoms[n - 1]]
        self._basis[n] = out
        return out

    def level_elements(self, n: int) -> list:
        """Every compact element of K_n; only feasible for n <= 1 at desk scale."""
        key = ("all", n)
        if key in self._basis:
            return self._basis[key]
        if n == 0:
            out = self.K0.elements()
        elif n == 1:
            out = sorted({to_steps(t, self.levels[1]) for t in monotone_maps(self.K0, self.K0)})
        else:
            raise DomainError(f"K{n} is too large to enumerate; use basis({n})")
        self._basis[key] = out
        return out

    # -- tower elements --------------------------------------------------------

    def element(self, level: int, base) -> TowerElement:
        L = self.level(level)
        return self.normalize(TowerElement(level, L.canon(base)))

    def embed0(self, x: str) -> TowerElement:
        return self.element(0, x)

    @property
    def bottom(self) -> TowerElement:
        return TowerElement(0, self.bottoms[0])

    def normalize(self, t: TowerElement) -> TowerElement:
        n, x = t.level, t.base
        while n > 0:
            y = self.minus(n - 1, x)
            if self.plus(n - 1, y) != x:
                break
            n, x = n - 1, y
        return TowerElement(n, x)

    def component(self, t: TowerElement, m: int):
        return self.f_nm(t.level, m, t.base)

    def components(self, t: TowerElement, upto: int | None = None) -> list:
        return [self.component(t, m) for m in range((self.N if upto is None else upto) + 1)]

    def equiv(self, s: TowerElement, t: TowerElement) -> bool:
        return self.normalize(s) == self.normalize(t)

    def tower_leq(self, s: TowerElement, t: TowerElement) -> bool:
        # componentwise below the common level; above it embeddings are monotone
        top = max(s.level, t.level)
        return all(self.level(m).leq(self.component(s, m), self.component(t, m))
                   for m in range(top + 1))

    def tower_join(self, ts: Sequence[TowerElement]) -> TowerElement:
        top = max((t.level for t in ts), default=0)
        return self.element(top, self.level(top).join([self.component(t, top) for t in ts]))

    # -- application and the equivalences h, k -----------------------------------

    def adequate_app_level(self, x: TowerElement, y: TowerElement) -> int:
        return max(x.level - 1, y.level, 0)

    def app(self, x: TowerElement, y: TowerElement, k: int | None = None) -> TowerElement:
        """``x • y`` computed at level k: ``f_{k,∞}(x_{k+1}(y_k))``."""
        x, y = self.normalize(x), self.normalize(y)
        kmin = self.adequate_app_level(x, y)
        k = kmin if k is None else k
        if k < kmin:
            raise DomainError(f"level {k} is below the adequate level {kmin}")
        if k + 1 > self.N:
            raise TruncationOverflow(k + 1, self.N, "application")
        value = self.levels[k + 1].apply(self.component(x, k + 1), self.component(y, k))
        return self.element(k, value)

    def app_stable(self, x: TowerElement, y: TowerElement) -> bool | None:
        """Whether app agrees at the adequate level k and k+1; None if k+2 > N."""
        k = self.adequate_app_level(self.normalize(x), self.normalize(y))
        if k + 2 > self.N:
            return None
        return self.app(x, y, k) == self.app(x, y, k + 1)

    def h_at(self, F: "TowerFunctor", m: int) -> TowerElement:
        """``f_{m+1,∞}(f_{∞,m} ∘ F ∘ f_{m,∞})``, one term of the supremum defining h."""
        if m + 1 > self.N:
            raise TruncationOverflow(m + 1, self.N, "h")
        return self.element(m + 1, F.approx(m))

    def h_map(self, F: "TowerFunctor") -> TowerElement:
        """h(F), accepted once two consecutive levels agree."""
        m = F.start
        if m + 1 > self.N:
            raise TruncationOverflow(m + 1, self.N, "h")
        g = F.approx(m)
        prev = self.element(m + 1, g)
        while True:
            m += 1
            if m + 1 > self.N:
                raise TruncationOverflow(m + 1, self.N, "h (no stabilisation)")
            # test g_m ≃ f_m⁺(g_{m-1}) on the tabulated pairs before paying for a normal form
            lifted = self.plus(m, g)
            if self._approx_is(F, m, lifted):
                cur = self.element(m + 1, lifted)
                if cur == prev:
                    return cur
            if m + 2 > self.N:
                raise TruncationOverflow(m + 2, self.N, "h (no stabilisation)")
            g = F.approx(m)
            cur = self.element(m + 1, g)
            if cur == prev:
                return cur
            prev = cur

    def _approx_is(self, F: "TowerFunctor", m: int, P) -> bool:
        lazy = F.iter_pairs(m)
        if lazy is None:
            return F.approx(m) == P
        L = self.levels[m + 1]
        # lazily, so a non-stabilising functor is rejected at its first bad point
        if not all(L.cod.leq(v, L.apply(P, e)) for e, v in lazy):
            return False
        pairs = F.approx_pairs(m)
        for p, q in P.pairs:
            j = L.cod.try_join([v for e, v in pairs if L.dom.leq(e, p)])
            if j is None or not L.cod.leq(q, j):
                return False
        return True

    def k_map(self, x: TowerElement) -> "AppFunctor":
        return AppFunctor(self, self.normalize(x))

    def level_functor(self, level: int, f) -> "LevelFunctor":
        return LevelFunctor(self, level, self.level(level).canon(f))

    # -- checks ------------------------------------------------------------------

    def check_projection_laws(self, n: int, lower: Iterable | None = None,
                              upper: Iterable | None = None) -> LawReport:
        """f_n⁻∘f_n⁺ ≃ id on ``lower`` ⊆ K_n and f_n⁺∘f_n⁻ ≾ id on ``upper`` ⊆ K_{n+1}.

        Both default to the step bases of the two levels.
        """
        if n + 1 > self.N:
            raise TruncationOverflow(n + 1, self.N, "projection laws")
        Ln, Ln1 = self.levels[n], self.levels[n + 1]
        lower = self.basis(n) if lower is None else lower
        upper = self.basis(n + 1) if upper is None else upper
        c1 = c2 = 0
        for x in lower:
            c1 += 1
            back = self.minus(n, self.plus(n, x))
            if not Ln.equiv(back, x):
                return LawReport(n, False, c1, c2, f"f⁻f⁺({x}) = {back}")
        for y in upper:
            c2 += 1
            down = self.plus(n, self.minus(n, y))
            if not Ln1.leq(down, y):
                return LawReport(n, False, c1, c2, f"f⁺f⁻({y}) = {down}")
        return LawReport(n, True, c1, c2)

    def check_prop_4_4(self, x: TowerElement) -> bool:
        """x ≃ ⋁_n f_{n,∞}(x_n), compared level by level up to N."""
        comps = self.components(x)
        for k in range(self.N + 1):
            Lk = self.levels[k]
            terms = [self.f_nm(n, k, comps[n]) for n in range(self.N + 1)]
            try:
                s = Lk.join(terms)
            except NoSupremum:
                return False
            if not Lk.equiv(s, comps[k]):
                return False
        return True


def _minimal(L, xs: Iterable) -> list:
    xs = sorted(set(xs))
    return [x for x in xs if not any(y != x and L.leq(y, x) and not L.leq(x, y) for y in xs)]


def _joins_of_steps(L: FunctionSpace, options: list[list[tuple]]) -> list:
    out = []
    for choice in itertools.product(*options):
        try:
            out.append(L.make(choice))
        except InconsistentSteps:
            continue
    return out


# -- functors on K∞ -----------------------------------------------------------

class TowerFunctor:
    """A functor K∞ → K∞ known through its level approximations."""

    tower: Tower
    start: int = 0

    def __call__(self, y: TowerElement) -> TowerElement:
        raise NotImplementedError

    def approx(self, m: int):
        """``f_{∞,m} ∘ F ∘ f_{m,∞}`` as an element of K_{m+1}."""
        raise NotImplementedError

    def approx_pairs(self, m: int) -> list | None:
        """Generating pairs of ``approx(m)`` when it is tabulated, else None."""
        return None

    def iter_pairs(self, m: int) -> Iterator | None:
        """The same pairs produced on demand, else None."""
        return None


class LevelFunctor(TowerFunctor):
    """A level element f ∈ K_{n+1} acting as ``f_{n,∞} ∘ f ∘ f_{∞,n}``."""

    def __init__(self, tower: Tower, level: int, f):
        if level < 1:
            raise DomainError("functors live at level >= 1")
        self.tower, self.level, self.f = tower, level, f
        self.start = level - 1

    def __call__(self, y):
        n = self.level - 1
        T = self.tower
        return T.element(n, T.levels[self.level].apply(self.f, T.component(y, n)))

    def approx(self, m):
        return self.tower.f_nm(self.level, m + 1, self.f)

    def __repr__(self):
        return f"LevelFunctor({self.level}, {self.f})"


class AppFunctor(TowerFunctor):
    """k(x) = λy. x • y."""

    def __init__(self, tower: Tower, x: TowerElement):
        self.tower, self.x = tower, x
        self.start = max(x.level - 1, 0)

    def __call__(self, y):
        return self.tower.app(self.x, y)

    def approx(self, m):
        return self.tower.component(self.x, m + 1)

    def __repr__(self):
        return f"k({self.x})"


class TabulatedFunctor(TowerFunctor):
    """An arbitrary map on tower elements, approximated on the step basis of each level."""

    def __init__(self, tower: Tower, fn: Callable[[TowerElement], TowerElement], start: int = 0):
        self.tower, self.fn, self.start = tower, fn, start
        self._approx: dict = {}

    def __call__(self, y):
        return self.fn(y)

    def iter_pairs(self, m):
        T = self.tower
        T.level(m + 1)
        seen = self._approx.setdefault(("seen", m), {})
        for e in T.basis(m):
            if e not in seen:
                seen[e] = T.component(self.fn(T.element(m, e)), m)
            yield e, seen[e]

    def approx_pairs(self, m):
        key = ("pairs", m)
        if key not in self._approx:
            self._approx[key] = list(self.iter_pairs(m))
        return self._approx[key]

    def approx(self, m):
        if m not in self._approx:
            self._approx[m] = self.tower.level(m + 1).make(self.approx_pairs(m), check=False)
        return self._approx[m]


def functors_agree(F: TowerFunctor, G: TowerFunctor, probes: Iterable[TowerElement],
                   levels: Iterable[int] = ()) -> bool:
    T = F.tower
    if any(T.normalize(F(y)) != T.normalize(G(y)) for y in probes):
        return False
    return all(F.approx(m) == G.approx(m) for m in levels)


# -- edges carrying K0 path classes ----------------------------------------------

@dataclass(frozen=True)
class TowerEdge:
    """An edge of K∞ whose homotopy content is a path of K0 carried through tower maps.

    ``path`` is None when the edge's class is not tracked by this model.
    """

    source: TowerElement
    target: TowerElement
    path: PathClass | None
    transport: tuple[str, ...] = ()

    @property
    def tracked(self) -> bool:
        return self.path is not None


def embed_edge(T: Tower, path: PathClass) -> TowerEdge:
    """f_{0,∞} applied to a K0 edge path."""
    a, b = path_endpoints(T.K0.carrier, path)
    return TowerEdge(T.embed0(a), T.embed0(b), path, ("f_{0,∞}",))


def identity_edge(t: TowerElement) -> TowerEdge:
    return TowerEdge(t, t, None, ("identity",))


def k_edge(T: Tower, e: TowerEdge, y: TowerElement) -> TowerEdge:
    """The component at y of k(e): an edge k(s)(y) → k(t)(y) carrying the same class."""
    return TowerEdge(T.app(e.source, y), T.app(e.target, y), e.path,
                     e.transport + (f"k(-)({y})",))


def compose_edges(T: Tower, e1: TowerEdge, e2: TowerEdge) -> TowerEdge:
    if not T.equiv(e1.target, e2.source):
        raise DomainError("edges are not composable")
    if e1.path is None or e2.path is None:
        path = e1.path if e2.path is None else e2.path
        if e1.path is not None and e2.path is not None:
            path = None
    else:
        path = compose_paths(T.K0.carrier, e1.path, e2.path)
    return TowerEdge(e1.source, e2.target, path, e1.transport + e2.transport)
