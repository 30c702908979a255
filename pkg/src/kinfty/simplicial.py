"""Finitely presented simplicial sets.

A :class:`FiniteComplex` stores only nondegenerate simplexes.  Degenerate
simplexes are handled symbolically as :class:`Simplex` values carrying a set of
degeneracy indices in Eilenberg-Zilber normal form, so ``Simplex("01", (0,))``
is ``s0(01)``, the 2-simplex with vertex sequence ``(0, 0, 1)``.
"""

from __future__ import annotations

import itertools
import os
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

DEFAULT_DIM_BOUND = 3
DEFAULT_MAX_INSTANCES = 10**6


class ComplexError(ValueError):
    """Malformed complex data or an operation outside the dimension budget."""


class KanCheckAborted(RuntimeError):
    def __init__(self, estimate: int, cap: int):
        super().__init__(
            f"horn instance count exceeds cap {cap} (estimate {estimate})")
        self.estimate = estimate
        self.cap = cap


class Simplex(NamedTuple):
    """A simplex ``s_I(name)``; ``degen`` is the ascending index set ``I``."""

    name: str
    degen: tuple[int, ...] = ()

    @property
    def is_degenerate(self) -> bool:
        return bool(self.degen)

    def __str__(self) -> str:
        out = self.name
        for j in self.degen:
            out = f"s{j}({out})"
        return out


def _surjection(degen: Sequence[int], n: int) -> list[int]:
    # monotone surjection [n] -> [n - |degen|] encoded by its value list
    return [j - sum(1 for i in degen if i < j) for j in range(n + 1)]


def _collapses(values: Sequence) -> tuple[int, ...]:
    return tuple(k for k in range(len(values) - 1) if values[k] == values[k + 1])


@dataclass
class FiniteComplex:
    """A dimension-bounded, finitely presented simplicial set."""

    simplexes: dict[int, tuple[str, ...]]
    faces: dict[str, tuple[Simplex, ...]]
    dim_bound: int = DEFAULT_DIM_BOUND
    truncated: bool = False
    origin: dict[str, tuple] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._dim = {}
        for d, names in self.simplexes.items():
            for name in names:
                if name in self._dim:
                    raise ComplexError(f"duplicate simplex name {name!r}")
                self._dim[name] = d
        if self.simplexes and max(self.simplexes) > self.dim_bound:
            raise ComplexError(
                f"simplex of dimension {max(self.simplexes)} exceeds dim_bound {self.dim_bound}")

    # -- basic queries -------------------------------------------------

    @property
    def top_dim(self) -> int:
        dims = [d for d, names in self.simplexes.items() if names]
        return max(dims) if dims else -1

    def nondegenerate(self, n: int) -> tuple[str, ...]:
        return self.simplexes.get(n, ())

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.nondegenerate(0)

    @property
    def edges(self) -> tuple[str, ...]:
        return self.nondegenerate(1)

    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(self.nondegenerate(d)) for d in range(self.top_dim + 1))

    def __contains__(self, name: str) -> bool:
        return name in self._dim

    def dim_of(self, s: Simplex | str) -> int:
        if isinstance(s, str):
            s = Simplex(s)
        try:
            return self._dim[s.name] + len(s.degen)
        except KeyError:
            raise ComplexError(f"unknown simplex {s.name!r}") from None

    # -- face and degeneracy maps ---------------------------------------

    def degenerate(self, s: Simplex, j: int) -> Simplex:
        n = self.dim_of(s)
        if not 0 <= j <= n:
            raise ComplexError(f"s{j} undefined on a {n}-simplex")
        alpha = _surjection(s.degen, n)
        return Simplex(s.name, _collapses(alpha[:j + 1] + alpha[j:]))

    def face(self, s: Simplex | str, i: int) -> Simplex:
        if isinstance(s, str):
            s = Simplex(s)
        n = self.dim_of(s)
        if n == 0 or not 0 <= i <= n:
            raise ComplexError(f"d{i} undefined on {s} of dimension {n}")
        alpha = _surjection(s.degen, n)
        beta = alpha[:i] + alpha[i + 1:]
        if alpha[i] in beta:
            return Simplex(s.name, _collapses(beta))
        v = alpha[i]
        out = self.faces[s.name][v]
        for k in _collapses([b if b < v else b - 1 for b in beta]):
            out = self.degenerate(out, k)
        return out

    def vertex_sequence(self, s: Simplex | str) -> tuple[str, ...]:
        if isinstance(s, str):
            s = Simplex(s)
        n = self.dim_of(s)
        out = []
        for k in range(n + 1):
            t = s
            for _ in range(n - k):
                t = self.face(t, self.dim_of(t))
            for _ in range(k):
                t = self.face(t, 0)
            out.append(t.name)
        return tuple(out)

    def source(self, edge: str) -> str:
        return self.face(edge, 1).name

    def target(self, edge: str) -> str:
        return self.face(edge, 0).name

    def all_simplexes(self, n: int) -> list[Simplex]:
        """Every n-simplex: stored ones first, then degeneracies, both sorted."""
        out = [Simplex(name) for name in sorted(self.nondegenerate(n))]
        degenerate = []
        for p in range(n):
            for name in sorted(self.nondegenerate(p)):
                for idx in itertools.combinations(range(n), n - p):
                    degenerate.append(Simplex(name, idx))
        degenerate.sort(key=lambda s: (s.name, s.degen))
        return out + degenerate

    # -- validation ----------------------------------------------------

    def check(self) -> None:
        """Raise :class:`ComplexError` unless faces resolve and d_i d_j = d_{j-1} d_i."""
        for d, names in self.simplexes.items():
            for name in names:
                fs = self.faces.get(name, ())
                if d == 0:
                    if fs:
                        raise ComplexError(f"vertex {name!r} has faces")
                    continue
                if len(fs) != d + 1:
                    raise ComplexError(f"{name!r} needs {d + 1} faces, got {len(fs)}")
                for f in fs:
                    if f.name not in self._dim:
                        raise ComplexError(f"{name!r}: unknown face {f.name!r}")
                    if self.dim_of(f) != d - 1:
                        raise ComplexError(f"{name!r}: face {f} has wrong dimension")
                    if list(f.degen) != sorted(set(f.degen)) or any(
                            j >= self.dim_of(f) for j in f.degen):
                        raise ComplexError(f"{name!r}: malformed degeneracy {f}")
                if d >= 2:
                    for i, j in itertools.combinations(range(d + 1), 2):
                        lhs = self.face(self.face(name, j), i)
                        rhs = self.face(self.face(name, i), j - 1)
                        if lhs != rhs:
                            raise ComplexError(
                                f"{name!r}: d{i}d{j} = {lhs} but d{j - 1}d{i} = {rhs}")

    def identities_hold(self) -> bool:
        try:
            self.check()
        except ComplexError:
            return False
        return True


def _make(simplexes: Mapping[int, Iterable[str]], faces: Mapping[str, Sequence[Simplex]],
          dim_bound: int = DEFAULT_DIM_BOUND, **kw) -> FiniteComplex:
    X = FiniteComplex({d: tuple(names) for d, names in simplexes.items() if names},
                      {k: tuple(v) for k, v in faces.items()},
                      dim_bound=dim_bound, **kw)
    X.check()
    return X


def empty_complex(dim_bound: int = DEFAULT_DIM_BOUND) -> FiniteComplex:
    return FiniteComplex({}, {}, dim_bound=dim_bound)


# -- standard constructions ---------------------------------------------

def _vname(vs: Sequence[int]) -> str:
    if all(v < 10 for v in vs):
        return "".join(map(str, vs))
    return ",".join(map(str, vs))


def _simplex_subcomplex(n: int, keep, dim_bound: int) -> FiniteComplex:
    simplexes: dict[int, list[str]] = {}
    faces: dict[str, list[Simplex]] = {}
    for k in range(n + 1):
        for vs in itertools.combinations(range(n + 1), k + 1):
            if not keep(vs):
                continue
            name = _vname(vs)
            simplexes.setdefault(k, []).append(name)
            faces[name] = [Simplex(_vname(vs[:i] + vs[i + 1:])) for i in range(k + 1)] if k else []
    return _make(simplexes, faces, dim_bound=max(dim_bound, n))


def standard_simplex(n: int, dim_bound: int = DEFAULT_DIM_BOUND) -> FiniteComplex:
    if n < 0:
        raise ComplexError("n must be >= 0")
    return _simplex_subcomplex(n, lambda vs: True, dim_bound)


def boundary_complex(n: int, dim_bound: int = DEFAULT_DIM_BOUND) -> FiniteComplex:
    if n < 1:
        raise ComplexError("boundary of a simplex needs n >= 1")
    return _simplex_subcomplex(n, lambda vs: len(vs) <= n, dim_bound)


def horn_complex(n: int, i: int, dim_bound: int = DEFAULT_DIM_BOUND) -> FiniteComplex:
    if n < 1 or not 0 <= i <= n:
        raise ComplexError(f"no horn Λ^{n}_{i}")
    missing = tuple(v for v in range(n + 1) if v != i)
    return _simplex_subcomplex(n, lambda vs: len(vs) <= n and vs != missing, dim_bound)


def disjoint_union(parts: Sequence[tuple[str, FiniteComplex]],
                   dim_bound: int | None = None) -> FiniteComplex:
    """Union of complexes with names prefixed ``f"{prefix}."``."""
    simplexes: dict[int, list[str]] = {}
    faces: dict[str, list[Simplex]] = {}
    for prefix, X in parts:
        for d, names in X.simplexes.items():
            for name in names:
                new = f"{prefix}.{name}"
                simplexes.setdefault(d, []).append(new)
                faces[new] = [Simplex(f"{prefix}.{f.name}", f.degen) for f in X.faces.get(name, ())]
    bound = dim_bound if dim_bound is not None else max(
        [X.dim_bound for _, X in parts], default=DEFAULT_DIM_BOUND)
    return _make(simplexes, faces, dim_bound=bound)


# -- products and joins -------------------------------------------------

def _pair_name(x: Simplex, y: Simplex) -> str:
    return f"({x},{y})"


def _normalize_pair(X: FiniteComplex, Y: FiniteComplex, x: Simplex, y: Simplex):
    """Split a pair of equal-dimension simplexes into (nondegenerate pair, common degeneracy)."""
    n = X.dim_of(x)
    seq = list(zip(_surjection(x.degen, n), _surjection(y.degen, n)))
    common = _collapses(seq)
    dedup = [p for k, p in enumerate(seq) if k == 0 or seq[k - 1] != p]
    x2 = Simplex(x.name, _collapses([a for a, _ in dedup]))
    y2 = Simplex(y.name, _collapses([b for _, b in dedup]))
    return x2, y2, common


def product(X: FiniteComplex, Y: FiniteComplex) -> FiniteComplex:
    """Cartesian product, enumerating nondegenerate pairs up to ``min(dim_bound)``.

    A pair ``(s_I x, s_J y)`` is nondegenerate iff ``I`` and ``J`` are disjoint.
    """
    bound = min(X.dim_bound, Y.dim_bound)
    simplexes: dict[int, list[str]] = {}
    faces: dict[str, list[Simplex]] = {}
    origin: dict[str, tuple] = {}
    truncated = False
    for p in range(X.top_dim + 1):
        for q in range(Y.top_dim + 1):
            for k in range(max(p, q), p + q + 1):
                if k > bound:
                    truncated = True
                    continue
                for I in itertools.combinations(range(k), k - p):
                    rest = [j for j in range(k) if j not in I]
                    for J in itertools.combinations(rest, k - q):
                        for xn in X.nondegenerate(p):
                            for yn in Y.nondegenerate(q):
                                x, y = Simplex(xn, I), Simplex(yn, tuple(sorted(J)))
                                name = _pair_name(x, y)
                                simplexes.setdefault(k, []).append(name)
                                origin[name] = (x, y)
    for name, (x, y) in origin.items():
        k = X.dim_of(x)
        fs = []
        for i in range(k + 1) if k else ():
            x2, y2, common = _normalize_pair(X, Y, X.face(x, i), Y.face(y, i))
            fs.append(Simplex(_pair_name(x2, y2), common))
        faces[name] = fs
    for d in simplexes:
        simplexes[d].sort()
    return _make(simplexes, faces, dim_bound=bound, truncated=truncated, origin=origin)


def project(P: FiniteComplex, X: FiniteComplex, s: Simplex, factor: int) -> Simplex:
    """Image of a product simplex under the projection onto factor 0 or 1."""
    out = P.origin[s.name][factor]
    for j in s.degen:
        out = X.degenerate(out, j)
    return out


def join(X: FiniteComplex, Y: FiniteComplex, dim_bound: int | None = None) -> FiniteComplex:
    """The join ``X ⋆ Y``: simplexes of X, of Y, and pairs (x, y) of dimension i+1+j."""
    bound = dim_bound if dim_bound is not None else max(X.dim_bound, Y.dim_bound)
    if X.top_dim + Y.top_dim + 1 > bound:
        raise ComplexError(
            f"join needs dimension {X.top_dim + Y.top_dim + 1} > dim_bound {bound}")
    simplexes: dict[int, list[str]] = {}
    faces: dict[str, list[Simplex]] = {}
    origin: dict[str, tuple] = {}

    def tag(side, s):
        return Simplex(f"{side}{s.name}", s.degen)

    for side, Z in (("L:", X), ("R:", Y)):
        for d, names in Z.simplexes.items():
            for name in names:
                simplexes.setdefault(d, []).append(side + name)
                faces[side + name] = [tag(side, f) for f in Z.faces.get(name, ())]

    def pname(x: str, y: str) -> str:
        return f"L:{x}*R:{y}"

    for i in range(X.top_dim + 1):
        for j in range(Y.top_dim + 1):
            for x in X.nondegenerate(i):
                for y in Y.nondegenerate(j):
                    name = pname(x, y)
                    simplexes.setdefault(i + j + 1, []).append(name)
                    origin[name] = (x, y)
                    fs = []
                    for k in range(i + j + 2):
                        if k <= i:
                            if i == 0:
                                fs.append(Simplex("R:" + y))
                                continue
                            f = X.face(x, k)
                            fs.append(Simplex(pname(f.name, y), f.degen))
                        else:
                            if j == 0:
                                fs.append(Simplex("L:" + x))
                                continue
                            f = Y.face(y, k - i - 1)
                            fs.append(Simplex(pname(x, f.name), tuple(d + i + 1 for d in f.degen)))
                    faces[name] = fs
    return _make(simplexes, faces, dim_bound=bound, origin=origin)


def right_cone(X: FiniteComplex) -> FiniteComplex:
    return join(X, standard_simplex(0), dim_bound=max(X.dim_bound, X.top_dim + 1))


def left_cone(X: FiniteComplex) -> FiniteComplex:
    return join(standard_simplex(0), X, dim_bound=max(X.dim_bound, X.top_dim + 1))


def isomorphism(X: FiniteComplex, Y: FiniteComplex) -> dict[str, str] | None:
    """Find a face-preserving bijection of nondegenerate simplexes, or None."""
    if X.f_vector() != Y.f_vector():
        return None

    def signature(Z, name):
        d = Z.dim_of(name)
        cof = [0] * (Z.top_dim + 2)
        for e in range(d + 1, Z.top_dim + 1):
            for other in Z.nondegenerate(e):
                if name in Z.vertex_sequence(other) or any(
                        f.name == name for f in Z.faces[other]):
                    cof[e] += 1
        return d, tuple(cof)

    order = [n for d in range(X.top_dim + 1) for n in sorted(X.nondegenerate(d))]
    sig_x = {n: signature(X, n) for n in order}
    sig_y = {n: signature(Y, n) for d in range(Y.top_dim + 1) for n in Y.nondegenerate(d)}
    mapping: dict[str, str] = {}
    used: set[str] = set()

    def fits(x: str, y: str) -> bool:
        for fx, fy in zip(X.faces.get(x, ()), Y.faces.get(y, ())):
            if fx.degen != fy.degen or mapping.get(fx.name) != fy.name:
                return False
        return True

    def search(k: int) -> bool:
        if k == len(order):
            return True
        x = order[k]
        for y in sorted(Y.nondegenerate(X.dim_of(x))):
            if y in used or sig_y[y] != sig_x[x] or not fits(x, y):
                continue
            mapping[x] = y
            used.add(y)
            if search(k + 1):
                return True
            del mapping[x]
            used.discard(y)
        return False

    return dict(mapping) if search(0) else None


# -- horns, fillers, Kan checking -----------------------------------------

@dataclass(frozen=True)
class HornInstance:
    """A map Λ^n_i -> X given by the images of the faces d_k, k != i."""

    n: int
    i: int
    assignment: tuple[tuple[int, Simplex], ...]

    @property
    def inner(self) -> bool:
        return 0 < self.i < self.n

    def face_map(self) -> dict[int, Simplex]:
        return dict(self.assignment)

    def __str__(self) -> str:
        parts = ", ".join(f"d{k}={s}" for k, s in self.assignment)
        return f"Λ^{self.n}_{self.i}[{parts}]"


def _compatible(X: FiniteComplex, assign: Mapping[int, Simplex], k: int, s: Simplex) -> bool:
    for j, t in assign.items():
        if j < k and X.face(s, j) != X.face(t, k - 1):
            return False
        if j > k and X.face(t, k) != X.face(s, j - 1):
            return False
    return True


def horn_instance(X: FiniteComplex, n: int, i: int,
                  assignment: Mapping[int, Simplex | str]) -> HornInstance:
    if n < 1 or not 0 <= i <= n:
        raise ComplexError(f"no horn Λ^{n}_{i}")
    faces = {k: Simplex(v) if isinstance(v, str) else v for k, v in assignment.items()}
    if set(faces) != set(range(n + 1)) - {i}:
        raise ComplexError(f"Λ^{n}_{i} needs faces {sorted(set(range(n + 1)) - {i})}")
    done: dict[int, Simplex] = {}
    for k in sorted(faces):
        if X.dim_of(faces[k]) != n - 1:
            raise ComplexError(f"face d{k}={faces[k]} is not an {n - 1}-simplex")
        if not _compatible(X, done, k, faces[k]):
            raise ComplexError(f"faces of Λ^{n}_{i} disagree on shared sub-faces at d{k}")
        done[k] = faces[k]
    return HornInstance(n, i, tuple(sorted(faces.items())))


def find_filler(X: FiniteComplex, h: HornInstance) -> Simplex | None:
    target = h.face_map()
    for cand in X.all_simplexes(h.n):
        if all(X.face(cand, k) == s for k, s in target.items()):
            return cand
    return None


def iter_horn_instances(X: FiniteComplex, n: int, i: int) -> Iterator[HornInstance]:
    cands = X.all_simplexes(n - 1)
    slots = [k for k in range(n + 1) if k != i]
    assign: dict[int, Simplex] = {}

    def rec(pos: int):
        if pos == len(slots):
            yield HornInstance(n, i, tuple(sorted(assign.items())))
            return
        k = slots[pos]
        for s in cands:
            if _compatible(X, assign, k, s):
                assign[k] = s
                yield from rec(pos + 1)
                del assign[k]

    yield from rec(0)


@dataclass
class KanReport:
    passed: bool
    up_to: int
    checked: int
    witness: HornInstance | None = None
    inner_only: bool = False
    label: str = "bounded-dimension check"

    def __str__(self) -> str:
        kind = "inner-horn" if self.inner_only else "Kan"
        verdict = "pass" if self.passed else f"fail, witness {self.witness}"
        return f"{kind} {self.label} up to dim {self.up_to}: {verdict} ({self.checked} horns)"


def max_instances_from_env() -> int:
    raw = os.environ.get("KINFTY_MAX_INSTANCES")
    return int(raw) if raw else DEFAULT_MAX_INSTANCES


def kan_check(X: FiniteComplex, up_to: int, *, inner_only: bool = False,
              max_instances: int | None = None) -> KanReport:
    """Try to fill every horn of dimension <= up_to; inner horns are tried first.

    This certifies nothing about dimensions above ``up_to``.
    """
    if up_to > X.dim_bound:
        raise ComplexError(f"up_to={up_to} exceeds dim_bound {X.dim_bound}")
    cap = max_instances if max_instances is not None else max_instances_from_env()
    estimate = sum(n * len(X.all_simplexes(n - 1)) ** n for n in range(1, up_to + 1))
    checked = 0
    for n in range(1, up_to + 1):
        indices = [i for i in range(1, n)] + ([] if inner_only else sorted({0, n}))
        for i in indices:
            for h in iter_horn_instances(X, n, i):
                checked += 1
                if checked > cap:
                    raise KanCheckAborted(estimate, cap)
                if find_filler(X, h) is None:
                    return KanReport(False, up_to, checked, h, inner_only)
    return KanReport(True, up_to, checked, None, inner_only)


# -- homotopy: π0 and abelianized π1 --------------------------------------

def pi0(X: FiniteComplex) -> list[frozenset[str]]:
    parent = {v: v for v in X.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in X.edges:
        a, b = find(X.source(e)), find(X.target(e))
        if a != b:
            parent[max(a, b)] = min(a, b)
    comps: dict[str, set[str]] = {}
    for v in X.vertices:
        comps.setdefault(find(v), set()).add(v)
    return sorted((frozenset(c) for c in comps.values()), key=lambda c: min(c))


Step = tuple[str, int]


@dataclass(frozen=True)
class PathClass:
    """An edge-path word; each step is (edge name, +1 forward or -1 backward)."""

    basepoint: str
    word: tuple[Step, ...] = ()

    def __str__(self) -> str:
        if not self.word:
            return f"const({self.basepoint})"
        return " · ".join(e if s > 0 else f"{e}⁻¹" for e, s in self.word)


def _step_ends(X: FiniteComplex, step: Step) -> tuple[str, str]:
    e, sign = step
    if X.dim_of(e) != 1:
        raise ComplexError(f"{e!r} is not an edge")
    a, b = X.source(e), X.target(e)
    return (a, b) if sign > 0 else (b, a)


def path_endpoints(X: FiniteComplex, p: PathClass) -> tuple[str, str]:
    here = p.basepoint
    for step in p.word:
        a, b = _step_ends(X, step)
        if a != here:
            raise ComplexError(f"word not composable at {step[0]!r}: expected source {here!r}")
        here = b
    return p.basepoint, here


def path(X: FiniteComplex, basepoint: str, word: Iterable[Step]) -> PathClass:
    p = PathClass(basepoint, tuple((e, 1 if s > 0 else -1) for e, s in word))
    path_endpoints(X, p)
    return p


def compose(X: FiniteComplex, p: PathClass, q: PathClass) -> PathClass:
    if path_endpoints(X, p)[1] != q.basepoint:
        raise ComplexError("paths are not composable")
    return PathClass(p.basepoint, p.word + q.word)


def inverse(X: FiniteComplex, p: PathClass) -> PathClass:
    end = path_endpoints(X, p)[1]
    return PathClass(end, tuple((e, -s) for e, s in reversed(p.word)))


def free_reduce(p: PathClass) -> PathClass:
    out: list[Step] = []
    for e, s in p.word:
        if out and out[-1] == (e, -s):
            out.pop()
        else:
            out.append((e, s))
    return PathClass(p.basepoint, tuple(out))


def shortest_path(X: FiniteComplex, start: str, end: str,
                  avoid: Iterable[str] = ()) -> PathClass | None:
    """Breadth-first edge path, ties broken by (edge name, direction)."""
    banned = set(avoid)
    steps: dict[str, list[tuple[Step, str]]] = {v: [] for v in X.vertices}
    for e in sorted(X.edges):
        if e in banned:
            continue
        a, b = X.source(e), X.target(e)
        steps[a].append(((e, 1), b))
        steps[b].append(((e, -1), a))
    prev: dict[str, tuple[str, Step] | None] = {start: None}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        if v == end:
            break
        for step, w in steps[v]:
            if w not in prev:
                prev[w] = (v, step)
                queue.append(w)
    if end not in prev:
        return None
    word: list[Step] = []
    v = end
    while prev[v] is not None:
        u, step = prev[v]
        word.append(step)
        v = u
    return PathClass(start, tuple(reversed(word)))


def cycle_basis(X: FiniteComplex) -> list[str]:
    """Edges outside a deterministic BFS spanning forest; they index H1 coordinates."""
    tree: set[str] = set()
    seen: set[str] = set()
    incident: dict[str, list[str]] = {v: [] for v in X.vertices}
    for e in sorted(X.edges):
        incident[X.source(e)].append(e)
        incident[X.target(e)].append(e)
    for root in sorted(X.vertices):
        if root in seen:
            continue
        seen.add(root)
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for e in incident[v]:
                w = X.target(e) if X.source(e) == v else X.source(e)
                if w not in seen:
                    seen.add(w)
                    tree.add(e)
                    queue.append(w)
    return [e for e in sorted(X.edges) if e not in tree]


def _relation_rows(X: FiniteComplex, basis: list[str]) -> list[list[int]]:
    index = {e: k for k, e in enumerate(basis)}
    rows = []
    for t in X.nondegenerate(2):
        row = [0] * len(basis)
        for face_index, sign in ((0, 1), (1, -1), (2, 1)):
            f = X.face(t, face_index)
            if not f.is_degenerate and f.name in index:
                row[index[f.name]] += sign
        if any(row):
            rows.append(row)
    return rows


def _echelon(rows: list[list[int]]) -> list[list[int]]:
    # integer row echelon form (Hermite style), pivots positive
    rows = [r[:] for r in rows]
    out: list[list[int]] = []
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        live = [r for r in rows if r[c] != 0]
        rows = [r for r in rows if r[c] == 0]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[c]))
            piv = live[0]
            nxt = [piv]
            for r in live[1:]:
                q = r[c] // piv[c]
                r2 = [a - q * b for a, b in zip(r, piv)]
                (nxt if r2[c] != 0 else rows).append(r2)
            live = nxt
        if live:
            piv = live[0] if live[0][c] > 0 else [-a for a in live[0]]
            out.append(piv)
    return out


def abelian_vector(X: FiniteComplex, word: Iterable[Step]) -> tuple[int, ...]:
    basis = cycle_basis(X)
    index = {e: k for k, e in enumerate(basis)}
    v = [0] * len(basis)
    for e, s in word:
        if e in index:
            v[index[e]] += s
    for row in _echelon(_relation_rows(X, basis)):
        c = next(k for k, a in enumerate(row) if a)
        q = v[c] // row[c]
        v = [a - q * b for a, b in zip(v, row)]
    return tuple(v)


def pi1_class(X: FiniteComplex, loop: PathClass) -> tuple[int, ...]:
    """Abelianized class of a loop, reduced modulo 2-simplex boundaries.

    A nonzero result proves the loop is non-trivial in π1; zero proves nothing.
    """
    start, end = path_endpoints(X, loop)
    if start != end:
        raise ComplexError(f"word runs {start!r} -> {end!r}, not a loop")
    return abelian_vector(X, free_reduce(loop).word)


# -- text format -------------------------------------------------------

_DEGEN = re.compile(r"^s(\d+)\((.*)\)$")


def parse_simplex_term(token: str) -> tuple[str, list[int]]:
    ops: list[int] = []
    while (m := _DEGEN.match(token)):
        ops.append(int(m.group(1)))
        token = m.group(2)
    return token, list(reversed(ops))


class ParseError(ComplexError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def parse_complex(text: str, dim_bound: int = DEFAULT_DIM_BOUND,
                  extra: list[tuple[int, str]] | None = None) -> FiniteComplex:
    """Parse ``dim name : face0 ... faceK`` lines.

    Lines that do not start with an integer are passed to ``extra`` when given,
    and are errors otherwise.
    """
    rows: list[tuple[int, int, str, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split(None, 1)[0]
        if not head.isdigit():
            if extra is None:
                raise ParseError(lineno, f"expected a dimension, got {head!r}")
            extra.append((lineno, line))
            continue
        lhs, _, rhs = line.partition(":")
        parts = lhs.split()
        if len(parts) != 2:
            raise ParseError(lineno, "expected 'dim name : faces'")
        rows.append((lineno, int(parts[0]), parts[1], rhs.split()))
    dims = {name: d for _, d, name, _ in rows}
    simplexes: dict[int, list[str]] = {}
    pending: dict[str, list[tuple[str, list[int]]]] = {}
    for lineno, d, name, toks in rows:
        if len(toks) != (d + 1 if d else 0):
            raise ParseError(lineno, f"{d}-simplex {name!r} needs {d + 1 if d else 0} faces")
        simplexes.setdefault(d, []).append(name)
        pending[name] = []
        for tok in toks:
            base, ops = parse_simplex_term(tok)
            if base not in dims:
                raise ParseError(lineno, f"unknown face {base!r}")
            pending[name].append((base, ops))
    bound = max([dim_bound] + [d for _, d, _, _ in rows])
    X = FiniteComplex({d: tuple(v) for d, v in simplexes.items()},
                      {n: () for n in pending}, dim_bound=bound)
    faces = {}
    for name, items in pending.items():
        out = []
        for base, ops in items:
            s = Simplex(base)
            for j in ops:
                s = X.degenerate(s, j)
            out.append(s)
        faces[name] = tuple(out)
    X = FiniteComplex(X.simplexes, faces, dim_bound=bound)
    X.check()
    return X


def dump_complex(X: FiniteComplex) -> str:
    lines = []
    for d in range(X.top_dim + 1):
        for name in X.nondegenerate(d):
            faces = " ".join(str(f) for f in X.faces.get(name, ()))
            lines.append(f"{d} {name} :" + (f" {faces}" if faces else ""))
    return "\n".join(lines) + "\n"
