"""Untyped λ-terms, their interpretation in K∞, and β/η conversions as edges.

Grammar::

    term := abs | app
    abs  := ("\\" | "λ") ident "." term
    app  := atom { atom }
    atom := ident | "(" term ")"

Positions are tuples over {0, 1}: in an application 0 is the function and 1 the
argument; in an abstraction 0 is the body.
"""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .hpo import DomainError
from .simplicial import PathClass, compose, free_reduce, inverse, path_endpoints, pi1_class, \
    shortest_path
from .tower import TabulatedFunctor, Tower, TowerConfig, TowerEdge, TowerElement, k_edge


class TermSyntaxError(ValueError):
    def __init__(self, pos: int, message: str, src: str = ""):
        self.pos = pos
        self.src = src
        super().__init__(f"at column {pos + 1}: {message}")


class UnboundVariable(DomainError):
    def __init__(self, names):
        self.names = sorted(names)
        super().__init__(f"no value for free variable(s) {', '.join(self.names)}")


class NoRedex(ValueError):
    pass


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"

    def __str__(self):
        f = f"({self.fn})" if isinstance(self.fn, Lam) else str(self.fn)
        a = str(self.arg) if isinstance(self.arg, Var) else f"({self.arg})"
        return f"{f} {a}"


@dataclass(frozen=True)
class Lam:
    binder: str
    body: "Term"

    def __str__(self):
        return f"\\{self.binder}. {self.body}"


Term = Var | App | Lam
Position = tuple[int, ...]


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<ident>[a-zA-Z][a-zA-Z0-9_]*)|(?P<sym>[\\λ.()]))")


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while True:
        while pos < len(src) and src[pos].isspace():
            pos += 1
        if pos == len(src):
            break
        m = _TOKEN.match(src, pos)
        if m is None:
            raise TermSyntaxError(pos, f"unexpected character {src[pos]!r}", src)
        kind = "ident" if m.group("ident") else m.group("sym")
        if kind == "λ":
            kind = "\\"
        out.append((kind, m.group("ident") or m.group("sym"), m.start(m.lastgroup)))
        pos = m.end()
    out.append(("eof", "", len(src)))
    return out


def parse(src: str) -> Term:
    toks = _tokenize(src)
    i = 0

    def peek():
        return toks[i]

    def expect(kind):
        nonlocal i
        k, text, pos = toks[i]
        if k != kind:
            want = "identifier" if kind == "ident" else repr(kind)
            got = "end of input" if k == "eof" else repr(text)
            raise TermSyntaxError(pos, f"expected {want}, found {got}", src)
        i += 1
        return text

    def term():
        if peek()[0] == "\\":
            expect("\\")
            x = expect("ident")
            expect(".")
            return Lam(x, term())
        return app()

    def app():
        t = atom()
        while peek()[0] in ("ident", "("):
            t = App(t, atom())
        return t

    def atom():
        k, text, pos = peek()
        if k == "ident":
            return Var(expect("ident"))
        if k == "(":
            expect("(")
            t = term()
            expect(")")
            return t
        got = "end of input" if k == "eof" else repr(text)
        raise TermSyntaxError(pos, f"expected a term, found {got}", src)

    t = term()
    if peek()[0] != "eof":
        k, text, pos = peek()
        raise TermSyntaxError(pos, f"unexpected {text!r}", src)
    return t


# -- syntax utilities ----------------------------------------------------------

def free_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset([t.name])
    if isinstance(t, App):
        return free_vars(t.fn) | free_vars(t.arg)
    return free_vars(t.body) - {t.binder}


def size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    if isinstance(t, App):
        return 1 + size(t.fn) + size(t.arg)
    return 1 + size(t.body)


def de_bruijn(t: Term, bound: tuple[str, ...] = ()):
    """Nameless form; free variables keep their names."""
    if isinstance(t, Var):
        if t.name in bound:
            return ("bound", bound.index(t.name))
        return ("free", t.name)
    if isinstance(t, App):
        return ("app", de_bruijn(t.fn, bound), de_bruijn(t.arg, bound))
    return ("lam", de_bruijn(t.body, (t.binder,) + bound))


def alpha_equivalent(s: Term, t: Term) -> bool:
    return de_bruijn(s) == de_bruijn(t)


def fresh(avoid: set[str] | frozenset[str], base: str) -> str:
    stem = base.rstrip("0123456789_") or "v"
    for k in itertools.count(1):
        name = f"{stem}{k}"
        if name not in avoid:
            return name
    raise AssertionError


def substitute(t: Term, x: str, s: Term) -> Term:
    """Capture-avoiding t[x := s]."""
    if isinstance(t, Var):
        return s if t.name == x else t
    if isinstance(t, App):
        return App(substitute(t.fn, x, s), substitute(t.arg, x, s))
    if t.binder == x or x not in free_vars(t.body):
        return t
    fs = free_vars(s)
    if t.binder in fs:
        y = fresh(fs | free_vars(t.body) | {x}, t.binder)
        return Lam(y, substitute(substitute(t.body, t.binder, Var(y)), x, s))
    return Lam(t.binder, substitute(t.body, x, s))


def subterm(t: Term, pos: Position) -> Term:
    for k in pos:
        if isinstance(t, App):
            t = t.fn if k == 0 else t.arg
        elif isinstance(t, Lam) and k == 0:
            t = t.body
        else:
            raise NoRedex(f"position {pos} does not exist")
    return t


def replace_at(t: Term, pos: Position, new: Term) -> Term:
    if not pos:
        return new
    k, rest = pos[0], pos[1:]
    if isinstance(t, App):
        return App(replace_at(t.fn, rest, new), t.arg) if k == 0 else \
            App(t.fn, replace_at(t.arg, rest, new))
    if isinstance(t, Lam) and k == 0:
        return Lam(t.binder, replace_at(t.body, rest, new))
    raise NoRedex(f"position {pos} does not exist")


def positions(t: Term, here: Position = ()) -> Iterator[tuple[Position, Term]]:
    yield here, t
    if isinstance(t, App):
        yield from positions(t.fn, here + (0,))
        yield from positions(t.arg, here + (1,))
    elif isinstance(t, Lam):
        yield from positions(t.body, here + (0,))


def is_beta_redex(t: Term) -> bool:
    return isinstance(t, App) and isinstance(t.fn, Lam)


def is_eta_redex(t: Term) -> bool:
    return (isinstance(t, Lam) and isinstance(t.body, App) and t.body.arg == Var(t.binder)
            and t.binder not in free_vars(t.body.fn))


def redexes(t: Term) -> list[tuple[str, Position]]:
    out = []
    for pos, s in positions(t):
        if is_beta_redex(s):
            out.append(("beta", pos))
        if is_eta_redex(s):
            out.append(("eta", pos))
    return out


@dataclass(frozen=True)
class ConversionStep:
    kind: str          # "beta", "eta" or "id"
    position: Position
    source: Term
    target: Term

    def __str__(self):
        return f"{self.source}  →{self.kind}@{list(self.position)}  {self.target}"


def beta_step(t: Term, pos: Position = ()) -> ConversionStep:
    r = subterm(t, pos)
    if not is_beta_redex(r):
        raise NoRedex(f"no β-redex at {list(pos)}: {r}")
    return ConversionStep("beta", pos, t, replace_at(t, pos, substitute(r.fn.body, r.fn.binder, r.arg)))


def eta_step(t: Term, pos: Position = ()) -> ConversionStep:
    r = subterm(t, pos)
    if not is_eta_redex(r):
        raise NoRedex(f"no η-redex at {list(pos)}: {r}")
    return ConversionStep("eta", pos, t, replace_at(t, pos, r.body.fn))


def identity_step(t: Term) -> ConversionStep:
    return ConversionStep("id", (), t, t)


# -- interpretation --------------------------------------------------------------

Environment = Mapping[str, TowerElement]


class Interpreter:
    """⟦x⟧ρ = ρ(x), ⟦MN⟧ρ = ⟦M⟧ρ • ⟦N⟧ρ, ⟦λx.M⟧ρ = h(d ↦ ⟦M⟧ρ[x:=d]).

    Abstractions are tabulated on the step basis of each level until h stabilises.
    """

    def __init__(self, tower: Tower):
        self.tower = tower
        self._memo: dict = {}

    def __call__(self, t: Term, env: Environment) -> TowerElement:
        missing = free_vars(t) - set(env)
        if missing:
            raise UnboundVariable(missing)
        return self._eval(t, {x: self.tower.normalize(v) for x, v in env.items()})

    def _eval(self, t: Term, env: dict) -> TowerElement:
        key = (de_bruijn(t), tuple(sorted((x, env[x]) for x in free_vars(t))))
        out = self._memo.get(key)
        if out is not None:
            return out
        T = self.tower
        if isinstance(t, Var):
            out = env[t.name]
        elif isinstance(t, App):
            out = T.app(self._eval(t.fn, env), self._eval(t.arg, env))
        else:
            out = T.h_map(self.body_functor(t, env))
        self._memo[key] = out
        return out

    def body_functor(self, t: Lam, env: dict) -> TowerFunctor:
        body = t.body
        if (isinstance(body, App) and body.arg == Var(t.binder)
                and t.binder not in free_vars(body.fn)):
            # λv. M v is k(⟦M⟧) by definition of application; use the exact functor
            return self.tower.k_map(self._eval(body.fn, env))
        return TabulatedFunctor(self.tower, lambda d: self._eval(body, {**env, t.binder: d}))


def interpret(t: Term | str, env: Environment, tower: Tower | TowerConfig | None = None) -> TowerElement:
    t = parse(t) if isinstance(t, str) else t
    T = tower if isinstance(tower, Tower) else Tower(tower)
    return Interpreter(T)(t, env)


# -- conversions as edges --------------------------------------------------------

def _vertex(T: Tower, x: TowerElement) -> str:
    return T.component(x, 0)


def _unit_path(T: Tower, x: TowerElement) -> PathClass | None:
    """Class of η_x : x → h(k(x)), the direct K0 path between the level-0 components."""
    return shortest_path(T.K0.carrier, _vertex(T, x), _vertex(T, T.h_map(T.k_map(x))))


def _counit_path(T: Tower, x: TowerElement) -> PathClass | None:
    """Class of the edge h(k(x)) → x underlying ε_{k(x)}.

    It is chosen disjoint from the reverse of the unit path, so the two edges are
    not inverse to each other whenever the carrier allows it.
    """
    X = T.K0.carrier
    direct = _unit_path(T, x)
    if direct is None:
        return None
    start, end = path_endpoints(X, direct)
    if not direct.word:
        return PathClass(start)
    return shortest_path(X, end, start, avoid=[e for e, _ in direct.word])


def interpret_conversion(step: ConversionStep, env: Environment,
                         tower: Tower | None = None, interp: Interpreter | None = None) -> TowerEdge:
    """The edge of K∞ realising one conversion step.

    β runs ⟦source⟧ → ⟦target⟧ and η runs ⟦target⟧ → ⟦source⟧.  The K0 class is
    carried through function-position contexts by k(-)(arg); any other context,
    or a redex whose class cannot be located, yields an untracked edge
    (``path is None``) unless the local edge is degenerate.
    """
    interp = interp or Interpreter(tower or Tower())
    T = interp.tower
    src, tgt = interp(step.source, env), interp(step.target, env)
    if step.kind == "id":
        return TowerEdge(src, src, PathClass(_vertex(T, src)), ("identity",))
    redex = subterm(step.source, step.position)
    ctx_env = dict(env)
    args: list[Term] = []
    t = step.source
    blocked = False
    for k in step.position:
        if isinstance(t, App) and k == 0:
            args.append(t.arg)
            t = t.fn
        else:
            blocked = True
            t = t.arg if isinstance(t, App) else t.body
    if step.kind == "beta":
        body = redex.fn.body
        z = redex.fn.binder
        if isinstance(body, App) and body.arg == Var(z) and z not in free_vars(body.fn) and not blocked:
            x = interp(body.fn, ctx_env)
            local = TowerEdge(T.h_map(T.k_map(x)), x, _counit_path(T, x), ("ε",))
            local = k_edge(T, local, interp(redex.arg, ctx_env))
        else:
            local = None
    elif step.kind == "eta":
        if not blocked:
            x = interp(redex.body.fn, ctx_env)
            local = TowerEdge(x, T.h_map(T.k_map(x)), _unit_path(T, x), ("η",))
        else:
            local = None
    else:
        raise ValueError(f"unknown conversion kind {step.kind!r}")
    if local is None or local.path is None:
        ends = (src, tgt) if step.kind == "beta" else (tgt, src)
        if T.equiv(src, tgt) and local is None:
            return TowerEdge(*ends, PathClass(_vertex(T, src)), ("degenerate",))
        return TowerEdge(*ends, None, ("class-untracked",))
    for a in reversed(args):
        local = k_edge(T, local, interp(a, ctx_env))
    return local


class Verdict(enum.Enum):
    EQUIVALENT = "EQUIVALENT"
    NON_EQUIVALENT = "NON-EQUIVALENT"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class ConversionComparison:
    verdict: Verdict
    loop: PathClass | None = None
    vector: tuple[int, ...] = ()
    reason: str = ""


def equivalent_conversions(tower: Tower, e1: TowerEdge, e2: TowerEdge) -> ConversionComparison:
    """Compare two edges with the same endpoints through the loop they bound."""
    T = tower
    parallel = T.equiv(e1.source, e2.source) and T.equiv(e1.target, e2.target)
    antiparallel = T.equiv(e1.source, e2.target) and T.equiv(e1.target, e2.source)
    if not (parallel or antiparallel):
        raise DomainError("edges do not share endpoints")
    if e1.path is None or e2.path is None:
        return ConversionComparison(Verdict.UNKNOWN, reason="class-untracked edge")
    X = T.K0.carrier
    s1, t1 = path_endpoints(X, e1.path)
    s2, t2 = path_endpoints(X, e2.path)
    if parallel and (s1, t1) == (s2, t2):
        loop = compose(X, e1.path, inverse(X, e2.path))
    elif antiparallel and (s1, t1) == (t2, s2):
        loop = compose(X, e1.path, e2.path)
    else:
        return ConversionComparison(Verdict.UNKNOWN, reason="carried paths do not bound a loop")
    loop = free_reduce(loop)
    vec = pi1_class(X, loop)
    if any(vec):
        return ConversionComparison(Verdict.NON_EQUIVALENT, loop, vec, "nonzero abelianized class")
    if not loop.word:
        return ConversionComparison(Verdict.EQUIVALENT, loop, vec, "loop reduces to the empty word")
    return ConversionComparison(Verdict.UNKNOWN, loop, vec, "abelianized class vanishes")


# -- the worked example ------------------------------------------------------------

EXAMPLE_TERM = "(\\z. x z) y"
EXAMPLE_ENV = {"x": "S1.0", "y": "S1.1"}


@dataclass
class ExampleRun:
    tower: Tower
    a: TowerElement
    b: TowerElement
    hk_a: TowerElement
    value: TowerElement
    beta: TowerEdge
    eta: TowerEdge
    comparison: ConversionComparison
    stable: dict = field(default_factory=dict)


def example_4_1(config: TowerConfig | None = None) -> ExampleRun:
    """β and η on ``(λz.xz)y`` with x ↦ 0, y ↦ 1 of the circle in K0."""
    from .hpo import build_N_plus
    config = config or TowerConfig(K0=build_N_plus(1), N=3, rep="example41")
    T = Tower(config)
    interp = Interpreter(T)
    a, b = T.embed0(EXAMPLE_ENV["x"]), T.embed0(EXAMPLE_ENV["y"])
    env = {"x": a, "y": b}
    t = parse(EXAMPLE_TERM)
    hk_a = T.h_map(T.k_map(a))
    value = interp(t, env)
    beta = interpret_conversion(beta_step(t), env, interp=interp)
    eta = interpret_conversion(eta_step(t, (0,)), env, interp=interp)
    cmp = equivalent_conversions(T, beta, eta)
    stable = {
        "a•b": T.app_stable(a, b),
        "b•b": T.app_stable(b, b),
        "hk(a)•b": T.app_stable(hk_a, b),
        "h(k(a))": _h_stable(T, T.k_map(a)),
    }
    return ExampleRun(T, a, b, hk_a, value, beta, eta, cmp, stable)


def _h_stable(T: Tower, F) -> bool | None:
    m = F.start
    if m + 2 > T.N:
        return None
    return T.h_at(F, m) == T.h_at(F, m + 1)


def parse_env(spec: str, tower: Tower) -> dict[str, TowerElement]:
    """``x=v,y=w`` with K0 vertex names, or the preset ``example41``."""
    if spec.strip() == "example41":
        items = EXAMPLE_ENV.items()
    else:
        items = []
        for part in filter(None, (p.strip() for p in spec.split(","))):
            if "=" not in part:
                raise ValueError(f"environment entry {part!r} is not of the form name=vertex")
            k, v = (s.strip() for s in part.split("=", 1))
            items.append((k, v))
    out = {}
    for k, v in items:
        if v not in tower.K0.vertices:
            raise ValueError(f"{v!r} is not a vertex of K0")
        out[k] = tower.embed0(v)
    return out
