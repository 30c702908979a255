import itertools
from functools import lru_cache

import pytest
from hypothesis import given, settings, strategies as st

from kinfty.hpo import DomainError, build_N_plus
from kinfty.lambda_ import (App, Interpreter, Lam, NoRedex, TermSyntaxError, UnboundVariable,
                            Var, Verdict, alpha_equivalent, beta_step, de_bruijn,
                            equivalent_conversions, eta_step, free_vars, identity_step,
                            interpret_conversion, parse, parse_env, redexes, size,
                            substitute)
from kinfty.tower import Tower, TowerConfig, TruncationOverflow


@lru_cache(maxsize=None)
def terms_of_size(n, scope=()):
    """Every term of exactly n nodes over free x, y and binders u, v."""
    if n == 1:
        return tuple(Var(v) for v in ("x", "y") + scope)
    out = []
    for k in range(1, n - 1):
        for f in terms_of_size(k, scope):
            for a in terms_of_size(n - 1 - k, scope):
                out.append(App(f, a))
    for b in ("u", "v"):
        if b not in scope:
            out.extend(Lam(b, t) for t in terms_of_size(n - 1, scope + (b,)))
    return tuple(out)


def corpus(max_size):
    return [t for n in range(1, max_size + 1) for t in terms_of_size(n)]


def terms():
    leaf = st.sampled_from(["x", "y", "z", "foo", "u1"]).map(Var)
    return st.recursive(
        leaf,
        lambda inner: st.one_of(
            st.builds(App, inner, inner),
            st.builds(Lam, st.sampled_from(["x", "y", "z", "w"]), inner)),
        max_leaves=8)


@pytest.fixture(scope="module")
def interp(tower):
    return Interpreter(tower)


@pytest.fixture(scope="module")
def env(tower):
    return {"x": tower.embed0("S1.0"), "y": tower.embed0("S0.1")}


# -- syntax -----------------------------------------------------------------------

def test_parse_shapes():
    assert parse("x") == Var("x")
    assert parse("x y z") == App(App(Var("x"), Var("y")), Var("z"))
    assert parse("\\x. x y") == Lam("x", App(Var("x"), Var("y")))
    assert parse("λx.λy. x") == Lam("x", Lam("y", Var("x")))
    assert parse("(\\z. x z) y") == App(Lam("z", App(Var("x"), Var("z"))), Var("y"))
    assert parse("f (g x)") == App(Var("f"), App(Var("g"), Var("x")))


@pytest.mark.parametrize("src, column", [
    ("", 1),
    ("x )", 3),
    ("(x", 3),
    ("\\. x", 2),
    ("\\x x", 4),
    ("x $ y", 3),
])
def test_parse_errors_report_column(src, column):
    with pytest.raises(TermSyntaxError) as info:
        parse(src)
    assert info.value.pos + 1 == column
    assert f"column {column}" in str(info.value)


@given(terms())
def test_render_parse_round_trip(t):
    assert parse(str(t)) == t


@given(terms())
def test_de_bruijn_ignores_bound_names(t):
    renamed = substitute(t, "zz_unused", Var("q"))
    assert alpha_equivalent(t, renamed)
    assert free_vars(t) == free_vars(renamed)


def test_substitution_avoids_capture():
    t = substitute(parse("\\y. x y"), "x", parse("y"))
    assert isinstance(t, Lam) and t.binder != "y"
    assert alpha_equivalent(t, parse("\\w. y w"))
    assert free_vars(t) == {"y"}
    # a bound occurrence is left alone
    assert substitute(parse("\\x. x"), "x", Var("y")) == parse("\\x. x")


def test_size_and_free_vars():
    t = parse("(\\z. x z) y")
    assert size(t) == 6
    assert free_vars(t) == {"x", "y"}
    assert free_vars(parse("\\x. \\y. x y")) == frozenset()


def test_conversion_steps():
    t = parse("(\\z. x z) y")
    assert redexes(t) == [("beta", ()), ("eta", (0,))]
    assert beta_step(t).target == parse("x y")
    assert eta_step(t, (0,)).target == parse("x y")
    with pytest.raises(NoRedex):
        beta_step(parse("x y"))
    with pytest.raises(NoRedex):
        eta_step(parse("\\z. z z"))
    with pytest.raises(NoRedex):
        beta_step(t, (1, 1))


def test_beta_substitutes_under_binders():
    step = beta_step(parse("(\\x. \\y. x) y"))
    assert alpha_equivalent(step.target, parse("\\w. y"))


# -- interpretation ---------------------------------------------------------------

def test_variables_and_application(tower, interp, env):
    assert interp(parse("x"), env) == env["x"]
    assert interp(parse("x y"), env) == tower.app(env["x"], env["y"])


def test_unbound_variable(interp, env):
    with pytest.raises(UnboundVariable) as info:
        interp(parse("x q"), env)
    assert info.value.names == ["q"]
    assert isinstance(info.value, DomainError)


def test_constant_abstraction_is_the_embedded_point(tower, interp, env):
    assert tower.equiv(interp(parse("\\u. x"), env), env["x"])


def test_identity_needs_more_levels(interp, env):
    # λu.u is not compact in K∞, so every finite truncation gives up
    with pytest.raises(TruncationOverflow):
        interp(parse("\\u. u"), env)


def test_eta_expansion_of_a_point(tower, interp, env):
    for name in ("x", "y"):
        expanded = interp(parse(f"\\u. {name} u"), env)
        assert tower.equiv(expanded, tower.h_map(tower.k_map(env[name])))


def test_alpha_equivalent_terms_share_values(interp, env):
    pairs = [("\\u. x u", "\\v. x v"), ("\\u. \\v. v", "\\v. \\u. u"),
             ("(\\u. u y) x", "(\\v. v y) x")]
    for s, t in pairs:
        a, b = parse(s), parse(t)
        assert de_bruijn(a) == de_bruijn(b)
        try:
            va = interp(a, env)
        except TruncationOverflow:
            with pytest.raises(TruncationOverflow):
                interp(b, env)
            continue
        assert va == interp(b, env)


def test_compositional_in_subterms(tower, interp, env):
    # replacing a subterm by one with the same value keeps the value
    same = parse("\\u. x")
    assert tower.equiv(interp(same, env), env["x"])
    for ctx in ["y HOLE", "HOLE y", "HOLE HOLE", "\\v. HOLE v"]:
        with_term = parse(ctx.replace("HOLE", f"({same})"))
        with_var = parse(ctx.replace("HOLE", "x"))
        assert tower.equiv(interp(with_term, env), interp(with_var, env))


def test_corpus_has_expected_counts():
    # independent count: terms with n nodes, free names from {x, y}, binders u, v
    assert [len(terms_of_size(n)) for n in range(1, 8)] == [2, 6, 12, 42, 164, 452, 2184]


def test_substitution_lemma_on_corpus(tower):
    interp = Interpreter(tower)
    replacements = [parse(s) for s in ["y", "x y", "\\u. y", "\\u. x u"]]
    envs = [{"x": tower.embed0(a), "y": tower.embed0(b)}
            for a, b in [("S1.0", "S0.1"), ("S0.1", "S1.0")]]

    def value(t, env):
        try:
            return interp(t, env)
        except TruncationOverflow:
            return None

    checked = skipped = 0
    for M in corpus(6):
        if "x" not in free_vars(M):
            continue
        for N, env in itertools.product(replacements, envs):
            n = value(N, env)
            left = value(substitute(M, "x", N), env)
            right = None if n is None else value(M, {**env, "x": n})
            if left is None and right is None:
                skipped += 1
                continue
            assert left is not None and right is not None, (str(M), str(N))
            assert tower.equiv(left, right), (str(M), str(N))
            checked += 1
    assert checked > 2000 and checked > skipped


def test_beta_edges_join_the_two_values(tower):
    interp = Interpreter(tower)
    env = {"x": tower.embed0("S1.0"), "y": tower.embed0("S1.1")}
    for src in ["(\\z. x z) y", "(\\u. x) y", "(\\u. y u) x", "(\\u. \\v. x v) y y",
                "(\\u. x u u) y", "(\\u. \\v. u) x y", "x ((\\u. y) x)"]:
        t = parse(src)
        for kind, pos in redexes(t):
            if kind != "beta":
                continue
            step = beta_step(t, pos)
            edge = interpret_conversion(step, env, interp=interp)
            assert tower.equiv(edge.source, interp(step.source, env))
            assert tower.equiv(edge.target, interp(step.target, env))


def test_identity_conversion_is_degenerate(tower41):
    env = parse_env("example41", tower41)
    edge = interpret_conversion(identity_step(parse("x y")), env, tower=tower41)
    assert edge.path is not None and edge.path.word == ()
    cmp = equivalent_conversions(tower41, edge, edge)
    assert cmp.verdict is Verdict.EQUIVALENT and not any(cmp.vector)


def test_conversion_comparison_is_reflexive_and_symmetric(tower41):
    env = parse_env("example41", tower41)
    interp = Interpreter(tower41)
    t = parse("(\\z. x z) y")
    beta = interpret_conversion(beta_step(t), env, interp=interp)
    eta = interpret_conversion(eta_step(t, (0,)), env, interp=interp)
    for e in (beta, eta):
        assert equivalent_conversions(tower41, e, e).verdict is Verdict.EQUIVALENT
    forward = equivalent_conversions(tower41, beta, eta)
    backward = equivalent_conversions(tower41, eta, beta)
    assert forward.verdict is backward.verdict is Verdict.NON_EQUIVALENT
    assert tuple(-v for v in forward.vector) == backward.vector or forward.vector == backward.vector


def test_edges_without_common_ends_are_rejected(tower41):
    env = parse_env("example41", tower41)
    e1 = interpret_conversion(identity_step(parse("x")), env, tower=tower41)
    e2 = interpret_conversion(identity_step(parse("\\u. y")), env, tower=tower41)
    with pytest.raises(DomainError):
        equivalent_conversions(tower41, e1, e2)


def test_parse_env(tower):
    env = parse_env("x=S1.0, y = bot", tower)
    assert env == {"x": tower.embed0("S1.0"), "y": tower.bottom}
    with pytest.raises(ValueError):
        parse_env("x", tower)
    with pytest.raises(ValueError):
        parse_env("x=nowhere", tower)


@lru_cache(maxsize=1)
def _shared_tower():
    return Tower(TowerConfig(K0=build_N_plus(1), N=3))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(corpus(5)))
def test_swapping_free_names_and_values_commutes(t):
    T = _shared_tower()
    interp = Interpreter(T)
    env = {"x": T.embed0("S1.1"), "y": T.embed0("bot")}
    swapped = substitute(substitute(substitute(t, "x", Var("t0")), "y", Var("x")), "t0", Var("y"))
    try:
        v = interp(t, env)
    except TruncationOverflow:
        with pytest.raises(TruncationOverflow):
            interp(swapped, {"x": env["y"], "y": env["x"]})
        return
    assert v == interp(swapped, {"x": env["y"], "y": env["x"]})
