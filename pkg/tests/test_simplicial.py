import itertools
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from kinfty.simplicial import (ComplexError, KanCheckAborted, ParseError, PathClass, Simplex,
                               boundary_complex, compose, disjoint_union, dump_complex,
                               find_filler, free_reduce, horn_complex, horn_instance, inverse,
                               isomorphism, join, kan_check, left_cone, parse_complex, path,
                               path_endpoints, pi0, pi1_class, product, project, right_cone,
                               shortest_path, standard_simplex)


def chains_in_grid(p, q, k):
    """Strictly increasing chains of length k+1 in [p]x[q]: nondegenerate k-simplexes."""
    pts = list(itertools.product(range(p + 1), range(q + 1)))
    lt = lambda u, v: u != v and u[0] <= v[0] and u[1] <= v[1]
    return sum(1 for c in itertools.combinations(sorted(pts), k + 1)
               if all(lt(c[i], c[i + 1]) for i in range(k)))


@pytest.mark.parametrize("n", range(4))
def test_standard_simplex_counts(n):
    X = standard_simplex(n)
    assert X.f_vector() == tuple(comb(n + 1, k + 1) for k in range(n + 1))
    assert X.identities_hold()


def test_boundary_and_horn_counts():
    assert boundary_complex(3).f_vector() == (4, 6, 4)
    assert horn_complex(2, 1).f_vector() == (3, 2)
    assert horn_complex(3, 0).f_vector() == (4, 6, 3)


@pytest.mark.parametrize("p,q", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_product_matches_grid_chains(p, q):
    P = product(standard_simplex(p), standard_simplex(q))
    top = min(p + q, P.dim_bound)
    assert P.f_vector() == tuple(chains_in_grid(p, q, k) for k in range(top + 1))
    assert bool(P.truncated) == (p + q > P.dim_bound)
    assert P.identities_hold()


def test_projection_is_simplicial():
    X, Y = standard_simplex(1), standard_simplex(2)
    P = product(X, Y)
    for n in range(3):
        for s in P.all_simplexes(n):
            for i in range(n + 1 if n else 0):
                assert project(P, X, P.face(s, i), 0) == X.face(project(P, X, s, 0), i)


def test_join_of_simplexes_is_a_simplex():
    assert isomorphism(join(standard_simplex(1), standard_simplex(1)), standard_simplex(3))
    assert isomorphism(join(standard_simplex(0), standard_simplex(1)), standard_simplex(2))


def test_cones():
    assert isomorphism(right_cone(horn_complex(2, 0)), product(standard_simplex(1), standard_simplex(1)))
    assert right_cone(standard_simplex(0)).f_vector() == (2, 1)
    assert left_cone(boundary_complex(2)).identities_hold()


def test_isomorphism_rejects():
    assert isomorphism(boundary_complex(2), horn_complex(2, 1)) is None


def test_degenerate_faces():
    X = standard_simplex(1)
    s = X.degenerate(Simplex("01"), 0)
    assert X.face(s, 0) == Simplex("01")
    assert X.face(s, 1) == Simplex("01")
    assert X.face(s, 2) == X.degenerate(Simplex("0"), 0)
    assert str(X.degenerate(Simplex("0"), 0)) == "s0(0)"


def test_kan_boundary_fails_at_inner_horn():
    r = kan_check(boundary_complex(2), 2)
    assert not r.passed
    assert (r.witness.n, r.witness.i) == (2, 1)
    assert str(r.witness) == "Λ^2_1[d0=12, d2=01]"


def test_standard_simplex_outer_horn_unfillable():
    # Δ² is a quasi-category but not a Kan complex
    X = standard_simplex(2)
    h = horn_instance(X, 2, 0, {1: Simplex("01"), 2: Simplex("02")})
    assert find_filler(X, h) is None
    assert kan_check(X, 2, inner_only=True).passed
    assert not kan_check(X, 2).passed


def test_point_is_kan():
    assert kan_check(standard_simplex(0), 2).passed


def test_horn_instance_validates():
    X = standard_simplex(2)
    with pytest.raises(ComplexError):
        horn_instance(X, 2, 1, {0: Simplex("01"), 2: Simplex("01")})


def test_kan_cap(monkeypatch):
    monkeypatch.setenv("KINFTY_MAX_INSTANCES", "3")
    with pytest.raises(KanCheckAborted):
        kan_check(standard_simplex(2), 2)


def test_pi0():
    X = disjoint_union([("a", standard_simplex(1)), ("b", boundary_complex(2))])
    assert sorted(len(c) for c in pi0(X)) == [2, 3]


def test_circle_generator():
    X = boundary_complex(2)
    loop = path(X, "0", [("01", 1), ("12", 1), ("02", -1)])
    assert pi1_class(X, loop) == (1,)
    assert pi1_class(X, compose(X, loop, loop)) == (2,)
    assert pi1_class(X, compose(X, loop, inverse(X, loop))) == (0,)


def test_filled_triangle_kills_loop():
    X = standard_simplex(2)
    loop = path(X, "0", [("01", 1), ("12", 1), ("02", -1)])
    assert not any(pi1_class(X, loop))


def test_shortest_path_avoid():
    X = boundary_complex(2)
    assert shortest_path(X, "0", "1").word == (("01", 1),)
    assert shortest_path(X, "1", "0", avoid=["01"]).word == (("12", 1), ("02", -1))
    assert shortest_path(X, "0", "1", avoid=["01", "12"]) is None


def test_path_validation():
    X = boundary_complex(2)
    with pytest.raises(ComplexError):
        path(X, "0", [("12", 1)])
    assert path_endpoints(X, PathClass("2")) == ("2", "2")


def test_free_reduce():
    p = PathClass("0", (("01", 1), ("01", -1), ("02", 1)))
    assert free_reduce(p).word == (("02", 1),)


def test_parse_round_trip():
    for X in (standard_simplex(3), boundary_complex(2), product(standard_simplex(1), standard_simplex(1))):
        Y = parse_complex(dump_complex(X))
        assert Y.f_vector() == X.f_vector()
        assert isomorphism(X, Y)


def test_parse_errors_carry_line():
    with pytest.raises(ParseError) as e:
        parse_complex("0 a :\n1 e : a b\n")
    assert e.value.line == 2
    with pytest.raises(ParseError) as e:
        parse_complex("0 a :\nfoo\n")
    assert e.value.line == 2


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2), st.integers(0, 2))
def test_products_satisfy_identities(p, q):
    assert product(standard_simplex(p), boundary_complex(q + 1) if q else standard_simplex(0)).identities_hold()


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(["01", "12", "02"]), max_size=6), st.integers(-2, 2))
def test_abelian_class_is_winding_number(detour, turns):
    # a loop at 0: wander along edges and back, then go round the circle `turns` times
    X = boundary_complex(2)
    ends = {"01": ("0", "1"), "12": ("1", "2"), "02": ("0", "2")}
    word, here = [], "0"
    for e in detour:
        a, b = ends[e]
        if here == a:
            word.append((e, 1))
            here = b
        elif here == b:
            word.append((e, -1))
            here = a
    back = list(reversed([(e, -s) for e, s in word]))
    turn = [("01", 1), ("12", 1), ("02", -1)] if turns >= 0 else [("02", 1), ("12", -1), ("01", -1)]
    loop = PathClass("0", tuple(word + back + turn * abs(turns)))
    assert pi1_class(X, loop) == (turns,)
