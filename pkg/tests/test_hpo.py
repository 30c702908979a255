import itertools

import pytest
from hypothesis import given, settings, strategies as st

from kinfty.hpo import (DirectedSet, DomainError, NoSupremum, WeakDomain, build_N_plus, butterfly,
                        chain, compact_witness, directed_subsets, discrete_carrier, dump_domain,
                        is_algebraic, is_bounded_complete, is_compact, is_directed,
                        is_homotopy_scott_domain, parse_domain, poset_domain, product_domain, sup)
from kinfty.simplicial import ParseError, pi0


def closure(names, rels):
    """Reflexive-transitive closure by Warshall; independent of WeakDomain."""
    le = {(x, x) for x in names} | set(rels)
    for k in names:
        for i in names:
            for j in names:
                if (i, k) in le and (k, j) in le:
                    le.add((i, j))
    return le


def brute_join(names, le, xs):
    ubs = [z for z in names if all((x, z) in le for x in xs)]
    least = [z for z in ubs if all((z, w) in le for w in ubs)]
    return least


@st.composite
def pointed_posets(draw):
    n = draw(st.integers(1, 5))
    names = [f"v{i}" for i in range(n)]
    rels = [(names[i], names[j]) for i in range(n) for j in range(i + 1, n)
            if draw(st.booleans())]
    rels += [("bot", v) for v in names]
    return ["bot"] + names, rels


@settings(max_examples=60, deadline=None)
@given(pointed_posets())
def test_join_matches_brute_force(data):
    names, rels = data
    K = poset_domain(names, rels, "bot")
    le = closure(names, rels)
    for x, y in itertools.product(names, repeat=2):
        assert K.leq(x, y) == ((x, y) in le)
    for xs in itertools.chain.from_iterable(itertools.combinations(names, r) for r in range(3)):
        least = brute_join(names, le, xs)
        if least:
            assert K.join(xs) in least
        else:
            with pytest.raises(NoSupremum):
                K.join(xs)


@settings(max_examples=40, deadline=None)
@given(pointed_posets())
def test_bounded_completeness_matches_brute_force(data):
    names, rels = data
    K = poset_domain(names, rels, "bot")
    le = closure(names, rels)
    expected = all(brute_join(names, le, xs) or not [z for z in names if all((x, z) in le for x in xs)]
                   for r in range(len(names) + 1) for xs in itertools.combinations(names, r))
    assert is_bounded_complete(K).passed == expected


def test_preorder_with_equivalent_vertices():
    K = poset_domain(["bot", "p", "q", "t"], [("bot", "p"), ("p", "q"), ("q", "p"), ("q", "t")], "bot")
    assert K.equiv("p", "q")
    assert K.canon("q") == K.canon("p") == "p"
    assert K.join(["p", "q"]) == "p"
    assert len(K.elements()) == 3
    assert K.witness("bot", "t") == (("bot", "p"), ("p", "q"), ("q", "t"))


def test_empty_join_is_bottom():
    assert chain(3).join([]) == "c0"
    with pytest.raises(NoSupremum):
        butterfly(with_bottom=False).join([])


def test_unknown_vertex():
    with pytest.raises(DomainError):
        chain(2).leq("c0", "zz")


def test_nplus_structure():
    K = build_N_plus(2)
    assert len(K.vertices) == 1 + 2 + 3 + 4
    assert all(K.leq("bot", v) for v in K.vertices)
    assert not K.leq("S1.0", "S1.1")
    # order relations are not carrier edges: the spheres keep their components
    assert sorted(len(c) for c in pi0(K.carrier)) == [1, 1, 1, 3, 4]
    assert K.try_join(["S1.0", "S1.1"]) is None


@pytest.mark.parametrize("d", [0, 1, 2])
def test_nplus_is_scott(d):
    assert all(is_homotopy_scott_domain(build_N_plus(d)))


def test_butterfly_not_bounded_complete():
    r = is_bounded_complete(butterfly())
    assert not r.passed
    assert "{a, b}" in r.failures[0]
    assert is_algebraic(butterfly()).passed


def test_algebraic_needs_bottom():
    r = is_algebraic(butterfly(with_bottom=False))
    assert not r.passed
    assert "precondition" in r.failures[0]


def test_finite_elements_are_compact():
    K = build_N_plus(1)
    assert all(is_compact(K, x) for x in K.elements())
    assert compact_witness(K, "S1.0") is None


def test_directed_sets():
    K = chain(3)
    assert is_directed(K, ["c0", "c2"])
    assert not is_directed(butterfly(), ["c", "d"])
    assert sup(K, DirectedSet(K, frozenset(["c0", "c1"]))) == "c1"
    with pytest.raises(DomainError):
        DirectedSet(butterfly(), frozenset(["a", "b"]))
    assert sum(1 for _ in directed_subsets(K)) == 7


def test_product_domain_join():
    P = product_domain(chain(2), chain(2))
    assert P.join(["(c0,c1)", "(c1,c0)"]) == "(c1,c1)"
    assert P.bottom == "(c0,c0)"


def test_domain_round_trip():
    for K in (butterfly(), build_N_plus(1), chain(4)):
        L = parse_domain(dump_domain(K))
        assert L.elements() == K.elements()
        assert all(L.leq(x, y) == K.leq(x, y) for x in K.vertices for y in K.vertices)


def test_domain_parse_error():
    with pytest.raises(ParseError) as e:
        parse_domain("0 a :\n0 b :\norder a < b\n")
    assert e.value.line == 3


def test_hom_discipline_on_discrete_carrier():
    K = WeakDomain(discrete_carrier(["x", "y"]), [("x", "y")], "x")
    assert K.hom_discipline_holds()
