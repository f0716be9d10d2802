"""Graph-model layer: elements, enumeration, application."""

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from engeler.model import (
    ApplyExpr,
    Arrow,
    Bounds,
    Denotation,
    ElementSyntaxError,
    EvalResult,
    Extensional,
    Nat,
    arrow,
    bullet,
    count_g,
    enumerate_g,
    eval_setexpr,
    extensional_bullet,
    gelem_from_json,
    gelem_to_json,
    gelem_to_text,
    gset,
    max_nat,
    member_k,
    member_s,
    mk_elem,
    nat,
    parse_gelem,
    random_gelem,
    rank,
)
from engeler.terms import parse_term

B0 = parse_gelem("({0} -> 0)")


# ---------------------------------------------------------------------------
# element structure


def test_rank():
    assert rank(nat(7)) == 0
    assert rank(B0) == 1
    assert rank(parse_gelem("({({0} -> 0)} -> 0)")) == 2
    assert rank(parse_gelem("({} -> ({} -> ({} -> 0)))")) == 3


def test_max_nat():
    assert max_nat(nat(4)) == 4
    assert max_nat(parse_gelem("({2} -> ({5} -> 1))")) == 5
    assert max_nat(parse_gelem("({} -> 0)")) == 0


def test_nat_interning_and_validation():
    assert nat(0) is nat(0)
    with pytest.raises(ValueError):
        nat(-1)


def test_gset_canonicalization():
    a = gset([nat(1), nat(0), nat(1)])
    b = gset([nat(0), nat(1)])
    assert a == b
    assert len(a) == 2
    assert list(a) == [nat(0), nat(1)]
    assert hash(a) == hash(b)


def test_gset_operations():
    s01 = gset([nat(0), nat(1)])
    s0 = gset([nat(0)])
    assert s0.issubset(s01)
    assert not s01.issubset(s0)
    assert s0.union(gset([nat(1)])) == s01
    assert nat(0) in s0
    assert B0 not in s0


def test_mk_elem():
    assert mk_elem(3) == nat(3)
    assert mk_elem(([0], 0)) == B0
    assert mk_elem(([], ([0, 1], 2))) == arrow(gset([]), arrow(gset([nat(0), nat(1)]), nat(2)))
    assert mk_elem(B0) is B0


def test_bounds_frozen():
    b = Bounds()
    assert (b.max_rank, b.max_set_size, b.max_nat, b.max_arity) == (3, 2, 1, 3)
    with pytest.raises(Exception):
        b.max_rank = 5


# ---------------------------------------------------------------------------
# text and JSON forms


@pytest.mark.parametrize(
    "text",
    [
        "0",
        "17",
        "({0} -> 0)",
        "({} -> ({} -> 1))",
        "({0,1} -> ({({0} -> 0)} -> 0))",
        "({({} -> 0),({0} -> 0)} -> 1)",
    ],
)
def test_element_text_round_trip(text):
    e = parse_gelem(text)
    assert gelem_to_text(e) == text
    assert parse_gelem(gelem_to_text(e)) == e


def test_parse_normalizes_member_order():
    assert gelem_to_text(parse_gelem("({1,0} -> 0)")) == "({0,1} -> 0)"
    assert parse_gelem("( { 1 , 0 }  ->  0 )") == parse_gelem("({0,1} -> 0)")


@pytest.mark.parametrize(
    "bad",
    [
        "",
        "(0 -> 0)",          # antecedent must be a set literal
        "({0} 0)",
        "({0} -> )",
        "({0,} -> 0)",
        "{0}",               # a set is not an element
        "({0} -> 0",
        "hello",
        "-1",
    ],
)
def test_element_syntax_errors(bad):
    with pytest.raises(ElementSyntaxError):
        parse_gelem(bad)


def test_element_json_round_trip():
    e = parse_gelem("({({} -> 0),1} -> ({0} -> 1))")
    j = gelem_to_json(e)
    json.dumps(j)  # must be plain data
    assert gelem_from_json(j) == e
    assert gelem_from_json(gelem_to_json(nat(2))) == nat(2)


# ---------------------------------------------------------------------------
# enumeration


@pytest.mark.parametrize(
    "bounds,count",
    [
        ((1, 1, 1), 8),
        ((1, 2, 1), 10),
        ((2, 1, 1), 74),
        ((2, 2, 1), 562),
        ((3, 1, 1), 5552),
    ],
)
def test_enumeration_counts(bounds, count):
    elems = list(enumerate_g(*bounds))
    assert len(elems) == count
    assert len(set(elems)) == count
    assert count_g(*bounds) == count


def test_count_without_enumerating():
    # closed-form counts for spaces too large to list
    assert count_g(3, 2, 1) == 88_910_650
    assert count_g(4, 1, 1) == 30_830_258
    assert count_g(2, 2, 2) == 7_227


def _set_width(e):
    if isinstance(e, Arrow):
        inner = max((_set_width(m) for m in e.ante), default=0)
        return max(len(e.ante), inner, _set_width(e.cons))
    return 0


def test_enumeration_respects_bounds():
    for e in enumerate_g(2, 2, 1):
        assert rank(e) <= 2
        assert max_nat(e) <= 1
        assert _set_width(e) <= 2


def test_random_gelem_respects_bounds():
    rng = random.Random(7)
    for _ in range(500):
        e = random_gelem(rng, 3, 3, 2)
        assert rank(e) <= 3
        assert max_nat(e) <= 2
        assert _set_width(e) <= 3


# ---------------------------------------------------------------------------
# atom membership characterizations


def test_member_k():
    assert member_k(parse_gelem("({0} -> ({} -> 0))"))
    assert member_k(parse_gelem("({({0} -> 0)} -> ({} -> ({0} -> 0)))"))
    assert not member_k(parse_gelem("({0} -> ({} -> 1))"))
    assert not member_k(parse_gelem("({0,1} -> ({} -> 0))"))
    assert not member_k(parse_gelem("({0} -> ({0} -> 0))"))
    assert not member_k(nat(0))


def test_member_s():
    assert member_s(parse_gelem("({({} -> ({} -> 0))} -> ({} -> ({} -> 0)))"))
    assert member_s(parse_gelem("({({0} -> ({0} -> 0))} -> ({({0} -> 0)} -> ({0} -> 0)))"))
    assert not member_s(B0)
    assert not member_s(parse_gelem("({({} -> ({} -> 0))} -> ({} -> ({} -> 1)))"))
    assert not member_s(nat(1))


# ---------------------------------------------------------------------------
# application


def test_extensional_bullet():
    m = gset([arrow(gset([]), nat(0)), arrow(gset([nat(1)]), nat(2)), nat(5)])
    assert extensional_bullet(m, gset([])) == gset([nat(0)])
    assert extensional_bullet(m, gset([nat(1)])) == gset([nat(0), nat(2)])
    assert extensional_bullet(gset([]), gset([nat(0)])) == gset([])


def test_bullet_monotone_example():
    small = gset([arrow(gset([nat(0)]), nat(1))])
    big = small.union(gset([arrow(gset([]), nat(3))]))
    r_small = extensional_bullet(small, gset([nat(0)]))
    r_big = extensional_bullet(big, gset([nat(0), nat(1)]))
    assert r_small.issubset(r_big)


def test_eval_extensional_passthrough():
    m = gset([nat(0)])
    r = eval_setexpr(Extensional(m))
    assert isinstance(r, EvalResult)
    assert r.elements == m
    assert not r.truncated


def test_eval_denotation_is_flagged_truncated():
    r = eval_setexpr(Denotation(parse_term("SKK")), Bounds(2, 1, 1))
    assert r.truncated  # a bare denotation is infinite
    assert parse_gelem("({0} -> 0)") in r.elements


def test_eval_apply_chain_k_law_instance():
    m = gset([B0, nat(1)])
    n = gset([nat(0)])
    expr = ApplyExpr(ApplyExpr(Denotation(parse_term("K")), Extensional(m)), Extensional(n))
    r = eval_setexpr(expr, Bounds(6, 4, 3, 4))
    assert r.elements == m
    assert not r.truncated


def test_bullet_truncation_flag():
    m = gset([arrow(gset([]), B0)])
    r = bullet(Extensional(m), Extensional(gset([])), Bounds(max_rank=0))
    assert r.truncated
    assert len(r.elements) == 0


def test_eval_rejects_garbage():
    with pytest.raises(TypeError):
        eval_setexpr(object())


# ---------------------------------------------------------------------------
# properties

_elements = st.integers(0, 10**9).map(
    lambda seed: random_gelem(random.Random(seed), 3, 2, 1)
)


@settings(max_examples=300, deadline=None)
@given(_elements)
def test_text_round_trip_property(e):
    assert parse_gelem(gelem_to_text(e)) == e


@settings(max_examples=300, deadline=None)
@given(_elements)
def test_json_round_trip_property(e):
    assert gelem_from_json(gelem_to_json(e)) == e


@settings(max_examples=200, deadline=None)
@given(st.lists(_elements, max_size=6))
def test_gset_order_invariance(elems):
    rng = random.Random(0)
    shuffled = list(elems)
    rng.shuffle(shuffled)
    assert gset(elems) == gset(shuffled)
