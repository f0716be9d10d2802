"""Symbolic denotation templates: bases, composition, matching, enumeration.

Golden texts go through canon_template_text because fresh-variable
suffixes are allocation-order dependent; the canonical form is stable.
"""

import json

import pytest

from engeler.model import Bounds, enumerate_g, gset, nat, parse_gelem, rank
from engeler.templates import (
    AVar,
    ArrowPat,
    BudgetExceeded,
    Constraint,
    EMPTY_TEMPLATE,
    EVar,
    ExplicitPat,
    FamilyPat,
    NatPat,
    SVar,
    SingletonPat,
    TemplateError,
    UnionPat,
    apply_template_chain,
    base_template,
    enumerate_template,
    has_singleton_setvar,
    instantiate,
    matches,
    member_via_template,
    normalize,
    template_of,
    template_to_json,
    template_to_text,
)
from engeler.terms import (
    enumerate_s_terms,
    enumerate_terms,
    expand_stdlib,
    parse_term,
    print_term,
    stdlib_lookup,
)

from conftest import canon_template_text as canon


# ---------------------------------------------------------------------------
# base templates


def test_base_k_text():
    t = base_template("K")
    assert template_to_text(t) == "({t} -> ({} -> t))"
    assert has_singleton_setvar(t)
    assert t.constraints == ()


def test_base_s_text():
    t = base_template("S")
    assert template_to_text(t) == (
        "({(tau -> ({r[i] : i in 1..n} -> s))} -> "
        "({(f[i] -> r[i]) : i in 1..n} -> (tau + U(i in 1..n) f[i] -> s)))"
    )
    assert not has_singleton_setvar(t)


def test_base_template_unknown():
    with pytest.raises(KeyError):
        base_template("B")


def test_template_of_is_cached():
    assert template_of(parse_term("SK")) is template_of(parse_term("SK"))


def test_template_of_input_validation():
    with pytest.raises(TemplateError):
        template_of(parse_term("x"))
    with pytest.raises(TemplateError):
        template_of(parse_term("SKx"))


# ---------------------------------------------------------------------------
# composition goldens


@pytest.mark.parametrize(
    "term,text",
    [
        ("SKK", "({t0} -> t0)"),
        ("SK", "({} -> ({t0} -> t0))"),
        ("K(SKK)", "({} -> ({t0} -> t0))"),  # KI collapses to the SK shape
        ("S(SK)K", "({t0} -> ({} -> t0))"),
        ("KK", "({} -> ({t0} -> ({} -> t0)))"),
        (
            "SS",
            "({(f[i] -> (f0[i] -> r0[i])) : i in 1..n0} -> "
            "({(tau0 -> ({r0[i0] : i0 in 1..n0} -> s0))} + U(i in 1..n0) f[i] -> "
            "(tau0 + U(i0 in 1..n0) f0[i0] -> s0)))",
        ),
    ],
)
def test_composition_goldens(term, text):
    assert canon(template_to_text(template_of(parse_term(term)))) == text


def test_kstarstar_shape():
    t = template_of(expand_stdlib(stdlib_lookup("Kstarstar")))
    assert canon(template_to_text(t)) == "({} -> ({} -> ({t0} -> t0)))"


def test_sigma0_collapses_to_identity_template():
    sigma0 = expand_stdlib(stdlib_lookup("Sigma0"))
    t = template_of(sigma0)
    assert t.constraints == ()
    assert canon(template_to_text(t)) == "({t0} -> t0)"
    assert member_via_template(t, parse_gelem("({0} -> 0)"))
    assert not member_via_template(t, parse_gelem("({0} -> 1)"))
    assert not member_via_template(t, parse_gelem("({} -> 0)"))


def test_s_ks_s_retains_quantified_constraint():
    t = template_of(parse_term("S(KS)S"))
    assert any(c.binders for c in t.constraints)
    assert "forall" in template_to_text(t)


# ---------------------------------------------------------------------------
# scope hygiene: no constraint may mention a binder it is not under


def _free_binder_leaks(t):
    def pat_components(p, bound, leaks):
        if isinstance(p, (EVar, SVar, AVar)):
            for comp in p.index:
                if comp not in bound:
                    leaks.append((p, comp))
        elif isinstance(p, ArrowPat):
            pat_components(p.ante, bound, leaks)
            pat_components(p.cons, bound, leaks)
        elif isinstance(p, SingletonPat):
            pat_components(p.var, bound, leaks)
        elif isinstance(p, ExplicitPat):
            for m in p.members:
                pat_components(m, bound, leaks)
        elif isinstance(p, FamilyPat):
            if isinstance(p.arity, AVar):
                pat_components(p.arity, bound, leaks)
            pat_components(p.body, bound | {p.binder}, leaks)
        elif isinstance(p, UnionPat):
            for q in p.parts:
                pat_components(q, bound, leaks)
        elif not isinstance(p, NatPat):
            raise TypeError(p)

    leaks = []
    if not t.is_empty:
        pat_components(t.root, set(), leaks)
        for c in t.constraints:
            bound = set()
            for name, ar in c.binders:
                if isinstance(ar, AVar):
                    for comp in ar.index:
                        if comp not in bound:
                            leaks.append((ar, comp))
                bound.add(name)
            pat_components(c.left, bound, leaks)
            pat_components(c.right, bound, leaks)
    return leaks


def test_no_scope_leaks_sk_terms():
    for term in enumerate_terms(4, alphabet=("K", "S")):
        assert _free_binder_leaks(template_of(term)) == [], print_term(term)


def test_no_scope_leaks_s_only_terms():
    for term in enumerate_s_terms(6):
        assert _free_binder_leaks(template_of(term)) == [], print_term(term)


# ---------------------------------------------------------------------------
# membership


def test_membership_goldens():
    tpl = template_of(parse_term("SS"))
    minimal = parse_gelem("({} -> ({({} -> ({} -> 0))} -> ({} -> 0)))")
    decoupled = parse_gelem("({} -> ({({} -> ({} -> 0))} -> ({} -> 1)))")
    assert rank(minimal) == 4
    assert member_via_template(tpl, minimal)
    assert not member_via_template(tpl, decoupled)


def test_matches_and_instantiate_round_trip():
    t = base_template("S")
    e = parse_gelem("({({} -> ({} -> 0))} -> ({} -> ({} -> 0)))")
    bindings = list(matches(t, e))
    assert len(bindings) == 1
    assert instantiate(t, bindings[0]) == e
    assert list(matches(t, parse_gelem("({0} -> 0)"))) == []


def test_match_binding_keys_are_kinded():
    t = base_template("S")
    e = parse_gelem("({({} -> ({} -> 0))} -> ({} -> ({} -> 0)))")
    (b,) = matches(t, e)
    kinds = {k[0] for k in b}
    assert kinds <= {"e", "s", "a"}
    assert ("e", "s", ()) in b  # the shared consequent variable


# ---------------------------------------------------------------------------
# enumeration


def test_enumerate_skk():
    elems, _ = enumerate_template(template_of(parse_term("SKK")), Bounds(1, 1, 1))
    assert elems == [parse_gelem("({0} -> 0)"), parse_gelem("({1} -> 1)")]


def test_enumerate_matches_independent_universe():
    elems, _ = enumerate_template(template_of(parse_term("SKK")), Bounds(2, 1, 1))
    assert set(elems) == {
        parse_gelem(f"({{{t}}} -> {t})")
        for t in ("0", "1", "({} -> 0)", "({} -> 1)", "({0} -> 0)",
                  "({0} -> 1)", "({1} -> 0)", "({1} -> 1)")
    }


def test_enumerate_k_narrow():
    elems, _ = enumerate_template(base_template("K"), Bounds(2, 1, 0))
    assert elems == [parse_gelem("({0} -> ({} -> 0))")]


def test_enumerate_ss_has_no_rank3_members():
    elems, _ = enumerate_template(template_of(parse_term("SS")), Bounds(3, 1, 1))
    assert elems == []


def test_enumerate_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_template(template_of(parse_term("SS")), Bounds(3, 2, 1), budget=1000)


def test_enumeration_members_satisfy_template():
    tpl = template_of(parse_term("SK"))
    elems, _ = enumerate_template(tpl, Bounds(2, 2, 1))
    assert elems
    for e in elems:
        assert member_via_template(tpl, e)


# ---------------------------------------------------------------------------
# the empty template


def test_empty_template():
    assert EMPTY_TEMPLATE.is_empty
    assert not member_via_template(EMPTY_TEMPLATE, nat(0))
    assert enumerate_template(EMPTY_TEMPLATE, Bounds(2, 1, 1)) == ([], False)
    assert not has_singleton_setvar(EMPTY_TEMPLATE)


# ---------------------------------------------------------------------------
# sanctioned partiality: shapes beyond the calculus abort loudly


@pytest.mark.parametrize("term", ["SSS(KK)", "SSS(KS)", "SSS(SK)"])
def test_unsupported_antecedent_shapes_raise(term):
    with pytest.raises(TemplateError):
        template_of(parse_term(term))


def test_unsupported_shapes_are_rare_up_to_five_leaves():
    bad = []
    for term in enumerate_terms(5, alphabet=("K", "S")):
        try:
            template_of(term)
        except TemplateError:
            bad.append(print_term(term))
    assert bad == ["SSS(KK)", "SSS(KS)", "SSS(SK)"]


# ---------------------------------------------------------------------------
# structural odds and ends


def test_normalize_idempotent_on_roots():
    # patterns compare by identity, so idempotence is up to structural key
    from engeler.templates import pat_key

    for term in ("S", "K", "SS", "SKK", "S(KS)S"):
        root = template_of(parse_term(term)).root
        assert pat_key(normalize(root)) == pat_key(normalize(normalize(root)))


def test_template_json_is_plain_data():
    for term in enumerate_terms(3, alphabet=("K", "S")):
        j = template_to_json(template_of(term))
        assert set(j) == {"root", "constraints"}
        json.dumps(j)


def test_apply_template_chain_k():
    m = gset([parse_gelem("({0} -> 0)"), nat(1)])
    n = gset([nat(0)])
    elems, truncated = apply_template_chain(
        base_template("K"), [m, n], Bounds(6, 4, 3, 4)
    )
    assert gset(elems) == m
    assert not truncated


def test_has_singleton_setvar_on_s_terms():
    # the K projection mechanism never appears in S-only compositions
    for term in enumerate_s_terms(4):
        assert not has_singleton_setvar(template_of(term)), print_term(term)
