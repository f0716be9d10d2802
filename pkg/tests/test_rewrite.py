"""Reduction engine: contractions, traces, bounded reachability."""

import os
import random
import subprocess
import sys

import pytest

from engeler.rewrite import (
    BACKEND,
    CYCLE_DETECTED,
    FUEL_EXHAUSTED,
    NORMAL_FORM,
    _reduces_to_py,
    contract,
    find_redexes,
    identity_behavior,
    normal_form,
    one_step_reducts,
    reduce,
    reduces_to,
)
from engeler.terms import expand_stdlib, parse_term, print_term, stdlib_lookup

from conftest import random_term


# one golden per rewrite rule
@pytest.mark.parametrize(
    "redex,contractum",
    [
        ("Kxy", "x"),
        ("Sxyz", "xz(yz)"),
        ("Bxyz", "x(yz)"),
        ("Ix", "x"),
        ("Jxyzw", "xy(xwz)"),
        ("Lxy", "x(yy)"),
        ("Mx", "xx"),
    ],
)
def test_contraction_rules(redex, contractum):
    final, done = normal_form(parse_term(redex))
    assert done
    assert final == parse_term(contractum)
    # under-applied heads are inert
    head = redex[0] + redex[1:-1]
    if len(head) > 1:
        assert find_redexes(parse_term(head)) == []


def test_skkx_trace():
    tr = reduce(parse_term("SKKx"))
    assert tr.outcome == NORMAL_FORM
    assert len(tr.steps) == 2
    assert tr.steps[0].redex == ()
    assert print_term(tr.final) == "x0"

    j = tr.to_json()
    assert len(j) == 3
    assert j[-1] == {"outcome": "normal-form", "final": {"var": 0}}
    assert j[0]["redex"] == []


def test_cycle_detection():
    tr = reduce(parse_term("MM"), fuel=100)
    assert tr.outcome == CYCLE_DETECTED
    final, done = normal_form(parse_term("MM"), fuel=100)
    assert not done


def test_fuel_exhaustion():
    # M(LM) grows forever: M(LM) > (LM)(LM) > M((LM)(LM)) > ...
    tr = reduce(parse_term("M(LM)"), fuel=10)
    assert tr.outcome == FUEL_EXHAUSTED
    assert len(tr.steps) == 10


def test_redex_discovery():
    assert find_redexes(parse_term("SKKx")) == [()]
    assert find_redexes(parse_term("S")) == []
    assert set(find_redexes(parse_term("K(Ix)y"))) == {(), ("left", "right")}


def test_one_step_reducts():
    assert {print_term(t) for t in one_step_reducts(parse_term("K(Ix)y"))} == {
        "Ix0",
        "Kx0x1",
    }
    assert one_step_reducts(parse_term("KS")) == []


def test_contract_at_path():
    t = parse_term("SKKx")
    assert contract(t, ()) == parse_term("Kx(Kx)")
    with pytest.raises(ValueError):
        contract(t, ("right", "right"))


def test_reduces_to():
    assert reduces_to(parse_term("SK(SKSK)"), parse_term("SKK"), fuel=50)
    assert reduces_to(parse_term("SKK"), parse_term("SKK"), fuel=0)
    assert not reduces_to(parse_term("Kxy"), parse_term("y"))
    # the witness path for this pair survives even a width-1 beam
    assert reduces_to(parse_term("SK(SKSK)"), parse_term("SKK"), fuel=50, width=1)


def test_identity_behavior():
    sigma0 = expand_stdlib(stdlib_lookup("Sigma0"))
    assert identity_behavior(sigma0, fuel=5000) == "yes"
    assert identity_behavior(parse_term("S"), fuel=100) == "no-within-bounds"
    assert identity_behavior(parse_term("SKK"), fuel=100) == "yes"
    with pytest.raises(ValueError):
        identity_behavior(parse_term("Sx"))


def test_backend_is_declared():
    assert BACKEND in ("compiled", "python")


@pytest.mark.skipif(BACKEND != "compiled", reason="compiled kernel not built")
def test_compiled_backend_matches_python():
    from engeler import _reduction

    from engeler.rewrite import _to_tuples

    rng = random.Random(4242)
    checked = 0
    for _ in range(150):
        a = random_term(rng, rng.randint(2, 6))
        b = random_term(rng, rng.randint(1, 4))
        fuel, width = rng.choice([(5, 50), (12, 200)])
        want = _reduces_to_py(a, b, fuel, width)
        got = _reduction.reaches(_to_tuples(a), _to_tuples(b), fuel, width)
        assert got == want, (print_term(a), print_term(b), fuel, width)
        checked += 1
    assert checked == 150


def test_pure_fallback_env_switch():
    out = subprocess.run(
        [sys.executable, "-c", "import engeler.rewrite as r; print(r.BACKEND)"],
        env={**os.environ, "ENGELER_PURE": "1"},
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"
