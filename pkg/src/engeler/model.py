"""The graph-model universe: naturals and arrows over finite sets.

An element is a natural number or an arrow (alpha |-> b) whose antecedent
alpha is a finite set of elements and whose consequent b is an element.
Values are canonical and immutable: sets are sorted and duplicate-free under
a fixed total order (naturals before arrows; naturals by value; arrows
lexicographically by antecedent sequence, then consequent).

Application of sets is the usual one for graph models:

    M . N = { s | some finite alpha subset of N has (alpha |-> s) in M }

`member_k` and `member_s` decide membership in the base denotations of K
and S by direct pattern analysis; they are deliberately independent of the
template machinery so the two routes can be checked against each other.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .terms import Term, _mix


class GElem:
    """A canonical universe element.  Use nat() / arrow() to build."""

    __slots__ = ("_hash", "_key", "rank", "max_nat")

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, GElem):
            return NotImplemented
        return self._hash == other._hash and self._key == other._key

    def __lt__(self, other):
        return self._key < other._key

    def __le__(self, other):
        return self._key <= other._key

    def __repr__(self):
        return gelem_to_text(self)


class Nat(GElem):
    __slots__ = ("value",)
    __match_args__ = ("value",)

    def __init__(self, value):
        self.value = value
        self.rank = 0
        self.max_nat = value
        self._key = (0, value)
        self._hash = _mix(11, value + 1, 0)


class Arrow(GElem):
    __slots__ = ("ante", "cons")
    __match_args__ = ("ante", "cons")

    def __init__(self, ante: "GSet", cons: GElem):
        self.ante = ante
        self.cons = cons
        self.rank = 1 + max(ante.rank, cons.rank)
        self.max_nat = max(ante.max_nat, cons.max_nat)
        self._key = (1, ante._key, cons._key)
        self._hash = _mix(12, ante._hash, cons._hash)


class GSet:
    """Canonical finite set of elements (sorted, duplicate-free)."""

    __slots__ = ("elems", "_hash", "_key", "rank", "max_nat")

    def __init__(self, elems):
        # `elems` must already be sorted and unique; use gset() otherwise.
        self.elems = elems
        self.rank = max((e.rank for e in elems), default=0)
        self.max_nat = max((e.max_nat for e in elems), default=0)
        self._key = tuple(e._key for e in elems)
        h = _mix(13, len(elems), 0)
        for e in elems:
            h = _mix(14, h, e._hash)
        self._hash = h

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, GSet):
            return NotImplemented
        return self._hash == other._hash and self._key == other._key

    def __lt__(self, other):
        return self._key < other._key

    def __iter__(self):
        return iter(self.elems)

    def __len__(self):
        return len(self.elems)

    def __getitem__(self, i):
        return self.elems[i]

    def __contains__(self, e):
        return e in self.elems  # linear; sets here are tiny

    def __repr__(self):
        return gset_to_text(self)

    def issubset(self, other: "GSet") -> bool:
        return all(e in other.elems for e in self.elems)

    def union(self, *others: "GSet") -> "GSet":
        merged = list(self.elems)
        for o in others:
            merged.extend(o.elems)
        return gset(merged)


_nat_cache = {}


def nat(value: int) -> Nat:
    e = _nat_cache.get(value)
    if e is None:
        if value < 0:
            raise ValueError("naturals only")
        e = _nat_cache[value] = Nat(value)
    return e


def gset(elems) -> GSet:
    """Canonicalize an iterable of GElem into a GSet."""
    uniq = {}
    for e in elems:
        uniq[e._key] = e
    return GSet(tuple(v for _, v in sorted(uniq.items())))


EMPTY_SET = gset(())


def arrow(ante, cons: GElem) -> Arrow:
    if not isinstance(ante, GSet):
        ante = gset(ante)
    return Arrow(ante, cons)


def mk_elem(raw) -> GElem:
    """Build a canonical element from a raw description.

    Naturals are ints; arrows are pairs (members, consequent) where
    `members` is an iterable of raw descriptions.  GElem values pass
    through unchanged.
    """
    if isinstance(raw, GElem):
        return raw
    if isinstance(raw, int):
        return nat(raw)
    if isinstance(raw, tuple) and len(raw) == 2:
        members, cons = raw
        return arrow(gset(mk_elem(m) for m in members), mk_elem(cons))
    raise ValueError(f"cannot interpret {raw!r} as an element")


def rank(e: GElem) -> int:
    """Nesting depth: naturals are rank 0, an arrow is one more than the
    deepest thing it mentions."""
    return e.rank


def max_nat(e: GElem) -> int:
    """Largest natural mentioned anywhere inside e (0 if none)."""
    if isinstance(e, Nat):
        return e.value
    return e.max_nat


# ---------------------------------------------------------------------------
# Base membership patterns


def member_k(e: GElem) -> bool:
    """Is e of the form ({t} |-> ({} |-> t))?"""
    if not isinstance(e, Arrow) or len(e.ante) != 1:
        return False
    inner = e.cons
    if not isinstance(inner, Arrow) or len(inner.ante) != 0:
        return False
    return e.ante.elems[0] == inner.cons


def member_s(e: GElem, distinct_r: bool = False) -> bool:
    """Is e an S-shaped arrow?

    The shape is ({tau |-> (R |-> s)} |-> (mid |-> (sigma |-> s))) where
    every member of mid is an arrow, R is exactly the set of consequents of
    mid, and sigma = tau union (union of the antecedents of mid) with
    tau a subset of sigma.  No search is needed: all pieces are read off e.

    With distinct_r=True the consequents of mid must be pairwise distinct
    (the stricter reading of the defining family); the default allows
    repeats that collapse in the sets.
    """
    if not isinstance(e, Arrow) or len(e.ante) != 1:
        return False
    u = e.ante.elems[0]
    if not isinstance(u, Arrow):
        return False
    tau = u.ante
    u2 = u.cons
    if not isinstance(u2, Arrow):
        return False
    r_set, s_left = u2.ante, u2.cons

    body = e.cons
    if not isinstance(body, Arrow):
        return False
    mid = body.ante
    body2 = body.cons
    if not isinstance(body2, Arrow):
        return False
    sigma, s_right = body2.ante, body2.cons

    if s_left != s_right:
        return False
    if not all(isinstance(a, Arrow) for a in mid):
        return False
    if distinct_r:
        snds = [a.cons for a in mid]
        if len({x._key for x in snds}) != len(snds):
            return False
    if gset(a.cons for a in mid) != r_set:
        return False
    if not tau.issubset(sigma):
        return False
    return tau.union(*(a.ante for a in mid)) == sigma


# ---------------------------------------------------------------------------
# Enumeration of the universe under bounds


def enumerate_g(max_rank: int, max_set_size: int, max_nat: int):
    """Every canonical element within the bounds, each exactly once,
    stratified by rank and canonically ordered within each stratum.

    Bounds: rank <= max_rank, every set has <= max_set_size members, every
    natural is <= max_nat.
    """
    level = [nat(v) for v in range(max_nat + 1)]
    yield from level
    pool = list(level)
    seen = {e._key for e in pool}
    for _ in range(max_rank):
        antes = [
            gset(combo)
            for size in range(min(max_set_size, len(pool)) + 1)
            for combo in itertools.combinations(pool, size)
        ]
        fresh = []
        for a in antes:
            for b in pool:
                e = Arrow(a, b)
                if e._key not in seen:
                    seen.add(e._key)
                    fresh.append(e)
        fresh.sort()
        yield from fresh
        pool.extend(fresh)


def count_g(max_rank: int, max_set_size: int, max_nat: int) -> int:
    """Count of enumerate_g without materializing it.

    Every element within rank r is a natural or an arrow whose pieces lie
    within rank r-1, so pool sizes satisfy
    p_0 = max_nat+1 and p_k = p_0 + subsets(p_{k-1}) * p_{k-1}.
    """
    import math

    def subsets(n):
        return sum(math.comb(n, k) for k in range(min(max_set_size, n) + 1))

    p = max_nat + 1
    for _ in range(max_rank):
        p = (max_nat + 1) + subsets(p) * p
    return p


def random_gelem(rng, max_rank: int, max_set_size: int, max_nat: int) -> GElem:
    """Random element within the bounds (not uniformly distributed)."""
    if max_rank == 0 or rng.random() < 0.35:
        return nat(rng.randint(0, max_nat))
    size = rng.randint(0, max_set_size)
    members = [
        random_gelem(rng, max_rank - 1, max_set_size, max_nat) for _ in range(size)
    ]
    return arrow(gset(members), random_gelem(rng, max_rank - 1, max_set_size, max_nat))


# ---------------------------------------------------------------------------
# Text and JSON forms


def gelem_to_text(e: GElem) -> str:
    if isinstance(e, Nat):
        return str(e.value)
    return f"({gset_to_text(e.ante)} -> {gelem_to_text(e.cons)})"


def gset_to_text(s: GSet) -> str:
    return "{" + ",".join(gelem_to_text(e) for e in s) + "}"


def gelem_to_json(e: GElem):
    if isinstance(e, Nat):
        return {"nat": e.value}
    return {
        "arrow": {
            "set": [gelem_to_json(m) for m in e.ante],
            "elem": gelem_to_json(e.cons),
        }
    }


def gelem_from_json(obj) -> GElem:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ValueError(f"bad element object: {obj!r}")
    if "nat" in obj:
        return nat(obj["nat"])
    if "arrow" in obj:
        inner = obj["arrow"]
        return arrow(
            gset(gelem_from_json(m) for m in inner["set"]),
            gelem_from_json(inner["elem"]),
        )
    raise ValueError(f"bad element object: {obj!r}")


class ElementSyntaxError(ValueError):
    pass


def parse_gelem(text: str) -> GElem:
    """Parse the text form: naturals as digits, arrows as
    "({e1,e2} -> e)" with "{}" for the empty set."""
    pos = 0
    n = len(text)

    def skip_ws():
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def expect(ch):
        nonlocal pos
        skip_ws()
        if pos >= n or not text.startswith(ch, pos):
            raise ElementSyntaxError(f"expected {ch!r} at {pos} in {text!r}")
        pos += len(ch)

    def parse_elem():
        nonlocal pos
        skip_ws()
        if pos < n and text[pos].isdigit():
            j = pos
            while j < n and text[j].isdigit():
                j += 1
            v = int(text[pos:j])
            pos = j
            return nat(v)
        expect("(")
        members = parse_set()
        expect("->")
        cons = parse_elem()
        expect(")")
        return arrow(members, cons)

    def parse_set():
        nonlocal pos
        expect("{")
        skip_ws()
        members = []
        if pos < n and text[pos] == "}":
            pos += 1
            return EMPTY_SET
        while True:
            members.append(parse_elem())
            skip_ws()
            if pos < n and text[pos] == ",":
                pos += 1
                continue
            expect("}")
            return gset(members)

    e = parse_elem()
    skip_ws()
    if pos != n:
        raise ElementSyntaxError(f"trailing input at {pos} in {text!r}")
    return e


# ---------------------------------------------------------------------------
# Set expressions and application


@dataclass(frozen=True)
class Extensional:
    elements: GSet


@dataclass(frozen=True)
class Denotation:
    term: Term  # closed, atoms K and S only


@dataclass(frozen=True)
class ApplyExpr:
    fn: object
    arg: object


@dataclass(frozen=True)
class Bounds:
    """Enumeration bounds used wherever an infinite set must be cut off."""

    max_rank: int = 3
    max_set_size: int = 2
    max_nat: int = 1
    max_arity: int = 3


@dataclass(frozen=True)
class EvalResult:
    elements: GSet
    truncated: bool

    def __iter__(self):
        return iter(self.elements)


def extensional_bullet(m: GSet, fn_arg: GSet) -> GSet:
    """M . N for explicit finite sets: collect consequents of arrows in M
    whose antecedent is contained in N.  Exact."""
    out = []
    for e in m:
        if isinstance(e, Arrow) and e.ante.issubset(fn_arg):
            out.append(e.cons)
    return gset(out)


def bullet(m, n, bounds: Bounds = Bounds()) -> EvalResult:
    """Apply a set expression to a set expression.

    The argument must evaluate to an explicit finite set.  An extensional
    function is applied by direct scan; a denotation (or partial
    application of one) is applied through its symbolic template, so the
    existential over the infinite denotation is solved without enumerating
    it.  Results are restricted to rank <= bounds.max_rank; if anything was
    cut off, the truncated flag is set — never silently.
    """
    return eval_setexpr(ApplyExpr(m, n), bounds)


def eval_setexpr(x, bounds: Bounds = Bounds()) -> EvalResult:
    """Evaluate Extensional / Denotation / ApplyExpr trees to a finite set
    with an explicit truncation flag."""
    if isinstance(x, Extensional):
        return EvalResult(x.elements, False)
    if isinstance(x, Denotation):
        # A bare denotation is infinite; enumerate under bounds and say so.
        from .templates import enumerate_template, template_of

        elems, _ = enumerate_template(template_of(x.term), bounds)
        return EvalResult(gset(elems), True)
    if isinstance(x, ApplyExpr):
        head, args = x, []
        while isinstance(head, ApplyExpr):
            args.append(head.arg)
            head = head.fn
        args.reverse()
        truncated = False
        arg_sets = []
        for a in args:
            r = eval_setexpr(a, bounds)
            truncated = truncated or r.truncated
            arg_sets.append(r.elements)
        if isinstance(head, Extensional):
            acc = head.elements
            for s in arg_sets:
                acc = extensional_bullet(acc, s)
            return _restrict(acc, bounds, truncated)
        if isinstance(head, Denotation):
            from .templates import apply_template_chain, template_of

            elems, trunc = apply_template_chain(
                template_of(head.term), arg_sets, bounds
            )
            return _restrict(gset(elems), bounds, truncated or trunc)
        raise TypeError(f"cannot evaluate {head!r}")
    raise TypeError(f"cannot evaluate {x!r}")


def _restrict(elements: GSet, bounds: Bounds, truncated: bool) -> EvalResult:
    kept = [e for e in elements if e.rank <= bounds.max_rank]
    if len(kept) != len(elements):
        truncated = True
    return EvalResult(gset(kept), truncated)
