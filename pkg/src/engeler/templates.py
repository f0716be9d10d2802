"""Symbolic element-shape descriptions for denotations of K/S terms.

A template is a pattern standing for the family of graph-model elements
in a term's denotation: a root element pattern plus retained set-equation
constraints that could not be resolved during composition.  Application
of terms becomes composition of templates; membership and (bounded)
enumeration are decided by structural matching against the pattern.

Pattern inventory
-----------------
element patterns   EVar, NatPat, ArrowPat
set patterns       SVar, SingletonPat, ExplicitPat, FamilyPat, UnionPat
arity              AVar (with a lower bound), or a concrete int

FamilyPat(n, i, body) is the indexed collection over i = 1..n; with an
element body it denotes the listing {body_i}, with a set body the union
of the body_i.  Variables carry an index tuple so that per-index copies
("r sub i") stay distinguishable, and so nested families work.

Composition can fail in two distinct ways: a clash (the described family
is provably empty -- the result is EMPTY_TEMPLATE) and an unsupported
form (outside the implemented case inventory -- an exception, never a
silent wrong answer).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from .model import Arrow, Bounds, GElem, GSet, Nat, enumerate_g, gset, nat
from .terms import App, Atom, Term


class TemplateError(Exception):
    """Base class for template-calculus failures."""


class UnsupportedUnification(TemplateError):
    pass


class UnsupportedMatch(TemplateError):
    pass


class BudgetExceeded(TemplateError):
    pass


class _Clash(Exception):
    """Internal: unification proved the element family empty."""


# ---------------------------------------------------------------------------
# patterns


class EVar:
    __slots__ = ("name", "index")

    def __init__(self, name, index=()):
        self.name = name
        self.index = tuple(index)

    @property
    def key(self):
        return ("e", self.name, self.index)

    def __repr__(self):
        return f"EVar({self.name!r}, {self.index!r})"


class NatPat:
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


class ArrowPat:
    __slots__ = ("ante", "cons")

    def __init__(self, ante, cons):
        self.ante = ante
        self.cons = cons


class SVar:
    __slots__ = ("name", "index")

    def __init__(self, name, index=()):
        self.name = name
        self.index = tuple(index)

    @property
    def key(self):
        return ("s", self.name, self.index)

    def __repr__(self):
        return f"SVar({self.name!r}, {self.index!r})"


class SingletonPat:
    """A one-element set whose sole member is a bare element variable.

    Kept distinct from a one-member ExplicitPat: the closure predicate
    over S-only terms asks specifically whether such a variable singleton
    ever appears as an antecedent.
    """

    __slots__ = ("var",)

    def __init__(self, var):
        self.var = var


class ExplicitPat:
    __slots__ = ("members",)

    def __init__(self, members=()):
        self.members = tuple(members)


class AVar:
    __slots__ = ("name", "index", "minimum")

    def __init__(self, name, index=(), minimum=0):
        self.name = name
        self.index = tuple(index)
        self.minimum = minimum

    @property
    def key(self):
        return ("a", self.name, self.index)

    def __repr__(self):
        return f"AVar({self.name!r}, {self.index!r}, min={self.minimum})"


class FamilyPat:
    __slots__ = ("arity", "binder", "body")

    def __init__(self, arity, binder, body):
        self.arity = arity  # AVar or int
        self.binder = binder  # index-variable name, free inside body
        self.body = body  # element pattern (listing) or set pattern (union)


class UnionPat:
    __slots__ = ("parts",)

    def __init__(self, parts):
        self.parts = tuple(parts)


ELEM_PATS = (EVar, NatPat, ArrowPat)
SET_PATS = (SVar, SingletonPat, ExplicitPat, FamilyPat, UnionPat)


@dataclass(frozen=True)
class Constraint:
    """A retained set equation, universally quantified over its binders.

    binders is a tuple of (index-name, arity) pairs: the equation must
    hold for every assignment of each index in 1..arity.
    """

    binders: tuple
    left: object
    right: object


@dataclass(frozen=True)
class Template:
    root: object  # element pattern, or None for the empty family
    constraints: tuple = ()

    @property
    def is_empty(self):
        return self.root is None


EMPTY_TEMPLATE = Template(None, ())


# ---------------------------------------------------------------------------
# structural helpers


def pat_key(p):
    """Hashable structural key (used for equality and deduplication)."""
    if isinstance(p, EVar):
        return ("e", p.name, p.index)
    if isinstance(p, NatPat):
        return ("n", p.value)
    if isinstance(p, ArrowPat):
        return ("ar", pat_key(p.ante), pat_key(p.cons))
    if isinstance(p, SVar):
        return ("s", p.name, p.index)
    if isinstance(p, SingletonPat):
        return ("sg", pat_key(p.var))
    if isinstance(p, ExplicitPat):
        return ("ex", tuple(pat_key(m) for m in p.members))
    if isinstance(p, FamilyPat):
        ak = p.arity if isinstance(p.arity, int) else ("a",) + p.arity.key
        return ("fam", ak, p.binder, pat_key(p.body))
    if isinstance(p, UnionPat):
        return ("un", tuple(pat_key(q) for q in p.parts))
    if isinstance(p, int):
        return ("int", p)
    if isinstance(p, AVar):
        return ("a", p.name, p.index)
    raise TypeError(f"not a pattern: {p!r}")


def free_vars(p, acc=None):
    if acc is None:
        acc = {}
    if isinstance(p, (EVar, SVar, AVar)):
        acc[p.key] = p
    elif isinstance(p, ArrowPat):
        free_vars(p.ante, acc)
        free_vars(p.cons, acc)
    elif isinstance(p, SingletonPat):
        free_vars(p.var, acc)
    elif isinstance(p, ExplicitPat):
        for m in p.members:
            free_vars(m, acc)
    elif isinstance(p, FamilyPat):
        if isinstance(p.arity, AVar):
            acc[p.arity.key] = p.arity
        free_vars(p.body, acc)
    elif isinstance(p, UnionPat):
        for q in p.parts:
            free_vars(q, acc)
    return acc


def rename_vars(p, suffix):
    """Append a namespace suffix to every variable and binder name.

    String index components are references to family binders of the same
    template, so they are renamed along with the binders themselves.
    """

    def fix(idx):
        return tuple(c + suffix if isinstance(c, str) else c for c in idx)

    if isinstance(p, EVar):
        return EVar(p.name + suffix, fix(p.index))
    if isinstance(p, SVar):
        return SVar(p.name + suffix, fix(p.index))
    if isinstance(p, AVar):
        return AVar(p.name + suffix, fix(p.index), p.minimum)
    if isinstance(p, NatPat):
        return p
    if isinstance(p, ArrowPat):
        return ArrowPat(rename_vars(p.ante, suffix), rename_vars(p.cons, suffix))
    if isinstance(p, SingletonPat):
        return SingletonPat(rename_vars(p.var, suffix))
    if isinstance(p, ExplicitPat):
        return ExplicitPat(tuple(rename_vars(m, suffix) for m in p.members))
    if isinstance(p, FamilyPat):
        ar = rename_vars(p.arity, suffix) if isinstance(p.arity, AVar) else p.arity
        return FamilyPat(ar, p.binder + suffix, rename_vars(p.body, suffix))
    if isinstance(p, UnionPat):
        return UnionPat(tuple(rename_vars(q, suffix) for q in p.parts))
    raise TypeError(f"not a pattern: {p!r}")


def reindex(p, old, new):
    """Replace index component `old` with `new` throughout (binder use)."""

    def fix(idx):
        return tuple(new if c == old else c for c in idx)

    if isinstance(p, EVar):
        return EVar(p.name, fix(p.index))
    if isinstance(p, SVar):
        return SVar(p.name, fix(p.index))
    if isinstance(p, AVar):
        return AVar(p.name, fix(p.index), p.minimum)
    if isinstance(p, NatPat):
        return p
    if isinstance(p, ArrowPat):
        return ArrowPat(reindex(p.ante, old, new), reindex(p.cons, old, new))
    if isinstance(p, SingletonPat):
        return SingletonPat(reindex(p.var, old, new))
    if isinstance(p, ExplicitPat):
        return ExplicitPat(tuple(reindex(m, old, new) for m in p.members))
    if isinstance(p, FamilyPat):
        ar = reindex(p.arity, old, new) if isinstance(p.arity, AVar) else p.arity
        if p.binder == old:
            return FamilyPat(ar, p.binder, p.body)  # body shadowed, arity not
        return FamilyPat(ar, p.binder, reindex(p.body, old, new))
    if isinstance(p, UnionPat):
        return UnionPat(tuple(reindex(q, old, new) for q in p.parts))
    raise TypeError(f"not a pattern: {p!r}")


def index_append(p, comp):
    """Append an index component to every variable (per-index fresh copy)."""
    if isinstance(p, EVar):
        return EVar(p.name, p.index + (comp,))
    if isinstance(p, SVar):
        return SVar(p.name, p.index + (comp,))
    if isinstance(p, AVar):
        return AVar(p.name, p.index + (comp,), p.minimum)
    if isinstance(p, NatPat):
        return p
    if isinstance(p, ArrowPat):
        return ArrowPat(index_append(p.ante, comp), index_append(p.cons, comp))
    if isinstance(p, SingletonPat):
        return SingletonPat(index_append(p.var, comp))
    if isinstance(p, ExplicitPat):
        return ExplicitPat(tuple(index_append(m, comp) for m in p.members))
    if isinstance(p, FamilyPat):
        ar = index_append(p.arity, comp) if isinstance(p.arity, AVar) else p.arity
        return FamilyPat(ar, p.binder, index_append(p.body, comp))
    if isinstance(p, UnionPat):
        return UnionPat(tuple(index_append(q, comp) for q in p.parts))
    raise TypeError(f"not a pattern: {p!r}")


# ---------------------------------------------------------------------------
# substitution over symbolic bindings

# Symbolic bindings map var keys to patterns; AVar keys map to ints or
# AVars, and ("amin", name, index) entries record raised lower bounds.


def _amin(b, av):
    return max(av.minimum, b.get(("amin", av.name, av.index), 0))


def resolve_arity(a, b):
    while isinstance(a, AVar):
        nxt = b.get(a.key)
        if nxt is None:
            return AVar(a.name, a.index, _amin(b, a))
        a = nxt
    return a


def _schema_value(p, b):
    """A binding keyed under a binder name is a schema over that index;
    instantiate it for an occurrence of the same variable whose index
    uses a different binder (or a concrete position)."""
    kind, name, index = p.key
    hits = []
    for key, val in b.items():
        if key[0] != kind or key[1] != name:
            continue
        idx2 = key[2]
        if not isinstance(idx2, tuple) or len(idx2) != len(index) or idx2 == index:
            continue
        mapping = {}
        ok = True
        for a, x in zip(idx2, index):
            if isinstance(a, str):
                if mapping.get(a, x) != x:
                    ok = False
                    break
                mapping[a] = x
            elif a != x:
                ok = False
                break
        if ok and mapping:
            hits.append((mapping, val))
    if not hits:
        return None
    if len(hits) > 1:
        raise UnsupportedUnification(
            f"multiple schema bindings apply to one occurrence of {name!r}"
        )
    mapping, val = hits[0]
    # two-phase rename so one target name never captures another source
    temps = {old: f"\x00{i}" for i, old in enumerate(mapping)}
    for old, tmp in temps.items():
        val = reindex(val, old, tmp)
    for old, new in mapping.items():
        val = reindex(val, temps[old], new)
    return val


def subst(p, b):
    if isinstance(p, EVar):
        v = b.get(p.key)
        if v is None and p.index:
            v = _schema_value(p, b)
        return p if v is None else subst(v, b)
    if isinstance(p, SVar):
        v = b.get(p.key)
        if v is None and p.index:
            v = _schema_value(p, b)
        return p if v is None else subst(v, b)
    if isinstance(p, NatPat):
        return p
    if isinstance(p, ArrowPat):
        return ArrowPat(subst(p.ante, b), subst(p.cons, b))
    if isinstance(p, SingletonPat):
        inner = subst(p.var, b)
        if isinstance(inner, EVar):
            return SingletonPat(inner)
        return ExplicitPat((inner,))
    if isinstance(p, ExplicitPat):
        return ExplicitPat(tuple(subst(m, b) for m in p.members))
    if isinstance(p, FamilyPat):
        return FamilyPat(resolve_arity(p.arity, b), p.binder, subst(p.body, b))
    if isinstance(p, UnionPat):
        return UnionPat(tuple(subst(q, b) for q in p.parts))
    raise TypeError(f"not a pattern: {p!r}")


def _mentions_binder(p, binder):
    if isinstance(p, (EVar, SVar, AVar)):
        return binder in p.index
    if isinstance(p, NatPat):
        return False
    if isinstance(p, ArrowPat):
        return _mentions_binder(p.ante, binder) or _mentions_binder(p.cons, binder)
    if isinstance(p, SingletonPat):
        return _mentions_binder(p.var, binder)
    if isinstance(p, ExplicitPat):
        return any(_mentions_binder(m, binder) for m in p.members)
    if isinstance(p, FamilyPat):
        if isinstance(p.arity, AVar) and binder in p.arity.index:
            return True
        return _mentions_binder(p.body, binder)
    if isinstance(p, UnionPat):
        return any(_mentions_binder(q, binder) for q in p.parts)
    raise TypeError(f"not a pattern: {p!r}")


def normalize(p):
    """Canonicalize a pattern: flatten unions, collapse degenerate
    families, dedupe explicit listings."""
    if isinstance(p, (EVar, SVar, NatPat)):
        return p
    if isinstance(p, ArrowPat):
        return ArrowPat(normalize(p.ante), normalize(p.cons))
    if isinstance(p, SingletonPat):
        return p
    if isinstance(p, ExplicitPat):
        seen, out = set(), []
        for m in p.members:
            m = normalize(m)
            k = pat_key(m)
            if k not in seen:
                seen.add(k)
                out.append(m)
        return ExplicitPat(tuple(out))
    if isinstance(p, FamilyPat):
        body = normalize(p.body)
        # a union-of-singletons family is just a listing family
        if isinstance(body, SingletonPat):
            body = body.var
        elif isinstance(body, ExplicitPat) and len(body.members) == 1:
            body = body.members[0]
        ar = p.arity
        if ar == 0:
            return ExplicitPat(())
        if isinstance(ar, int) and isinstance(body, ELEM_PATS) and ar <= 4:
            return normalize(
                ExplicitPat(tuple(reindex(body, p.binder, i) for i in range(1, ar + 1)))
            )
        if isinstance(ar, int) and isinstance(body, SET_PATS) and ar <= 4:
            return normalize(
                UnionPat(tuple(reindex(body, p.binder, i) for i in range(1, ar + 1)))
            )
        if not _mentions_binder(body, p.binder) and (
            isinstance(ar, int) or ar.minimum >= 1
        ):
            # instances coincide, so every admissible arity yields the
            # same set: a singleton for a listing, the body for a union
            if isinstance(body, ELEM_PATS):
                return normalize(ExplicitPat((body,)))
            return body
        return FamilyPat(ar, p.binder, body)
    if isinstance(p, UnionPat):
        parts = []
        for q in p.parts:
            q = normalize(q)
            if isinstance(q, UnionPat):
                parts.extend(q.parts)
            elif isinstance(q, ExplicitPat) and not q.members:
                continue
            else:
                parts.append(q)
        # merge adjacent explicit listings
        explicit, rest = [], []
        for q in parts:
            (explicit if isinstance(q, ExplicitPat) else rest).append(q)
        if explicit:
            merged = normalize(
                ExplicitPat(tuple(m for q in explicit for m in q.members))
            )
            if merged.members or not rest:
                rest = [merged] + rest
        if not rest:
            return ExplicitPat(())
        if len(rest) == 1:
            return rest[0]
        return UnionPat(tuple(rest))
    raise TypeError(f"not a pattern: {p!r}")


def ground_elem(p):
    """Concrete element if the pattern has no variables, else None."""
    if isinstance(p, NatPat):
        return nat(p.value)
    if isinstance(p, ArrowPat):
        a = ground_set(p.ante)
        if a is None:
            return None
        c = ground_elem(p.cons)
        if c is None:
            return None
        return Arrow(a, c)
    return None


def ground_set(p):
    if isinstance(p, ExplicitPat):
        out = []
        for m in p.members:
            g = ground_elem(m)
            if g is None:
                return None
            out.append(g)
        return gset(out)
    if isinstance(p, UnionPat):
        acc = []
        for q in p.parts:
            g = ground_set(q)
            if g is None:
                return None
            acc.extend(g)
        return gset(acc)
    return None


# ---------------------------------------------------------------------------
# base templates

_BASE_TEMPLATES = {}


def base_template(name):
    t = _BASE_TEMPLATES.get(name)
    if t is None:
        if name == "K":
            tvar = EVar("t")
            t = Template(
                ArrowPat(SingletonPat(tvar), ArrowPat(ExplicitPat(()), tvar))
            )
        elif name == "S":
            n = AVar("n")
            r_i = EVar("r", ("i",))
            f_i = SVar("f", ("i",))
            s = EVar("s")
            tau = SVar("tau")
            u = ArrowPat(tau, ArrowPat(FamilyPat(n, "i", r_i), s))
            mid = FamilyPat(n, "i", ArrowPat(f_i, r_i))
            sigma = UnionPat((tau, FamilyPat(n, "i", f_i)))
            t = Template(ArrowPat(ExplicitPat((u,)), ArrowPat(mid, ArrowPat(sigma, s))))
        else:
            raise KeyError(f"no base template for atom {name!r}")
        _BASE_TEMPLATES[name] = t
    return t


# ---------------------------------------------------------------------------
# unification (symbolic, used by compose)


def _occurs(key, p):
    return key in free_vars(p)


def _collect_foreign(p, own, scope, acc):
    """Variables in p whose index mentions a binder that is neither in
    scope inside p nor ranged over by the variable being bound."""
    if isinstance(p, (EVar, SVar, AVar)):
        gammas = {c for c in p.index
                  if isinstance(c, str) and c not in scope and c not in own}
        if gammas:
            prev = acc.setdefault(p.key, (p, set()))
            prev[1].update(gammas)
        return acc
    if isinstance(p, NatPat):
        return acc
    if isinstance(p, ArrowPat):
        _collect_foreign(p.ante, own, scope, acc)
        _collect_foreign(p.cons, own, scope, acc)
        return acc
    if isinstance(p, SingletonPat):
        return _collect_foreign(p.var, own, scope, acc)
    if isinstance(p, ExplicitPat):
        for m in p.members:
            _collect_foreign(m, own, scope, acc)
        return acc
    if isinstance(p, FamilyPat):
        if isinstance(p.arity, AVar):
            _collect_foreign(p.arity, own, scope, acc)
        return _collect_foreign(p.body, own, scope | {p.binder}, acc)
    if isinstance(p, UnionPat):
        for q in p.parts:
            _collect_foreign(q, own, scope, acc)
        return acc
    raise TypeError(f"not a pattern: {p!r}")


def _strip_foreign(b, var, val):
    """An equation var = val(gamma) for a binder gamma that var does not
    range over holds for every instance, so val must be constant in
    gamma: collapse each gamma-indexed variable onto its stripped form."""
    own = {c for c in var.index if isinstance(c, str)}
    foreign = _collect_foreign(val, own, frozenset(), {})
    if not foreign:
        return val
    for key, (v, gammas) in sorted(foreign.items()):
        idx = tuple(c for c in v.index if c not in gammas)
        if isinstance(v, AVar):
            b[key] = AVar(v.name, idx, v.minimum)
        else:
            b[key] = type(v)(v.name, idx)
    val = subst(val, b)
    if _collect_foreign(val, own, frozenset(), {}):
        raise UnsupportedUnification(
            "variable occurs both inside and outside its binder's scope"
        )
    return val


def _bind(b, var, val):
    if isinstance(val, (EVar, SVar)) and val.key == var.key:
        return
    val = _strip_foreign(b, var, val)
    if _occurs(var.key, val):
        raise _Clash  # no finite solution
    kind, name, index = var.key
    stripping = (
        isinstance(val, (EVar, SVar))
        and val.name == name
        and len(val.index) < len(index)
    )
    if not stripping:
        # a schema binding covers every instance of the variable, so a
        # value mentioning a sibling instance would be circular
        for k2 in free_vars(val):
            if k2[0] == kind and k2[1] == name:
                raise UnsupportedUnification(
                    f"binding relates distinct instances of {name!r}"
                )
    b[var.key] = val


def unify_elem(p, q, b, defer):
    p, q = subst(p, b), subst(q, b)
    if isinstance(p, EVar):
        if isinstance(q, EVar) and q.key == p.key:
            return
        _bind(b, p, q)
        return
    if isinstance(q, EVar):
        _bind(b, q, p)
        return
    if isinstance(p, NatPat) and isinstance(q, NatPat):
        if p.value != q.value:
            raise _Clash
        return
    if isinstance(p, ArrowPat) and isinstance(q, ArrowPat):
        unify_set(p.ante, q.ante, b, defer)
        unify_elem(p.cons, q.cons, b, defer)
        return
    if isinstance(p, NatPat) or isinstance(q, NatPat):
        raise _Clash  # a natural is never an arrow
    raise UnsupportedUnification(f"elem unify: {pretty(p)} vs {pretty(q)}")


def _unify_singletonish(var_or_member, other, b, defer):
    """Unify a known one-element set against another set pattern."""
    m = var_or_member
    if isinstance(other, (SingletonPat, ExplicitPat)):
        members = [other.var] if isinstance(other, SingletonPat) else list(other.members)
        if not members:
            raise _Clash
        for o in members:
            unify_elem(m, o, b, defer)
        return
    as_set = SingletonPat(m) if isinstance(m, EVar) else ExplicitPat((m,))
    if isinstance(other, FamilyPat):
        if not isinstance(other.body, ELEM_PATS):
            # {m} as a union of families constrains the parts jointly
            # (some may be empty); keep the equation for match time
            defer.append(Constraint((), as_set, other))
            return
        _require_arity_min(other.arity, 1, b)
        # every instance must collapse to one element: strip the binder
        # from each body variable, and record that binding so all other
        # occurrences of the indexed variables collapse too
        body = subst(other.body, b)
        for v in list(free_vars(body).values()):
            if other.binder in v.index:
                idx = tuple(c for c in v.index if c != other.binder)
                stripped = type(v)(v.name, idx) if not isinstance(v, AVar) \
                    else AVar(v.name, idx, v.minimum)
                _bind(b, v, stripped)
        unify_elem(m, subst(body, b), b, defer)
        return
    if isinstance(other, UnionPat):
        defer.append(Constraint((), as_set, other))
        return
    raise UnsupportedUnification(f"singleton vs {type(other).__name__}")


def _deindex(body, binder, b):
    """Strip the binder from variable indices: forces the body not to
    depend on the index (all instances equal)."""
    def strip(p):
        if isinstance(p, (EVar, SVar, AVar)):
            if binder in p.index:
                idx = tuple(c for c in p.index if c != binder)
                cls = type(p)
                if cls is AVar:
                    return AVar(p.name, idx, p.minimum)
                return cls(p.name, idx)
            return p
        if isinstance(p, NatPat):
            return p
        if isinstance(p, ArrowPat):
            return ArrowPat(strip(p.ante), strip(p.cons))
        if isinstance(p, SingletonPat):
            return SingletonPat(strip(p.var))
        if isinstance(p, ExplicitPat):
            return ExplicitPat(tuple(strip(m) for m in p.members))
        if isinstance(p, FamilyPat):
            ar = strip(p.arity) if isinstance(p.arity, AVar) else p.arity
            return FamilyPat(ar, p.binder, strip(p.body) if p.binder != binder else p.body)
        if isinstance(p, UnionPat):
            return UnionPat(tuple(strip(q) for q in p.parts))
        raise TypeError(f"not a pattern: {p!r}")

    return strip(subst(body, b))


def _requantify(local, binder, arity, defer):
    """Re-home equations deferred while unifying inside a family body:
    any that still mention the binder must stay quantified over it."""
    for c in local:
        if (
            _mentions_binder(c.left, binder)
            or _mentions_binder(c.right, binder)
            or any(
                isinstance(ar, AVar) and binder in ar.index
                for _, ar in c.binders
            )
        ):
            defer.append(Constraint(((binder, arity),) + c.binders, c.left, c.right))
        else:
            defer.append(c)


def _require_arity_min(a, k, b):
    a = resolve_arity(a, b)
    if isinstance(a, int):
        if a < k:
            raise _Clash
        return
    cur = b.get(("amin", a.name, a.index), a.minimum)
    if k > cur:
        b[("amin", a.name, a.index)] = k


def unify_set(p, q, b, defer):
    p, q = subst(p, b), subst(q, b)
    if isinstance(p, SVar):
        if isinstance(q, SVar) and q.key == p.key:
            return
        _bind(b, p, q)
        return
    if isinstance(q, SVar):
        _bind(b, q, p)
        return
    pk, qk = type(p), type(q)
    if pk is SingletonPat:
        _unify_singletonish(p.var, q, b, defer)
        return
    if qk is SingletonPat:
        _unify_singletonish(q.var, p, b, defer)
        return
    if pk is ExplicitPat and qk is ExplicitPat:
        np_, nq = len(p.members), len(q.members)
        if np_ == 0 or nq == 0:
            if np_ != nq:
                raise _Clash
            return
        if np_ == 1:
            _unify_singletonish(p.members[0], q, b, defer)
            return
        if nq == 1:
            _unify_singletonish(q.members[0], p, b, defer)
            return
        raise UnsupportedUnification("explicit listings of size >= 2 on both sides")
    if pk is ExplicitPat and qk is FamilyPat:
        _unify_explicit_family(p, q, b, defer)
        return
    if pk is FamilyPat and qk is ExplicitPat:
        _unify_explicit_family(q, p, b, defer)
        return
    if pk is FamilyPat and qk is FamilyPat:
        if isinstance(p.body, ELEM_PATS) != isinstance(q.body, ELEM_PATS):
            # a listing equated with a union of families: arities are
            # unrelated, keep the whole set equation for match time
            defer.append(Constraint((), p, q))
            return
        a1 = resolve_arity(p.arity, b)
        a2 = resolve_arity(q.arity, b)
        if isinstance(a1, int) and isinstance(a2, int):
            if a1 != a2:
                raise _Clash
        elif isinstance(a1, AVar):
            if isinstance(a2, int):
                if a2 < _amin(b, a1):
                    raise _Clash
                b[a1.key] = a2
            else:
                if a1.key != a2.key:
                    b[a1.key] = a2
                    _require_arity_min(a2, _amin(b, a1), b)
        else:  # a1 int, a2 AVar
            if a1 < _amin(b, a2):
                raise _Clash
            b[a2.key] = a1
        body1 = reindex(p.body, p.binder, q.binder)
        local = []
        if isinstance(body1, ELEM_PATS) and isinstance(q.body, ELEM_PATS):
            unify_elem(body1, q.body, b, local)
        elif isinstance(body1, SET_PATS) and isinstance(q.body, SET_PATS):
            unify_set(body1, q.body, b, local)
        else:
            raise UnsupportedUnification("family body kinds differ")
        _requantify(local, q.binder, resolve_arity(q.arity, b), defer)
        return
    # anything involving a union (or a form not handled above) is kept as
    # a retained equation, solved at match/enumerate time
    defer.append(Constraint((), p, q))


def _unify_explicit_family(e, fam, b, defer):
    k = len(e.members)
    ar = resolve_arity(fam.arity, b)
    if k == 0:
        if isinstance(ar, int):
            if ar != 0:
                raise _Clash
        else:
            if _amin(b, ar) > 0:
                raise _Clash
            b[ar.key] = 0
        return
    if k == 1:
        _unify_singletonish(e.members[0], fam, b, defer)
        return
    raise UnsupportedUnification("explicit listing of size >= 2 vs family")


# ---------------------------------------------------------------------------
# composition

_fresh_counter = itertools.count(1)


def fresh_copy(t: Template):
    suffix = f".{next(_fresh_counter)}"
    root = rename_vars(t.root, suffix)
    cons = tuple(
        Constraint(
            tuple(
                # the binder declaration must track the renamed references
                (bn + suffix, rename_vars(ar, suffix) if isinstance(ar, AVar) else ar)
                for bn, ar in c.binders
            ),
            rename_vars(c.left, suffix),
            rename_vars(c.right, suffix),
        )
        for c in t.constraints
    )
    return Template(root, cons)


def _subst_constraint(c, b):
    return Constraint(
        tuple(
            (bn, resolve_arity(ar, b) if isinstance(ar, AVar) else ar)
            for bn, ar in c.binders
        ),
        normalize(subst(c.left, b)),
        normalize(subst(c.right, b)),
    )


def compose(t1: Template, t2: Template) -> Template:
    """Template of an application, from templates of operator and operand."""
    if t1.is_empty:
        return EMPTY_TEMPLATE
    root = t1.root
    if not isinstance(root, ArrowPat):
        raise TemplateError(f"operator template root is not an arrow: {pretty(root)}")

    b = {}
    defer = []
    extra_constraints = list(t1.constraints)

    def add_copy(prefix):
        """Fresh operand copy; its root and constraints are indexed by the
        enclosing family binders so each instance varies independently."""
        copy = fresh_copy(t2)
        root = copy.root
        for bn, _ in prefix:
            root = index_append(root, bn)
        for c in copy.constraints:
            cb, cl, cr = c.binders, c.left, c.right
            for bn, bar in reversed(prefix):
                cb = ((bn, bar),) + cb
                cl = index_append(cl, bn)
                cr = index_append(cr, bn)
            extra_constraints.append(Constraint(cb, cl, cr))
        return root

    def push(local, prefix):
        """Quantify this scope's deferred equations over whichever prefix
        binders they mention, outermost binder first."""
        for c in local:
            for bn, bar in reversed(prefix):
                if (
                    _mentions_binder(c.left, bn)
                    or _mentions_binder(c.right, bn)
                    or any(
                        isinstance(a2, AVar) and bn in a2.index
                        for _, a2 in c.binders
                    )
                ):
                    c = Constraint(((bn, bar),) + c.binders, c.left, c.right)
            defer.append(c)

    def consume_member(m, prefix):
        local = []
        unify_elem(m, add_copy(prefix), b, local)
        push(local, prefix)

    def consume(ante, prefix=()):
        ante = subst(ante, b)
        if t2.is_empty:
            # the operand family is empty, so the antecedent must be empty
            local = []
            unify_set(ante, ExplicitPat(()), b, local)
            push(local, prefix)
            return
        if isinstance(ante, ExplicitPat):
            for m in ante.members:
                consume_member(m, prefix)
            return
        if isinstance(ante, SingletonPat):
            consume_member(ante.var, prefix)
            return
        if isinstance(ante, SVar):
            binder = f"i{next(_fresh_counter)}"
            arity = AVar(f"n{next(_fresh_counter)}",
                         tuple(bn for bn, _ in prefix))
            body = add_copy(prefix + ((binder, arity),))
            _bind(b, ante, FamilyPat(arity, binder, body))
            return
        if isinstance(ante, FamilyPat):
            body = ante.body
            if isinstance(body, SingletonPat):
                body = body.var
            sub = prefix + ((ante.binder, resolve_arity(ante.arity, b)),)
            if isinstance(body, ELEM_PATS):
                consume_member(body, sub)
            else:
                # a union-family: the antecedent is the union over the
                # binder of the instance sets
                consume(body, sub)
            return
        if isinstance(ante, UnionPat):
            for part in ante.parts:
                consume(part, prefix)
            return
        raise UnsupportedUnification(
            f"antecedent form not supported: {type(ante).__name__}"
        )

    try:
        consume(root.ante)
        new_root = normalize(subst(root.cons, b))
        out = []
        for c in defer + extra_constraints:
            c = _subst_constraint(c, b)
            gl, gr = ground_set(c.left), ground_set(c.right)
            if not c.binders and gl is not None and gr is not None:
                if gl != gr:
                    raise _Clash
                continue
            out.append(c)
    except _Clash:
        return EMPTY_TEMPLATE
    return Template(new_root, tuple(out))


@lru_cache(maxsize=None)
def template_of(term: Term) -> Template:
    """Template of a closed applicative term over the K and S atoms."""
    if isinstance(term, Atom):
        return base_template(term.name)
    if isinstance(term, App):
        return compose(template_of(term.left), template_of(term.right))
    raise TemplateError("templates are defined for closed K/S terms only")


# ---------------------------------------------------------------------------
# matching against concrete elements


class Matcher:
    """Backtracking matcher of patterns against concrete elements.

    `slack` widens the arity range tried for listing families whose arity
    variable is shared elsewhere: a family {r_i : i <= n} may be realized
    by fewer than n distinct values when instances collapse.
    """

    def __init__(self, slack=0, max_union_ground=6):
        self.slack = slack
        self.max_union_ground = max_union_ground

    # -- elements ----------------------------------------------------
    def match_elem(self, p, v, b):
        if isinstance(p, EVar):
            cur = b.get(p.key)
            if cur is None:
                b2 = dict(b)
                b2[p.key] = v
                yield b2
            elif isinstance(cur, GElem) and cur == v:
                yield b
            return
        if isinstance(p, NatPat):
            if isinstance(v, Nat) and v.value == p.value:
                yield b
            return
        if isinstance(p, ArrowPat):
            if isinstance(v, Arrow):
                for b1 in self.match_set(p.ante, v.ante, b):
                    yield from self.match_elem(p.cons, v.cons, b1)
            return
        raise UnsupportedMatch(f"element pattern {type(p).__name__}")

    # -- sets --------------------------------------------------------
    def match_set(self, p, g, b):
        if isinstance(p, SVar):
            cur = b.get(p.key)
            if cur is None:
                b2 = dict(b)
                b2[p.key] = g
                yield b2
            elif isinstance(cur, GSet) and cur == g:
                yield b
            return
        if isinstance(p, SingletonPat):
            if len(g) == 1:
                yield from self.match_elem(p.var, g[0], b)
            return
        if isinstance(p, ExplicitPat):
            yield from self._match_listing(p.members, g, b)
            return
        if isinstance(p, FamilyPat):
            yield from self._match_family(p, g, b)
            return
        if isinstance(p, UnionPat):
            yield from self._match_union(p, g, b)
            return
        raise UnsupportedMatch(f"set pattern {type(p).__name__}")

    def _match_listing(self, members, g, b):
        # each member pattern maps to some element; jointly they cover g
        if not members:
            if len(g) == 0:
                yield b
            return
        elems = list(g)

        def go(idx, bb, used):
            if idx == len(members):
                if len(used) == len(elems):
                    yield bb
                return
            for j, e in enumerate(elems):
                for b1 in self.match_elem(members[idx], e, bb):
                    yield from go(idx + 1, b1, used | {j})

        yield from go(0, b, frozenset())

    def _arity_candidates(self, a, g, b):
        a = resolve_arity(a, b)
        if isinstance(a, int):
            return a, [a]
        if len(g) == 0:
            # a family with at least one index never realizes the empty set
            return a, ([0] if a.minimum == 0 else [])
        lo = max(a.minimum, len(g))
        return a, list(range(lo, len(g) + self.slack + 1))

    def _match_family(self, p, g, b):
        body_is_elem = isinstance(p.body, ELEM_PATS)
        a, candidates = self._arity_candidates(p.arity, g, b)
        for n in candidates:
            if n < len(g) and body_is_elem:
                continue
            b0 = b
            if isinstance(a, AVar):
                b0 = dict(b)
                b0[a.key] = n
            if n == 0:
                if len(g) == 0:
                    yield b0
                continue
            if body_is_elem:
                yield from self._family_listing(p, n, list(g), b0)
            else:
                yield from self._family_union(p, n, g, b0)

    def _family_listing(self, p, n, elems, b):
        # surjective assignments of indices 1..n to the elements
        def go(i, bb, used):
            if i > n:
                if len(used) == len(elems):
                    yield bb
                return
            remaining = n - i + 1
            for j, e in enumerate(elems):
                missing = len(elems) - len(used | {j})
                if missing > remaining - 1:
                    continue
                body_i = reindex(p.body, p.binder, i)
                for b1 in self.match_elem(body_i, e, bb):
                    yield from go(i + 1, b1, used | {j})

        yield from go(1, b, frozenset())

    def _family_union(self, p, n, g, b):
        # union over i of set-valued bodies equals g
        inst = []
        all_ground = True
        for i in range(1, n + 1):
            body_i = _concretize(reindex(p.body, p.binder, i), b)
            gs = ground_set(body_i)
            if gs is None:
                all_ground = False
            inst.append((body_i, gs))
        if all_ground:
            acc = []
            for _, gs in inst:
                acc.extend(gs)
            if gset(acc) == g:
                yield b
            return
        if len(g) > 4 or n > 4:
            raise UnsupportedMatch("union family too wide to search")
        subsets = list(_subsets(list(g)))

        def go(i, bb, acc):
            if i == n:
                if gset(acc) == g:
                    yield bb
                return
            body_i, gs = inst[i]
            if gs is not None:
                yield from go(i + 1, bb, acc + list(gs))
                return
            for sub in subsets:
                for b1 in self.match_set(_concretize(body_i, bb), gset(sub), bb):
                    yield from go(i + 1, b1, acc + list(sub))

        yield from go(0, b, [])

    def _match_union(self, p, g, b):
        ground_parts = []
        open_parts = []
        for q in p.parts:
            qq = _concretize(q, b)
            gs = ground_set(qq)
            if gs is None:
                open_parts.append(qq)
            else:
                ground_parts.append(gs)
        covered = []
        for gs in ground_parts:
            if not gs.issubset(g):
                return
            covered.extend(gs)
        covered = gset(covered)
        leftover = [e for e in g if e not in covered]
        if not open_parts:
            if not leftover:
                yield b
            return
        if len(open_parts) == 1:
            extras = list(covered)
            if len(extras) > self.max_union_ground:
                option_sets = [leftover, list(g)]
            else:
                option_sets = [leftover + list(sub) for sub in _subsets(extras)]
            seen = set()
            for opt in option_sets:
                val = gset(opt)
                if val._key in seen:
                    continue
                seen.add(val._key)
                yield from self.match_set(open_parts[0], val, b)
            return
        if len(open_parts) == 2 and len(leftover) <= 4 and len(g) <= 4:
            # split the leftover between the two open parts, allowing overlap
            # with already-covered elements
            pool = list(g)
            for sub1 in _subsets(pool):
                rest = [e for e in leftover if e not in gset(sub1)]
                for extra in _subsets([e for e in pool if e not in gset(rest)]):
                    val2 = gset(rest + list(extra))
                    for b1 in self.match_set(open_parts[0], gset(sub1), b):
                        yield from self.match_set(open_parts[1], val2, b1)
            return
        raise UnsupportedMatch("too many open union parts")


def _subsets(xs):
    for k in range(len(xs) + 1):
        yield from itertools.combinations(xs, k)


# ---------------------------------------------------------------------------
# constraint checking at match/enumerate time


def _max_set_width(e):
    if isinstance(e, Arrow):
        return max(
            len(e.ante),
            max((_max_set_width(x) for x in e.ante), default=0),
            _max_set_width(e.cons),
        )
    return 0


def check_constraints(constraints, b, slack, max_arity=4):
    """All retained equations hold (for some value of any leftover
    existential variables) under concrete bindings b."""
    for c in constraints:
        if not _constraint_ok(c, b, slack, max_arity):
            return False
    return True


def _constraint_ok(c, b, slack, max_arity):
    if c.binders:
        (binder, arity), rest = c.binders[0], c.binders[1:]
        a = resolve_arity(arity, b)
        if isinstance(a, AVar):
            val = b.get(a.key)
            a = val if isinstance(val, int) else None
        candidates = [a] if isinstance(a, int) else range(0, max_arity + 1)
        for n in candidates:
            ok = True
            for i in range(1, n + 1):
                sub = Constraint(
                    rest, reindex(c.left, binder, i), reindex(c.right, binder, i)
                )
                if not _constraint_ok(sub, b, slack, max_arity):
                    ok = False
                    break
            if ok:
                return True
        return False
    left = normalize(_concretize(c.left, b))
    right = normalize(_concretize(c.right, b))
    gl, gr = _ground_set_under(left, b), _ground_set_under(right, b)
    if gl is not None and gr is not None:
        return gl == gr
    matcher = Matcher(slack=slack)
    if gl is not None:
        return _matches_set(matcher, right, gl, b)
    if gr is not None:
        return _matches_set(matcher, left, gr, b)
    raise UnsupportedMatch(
        f"set equation with both sides open: {pretty(left)} = {pretty(right)}"
    )


def _ground_set_under(p, b):
    return ground_set(_concretize(p, b))


def _concretize(p, b):
    """Replace variables bound to concrete values with literal patterns."""
    if isinstance(p, EVar):
        v = b.get(p.key)
        return _value_to_elem_pat(v) if isinstance(v, GElem) else p
    if isinstance(p, SVar):
        v = b.get(p.key)
        return _value_to_set_pat(v) if isinstance(v, GSet) else p
    if isinstance(p, NatPat):
        return p
    if isinstance(p, ArrowPat):
        return ArrowPat(_concretize(p.ante, b), _concretize(p.cons, b))
    if isinstance(p, SingletonPat):
        inner = _concretize(p.var, b)
        return SingletonPat(inner) if isinstance(inner, EVar) else ExplicitPat((inner,))
    if isinstance(p, ExplicitPat):
        return ExplicitPat(tuple(_concretize(m, b) for m in p.members))
    if isinstance(p, FamilyPat):
        ar = resolve_arity(p.arity, b)
        if isinstance(ar, AVar):
            bound = b.get(ar.key)
            if isinstance(bound, int):
                ar = bound
        if isinstance(ar, int):
            insts = tuple(
                _concretize(reindex(p.body, p.binder, i), b)
                for i in range(1, ar + 1)
            )
            if isinstance(p.body, ELEM_PATS):
                return normalize(ExplicitPat(insts))
            return normalize(UnionPat(insts)) if insts else ExplicitPat(())
        return normalize(FamilyPat(ar, p.binder, _concretize(p.body, b)))
    if isinstance(p, UnionPat):
        return UnionPat(tuple(_concretize(q, b) for q in p.parts))
    raise TypeError(f"not a pattern: {p!r}")


def _value_to_elem_pat(v):
    if isinstance(v, Nat):
        return NatPat(v.value)
    return ArrowPat(_value_to_set_pat(v.ante), _value_to_elem_pat(v.cons))


def _value_to_set_pat(g):
    return ExplicitPat(tuple(_value_to_elem_pat(x) for x in g))


def _matches_set(matcher, pattern, value, b):
    try:
        for _ in matcher.match_set(pattern, value, dict(b)):
            return True
    except UnsupportedMatch:
        raise
    return False


# ---------------------------------------------------------------------------
# membership and enumeration


def matches(t: Template, e: GElem):
    """Bindings under which the concrete element realizes the template
    (retained constraints verified)."""
    if t.is_empty:
        return
    slack = _max_set_width(e)
    matcher = Matcher(slack=slack)
    for b in matcher.match_elem(t.root, e, {}):
        if check_constraints(t.constraints, b, slack):
            yield b


def member_via_template(t: Template, e: GElem) -> bool:
    """Exact membership of a concrete element in the described family."""
    for _ in matches(t, e):
        return True
    return False


def instantiate(t: Template, b) -> GElem:
    """Build the concrete element for a fully concrete binding."""
    if t.is_empty:
        raise TemplateError("cannot instantiate the empty template")
    pat = _concretize(t.root, b)
    g = ground_elem(pat)
    if g is None:
        missing = sorted(k for k in free_vars(pat))
        raise TemplateError(f"binding leaves variables open: {missing}")
    return g


def template_member(term: Term, e: GElem) -> bool:
    return member_via_template(template_of(term), e)


_POOL_CACHE = {}


def _pool(rank, set_size, max_nat):
    key = (rank, set_size, max_nat)
    pool = _POOL_CACHE.get(key)
    if pool is None:
        pool = tuple(enumerate_g(rank, set_size, max_nat))
        _POOL_CACHE[key] = pool
    return pool


class _Enumerator:
    def __init__(self, bounds: Bounds, budget=2_000_000):
        self.bounds = bounds
        self.budget = budget
        self.steps = 0

    def _tick(self):
        self.steps += 1
        if self.steps > self.budget:
            raise BudgetExceeded(
                f"template enumeration exceeded {self.budget} steps"
            )

    def gen_elem(self, p, depth, b):
        self._tick()
        bounds = self.bounds
        if isinstance(p, EVar):
            cur = b.get(p.key)
            if cur is not None:
                if cur.rank <= depth:
                    yield cur, b
                return
            for v in _pool(min(depth, bounds.max_rank), bounds.max_set_size,
                           bounds.max_nat):
                b2 = dict(b)
                b2[p.key] = v
                yield v, b2
            return
        if isinstance(p, NatPat):
            if p.value <= bounds.max_nat:
                yield nat(p.value), b
            return
        if isinstance(p, ArrowPat):
            if depth < 1:
                return
            for aset, b1 in self.gen_set(p.ante, depth - 1, b):
                for c, b2 in self.gen_elem(p.cons, depth - 1, b1):
                    yield Arrow(aset, c), b2
            return
        raise TemplateError(f"cannot enumerate element pattern {type(p).__name__}")

    def gen_set(self, p, depth, b):
        self._tick()
        bounds = self.bounds
        if isinstance(p, SVar):
            cur = b.get(p.key)
            if cur is not None:
                if all(x.rank <= depth for x in cur):
                    yield cur, b
                return
            pool = _pool(min(depth, bounds.max_rank), bounds.max_set_size,
                         bounds.max_nat)
            for k in range(0, bounds.max_set_size + 1):
                for combo in itertools.combinations(pool, k):
                    self._tick()
                    b2 = dict(b)
                    val = gset(combo)
                    b2[p.key] = val
                    yield val, b2
            return
        if isinstance(p, SingletonPat):
            for v, b1 in self.gen_elem(p.var, depth, b):
                yield gset((v,)), b1
            return
        if isinstance(p, ExplicitPat):
            def go(idx, bb, acc):
                if idx == len(p.members):
                    val = gset(acc)
                    if len(val) <= bounds.max_set_size:
                        yield val, bb
                    return
                for v, b1 in self.gen_elem(p.members[idx], depth, bb):
                    yield from go(idx + 1, b1, acc + [v])

            yield from go(0, b, [])
            return
        if isinstance(p, FamilyPat):
            ar = resolve_arity(p.arity, b)
            if isinstance(ar, AVar):
                bound = b.get(ar.key)
                if isinstance(bound, int):
                    arities = [bound]
                else:
                    arities = list(range(_amin(b, ar), bounds.max_arity + 1))
            else:
                arities = [ar]
            for n in arities:
                b0 = b
                if isinstance(ar, AVar) and not isinstance(b.get(ar.key), int):
                    b0 = dict(b)
                    b0[ar.key] = n
                yield from self._gen_family(p, n, depth, b0)
            return
        if isinstance(p, UnionPat):
            def go(idx, bb, acc):
                if idx == len(p.parts):
                    val = gset(acc)
                    if len(val) <= bounds.max_set_size:
                        yield val, bb
                    return
                for s, b1 in self.gen_set(p.parts[idx], depth, bb):
                    yield from go(idx + 1, b1, acc + list(s))

            yield from go(0, b, [])
            return
        raise TemplateError(f"cannot enumerate set pattern {type(p).__name__}")

    def _gen_family(self, p, n, depth, b):
        bounds = self.bounds

        def go(i, bb, acc):
            if i > n:
                val = gset(acc)
                if len(val) <= bounds.max_set_size:
                    yield val, bb
                return
            inst = reindex(p.body, p.binder, i)
            if isinstance(inst, SingletonPat):
                inst = inst.var
            if isinstance(inst, ELEM_PATS):
                for v, b1 in self.gen_elem(inst, depth, bb):
                    yield from go(i + 1, b1, acc + [v])
            else:
                for s, b1 in self.gen_set(inst, depth, bb):
                    yield from go(i + 1, b1, acc + list(s))

        if n == 0:
            yield gset(()), b
            return
        yield from go(1, b, [])


def enumerate_template(t: Template, bounds: Bounds, budget=2_000_000):
    """All described elements within the bounds.

    Returns (elements, truncated); truncated is always True for a
    nonempty pattern since the full family is unbounded in general.
    """
    if t.is_empty:
        return [], False
    enum = _Enumerator(bounds, budget)
    out = []
    seen = set()
    slack = max(bounds.max_set_size, bounds.max_arity)
    for v, b in enum.gen_elem(t.root, bounds.max_rank, {}):
        if v._key in seen:
            continue
        if check_constraints(t.constraints, b, slack, bounds.max_arity):
            seen.add(v._key)
            out.append(v)
    out.sort()
    return out, True


# ---------------------------------------------------------------------------
# staged application against extensional argument sets


def apply_template_chain(t: Template, arg_sets, bounds: Bounds):
    """Elements of t applied to extensional argument sets, stage by stage.

    Each stage consumes one argument set N: the current pattern must be
    an arrow, its antecedent is matched against finite subsets of N, and
    surviving branches continue with the consequent.  Ground results are
    exact; branches with leftover variables fall back to bounded
    enumeration and set the truncation flag.
    """
    if t.is_empty:
        return [], False
    sets = [s if isinstance(s, GSet) else gset(s) for s in arg_sets]
    slack = max(bounds.max_set_size, bounds.max_arity,
                max((_max_set_width(e) for s in sets for e in s), default=0))
    matcher = Matcher(slack=slack)
    cap = max(bounds.max_set_size, bounds.max_arity)
    truncated = False

    cvar_keys = set()
    for c in t.constraints:
        cvar_keys.update(free_vars(c.left))
        cvar_keys.update(free_vars(c.right))
        for _, ar in c.binders:
            if isinstance(ar, AVar):
                cvar_keys.add(ar.key)

    def _state_key(pat, b):
        extra = tuple(
            sorted(
                (k, v._key if isinstance(v, (GElem, GSet)) else v)
                for k, v in b.items()
                if k in cvar_keys
            )
        )
        return pat_key(subst(_concretize(pat, b), b)), extra

    states = [(t.root, {})]
    for n_set in sets:
        nxt = []
        for pat, b in states:
            pat = subst(_concretize(pat, b), b)
            if isinstance(pat, EVar):
                return [], True  # unconstrained head: nothing exact to say
            if not isinstance(pat, ArrowPat):
                continue  # naturals never apply
            for b1 in _match_ante(matcher, pat.ante, n_set, b, cap):
                nxt.append((pat.cons, b1))
        seen = set()
        states = []
        for pat, b in nxt:
            key = _state_key(pat, b)
            if key not in seen:
                seen.add(key)
                states.append((pat, b))
    out = []
    seen = set()
    enum = _Enumerator(bounds)
    for pat, b in states:
        pat = subst(_concretize(pat, b), b)
        g = ground_elem(pat)
        if g is not None:
            if g._key not in seen and \
                    check_constraints(t.constraints, b, slack, bounds.max_arity):
                seen.add(g._key)
                out.append(g)
            continue
        truncated = True
        for v, b2 in enum.gen_elem(pat, bounds.max_rank, b):
            if check_constraints(t.constraints, b2, slack, bounds.max_arity) \
                    and v._key not in seen:
                seen.add(v._key)
                out.append(v)
    out.sort()
    return out, truncated


def _match_ante(matcher, ante, n_set, b, cap):
    """Bindings for which the antecedent denotes a subset of n_set."""
    ante = subst(_concretize(ante, b), b)
    g = ground_set(ante)
    if g is not None:
        if g.issubset(n_set):
            yield b
        return
    if isinstance(ante, ExplicitPat):
        # each member maps to an element of the argument set
        def go(idx, bb):
            if idx == len(ante.members):
                yield bb
                return
            for e in n_set:
                for b1 in matcher.match_elem(ante.members[idx], e, bb):
                    yield from go(idx + 1, b1)

        yield from go(0, b)
        return
    if isinstance(ante, SingletonPat):
        for e in n_set:
            yield from matcher.match_elem(ante.var, e, b)
        return
    if isinstance(ante, SVar):
        cur = b.get(ante.key)
        if cur is not None:
            if cur.issubset(n_set):
                yield b
            return
        for k in range(0, min(cap, len(n_set)) + 1):
            for combo in itertools.combinations(list(n_set), k):
                b2 = dict(b)
                b2[ante.key] = gset(combo)
                yield b2
        return
    if isinstance(ante, FamilyPat):
        limit = min(cap, len(n_set))
        for k in range(0, limit + 1):
            for combo in itertools.combinations(list(n_set), k):
                yield from matcher.match_set(ante, gset(combo), b)
        return
    if isinstance(ante, UnionPat):
        # match the union against candidate subsets of the argument set
        limit = min(cap + len(ante.parts), len(n_set))
        for k in range(0, limit + 1):
            for combo in itertools.combinations(list(n_set), k):
                yield from matcher.match_set(ante, gset(combo), b)
        return
    raise UnsupportedMatch(f"antecedent form {type(ante).__name__}")


# ---------------------------------------------------------------------------
# the closure predicate used by the companion experiments


def has_singleton_setvar(t: Template) -> bool:
    """Does any antecedent position consist of a lone variable singleton?"""
    if t.is_empty:
        return False

    found = False

    def walk(p):
        nonlocal found
        if found:
            return
        if isinstance(p, ArrowPat):
            walk(p.ante)
            walk(p.cons)
        elif isinstance(p, SingletonPat):
            found = True
        elif isinstance(p, ExplicitPat):
            for m in p.members:
                walk(m)
        elif isinstance(p, FamilyPat):
            walk(p.body)
        elif isinstance(p, UnionPat):
            for q in p.parts:
                walk(q)

    walk(t.root)
    for c in t.constraints:
        walk(c.left)
        walk(c.right)
    return found


# ---------------------------------------------------------------------------
# rendering and serialization


def pretty(p) -> str:
    if isinstance(p, EVar):
        return _var_text(p.name, p.index)
    if isinstance(p, NatPat):
        return str(p.value)
    if isinstance(p, ArrowPat):
        return f"({pretty(p.ante)} -> {pretty(p.cons)})"
    if isinstance(p, SVar):
        return _var_text(p.name, p.index)
    if isinstance(p, SingletonPat):
        return "{" + pretty(p.var) + "}"
    if isinstance(p, ExplicitPat):
        return "{" + ", ".join(pretty(m) for m in p.members) + "}"
    if isinstance(p, AVar):
        return _var_text(p.name, p.index)
    if isinstance(p, FamilyPat):
        ar = str(p.arity) if isinstance(p.arity, int) else pretty(p.arity)
        if isinstance(p.body, ELEM_PATS):
            return "{" + f"{pretty(p.body)} : {p.binder} in 1..{ar}" + "}"
        return f"U({p.binder} in 1..{ar}) {pretty(p.body)}"
    if isinstance(p, UnionPat):
        return " + ".join(pretty(q) for q in p.parts)
    raise TypeError(f"not a pattern: {p!r}")


def template_to_text(t: Template) -> str:
    if t.is_empty:
        return "<empty>"
    lines = [pretty(t.root)]
    for c in t.constraints:
        prefix = "".join(
            f"forall {bn} in 1..{ar if isinstance(ar, int) else pretty(ar)}: "
            for bn, ar in c.binders
        )
        lines.append(f"  where {prefix}{pretty(c.left)} = {pretty(c.right)}")
    return "\n".join(lines)


def _var_text(name, index):
    if not index:
        return name
    return name + "[" + ",".join(str(c) for c in index) + "]"


def pattern_to_json(p):
    if isinstance(p, EVar):
        return {"evar": {"name": p.name, "index": list(p.index)}}
    if isinstance(p, NatPat):
        return {"nat": p.value}
    if isinstance(p, ArrowPat):
        return {"tarrow": {"ante": pattern_to_json(p.ante),
                           "cons": pattern_to_json(p.cons)}}
    if isinstance(p, SVar):
        return {"svar": {"name": p.name, "index": list(p.index)}}
    if isinstance(p, SingletonPat):
        return {"singleton": pattern_to_json(p.var)}
    if isinstance(p, ExplicitPat):
        return {"explicit": [pattern_to_json(m) for m in p.members]}
    if isinstance(p, FamilyPat):
        if isinstance(p.arity, int):
            ar = p.arity
        else:
            ar = {"name": p.arity.name, "index": list(p.arity.index),
                  "min": p.arity.minimum}
        return {"family": {"arity": ar, "index": p.binder,
                           "body": pattern_to_json(p.body)}}
    if isinstance(p, UnionPat):
        return {"union": [pattern_to_json(q) for q in p.parts]}
    raise TypeError(f"not a pattern: {p!r}")


def template_to_json(t: Template):
    if t.is_empty:
        return {"empty": True}
    return {
        "root": pattern_to_json(t.root),
        "constraints": [
            {
                "binders": [
                    {"index": bn,
                     "arity": ar if isinstance(ar, int) else
                     {"name": ar.name, "index": list(ar.index), "min": ar.minimum}}
                    for bn, ar in c.binders
                ],
                "left": pattern_to_json(c.left),
                "right": pattern_to_json(c.right),
            }
            for c in t.constraints
        ],
    }
