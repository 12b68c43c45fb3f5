"""Seeded random generators for well-typed terms, shared by property tests."""

import random

from metaprover.term import (
    Abs, App, BaseType, Bound, Const, Free, FunType, Var, fn_type,
)

TERM = BaseType("term")
FORM = BaseType("form")


def random_type(rng, depth=2):
    if depth == 0 or rng.random() < 0.6:
        return rng.choice([TERM, FORM])
    return FunType(random_type(rng, depth - 1), random_type(rng, depth - 1))


def _ty_tag(ty):
    """Short stable tag so distinct types never share a free/var name."""
    if isinstance(ty, FunType):
        return f"F{_ty_tag(ty.dom)}{_ty_tag(ty.rng)}"
    return ty.name[0]


def random_term(rng, ty, bound=(), depth=3, consts=None, allow_vars=True):
    """A random well-typed term of type ty; `bound` is the de Bruijn context."""
    consts = consts if consts is not None else DEFAULT_CONSTS
    candidates = []
    if depth > 0 and isinstance(ty, FunType):
        candidates.append("abs")
    tag = _ty_tag(ty)
    atom_pool = [Bound(i) for i, bty in enumerate(bound) if bty == ty]
    atom_pool += [Const(n, cty) for n, cty in consts if cty == ty]
    atom_pool += [Free(n + tag, ty) for n in ("x", "y", "c")]
    if allow_vars:
        atom_pool += [Var(n + tag, 0, ty) for n in ("X", "Y")]
    candidates.append("atom")
    if depth > 0:
        candidates.append("app")
    choice = rng.choice(candidates)
    if choice == "abs":
        body = random_term(rng, ty.rng, (ty.dom,) + bound, depth - 1, consts, allow_vars)
        return Abs("v", ty.dom, body)
    if choice == "app" and depth > 0:
        aty = random_type(rng, 1)
        f = random_term(rng, FunType(aty, ty), bound, depth - 1, consts, allow_vars)
        a = random_term(rng, aty, bound, depth - 1, consts, allow_vars)
        return App(f, a)
    return rng.choice(atom_pool)


DEFAULT_CONSTS = [
    ("f", FunType(TERM, TERM)),
    ("g", fn_type([TERM, TERM], TERM)),
    ("p", FunType(TERM, FORM)),
    ("q", fn_type([TERM, TERM], FORM)),
    ("a", TERM),
    ("b", TERM),
]


def rng_for(seed):
    return random.Random(seed)
