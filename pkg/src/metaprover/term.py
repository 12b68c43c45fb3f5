"""Simply typed lambda-terms with de Bruijn bound variables.

This is the syntax everything else stands on: types are base names or
function types, terms are constants, free parameters, de Bruijn bounds,
schematic (unification) variables, abstractions and applications.
Equality on terms is alpha-equality for free: bound-variable names are
display hints excluded from comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Union


class TermError(Exception):
    pass


class UndeclaredConstant(TermError):
    pass


class TypeMismatch(TermError):
    pass


class LooseBoundVariable(TermError):
    pass


# ---------------------------------------------------------------- types

@dataclass(frozen=True, slots=True)
class BaseType:
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class FunType:
    dom: "Type"
    rng: "Type"

    def __repr__(self):
        d = f"({self.dom!r})" if isinstance(self.dom, FunType) else repr(self.dom)
        return f"{d} -> {self.rng!r}"


Type = Union[BaseType, FunType]

PROP = BaseType("prop")


def fn_type(doms, rng: Type) -> Type:
    """tau1 -> ... -> taun -> rng, right associated."""
    for d in reversed(list(doms)):
        rng = FunType(d, rng)
    return rng


def strip_fun(ty: Type) -> tuple[list[Type], Type]:
    """Split a type into argument types and final base type."""
    doms = []
    while isinstance(ty, FunType):
        doms.append(ty.dom)
        ty = ty.rng
    return doms, ty


def contains_prop_in_dom(ty: Type) -> bool:
    """True if prop occurs inside a domain position (predicativity check)."""
    match ty:
        case BaseType():
            return False
        case FunType(dom, rng):
            if _mentions_prop(dom):
                return True
            return contains_prop_in_dom(rng)
    return False


def _mentions_prop(ty: Type) -> bool:
    match ty:
        case BaseType(name):
            return name == "prop"
        case FunType(dom, rng):
            return _mentions_prop(dom) or _mentions_prop(rng)
    return False


# ---------------------------------------------------------------- terms
#
# Hand-rolled nodes (not dataclasses): equality gets an identity fast path,
# hashes are cached, and Abs ignores its display hint in both — so == is
# alpha-equality under de Bruijn indexing.

class Const:
    __slots__ = ("name", "ty", "_h", "_nf")
    __match_args__ = ("name", "ty")

    def __init__(self, name: str, ty: Type):
        self.name = name
        self.ty = ty
        self._h = hash((1, name, ty))
        self._nf = True

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is Const and self.name == other.name
                and self.ty == other.ty)

    def __hash__(self):
        return self._h

    def __repr__(self):
        return self.name


class Free:
    __slots__ = ("name", "ty", "_h", "_nf")
    __match_args__ = ("name", "ty")

    def __init__(self, name: str, ty: Type):
        self.name = name
        self.ty = ty
        self._h = hash((2, name, ty))
        self._nf = True

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is Free and self.name == other.name
                and self.ty == other.ty)

    def __hash__(self):
        return self._h

    def __repr__(self):
        return self.name


class Bound:
    __slots__ = ("index", "_h", "_nf")
    __match_args__ = ("index",)

    def __init__(self, index: int):
        self.index = index
        self._h = hash((3, index))
        self._nf = True

    def __eq__(self, other):
        if self is other:
            return True
        return type(other) is Bound and self.index == other.index

    def __hash__(self):
        return self._h

    def __repr__(self):
        return f"B{self.index}"


class Var:
    """Schematic variable ?name, the unification unknown."""

    __slots__ = ("name", "serial", "ty", "_h", "_nf")
    __match_args__ = ("name", "serial", "ty")

    def __init__(self, name: str, serial: int, ty: Type):
        self.name = name
        self.serial = serial
        self.ty = ty
        self._h = hash((4, name, serial, ty))
        self._nf = True

    @property
    def key(self) -> tuple[str, int]:
        return (self.name, self.serial)

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is Var and self.name == other.name
                and self.serial == other.serial and self.ty == other.ty)

    def __hash__(self):
        return self._h

    def __repr__(self):
        return f"?{self.name}{self.serial or ''}"


class Abs:
    __slots__ = ("hint", "bind_ty", "body", "_h", "_nf")
    __match_args__ = ("hint", "bind_ty", "body")

    def __init__(self, hint: str, bind_ty: Type, body: "Term"):
        self.hint = hint
        self.bind_ty = bind_ty
        self.body = body
        self._h = hash((5, bind_ty, body))
        self._nf = False

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is Abs and self.bind_ty == other.bind_ty
                and self.body == other.body)

    def __hash__(self):
        return self._h

    def __repr__(self):
        return f"(%{self.hint}. {self.body!r})"


class App:
    __slots__ = ("fun", "arg", "_h", "_nf")
    __match_args__ = ("fun", "arg")

    def __init__(self, fun: "Term", arg: "Term"):
        self.fun = fun
        self.arg = arg
        self._h = hash((6, fun._h, arg._h))
        self._nf = False

    def __eq__(self, other):
        if self is other:
            return True
        return (type(other) is App and self._h == other._h
                and self.fun == other.fun and self.arg == other.arg)

    def __hash__(self):
        return self._h

    def __repr__(self):
        h, args = strip_app(self)
        return f"{h!r}({', '.join(map(repr, args))})"


Term = Union[Const, Free, Bound, Var, Abs, App]

_B0 = Bound(0)


def mentions_any_var(t: Term, keys) -> bool:
    """Early-exit scan: does t mention any schematic variable in keys?"""
    stack = [t]
    while stack:
        u = stack.pop()
        tu = type(u)
        if tu is Var:
            if (u.name, u.serial) in keys:
                return True
        elif tu is App:
            stack.append(u.fun)
            stack.append(u.arg)
        elif tu is Abs:
            stack.append(u.body)
    return False


def has_vars(t: Term) -> bool:
    stack = [t]
    while stack:
        u = stack.pop()
        tu = type(u)
        if tu is Var:
            return True
        if tu is App:
            stack.append(u.fun)
            stack.append(u.arg)
        elif tu is Abs:
            stack.append(u.body)
    return False


def apps(fun: Term, *args: Term) -> Term:
    for a in args:
        fun = App(fun, a)
    return fun


def lams(binders, body: Term) -> Term:
    """lams([("x", ty), ...], body) — wrap abstractions, innermost last."""
    for hint, ty in reversed(list(binders)):
        body = Abs(hint, ty, body)
    return body


def strip_app(t: Term) -> tuple[Term, list[Term]]:
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def strip_abs(t: Term) -> tuple[list[tuple[str, Type]], Term]:
    binders = []
    while isinstance(t, Abs):
        binders.append((t.hint, t.bind_ty))
        t = t.body
    return binders, t


# ------------------------------------------------------- index plumbing

def shift(t: Term, by: int, cutoff: int = 0) -> Term:
    """Add `by` to every loose Bound index >= cutoff."""
    match t:
        case Bound(i):
            return Bound(i + by) if i >= cutoff else t
        case Abs(h, ty, b):
            b2 = shift(b, by, cutoff + 1)
            return t if b2 is b else Abs(h, ty, b2)
        case App(f, a):
            f2, a2 = shift(f, by, cutoff), shift(a, by, cutoff)
            return t if f2 is f and a2 is a else App(f2, a2)
        case _:
            return t


def subst_bound(body: Term, arg: Term) -> Term:
    """body[Bound 0 := arg], decrementing the remaining loose indices."""

    def go(t: Term, depth: int) -> Term:
        match t:
            case Bound(i):
                if i == depth:
                    return shift(arg, depth)
                return Bound(i - 1) if i > depth else t
            case Abs(h, ty, b):
                return Abs(h, ty, go(b, depth + 1))
            case App(f, a):
                return App(go(f, depth), go(a, depth))
            case _:
                return t

    return go(body, 0)


def loose_bounds(t: Term, depth: int = 0) -> set[int]:
    """The loose de Bruijn indices of t, relative to `depth` binders."""
    match t:
        case Bound(i):
            return {i - depth} if i >= depth else set()
        case Abs(_, _, b):
            return loose_bounds(b, depth + 1)
        case App(f, a):
            return loose_bounds(f, depth) | loose_bounds(a, depth)
        case _:
            return set()


def is_closed(t: Term) -> bool:
    return not loose_bounds(t)


def occurs_free(name: str, t: Term) -> bool:
    """Does the Free called `name` occur in t?"""
    match t:
        case Free(n, _):
            return n == name
        case Abs(_, _, b):
            return occurs_free(name, b)
        case App(f, a):
            return occurs_free(name, f) or occurs_free(name, a)
        case _:
            return False


def frees_of(t: Term) -> dict[str, Type]:
    out: dict[str, Type] = {}

    def go(t: Term):
        match t:
            case Free(n, ty):
                out[n] = ty
            case Abs(_, _, b):
                go(b)
            case App(f, a):
                go(f)
                go(a)

    go(t)
    return out


def vars_of(t: Term) -> dict[tuple[str, int], Type]:
    out: dict[tuple[str, int], Type] = {}

    def go(t: Term):
        match t:
            case Var(n, s, ty):
                out[(n, s)] = ty
            case Abs(_, _, b):
                go(b)
            case App(f, a):
                go(f)
                go(a)

    go(t)
    return out


def max_serial(t: Term) -> int:
    m = -1
    for (_, s) in vars_of(t):
        m = max(m, s)
    return m


def consts_of(t: Term) -> set[str]:
    match t:
        case Const(n, _):
            return {n}
        case Abs(_, _, b):
            return consts_of(b)
        case App(f, a):
            return consts_of(f) | consts_of(a)
        case _:
            return set()


# ---------------------------------------------------------- type checks

def fast_type(t: Term, bstack: tuple[Type, ...] = ()) -> Type:
    """Type of t from the types carried on its leaves; no signature checks."""
    match t:
        case Const(_, ty):
            return ty
        case Free(_, ty):
            return ty
        case Var(_, _, ty):
            return ty
        case Bound(i):
            if i >= len(bstack):
                raise LooseBoundVariable(f"loose bound index {i}")
            return bstack[i]
        case Abs(_, ty, b):
            return FunType(ty, fast_type(b, (ty,) + bstack))
        case App(f, a):
            fty = fast_type(f, bstack)
            if not isinstance(fty, FunType):
                raise TypeMismatch(f"applying non-function {f!r} : {fty!r}")
            aty = fast_type(a, bstack)
            if fty.dom != aty:
                raise TypeMismatch(
                    f"argument type {aty!r} does not fit {fty!r} in {t!r}")
            return fty.rng
    raise TermError(f"not a term: {t!r}")


# ------------------------------------------------------- normalization

def beta_eta_normalize(t: Term) -> Term:
    """Beta-normal, eta-short normal form. Total on well-typed terms.
    Identity-preserving: unchanged subterms are returned as-is; normality is
    cached on the nodes."""
    if t._nf:
        return t
    match t:
        case App(f, a):
            f2 = beta_eta_normalize(f)
            a2 = beta_eta_normalize(a)
            if isinstance(f2, Abs):
                return beta_eta_normalize(subst_bound(f2.body, a2))
            out = t if (f2 is f and a2 is a) else App(f2, a2)
            out._nf = True
            return out
        case Abs(h, ty, b):
            b2 = beta_eta_normalize(b)
            # eta: %x. f(x) -> f  when x not loose in f
            if isinstance(b2, App) and b2.arg == _B0 and 0 not in loose_bounds(b2.fun):
                out = shift(b2.fun, -1)
                out._nf = True
                return out
            out = t if b2 is b else Abs(h, ty, b2)
            out._nf = True
            return out
        case _:
            return t


def beta_normalize(t: Term) -> Term:
    """Beta-normal form only (no eta contraction)."""
    match t:
        case App(f, a):
            f = beta_normalize(f)
            a = beta_normalize(a)
            if isinstance(f, Abs):
                return beta_normalize(subst_bound(f.body, a))
            return App(f, a)
        case Abs(h, ty, b):
            return Abs(h, ty, beta_normalize(b))
        case _:
            return t


def alpha_equal(t1: Term, t2: Term) -> bool:
    """Equality up to bound-name hints (structural under de Bruijn)."""
    return t1 == t2


def instantiate(t: Term, mapping: Mapping[tuple[str, int], Term]) -> Term:
    """Replace schematic variables by mapping values (which must be closed),
    then beta-eta-normalize. Values are inserted as-is: closedness makes
    index adjustment unnecessary."""
    if not mapping:
        return t

    def go(t: Term) -> Term:
        match t:
            case Var(n, s, ty):
                v = mapping.get((n, s))
                if v is None:
                    return t
                if fast_type(v) != ty:
                    raise TypeMismatch(
                        f"assignment for ?{n}{s or ''} has type {fast_type(v)!r}, wanted {ty!r}")
                return v
            case Abs(h, ty, b):
                return Abs(h, ty, go(b))
            case App(f, a):
                return App(go(f), go(a))
            case _:
                return t

    return beta_eta_normalize(go(t))


def subst_schematics(env, t: Term) -> Term:
    """Apply a substitution (an unify.Env or a plain mapping) and normalize."""
    if hasattr(env, "norm"):
        return env.norm(t)
    return instantiate(t, env)


def abstract_over(param: Term, t: Term) -> Term:
    """%x. t[param := x] for a Free param; inverse of beta at that argument."""
    if not isinstance(param, Free):
        raise TermError(f"abstract_over wants a Free, got {param!r}")

    def go(t: Term, depth: int) -> Term:
        match t:
            case Free() if t == param:
                return Bound(depth)
            case Abs(h, ty, b):
                return Abs(h, ty, go(b, depth + 1))
            case App(f, a):
                return App(go(f, depth), go(a, depth))
            case _:
                return t

    return Abs(param.name, param.ty, go(t, 0))


# ------------------------------------------------------------ signature

# Reserved meta constants, type-checked structurally: `!!` (meta-forall)
# works at every type (ty -> prop) -> prop and `==` at every ty -> ty -> prop.
ALL_NAME = "!!"
EQ_NAME = "=="
IMP_NAME = "==>"


def all_const(ty: Type) -> Const:
    return Const(ALL_NAME, FunType(FunType(ty, PROP), PROP))


def eq_const(ty: Type) -> Const:
    return Const(EQ_NAME, fn_type([ty, ty], PROP))


IMP = Const(IMP_NAME, fn_type([PROP, PROP], PROP))


@dataclass(frozen=True)
class Fixity:
    """How a declared symbol reads and prints.

    kind: "infix" | "prefix" | "binder" | "bracket".
    For infix: prec and assoc ("right" | "none"); for binder, `display` is
    the keyword (e.g. ALL); bracket marks the truth-judgement wrapper.
    """

    kind: str
    prec: int = 0
    assoc: str = "right"
    display: str = ""


class Signature:
    """Declared base types, typed constants and their fixities."""

    def __init__(self):
        self.base_types: set[str] = {"prop"}
        self.consts: dict[str, Type] = {IMP_NAME: IMP.ty}
        self.fixities: dict[str, Fixity] = {}
        self.extra_tokens: set[str] = set()

    def copy(self) -> "Signature":
        s = Signature.__new__(Signature)
        s.base_types = set(self.base_types)
        s.consts = dict(self.consts)
        s.fixities = dict(self.fixities)
        s.extra_tokens = set(self.extra_tokens)
        return s

    def declare_type(self, name: str):
        self.base_types.add(name)

    def declare(self, name: str, ty: Type, fixity: Optional[Fixity] = None):
        if name in self.consts and self.consts[name] != ty:
            raise TermError(f"constant {name} already declared at another type")
        if contains_prop_in_dom(ty):
            # predicative restriction: no abstractions over prop
            raise TermError(f"constant {name}: prop may not occur in an argument type")
        if fixity is not None and fixity.kind == "binder":
            doms, rng = strip_fun(ty)
            ok = (len(doms) == 1 and isinstance(doms[0], FunType)
                  and doms[0].rng == rng)
            if not ok:
                raise TermError(f"binder {name} must have type (a -> b) -> b, got {ty!r}")
        self.consts[name] = ty
        if fixity is not None:
            self.fixities[name] = fixity

    def const(self, name: str) -> Const:
        if name not in self.consts:
            raise UndeclaredConstant(name)
        return Const(name, self.consts[name])

    def check_const(self, c: Const):
        if c.name == ALL_NAME:
            ok = (isinstance(c.ty, FunType) and isinstance(c.ty.dom, FunType)
                  and c.ty.dom.rng == PROP and c.ty.rng == PROP)
            if not ok:
                raise TypeMismatch(f"malformed {ALL_NAME} at {c.ty!r}")
            return
        if c.name == EQ_NAME:
            ok = (isinstance(c.ty, FunType) and isinstance(c.ty.rng, FunType)
                  and c.ty.dom == c.ty.rng.dom and c.ty.rng.rng == PROP)
            if not ok:
                raise TypeMismatch(f"malformed {EQ_NAME} at {c.ty!r}")
            return
        declared = self.consts.get(c.name)
        if declared is None:
            raise UndeclaredConstant(c.name)
        if declared != c.ty:
            raise TypeMismatch(
                f"constant {c.name} used at {c.ty!r}, declared {declared!r}")


def typecheck(sig: Signature, t: Term, bstack: tuple[Type, ...] = ()) -> Type:
    """The unique type of t; every Const must be declared (or a reserved
    meta constant at a well-shaped type) and no Bound may be loose."""
    match t:
        case Const():
            sig.check_const(t)
            return t.ty
        case Free(_, ty):
            return ty
        case Var(_, _, ty):
            return ty
        case Bound(i):
            if i >= len(bstack):
                raise LooseBoundVariable(f"loose bound index {i}")
            return bstack[i]
        case Abs(_, ty, b):
            return FunType(ty, typecheck(sig, b, (ty,) + bstack))
        case App(f, a):
            fty = typecheck(sig, f, bstack)
            if not isinstance(fty, FunType):
                raise TypeMismatch(f"applying non-function {f!r} : {fty!r}")
            aty = typecheck(sig, a, bstack)
            if fty.dom != aty:
                raise TypeMismatch(
                    f"argument {a!r} : {aty!r} does not fit {fty!r}")
            return fty.rng
    raise TermError(f"not a term: {t!r}")


# ----------------------------------------------------------- fresh names

def variant_name(base: str, taken) -> str:
    """base, then basea, baseb, ..., basez, baseza, ... until unused."""
    if base not in taken:
        return base
    suffix = "a"
    while base + suffix in taken:
        last = suffix[-1]
        if last < "z":
            suffix = suffix[:-1] + chr(ord(last) + 1)
        else:
            suffix = suffix + "a"
    return base + suffix
