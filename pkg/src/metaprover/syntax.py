"""Concrete syntax: a fixity-driven recursive-descent parser with Pratt
precedence climbing, simple type inference for unannotated frees, and the
inverse pretty-printer. The grammar here is the normative text format for
axioms, proof scripts and the session protocol.

Meta symbols: `!(x)` for the meta-quantifier, `==>` for meta-implication,
`==` for meta-equality, `[| ... |]` for the truth judgement (`[| G |- D |]`
in sequent theories), `?x` for schematic variables, `$x` for sequence
variables, `%x. b` for a raw abstraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .kernel import Theory
from .term import (
    ALL_NAME, Abs, App, BaseType, Bound, Const, EQ_NAME, Fixity, Free,
    FunType, IMP, IMP_NAME, PROP, Term, TermError, Type, Var, all_const,
    apps, beta_eta_normalize, eq_const, strip_app, typecheck, variant_name,
)


class SyntaxError_(TermError):
    def __init__(self, msg, line=None, col=None):
        super().__init__(msg if line is None else f"{line}:{col}: {msg}")
        self.line = line
        self.col = col


class LexError(SyntaxError_):
    pass


class ParseError(SyntaxError_):
    pass


# ------------------------------------------------------------------- lexer

META_OPS = ["==>", "==", "[|", "|]", "|-", "!(", "%", "(", ")", ",", ".",
            ":", "->"]


@dataclass
class Token:
    kind: str   # ident | qident | dident | op | eof
    text: str
    line: int
    col: int


def _op_table(thy: Theory) -> list[str]:
    ops = set(META_OPS)
    for name, fx in thy.signature.fixities.items():
        if not name[0].isalnum() and name[0] != "_":
            ops.add(name)
    for extra in thy.signature.extra_tokens:
        ops.add(extra)
    return sorted(ops, key=len, reverse=True)


def tokenize(thy: Theory, text: str) -> list[Token]:
    ops = _op_table(thy)
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if c.isalnum() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            toks.append(Token("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c in "?$":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            if j == i + 1:
                raise LexError(f"dangling {c}", line, col)
            toks.append(Token("qident" if c == "?" else "dident",
                              text[i + 1:j], line, col))
            col += j - i
            i = j
            continue
        for op in ops:
            if text.startswith(op, i):
                toks.append(Token("op", op, line, col))
                col += len(op)
                i += len(op)
                break
        else:
            raise LexError(f"unexpected character {c!r}", line, col)
    toks.append(Token("eof", "", line, col))
    return toks


# --------------------------------------------------- type inference cells

class TCell:
    __slots__ = ("ref",)

    def __init__(self):
        self.ref = None


def tshort(t):
    while isinstance(t, TCell) and t.ref is not None:
        t = t.ref
    return t


def tunify(a, b, where: Token):
    a, b = tshort(a), tshort(b)
    if a is b:
        return
    if isinstance(a, TCell):
        a.ref = b
        return
    if isinstance(b, TCell):
        b.ref = a
        return
    if isinstance(a, BaseType) and isinstance(b, BaseType) and a == b:
        return
    if isinstance(a, FunType) and isinstance(b, FunType):
        tunify(a.dom, b.dom, where)
        tunify(a.rng, b.rng, where)
        return
    raise ParseError(f"type mismatch: {tconcrete(a, None)!r} vs {tconcrete(b, None)!r}",
                     where.line, where.col)


def tconcrete(t, default: Optional[Type]):
    t = tshort(t)
    if isinstance(t, TCell):
        if default is None:
            return BaseType("_")
        return default
    if isinstance(t, FunType):
        return FunType(tconcrete(t.dom, default), tconcrete(t.rng, default))
    return t


def term_concretize(t: Term, default: Type) -> Term:
    match t:
        case Const(n, ty):
            return Const(n, tconcrete(ty, default))
        case Free(n, ty):
            return Free(n, tconcrete(ty, default))
        case Var(n, s, ty):
            return Var(n, s, tconcrete(ty, default))
        case Abs(h, ty, b):
            return Abs(h, tconcrete(ty, default), term_concretize(b, default))
        case App(f, a):
            return App(term_concretize(f, default), term_concretize(a, default))
        case _:
            return t


# ------------------------------------------------------------------ parser

class Parser:
    def __init__(self, thy: Theory, text: str):
        self.thy = thy
        self.sig = thy.signature
        self.toks = tokenize(thy, text)
        self.pos = 0
        self.free_types: dict[str, object] = {}
        self.var_types: dict[tuple[str, int], object] = {}
        self.dollar_as_free = False  # derivations fix $-vars as parameters
        self.binder_map = {fx.display: name
                           for name, fx in self.sig.fixities.items()
                           if fx.kind == "binder"}

    # -- token plumbing

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.next()
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text!r}",
                             t.line, t.col)
        return t

    def error(self, msg: str):
        t = self.peek()
        raise ParseError(msg + f" (found {t.text!r})", t.line, t.col)

    # -- fixity lookups

    def infix_of(self, tok: Token) -> Optional[Fixity]:
        if tok.kind in ("ident", "op"):
            fx = self.sig.fixities.get(tok.text)
            if fx is not None and fx.kind == "infix":
                return fx
        if tok.text == IMP_NAME:
            return Fixity("infix", 5, "right")
        if tok.text == EQ_NAME:
            return Fixity("infix", 10, "none")
        return None

    def prefix_of(self, tok: Token) -> Optional[Fixity]:
        if tok.kind in ("ident", "op"):
            fx = self.sig.fixities.get(tok.text)
            if fx is not None and fx.kind == "prefix":
                return fx
        return None

    # -- types (for binder annotations)

    def parse_type(self) -> Type:
        t = self.parse_type_atom()
        if self.peek().text == "->":
            self.next()
            return FunType(t, self.parse_type())
        return t

    def parse_type_atom(self) -> Type:
        tok = self.next()
        if tok.text == "(":
            t = self.parse_type()
            self.expect(")")
            return t
        if tok.kind == "ident" and tok.text in self.sig.base_types:
            return BaseType(tok.text)
        raise ParseError(f"expected a type, found {tok.text!r}",
                         tok.line, tok.col)

    # -- terms

    def parse(self) -> Term:
        t, _ = self.parse_term(0, ())
        tok = self.peek()
        if tok.kind != "eof":
            raise ParseError(f"unparsed input from {tok.text!r}",
                             tok.line, tok.col)
        return t

    def parse_term(self, min_prec: int, bound):
        """Returns (term, type-or-cell). `bound` is a tuple of (name, ty)."""
        t, ty = self.parse_prefix(bound)
        while True:
            tok = self.peek()
            fx = self.infix_of(tok)
            if fx is None or fx.prec < min_prec:
                return t, ty
            self.next()
            nxt = fx.prec if fx.assoc == "right" else fx.prec + 1
            rhs, rty = self.parse_term(nxt, bound)
            t, ty = self.apply_op(tok, t, ty, rhs, rty)

    def apply_op(self, tok: Token, lhs, lty, rhs, rty):
        if tok.text == IMP_NAME:
            tunify(lty, PROP, tok)
            tunify(rty, PROP, tok)
            return apps(IMP, lhs, rhs), PROP
        if tok.text == EQ_NAME:
            tunify(lty, rty, tok)
            ty = tconcrete(lty, self.thy.default_free_type)
            return apps(Const(EQ_NAME, FunType(ty, FunType(ty, PROP))),
                        lhs, rhs), PROP
        c = self.sig.const(tok.text)
        doms, rng = _fun_parts(c.ty, 2, tok)
        tunify(lty, doms[0], tok)
        tunify(rty, doms[1], tok)
        return apps(c, lhs, rhs), rng

    def parse_prefix(self, bound):
        tok = self.peek()
        fx = self.prefix_of(tok)
        if fx is not None:
            self.next()
            arg, aty = self.parse_term(fx.prec, bound)
            c = self.sig.const(tok.text)
            doms, rng = _fun_parts(c.ty, 1, tok)
            tunify(aty, doms[0], tok)
            return App(c, arg), rng
        return self.parse_primary(bound)

    def parse_primary(self, bound):
        tok = self.next()

        if tok.text == "(":
            t, ty = self.parse_term(0, bound)
            self.expect(")")
            return self.parse_app_suffix(t, ty, bound)

        if tok.text == "[|":
            return self.parse_judgement(bound)

        if tok.text == "!(":
            names = []
            while True:
                nt = self.next()
                if nt.kind != "ident":
                    raise ParseError("expected a variable name",
                                     nt.line, nt.col)
                ty: object
                if self.peek().text == ":":
                    self.next()
                    ty = self.parse_type()
                else:
                    ty = TCell()
                names.append((nt.text, ty))
                sep = self.next()
                if sep.text == ")":
                    break
                if sep.text != ",":
                    raise ParseError("expected , or )", sep.line, sep.col)
            body, bty = self.parse_term(0, tuple(names) + bound)
            tunify(bty, PROP, tok)
            t = body
            for (nm, ty) in reversed(names):
                cty = tconcrete(ty, self.thy.default_free_type)
                t = App(all_const(cty), Abs(nm, cty, self._close(t, nm)))
            return t, PROP

        if tok.text == "%":
            nt = self.next()
            if nt.kind != "ident":
                raise ParseError("expected a variable name", nt.line, nt.col)
            if self.peek().text == ":":
                self.next()
                vty: object = self.parse_type()
            else:
                vty = TCell()
            self.expect(".")
            body, bty = self.parse_term(0, ((nt.text, vty),) + bound)
            cty = tconcrete(vty, self.thy.default_free_type)
            return Abs(nt.text, cty, self._close(body, nt.text)), FunType(cty, bty)

        if tok.kind == "ident" and tok.text in self.binder_map:
            cname = self.binder_map[tok.text]
            nt = self.next()
            if nt.kind != "ident":
                raise ParseError(f"expected a variable after {tok.text}",
                                 nt.line, nt.col)
            c = self.sig.const(cname)
            # binder constants have type (tau -> sigma) -> sigma
            tau, sigma = c.ty.dom.dom, c.ty.rng
            self.expect(".")
            body, bty = self.parse_term(0, ((nt.text, tau),) + bound)
            tunify(bty, c.ty.dom.rng, tok)
            return App(c, Abs(nt.text, tau, self._close(body, nt.text))), sigma

        if tok.kind == "qident":
            base, serial = _split_serial(tok.text)
            key = (base, serial)
            ty = self.var_types.setdefault(key, TCell())
            v = Var(base, serial, ty)
            return self.parse_app_suffix(v, ty, bound)

        if tok.kind == "dident":
            self.error("sequence variables only occur inside sequents")

        if tok.kind == "ident":
            return self.parse_ident(tok, bound)

        for opener, closer, builder in self.thy.bracket_notations:
            if tok.text == opener:
                return builder(self, closer, bound, tok)

        raise ParseError(f"unexpected {tok.text!r}", tok.line, tok.col)

    def parse_ident(self, tok: Token, bound):
        name = tok.text
        for k, (bn, bty) in enumerate(bound):
            if bn == name:
                return self.parse_app_suffix(Bound(k), bty, bound)
        if name in self.sig.consts:
            c = self.sig.const(name)
            return self.parse_app_suffix(c, c.ty, bound)
        ty = self.free_types.setdefault(name, TCell())
        return self.parse_app_suffix(Free(name, ty), ty, bound)

    def parse_app_suffix(self, t, ty, bound):
        while self.peek().text == "(" and self.peek().kind == "op":
            self.next()
            args = []
            if self.peek().text != ")":
                while True:
                    a, aty = self.parse_term(0, bound)
                    args.append((a, aty, self.peek()))
                    if self.peek().text == ",":
                        self.next()
                        continue
                    break
            self.expect(")")
            for (a, aty, where) in args:
                ty = tshort(ty)
                if isinstance(ty, TCell):
                    rng = TCell()
                    ty.ref = FunType(_cell_fun(aty), rng)  # type: ignore
                    ty = ty.ref
                if not isinstance(ty, FunType):
                    raise ParseError("too many arguments", where.line, where.col)
                tunify(ty.dom, aty, where)
                t = App(t, a)
                ty = ty.rng
        return t, ty

    def parse_judgement(self, bound):
        """`[| ... |]`: truth judgement, or a sequent in sequent theories."""
        if self.thy.sequent_judgement:
            lhs = self.parse_seq_side(bound, stop="|-")
            self.expect("|-")
            rhs = self.parse_seq_side(bound, stop="|]")
            self.expect("|]")
            tr = self.sig.const(self.thy.sequent_judgement)
            return apps(tr, lhs, rhs), PROP
        f, fty = self.parse_term(0, bound)
        tok = self.expect("|]")
        tr = self.sig.const(self.thy.truth_judgement)
        tunify(fty, tr.ty.dom, tok)
        return App(tr, f), PROP

    def parse_seq_side(self, bound, stop: str):
        """Comma list of formulas and $vars, encoded as a function sobj->sobj."""
        sobj = BaseType("sobj")
        seqty = FunType(sobj, sobj)
        items = []
        if self.peek().text != stop:
            while True:
                tok = self.peek()
                if tok.kind == "dident":
                    self.next()
                    if self.dollar_as_free:
                        items.append(("seq", Free(tok.text, seqty)))
                    else:
                        base, serial = _split_serial(tok.text)
                        key = (base, serial)
                        ty = self.var_types.setdefault(key, seqty)
                        tunify(ty, seqty, tok)
                        items.append(("seq", Var(base, serial, seqty)))
                else:
                    f, fty = self.parse_term(0, bound)
                    tunify(fty, BaseType("form"), tok)
                    items.append(("form", f))
                if self.peek().text == ",":
                    self.next()
                    continue
                break
        seqof = self.sig.const("Seqof")
        acc: Term = Bound(0)
        for kind, item in reversed(items):
            if kind == "form":
                # entering the lambda over the sequence argument shifts any
                # outer-bound indices inside the formula
                acc = apps(seqof, _shift1(item), acc)
            else:
                acc = App(item, acc)
        return beta_eta_normalize(Abs("s", sobj, acc))

    def _close(self, t: Term, name: str) -> Term:
        """Bound-variable occurrences were built as Bound(k) already; nothing
        to do. Kept for symmetry/clarity of the binder cases."""
        return t


def _cell_fun(aty):
    return aty


def _shift1(t: Term) -> Term:
    from .term import shift
    return shift(t, 1)


def _fun_parts(ty: Type, n: int, tok: Token):
    doms = []
    for _ in range(n):
        if not isinstance(ty, FunType):
            raise ParseError("operator applied to too many arguments",
                             tok.line, tok.col)
        doms.append(ty.dom)
        ty = ty.rng
    return doms, ty


def _split_serial(text: str) -> tuple[str, int]:
    i = len(text)
    while i > 0 and text[i - 1].isdigit():
        i -= 1
    if i == len(text) or i == 0:
        return text, 0
    return text[:i], int(text[i:])


def parse(thy: Theory, text: str) -> Term:
    """Parse and typecheck concrete syntax into a beta-eta-normal term."""
    p = Parser(thy, text)
    t = p.parse()
    default = thy.default_free_type or BaseType("term")
    t = term_concretize(t, default)
    t = beta_eta_normalize(t)
    typecheck(thy.signature, t)
    return t


# ----------------------------------------------------------------- printer

def print_term(thy: Theory, t: Term) -> str:
    """Inverse of parse up to alpha-beta-eta; minimal parenthesization."""
    return _Printer(thy).show(t, 0, list(_free_names(t)))


pretty = print_term


def _free_names(t: Term):
    from .term import frees_of
    return frees_of(t).keys()


class _Printer:
    def __init__(self, thy: Theory):
        self.thy = thy
        self.sig = thy.signature

    def show(self, t: Term, prec: int, taken: list[str]) -> str:
        t = _eta_long_binders(t)
        head, args = strip_app(t)

        # judgements
        if (isinstance(head, Const) and self.thy.truth_judgement
                and head.name == self.thy.truth_judgement and len(args) == 1):
            return f"[| {self.show(args[0], 0, taken)} |]"
        if (isinstance(head, Const) and self.thy.sequent_judgement
                and head.name == self.thy.sequent_judgement and len(args) == 2):
            l = self.show_seq(args[0], taken)
            r = self.show_seq(args[1], taken)
            return f"[| {l} |- {r} |]"

        # meta connectives
        if isinstance(head, Const) and head.name == IMP_NAME and len(args) == 2:
            s = f"{self.show(args[0], 6, taken)} ==> {self.show(args[1], 5, taken)}"
            return f"({s})" if prec > 5 else s
        if isinstance(head, Const) and head.name == EQ_NAME and len(args) == 2:
            s = f"{self.show(args[0], 11, taken)} == {self.show(args[1], 11, taken)}"
            return f"({s})" if prec > 10 else s
        if isinstance(head, Const) and head.name == ALL_NAME and len(args) == 1:
            body = args[0]
            assert isinstance(body, Abs)
            nm = variant_name(body.hint or "x", taken)
            inner = beta_eta_normalize(App(body, Free(nm, body.bind_ty)))
            s = f"!({nm}) {self.show(inner, 1, taken + [nm])}"
            return f"({s})" if prec > 0 else s

        # declared fixities
        if isinstance(head, Const):
            special = self.thy.print_special(self, head, args, prec, taken)
            if special is not None:
                return special
            fx = self.sig.fixities.get(head.name)
            if fx is not None and fx.kind == "infix" and len(args) == 2:
                lp = fx.prec + 1
                rp = fx.prec if fx.assoc == "right" else fx.prec + 1
                if fx.assoc == "none":
                    lp = rp = fx.prec + 1
                sep = f" {head.name} "
                s = f"{self.show(args[0], lp, taken)}{sep}{self.show(args[1], rp, taken)}"
                return f"({s})" if prec > fx.prec else s
            if fx is not None and fx.kind == "prefix" and len(args) == 1:
                s = f"{head.name}{self.show(args[0], fx.prec, taken)}"
                return f"({s})" if prec > fx.prec else s
            if fx is not None and fx.kind == "binder" and len(args) == 1:
                body = args[0]
                assert isinstance(body, Abs)
                nm = variant_name(body.hint or "x", taken)
                inner = beta_eta_normalize(App(body, Free(nm, body.bind_ty)))
                s = f"{fx.display} {nm}. {self.show(inner, 1, taken + [nm])}"
                return f"({s})" if prec > 0 else s

        # plain spine
        if args:
            h = self.show_atom(head, taken)
            inner = ", ".join(self.show(a, 0, taken) for a in args)
            return f"{h}({inner})"
        return self.show_atom(head, taken)

    def show_atom(self, t: Term, taken: list[str]) -> str:
        match t:
            case Const(n, _):
                return n
            case Free(n, _):
                return n
            case Var(n, s, _):
                return f"?{n}{s if s else ''}"
            case Abs(h, ty, _):
                nm = variant_name(h or "x", taken)
                inner = beta_eta_normalize(App(t, Free(nm, ty)))
                return f"(%{nm}: {_type_str(ty)}. {self.show(inner, 0, taken + [nm])})"
            case Bound(i):
                return f"B.{i}"
            case _:
                return repr(t)

    def show_seq(self, t: Term, taken: list[str]) -> str:
        items = decode_sequence(t)
        if items is None:
            return self.show(t, 0, taken)
        out = []
        for kind, item in items:
            if kind == "seq":
                serial = getattr(item, "serial", 0)
                out.append(f"${item.name}{serial if serial else ''}")
            else:
                out.append(self.show(item, 0, taken))
        return ", ".join(out)


def decode_sequence(t: Term) -> Optional[list]:
    """Decode the function-composition encoding back into an item list.
    Sequence variables (schematic $H or a fixed Free parameter) appear as
    ("seq", head) items."""
    t = beta_eta_normalize(t)
    if isinstance(t, (Var, Free)):
        return [("seq", t)]
    if not isinstance(t, Abs):
        # eta-short chain like Seqof(P): re-expand one binder
        from .term import shift
        if isinstance(t, (App, Const)):
            t = Abs("s", BaseType("sobj"), App(shift(t, 1), Bound(0)))
        else:
            return None
    body = t.body
    items = []
    while True:
        if body == Bound(0):
            return items
        head, args = strip_app(body)
        if isinstance(head, Const) and head.name == "Seqof" and len(args) == 2:
            if _mentions_bound0(args[0]):
                return None
            items.append(("form", _unshift(args[0])))
            body = args[1]
            continue
        if isinstance(head, (Var, Free)) and len(args) == 1:
            items.append(("seq", head))
            body = args[0]
            continue
        return None


def _mentions_bound0(t: Term, depth: int = 0) -> bool:
    match t:
        case Bound(i):
            return i == depth
        case Abs(_, _, b):
            return _mentions_bound0(b, depth + 1)
        case App(f, a):
            return _mentions_bound0(f, depth) or _mentions_bound0(a, depth)
        case _:
            return False


def _unshift(t: Term) -> Term:
    from .term import shift
    return shift(t, -1)


def _eta_long_binders(t: Term) -> Term:
    """Re-expand an eta-short binder operand for display: All(P) shows as
    ALL x. P(x)."""
    head, args = strip_app(t)
    if (isinstance(head, Const) and len(args) == 1
            and isinstance(head.ty, FunType) and isinstance(head.ty.dom, FunType)
            and not isinstance(args[0], Abs)):
        op = args[0]
        dom = head.ty.dom.dom
        from .term import shift
        return App(head, Abs("x", dom, App(shift(op, 1), Bound(0))))
    return t


def _type_str(ty: Type) -> str:
    if isinstance(ty, FunType):
        d = _type_str(ty.dom)
        if isinstance(ty.dom, FunType):
            d = f"({d})"
        return f"{d} -> {_type_str(ty.rng)}"
    return ty.name
