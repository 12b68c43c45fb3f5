"""Zermelo-Fraenkel set theory over the sequent calculus.

Sets are individuals (type term). The comprehension operators take function
arguments, so the separation and replacement axiom schemes are single
definitions with function variables. Definitions are meta-equalities used
for rewriting; the automatic tactic unfolds them in place and then works in
pure sequent logic, while the comprehension and subset rules the paper
prints are also derived as sequent rules for interactive use.
"""

from functools import lru_cache

from .. import kernel, syntax, tactic
from ..kernel import Theory
from ..term import BaseType, Fixity, FunType, fn_type
from .fol import definition_text, axiom_text, unfold_tac
from .lk import build_lk, derive_seq

TERM = BaseType("term")
FORM = BaseType("form")

# definitions the automatic tactic unfolds in place; Un and Int have derived
# membership rules instead, which keeps their goals out of the heavy
# exists-plus-equality encoding
ZF_AUTO_DEFS = ("subset_def", "equal_def", "pow_def", "cons_def",
                "collect_def", "replace_def", "union_def", "inter_def",
                "pair_def", "sing_def")


@lru_cache(maxsize=None)
def build_zf() -> Theory:
    zf = build_lk().extend("ZF")
    sig = zf.signature
    tt = fn_type([TERM, TERM], TERM)
    ttf = fn_type([TERM, TERM], FORM)
    sig.declare(":", ttf, Fixity("infix", 50, "none"))
    sig.declare("=", ttf, Fixity("infix", 50, "none"))
    sig.declare("<=", ttf, Fixity("infix", 50, "none"))
    sig.declare("Pow", FunType(TERM, TERM))
    sig.declare("Union", FunType(TERM, TERM))
    sig.declare("Inter", FunType(TERM, TERM))
    sig.declare("Un", tt, Fixity("infix", 52, "right"))
    sig.declare("Int", tt, Fixity("infix", 52, "right"))
    sig.declare("::", tt, Fixity("infix", 55, "right"))
    sig.declare("0", TERM)
    sig.declare("Collect", fn_type([TERM, FunType(TERM, FORM)], TERM))
    sig.declare("Replace", fn_type([FunType(TERM, TERM), TERM], TERM))
    sig.declare("Pair", tt)
    sig.declare("Sing", FunType(TERM, TERM))
    sig.extra_tokens |= {"{", "}", "[", "]", "||", "<", ">"}
    _register_syntax(zf)

    definition_text(zf, "subset_def", "A <= B == ALL x. x:A --> x:B")
    definition_text(zf, "equal_def", "A = B == (A <= B) & (B <= A)")
    definition_text(zf, "cons_def", "a : (b::B) == a=b | a:B")
    definition_text(zf, "pow_def", "A : Pow(B) == A <= B")
    definition_text(zf, "collect_def", "a : Collect(A,P) == a:A & P(a)")
    definition_text(zf, "replace_def",
                    "c : Replace(f,B) == EXISTS a. a:B & c=f(a)")
    definition_text(zf, "union_def", "A : Union(C) == EXISTS B. A:B & B:C")
    definition_text(zf, "un_def", "a Un b == Union({a, b})")
    definition_text(zf, "inter_def",
                    "Inter(C) == [ x || x: Union(C), ALL y. y:C --> x:y ]")
    definition_text(zf, "int_def", "a Int b == [ x || x:a, x:b ]")
    definition_text(zf, "sing_def", "Sing(a) == a::0")
    definition_text(zf, "pair_def", "Pair(a,b) == Sing(a) :: (a::(b::0)) :: 0")

    # nothing is a member of the empty set (definitional prerequisite the
    # standard presentation leaves implicit)
    axiom_text(zf, "emptyL", "[| $H, a:0, $G |- $E |]")

    _derive_zf_rules(zf)
    return zf


def _derive_zf_rules(zf: Theory):
    t = tactic

    # reflexivity closes  |- ..., A = A, ...
    derive_seq(zf, "eq_refl", [], "[| $H |- $E, A = A, $F |]",
               lambda hyps: t.then_all(
                   unfold_tac(zf, ["equal_def"], 1),
                   t.resolve_tac([zf.rule("conjR")], 1),
                   unfold_tac(zf, ["subset_def"], 1),
                   t.resolve_tac([zf.rule("allR")], 1),
                   t.resolve_tac([zf.rule("impR")], 1),
                   t.resolve_tac([zf.rule("basic")], 1),
                   unfold_tac(zf, ["subset_def"], 1),
                   t.resolve_tac([zf.rule("allR")], 1),
                   t.resolve_tac([zf.rule("impR")], 1),
                   t.resolve_tac([zf.rule("basic")], 1)))

    # the comprehension rules as printed
    derive_seq(zf, "CollectR",
               ["[| $H |- $E, a:A, $F |]", "[| $H |- $E, P(a), $F |]"],
               "[| $H |- $E, a : Collect(A,P), $F |]",
               lambda hyps: t.then_all(
                   unfold_tac(zf, ["collect_def"], 1),
                   t.resolve_tac([zf.rule("conjR")], 1),
                   t.resolve_tac([hyps[0]], 1),
                   t.resolve_tac([hyps[1]], 1)))

    derive_seq(zf, "CollectL",
               ["[| $H, a:A, P(a), $G |- $E |]"],
               "[| $H, a : Collect(A,P), $G |- $E |]",
               lambda hyps: t.then_all(
                   unfold_tac(zf, ["collect_def"], 1),
                   t.resolve_tac([zf.rule("conjL")], 1),
                   t.resolve_tac([hyps[0]], 1)))

    # subset rules as printed
    derive_seq(zf, "subsetR",
               ["!(x) [| $H, x:A |- $E, x:B, $F |]"],
               "[| $H |- $E, A <= B, $F |]",
               lambda hyps: t.then_all(
                   unfold_tac(zf, ["subset_def"], 1),
                   t.resolve_tac([zf.rule("allR")], 1),
                   t.resolve_tac([zf.rule("impR")], 1),
                   t.resolve_tac([hyps[0]], 1)))

    derive_seq(zf, "subsetL",
               ["[| $H, $G |- $E, c:A |]", "[| $H, c:B, $G |- $E |]"],
               "[| $H, A <= B, $G |- $E |]",
               lambda hyps: t.then_all(
                   unfold_tac(zf, ["subset_def"], 1),
                   t.resolve_tac([zf.rule("allL")], 1),
                   t.resolve_tac([zf.rule("impL")], 1),
                   t.resolve_tac([zf.rule("thinL")], 1),
                   t.resolve_tac([hyps[0]], 1),
                   t.resolve_tac([zf.rule("thinL")], 1),
                   t.resolve_tac([hyps[1]], 1)))

    # membership rules for the defined operators
    derive_auto(zf, "IntR",
                ["[| $H |- $E, a:A, $F |]", "[| $H |- $E, a:B, $F |]"],
                "[| $H |- $E, a : A Int B, $F |]", ("int_def", "collect_def"))
    derive_auto(zf, "IntL",
                ["[| $H, a:A, a:B, $G |- $E |]"],
                "[| $H, a : A Int B, $G |- $E |]", ("int_def", "collect_def"))

    def thin_close(rule):
        # close with the rule, thinning extra items away as needed
        def tac(st):
            inner = t.orelse(t.resolve_tac([rule], 1),
                             t.then(t.resolve_tac([zf.rule("thinL")], 1), tac))
            return inner(st)
        return tac

    derive_seq(zf, "UnL",
               ["[| $H, a:A, $G |- $E |]", "[| $H, a:B, $G |- $E |]"],
               "[| $H, a : A Un B, $G |- $E |]",
               lambda hyps: t.then_all(
                   unfold_tac(zf, ["un_def", "union_def"], 1),
                   t.resolve_tac([zf.rule("exL")], 1),
                   t.resolve_tac([zf.rule("conjL")], 1),
                   unfold_tac(zf, ["cons_def"], 1),
                   t.resolve_tac([zf.rule("disjL")], 1),
                   # branch D = A
                   unfold_tac(zf, ["equal_def", "subset_def"], 1),
                   t.resolve_tac([zf.rule("conjL")], 1),
                   t.resolve_tac([zf.rule("allL")], 1),
                   t.resolve_tac([zf.rule("impL")], 1),
                   t.resolve_tac([zf.rule("basic")], 1),
                   thin_close(hyps[0]),
                   # branch D = B or D : 0
                   t.resolve_tac([zf.rule("disjL")], 1),
                   unfold_tac(zf, ["equal_def", "subset_def"], 1),
                   t.resolve_tac([zf.rule("conjL")], 1),
                   t.resolve_tac([zf.rule("allL")], 1),
                   t.resolve_tac([zf.rule("impL")], 1),
                   t.resolve_tac([zf.rule("basic")], 1),
                   thin_close(hyps[1]),
                   t.resolve_tac([zf.rule("emptyL")], 1)))

    # the right rule splits into the two classical choices; the automatic
    # search backtracks between them
    for name, pick in (("UnR1", "[| $H |- $E, a:A, $F |]"),
                       ("UnR2", "[| $H |- $E, a:B, $F |]")):
        derive_seq(zf, name, [pick], "[| $H |- $E, a : A Un B, $F |]",
                   lambda hyps: t.then_all(
                       unfold_tac(zf, ["un_def", "union_def"], 1),
                       t.resolve_tac([zf.rule("exR")], 1),
                       t.resolve_tac([zf.rule("thinR")], 1),
                       t.resolve_tac([zf.rule("conjR")], 1),
                       t.resolve_tac([hyps[0]], 1),
                       unfold_tac(zf, ["cons_def"], 1),
                       t.resolve_tac([zf.rule("disjR")], 1),
                       t.orelse(t.resolve_tac([zf.rule("eq_refl")], 1),
                                t.then(t.resolve_tac([zf.rule("disjR")], 1),
                                       t.resolve_tac([zf.rule("eq_refl")], 1)))))


def derive_auto(zf: Theory, name, premise_texts, concl_text, defs):
    """Derive a sequent rule by automatic search: the premises join the
    closers, thinning joins the unsafe rules, and the stated definitions are
    unfolded in place."""
    from .. import prover

    def script(hyps):
        names = []
        for k, h in enumerate(hyps):
            nm = f".hyp{k}"
            zf.theorems[nm] = h
            names.append(nm)
        base = zf_auto_profile()
        prof = prover.Profile(
            closers=tuple(names) + base.closers,
            safe_intros=base.safe_intros,
            unsafe_intros=base.unsafe_intros + ("thinR", "thinL"),
            quant_rules=base.quant_rules,
            indexing="lk",
            use_assumption=False,
            unfold_defs=tuple(defs))

        def tac(st):
            try:
                return prover.auto_tac(zf, prof, budget_nodes=100_000,
                                       timeout_ms=30_000)(st)
            finally:
                for nm in names:
                    zf.theorems.pop(nm, None)

        return tac

    return derive_seq(zf, name, premise_texts, concl_text, script)


def _register_syntax(zf: Theory):
    """Finite sets {a,b}, pairs <a,b>, and the comprehension brackets."""
    zf.bracket_notations.append(("{", "}", _parse_finite_set))
    zf.bracket_notations.append(("<", ">", _parse_pair))
    zf.bracket_notations.append(("[", "]", _parse_comprehension))
    zf.printer_hooks.append(_print_zf)


def _parse_finite_set(parser, closer, bound, tok):
    from ..syntax import tunify
    from ..term import apps
    sig = parser.sig
    elems = []
    if parser.peek().text != "}":
        while True:
            e, ety = parser.parse_term(0, bound)
            tunify(ety, TERM, tok)
            elems.append(e)
            if parser.peek().text == ",":
                parser.next()
                continue
            break
    parser.expect("}")
    acc = sig.const("0")
    cons = sig.const("::")
    for e in reversed(elems):
        acc = apps(cons, e, acc)
    return acc, TERM


def _parse_pair(parser, closer, bound, tok):
    from ..syntax import tunify
    from ..term import apps
    a, aty = parser.parse_term(0, bound)
    tunify(aty, TERM, tok)
    parser.expect(",")
    b, bty = parser.parse_term(0, bound)
    tunify(bty, TERM, tok)
    parser.expect(">")
    return apps(parser.sig.const("Pair"), a, b), TERM


def _parse_comprehension(parser, closer, bound, tok):
    """[ e || x:A ], [ x || x:A, P ], [ e || x:A, P ]."""
    from ..syntax import ParseError, tunify
    from ..term import Abs, Bound, apps
    # find the binder name after || without consuming e yet
    depth, j = 0, parser.pos
    while True:
        tk = parser.toks[j]
        if tk.kind == "eof":
            raise ParseError("unterminated comprehension", tok.line, tok.col)
        if tk.text == "[":
            depth += 1
        elif tk.text == "]":
            depth -= 1
        elif tk.text == "||" and depth == 0:
            break
        j += 1
    name_tok = parser.toks[j + 1]
    if name_tok.kind != "ident":
        raise ParseError("expected a variable after ||",
                         name_tok.line, name_tok.col)
    x = name_tok.text
    e, ety = parser.parse_term(0, ((x, TERM),) + bound)
    tunify(ety, TERM, tok)
    parser.expect("||")
    got = parser.next()
    if got.text != x:
        raise ParseError(f"expected {x}", got.line, got.col)
    parser.expect(":")
    dom, dty = parser.parse_term(0, bound)
    tunify(dty, TERM, tok)
    pred = None
    if parser.peek().text == ",":
        parser.next()
        pred, pty = parser.parse_term(0, ((x, TERM),) + bound)
        tunify(pty, FORM, tok)
    parser.expect("]")
    sig = parser.sig
    is_ident = e == Bound(0)
    if is_ident and pred is not None:
        return apps(sig.const("Collect"), dom, Abs(x, TERM, pred)), TERM
    if not is_ident and pred is None:
        return apps(sig.const("Replace"), Abs(x, TERM, e), dom), TERM
    if not is_ident and pred is not None:
        inner = apps(sig.const("Collect"), dom, Abs(x, TERM, pred))
        return apps(sig.const("Replace"), Abs(x, TERM, e), inner), TERM
    raise ParseError("comprehension [x || x:A] needs a predicate",
                     tok.line, tok.col)


def _print_zf(printer, head, args, prec, taken):
    from ..term import Const, strip_app
    if not isinstance(head, Const):
        return None
    if head.name == "Pair" and len(args) == 2:
        a = printer.show(args[0], 0, taken)
        b = printer.show(args[1], 0, taken)
        return f"<{a}, {b}>"
    if head.name == "::" and len(args) == 2:
        # finite-set chains a::(b::0) print as {a, b}
        elems, rest = [args[0]], args[1]
        while True:
            h2, a2 = strip_app(rest)
            if isinstance(h2, Const) and h2.name == "::" and len(a2) == 2:
                elems.append(a2[0])
                rest = a2[1]
                continue
            break
        if isinstance(rest, Const) and rest.name == "0":
            inner = ", ".join(printer.show(e, 0, taken) for e in elems)
            return "{" + inner + "}"
        return None
    if head.name == "Sing" and len(args) == 1:
        return "{" + printer.show(args[0], 0, taken) + "}"
    return None


def zf_auto_profile():
    from ..prover import Profile
    from .lk import lk_profile
    base = lk_profile()
    return Profile(
        closers=("basic", "eq_refl", "emptyL"),
        safe_intros=base.safe_intros,
        unsafe_intros=base.unsafe_intros,
        quant_rules=base.quant_rules,
        indexing="lk",
        use_assumption=False,
        unfold_defs=ZF_AUTO_DEFS)


def zf_search_profile():
    """The full profile once the derived membership rules exist."""
    from ..prover import Profile
    base = zf_auto_profile()
    return Profile(
        closers=base.closers,
        safe_intros=("IntL", "IntR", "UnL") + base.safe_intros,
        unsafe_intros=("UnR1", "UnR2") + base.unsafe_intros,
        quant_rules=base.quant_rules,
        quant_triggers=frozenset({"<=", "=", "Pow", "::", "Collect",
                                  "Replace", "Union", "Inter", "Un", "Int",
                                  "Pair", "Sing"}),
        unify_depth=32,
        indexing="lk",
        use_assumption=False,
        unfold_defs=ZF_AUTO_DEFS,
        thin_rules=("thinL", "thinR"),
        prune_improper=True,
        deepening=(1, 3))
