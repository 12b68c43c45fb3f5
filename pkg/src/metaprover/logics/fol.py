"""First-order logic as natural deduction.

Theory chain: FOL (syntax) < Minimal < Intuitionistic < NJ < Classical.
Minimal has the introduction/elimination axioms without the contradiction
rule; Intuitionistic adds it; NJ adds the derived alternative elimination
rules and the iff rules; Classical adds the classical contradiction axiom
and the derived swap/classical-elimination rules.
"""

from functools import lru_cache

from .. import kernel, syntax, tactic
from ..kernel import Theory
from ..term import PROP as PROP_TY
from ..term import BaseType, Fixity, FunType, fn_type

FORM = BaseType("form")
TERM = BaseType("term")


def axiom_text(thy: Theory, name: str, text: str):
    """Parse a rule statement; its frees are the rule's schematic variables."""
    t = syntax.parse(thy, text)
    thy.add_axiom(name, _all_frees_to_vars(t))


def definition_text(thy: Theory, name: str, text: str):
    t = syntax.parse(thy, text)
    thy.add_definition(name, _all_frees_to_vars(t))


def _all_frees_to_vars(t):
    from ..term import Abs, App, Free, Var
    def go(u):
        match u:
            case Free(n, ty):
                return Var(n, 0, ty)
            case Abs(h, ty, b):
                return Abs(h, ty, go(b))
            case App(f, a):
                return App(go(f), go(a))
            case _:
                return u
    return go(t)


def goal_term(thy: Theory, text: str):
    """Parse a goal; a bare formula is wrapped in the truth judgement."""
    from ..term import App, PROP, typecheck
    t = syntax.parse(thy, text)
    ty = typecheck(thy.signature, t)
    if ty == PROP:
        return t
    if ty == FORM and thy.truth_judgement:
        return App(thy.signature.const(thy.truth_judgement), t)
    if thy.sequent_judgement:
        raise kernel.KernelError("sequent theories need [| ... |- ... |] goals")
    raise kernel.KernelError(f"goal must be a formula or prop, got {ty!r}")


def derive(thy: Theory, name: str, premise_texts, concl_text, script) -> None:
    """Derive a rule by a tactic proof with the premises as meta-assumptions
    and register it under `name`. `script(hyps) -> Tactic`."""
    premises = [syntax.parse(thy, s) for s in premise_texts]
    conclusion = syntax.parse(thy, concl_text)

    def prove(state_thm, hyp_thms):
        st = tactic.ProofState(thy, state_thm)
        for out in script(hyp_thms)(st):
            if out.current.ngoals == 0:
                return out.current
        raise kernel.KernelError(f"derivation of {name} failed")

    thm = kernel.derive_rule(thy, premises, conclusion, prove)
    thy.store(name, thm)


def _r(names, i=1):
    """resolve_tac by rule names, resolved lazily against the theory."""
    def mk(thy):
        return tactic.resolve_tac([thy.rule(n) for n in names], i)
    return mk


@lru_cache(maxsize=None)
def build_fol() -> dict:
    fol = Theory("FOL")
    sig = fol.signature
    sig.declare_type("term")
    sig.declare_type("form")
    fol.default_free_type = TERM
    fol.truth_judgement = "true"

    sig.declare("true", FunType(FORM, PROP_TY), Fixity("bracket"))
    sig.declare("False", FORM)
    ff = fn_type([FORM, FORM], FORM)
    sig.declare("&", ff, Fixity("infix", 35, "right"))
    sig.declare("|", ff, Fixity("infix", 30, "right"))
    sig.declare("-->", ff, Fixity("infix", 25, "right"))
    sig.declare("<->", ff, Fixity("infix", 20, "right"))
    sig.declare("~", FunType(FORM, FORM), Fixity("prefix", 60))
    qt = FunType(FunType(TERM, FORM), FORM)
    sig.declare("All", qt, Fixity("binder", display="ALL"))
    sig.declare("Ex", qt, Fixity("binder", display="EXISTS"))

    definition_text(fol, "not_def", "~P == P --> False")
    definition_text(fol, "iff_def", "P <-> Q == (P --> Q) & (Q --> P)")

    minimal = fol.extend("Minimal")
    axiom_text(minimal, "conjI", "[| P |] ==> [| Q |] ==> [| P & Q |]")
    axiom_text(minimal, "conjunct1", "[| P & Q |] ==> [| P |]")
    axiom_text(minimal, "conjunct2", "[| P & Q |] ==> [| Q |]")
    axiom_text(minimal, "disjI1", "[| P |] ==> [| P | Q |]")
    axiom_text(minimal, "disjI2", "[| Q |] ==> [| P | Q |]")
    axiom_text(minimal, "disjE",
               "[| P | Q |] ==> ([| P |] ==> [| R |]) ==> ([| Q |] ==> [| R |]) ==> [| R |]")
    axiom_text(minimal, "impI", "([| P |] ==> [| Q |]) ==> [| P --> Q |]")
    axiom_text(minimal, "mp", "[| P --> Q |] ==> [| P |] ==> [| Q |]")
    axiom_text(minimal, "allI", "(!(x) [| P(x) |]) ==> [| ALL x. P(x) |]")
    axiom_text(minimal, "spec", "[| ALL x. P(x) |] ==> [| P(a) |]")
    axiom_text(minimal, "exI", "[| P(a) |] ==> [| EXISTS x. P(x) |]")
    axiom_text(minimal, "exE",
               "[| EXISTS x. P(x) |] ==> (!(x) [| P(x) |] ==> [| Q |]) ==> [| Q |]")

    intuit = minimal.extend("Intuitionistic")
    axiom_text(intuit, "FalseE", "[| False |] ==> [| P |]")

    nj = intuit.extend("NJ")
    _derive_nj_rules(nj)

    classical = nj.extend("Classical")
    axiom_text(classical, "classical",
               "([| ~P |] ==> [| False |]) ==> [| P |]")
    _derive_classical_rules(classical)

    return {"FOL": fol, "Minimal": minimal, "Intuitionistic": intuit,
            "NJ": nj, "Classical": classical}


def _derive_nj_rules(nj: Theory):
    t = tactic

    # notI / raw notE by instantiating and folding the definition of ~
    impI = nj.rule("impI")
    false = syntax.parse(nj, "False")
    notI = kernel.fold(nj, ["not_def"],
                       kernel.instantiate_thm({("Q", 0): false}, impI))
    nj.store("notI", notI)
    mp = nj.rule("mp")
    notE_false = kernel.fold(nj, ["not_def"],
                             kernel.instantiate_thm({("Q", 0): false}, mp))
    nj.store("notE_false", notE_false)  # [~P] ==> [P] ==> [False]

    # notE: [~P] ==> [P] ==> [R]   (ex falso through FalseE)
    derive(nj, "notE", ["[| ~P |]", "[| P |]"], "[| R |]",
           lambda hyps: t.then_all(
               t.resolve_tac([nj.rule("FalseE")], 1),
               t.resolve_tac([nj.rule("notE_false")], 1),
               t.resolve_tac([hyps[0]], 1),
               t.resolve_tac([hyps[1]], 1)))

    # conjE: [P&Q] ==> ([P] ==> [Q] ==> [R]) ==> [R]
    derive(nj, "conjE", ["[| P & Q |]", "[| P |] ==> [| Q |] ==> [| R |]"],
           "[| R |]",
           lambda hyps: t.then_all(
               t.resolve_tac([hyps[1]], 1),
               t.resolve_tac([nj.rule("conjunct1")], 1),
               t.resolve_tac([hyps[0]], 1),
               t.resolve_tac([nj.rule("conjunct2")], 1),
               t.resolve_tac([hyps[0]], 1)))

    # impE: [P-->Q] ==> [P] ==> ([Q] ==> [R]) ==> [R]
    derive(nj, "impE", ["[| P --> Q |]", "[| P |]", "[| Q |] ==> [| R |]"],
           "[| R |]",
           lambda hyps: t.then_all(
               t.resolve_tac([hyps[2]], 1),
               t.resolve_tac([nj.rule("mp")], 1),
               t.resolve_tac([hyps[0]], 1),
               t.resolve_tac([hyps[1]], 1)))

    # allE: [ALL x. P(x)] ==> ([P(a)] ==> [R]) ==> [R]
    derive(nj, "allE", ["[| ALL x. P(x) |]", "[| P(a) |] ==> [| R |]"],
           "[| R |]",
           lambda hyps: t.then_all(
               t.resolve_tac([hyps[1]], 1),
               t.resolve_tac([nj.rule("spec")], 1),
               t.resolve_tac([hyps[0]], 1)))

    # all_dupE keeps the quantified formula for re-use
    derive(nj, "all_dupE",
           ["[| ALL x. P(x) |]", "[| P(a) |] ==> [| ALL x. P(x) |] ==> [| R |]"],
           "[| R |]",
           lambda hyps: t.then_all(
               t.resolve_tac([hyps[1]], 1),
               t.resolve_tac([nj.rule("spec")], 1),
               t.resolve_tac([hyps[0]], 1),
               t.resolve_tac([hyps[0]], 1)))

    # iff rules from the definition
    derive(nj, "iffI", ["[| P |] ==> [| Q |]", "[| Q |] ==> [| P |]"],
           "[| P <-> Q |]",
           lambda hyps: t.then_all(
               unfold_tac(nj, ["iff_def"], 1),
               t.resolve_tac([nj.rule("conjI")], 1),
               t.resolve_tac([nj.rule("impI")], 1),
               t.then(t.resolve_tac([hyps[0]], 1), t.assume_tac(1)),
               t.resolve_tac([nj.rule("impI")], 1),
               t.then(t.resolve_tac([hyps[1]], 1), t.assume_tac(1))))

    derive(nj, "iffD1", ["[| P <-> Q |]", "[| P |]"], "[| Q |]",
           lambda hyps: t.then_all(
               t.resolve_tac([nj.rule("mp")], 1),
               t.resolve_tac([nj.rule("conjunct1")], 1),
               t.resolve_tac([kernel.unfold(nj, ["iff_def"], hyps[0])], 1),
               t.resolve_tac([hyps[1]], 1)))

    derive(nj, "iffD2", ["[| P <-> Q |]", "[| Q |]"], "[| P |]",
           lambda hyps: t.then_all(
               t.resolve_tac([nj.rule("mp")], 1),
               t.resolve_tac([nj.rule("conjunct2")], 1),
               t.resolve_tac([kernel.unfold(nj, ["iff_def"], hyps[0])], 1),
               t.resolve_tac([hyps[1]], 1)))

    # iffE hands both directions to the continuation
    derive(nj, "iffE",
           ["[| P <-> Q |]", "[| P --> Q |] ==> [| Q --> P |] ==> [| R |]"],
           "[| R |]",
           lambda hyps: t.then_all(
               t.resolve_tac([hyps[1]], 1),
               t.resolve_tac([nj.rule("conjunct1")], 1),
               t.resolve_tac([kernel.unfold(nj, ["iff_def"], hyps[0])], 1),
               t.resolve_tac([nj.rule("conjunct2")], 1),
               t.resolve_tac([kernel.unfold(nj, ["iff_def"], hyps[0])], 1)))

    # turn a negated assumption into an implication assumption
    derive(nj, "not_to_imp",
           ["[| ~P |]", "[| P --> False |] ==> [| R |]"], "[| R |]",
           lambda hyps: t.then_all(
               t.resolve_tac([hyps[1]], 1),
               t.resolve_tac([kernel.unfold(nj, ["not_def"], hyps[0])], 1)))

    # contraction-free eliminations for implications with a compound
    # antecedent (the LJ-style rules that make bounded search complete
    # enough in practice)
    derive(nj, "conj_impE",
           ["[| (P & Q) --> R |]", "[| P --> (Q --> R) |] ==> [| S |]"],
           "[| S |]",
           lambda hyps: t.then_all(
               t.resolve_tac([hyps[1]], 1),
               t.resolve_tac([nj.rule("impI")], 1),
               t.resolve_tac([nj.rule("impI")], 1),
               t.resolve_tac([nj.rule("mp")], 1),
               t.resolve_tac([hyps[0]], 1),
               t.resolve_tac([nj.rule("conjI")], 1),
               t.assume_tac(1), t.assume_tac(1)))

    derive(nj, "disj_impE",
           ["[| (P | Q) --> R |]",
            "[| P --> R |] ==> [| Q --> R |] ==> [| S |]"],
           "[| S |]",
           lambda hyps: t.then_all(
               t.resolve_tac([hyps[1]], 1),
               t.resolve_tac([nj.rule("impI")], 1),
               t.resolve_tac([nj.rule("mp")], 1),
               t.resolve_tac([hyps[0]], 1),
               t.resolve_tac([nj.rule("disjI1")], 1),
               t.assume_tac(1),
               t.resolve_tac([nj.rule("impI")], 1),
               t.resolve_tac([nj.rule("mp")], 1),
               t.resolve_tac([hyps[0]], 1),
               t.resolve_tac([nj.rule("disjI2")], 1),
               t.assume_tac(1)))

    derive(nj, "imp_impE",
           ["[| (P --> Q) --> R |]",
            "[| P |] ==> [| Q --> R |] ==> [| Q |]",
            "[| R |] ==> [| S |]"],
           "[| S |]",
           lambda hyps: t.then_all(
               t.resolve_tac([hyps[2]], 1),
               t.resolve_tac([nj.rule("mp")], 1),
               t.resolve_tac([hyps[0]], 1),
               t.resolve_tac([nj.rule("impI")], 1),
               t.resolve_tac([hyps[1]], 1),
               t.assume_tac(1),
               t.resolve_tac([nj.rule("impI")], 1),
               t.resolve_tac([nj.rule("mp")], 1),
               t.resolve_tac([hyps[0]], 1),
               t.resolve_tac([nj.rule("impI")], 1),
               t.assume_tac(1)))

    derive(nj, "not_impE",
           ["[| ~P --> S |]", "[| P |] ==> [| False |]",
            "[| S |] ==> [| R |]"],
           "[| R |]",
           lambda hyps: t.then_all(
               t.resolve_tac([hyps[2]], 1),
               t.resolve_tac([nj.rule("mp")], 1),
               t.resolve_tac([hyps[0]], 1),
               t.resolve_tac([nj.rule("notI")], 1),
               t.resolve_tac([hyps[1]], 1),
               t.assume_tac(1)))

    derive(nj, "iff_impE",
           ["[| (P <-> Q) --> R |]",
            "[| P |] ==> [| Q --> R |] ==> [| Q |]",
            "[| Q |] ==> [| P --> R |] ==> [| P |]",
            "[| R |] ==> [| S |]"],
           "[| S |]",
           lambda hyps: t.then_all(
               t.resolve_tac([hyps[3]], 1),
               t.resolve_tac([nj.rule("mp")], 1),
               t.resolve_tac([hyps[0]], 1),
               t.resolve_tac([nj.rule("iffI")], 1),
               # P ==> Q branch
               t.resolve_tac([hyps[1]], 1),
               t.assume_tac(1),
               t.resolve_tac([nj.rule("impI")], 1),
               t.resolve_tac([nj.rule("mp")], 1),
               t.resolve_tac([hyps[0]], 1),
               t.resolve_tac([nj.rule("iffI")], 1),
               t.assume_tac(1), t.assume_tac(1),
               # Q ==> P branch
               t.resolve_tac([hyps[2]], 1),
               t.assume_tac(1),
               t.resolve_tac([nj.rule("impI")], 1),
               t.resolve_tac([nj.rule("mp")], 1),
               t.resolve_tac([hyps[0]], 1),
               t.resolve_tac([nj.rule("iffI")], 1),
               t.assume_tac(1), t.assume_tac(1)))

    derive(nj, "all_impE",
           ["[| (ALL x. P(x)) --> S |]", "!(x) [| P(x) |]",
            "[| S |] ==> [| R |]"],
           "[| R |]",
           lambda hyps: t.then_all(
               t.resolve_tac([hyps[2]], 1),
               t.resolve_tac([nj.rule("mp")], 1),
               t.resolve_tac([hyps[0]], 1),
               t.resolve_tac([nj.rule("allI")], 1),
               t.resolve_tac([hyps[1]], 1)))

    derive(nj, "ex_impE",
           ["[| (EXISTS x. P(x)) --> S |]", "[| P(a) --> S |] ==> [| R |]"],
           "[| R |]",
           lambda hyps: t.then_all(
               t.resolve_tac([hyps[1]], 1),
               t.resolve_tac([nj.rule("impI")], 1),
               t.resolve_tac([nj.rule("mp")], 1),
               t.resolve_tac([hyps[0]], 1),
               t.resolve_tac([nj.rule("exI")], 1),
               t.assume_tac(1)))


def _derive_classical_rules(cl: Theory):
    t = tactic

    # swap: [~P] ==> ([~R] ==> [P]) ==> [R]
    derive(cl, "swap", ["[| ~P |]", "[| ~R |] ==> [| P |]"], "[| R |]",
           lambda hyps: t.then_all(
               t.resolve_tac([cl.rule("classical")], 1),
               t.resolve_tac([cl.rule("notE_false")], 1),
               t.resolve_tac([hyps[0]], 1),
               t.resolve_tac([hyps[1]], 1),
               t.assume_tac(1)))

    # disjCI: ([~Q] ==> [P]) ==> [P | Q]
    derive(cl, "disjCI", ["[| ~Q |] ==> [| P |]"], "[| P | Q |]",
           lambda hyps: t.then_all(
               t.resolve_tac([cl.rule("classical")], 1),
               t.resolve_tac([cl.rule("notE_false")], 1),
               t.assume_tac(1),
               t.resolve_tac([cl.rule("disjI1")], 1),
               t.resolve_tac([hyps[0]], 1),
               t.resolve_tac([cl.rule("notI")], 1),
               t.resolve_tac([cl.rule("notE_false")], 1),
               t.assume_tac(1),
               t.resolve_tac([cl.rule("disjI2")], 1),
               t.assume_tac(1)))

    # impCE: [P-->Q] ==> ([~P] ==> [R]) ==> ([Q] ==> [R]) ==> [R]
    derive(cl, "impCE",
           ["[| P --> Q |]", "[| ~P |] ==> [| R |]", "[| Q |] ==> [| R |]"],
           "[| R |]",
           lambda hyps: t.then_all(
               t.resolve_tac([cl.rule("classical")], 1),
               t.resolve_tac([cl.rule("notE_false")], 1),
               t.assume_tac(1),
               t.resolve_tac([hyps[2]], 1),
               t.resolve_tac([cl.rule("mp")], 1),
               t.resolve_tac([hyps[0]], 1),
               t.resolve_tac([cl.rule("classical")], 1),
               t.resolve_tac([cl.rule("notE_false")], 1),
               t.assume_tac(1),
               t.resolve_tac([hyps[1]], 1),
               t.assume_tac(1)))

    # notnotD: [~~P] ==> [P]
    derive(cl, "notnotD", ["[| ~ ~ P |]"], "[| P |]",
           lambda hyps: t.then_all(
               t.resolve_tac([cl.rule("classical")], 1),
               t.resolve_tac([cl.rule("notE_false")], 1),
               t.resolve_tac([hyps[0]], 1),
               t.assume_tac(1)))

    # exCI: ([ALL x. ~P(x)] ==> [P(a)]) ==> [EX x. P(x)]
    derive(cl, "exCI", ["[| ALL x. ~P(x) |] ==> [| P(a) |]"],
           "[| EXISTS x. P(x) |]",
           lambda hyps: t.then_all(
               t.resolve_tac([cl.rule("classical")], 1),
               t.resolve_tac([cl.rule("notE_false")], 1),
               t.assume_tac(1),
               t.resolve_tac([cl.rule("exI")], 1),
               t.resolve_tac([hyps[0]], 1),
               t.resolve_tac([cl.rule("allI")], 1),
               t.resolve_tac([cl.rule("notI")], 1),
               t.resolve_tac([cl.rule("notE_false")], 1),
               t.assume_tac(1),
               t.resolve_tac([cl.rule("exI")], 1),
               t.assume_tac(1)))


def unfold_tac(thy: Theory, names, i: int):
    def tac(st: tactic.ProofState):
        from ..lazyseq import Seq
        try:
            thm = kernel.unfold_subgoal(thy, names, st.current, i)
        except kernel.KernelError:
            return Seq.empty()
        return Seq.single(st.push(thm))
    return tac


def fold_tac(thy: Theory, names, i: int):
    def tac(st: tactic.ProofState):
        from ..lazyseq import Seq
        try:
            thm = kernel.unfold_subgoal(thy, names, st.current, i,
                                        direction="fold")
        except kernel.KernelError:
            return Seq.empty()
        return Seq.single(st.push(thm))
    return tac


# ------------------------------------------------------- search profiles

# safe_mp rules are applied by elim-resolution with the antecedent closed
# from the assumptions immediately (modus-ponens-in-place); the *_impE family
# is Dyckhoff's contraction-free treatment of compound implications.
NJ_SAFE_INTROS = ["conjI", "impI", "notI", "iffI", "allI"]
NJ_SAFE_ELIMS = ["FalseE", "conjE", "disjE", "exE", "iffE"]
NJ_SAFE_MP = ["notE", "impE"]
NJ_UNSAFE_INTROS = ["disjI1", "disjI2", "exI"]
NJ_UNSAFE_ELIMS = ["not_to_imp", "conj_impE", "disj_impE", "imp_impE",
                   "not_impE", "iff_impE", "all_impE", "ex_impE", "all_dupE"]
NJ_QUANT_RULES = {"exI", "all_dupE"}

CLASSICAL_SAFE_INTROS = ["conjI", "impI", "notI", "iffI", "allI", "disjCI"]
CLASSICAL_SAFE_ELIMS = ["FalseE", "conjE", "disjE", "exE", "iffE"]
CLASSICAL_SAFE_MP = ["notE", "impE"]
CLASSICAL_UNSAFE_INTROS = ["exCI", "exI", "classical"]
CLASSICAL_UNSAFE_ELIMS = ["swap", "impCE", "not_to_imp", "conj_impE",
                          "disj_impE", "imp_impE", "not_impE", "iff_impE",
                          "all_impE", "ex_impE", "all_dupE"]
CLASSICAL_QUANT_RULES = {"exI", "exCI", "all_dupE"}
