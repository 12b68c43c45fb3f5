"""Classical first-order logic as a sequent calculus.

Sequents `G |- D` are encoded with sequences as functions: the base type
sobj, the embedder Seqof : form -> sobj -> sobj, and the judgement
Tr : (sobj -> sobj) -> (sobj -> sobj) -> prop. A sequence variable $H is a
schematic variable of type sobj -> sobj, so higher-order unification of two
sequents enumerates the ways to line their items up — the effect of
associative unification.
"""

from functools import lru_cache

from .. import kernel, syntax, tactic
from ..kernel import Theory
from ..term import PROP as PROP_TY
from ..term import BaseType, Fixity, FunType, fn_type
from .fol import axiom_text, definition_text, unfold_tac

FORM = BaseType("form")
TERM = BaseType("term")
SOBJ = BaseType("sobj")
SEQ = FunType(SOBJ, SOBJ)


@lru_cache(maxsize=None)
def build_lk() -> Theory:
    lk = Theory("LK")
    sig = lk.signature
    sig.declare_type("term")
    sig.declare_type("form")
    sig.declare_type("sobj")
    lk.default_free_type = TERM
    lk.sequent_judgement = "Tr"

    sig.declare("Seqof", fn_type([FORM, SOBJ], SOBJ))
    sig.declare("Tr", fn_type([SEQ, SEQ], PROP_TY), Fixity("bracket"))
    ff = fn_type([FORM, FORM], FORM)
    sig.declare("&", ff, Fixity("infix", 35, "right"))
    sig.declare("|", ff, Fixity("infix", 30, "right"))
    sig.declare("-->", ff, Fixity("infix", 25, "right"))
    sig.declare("<->", ff, Fixity("infix", 20, "right"))
    sig.declare("~", FunType(FORM, FORM), Fixity("prefix", 60))
    qt = FunType(FunType(TERM, FORM), FORM)
    sig.declare("Forall", qt, Fixity("binder", display="ALL"))
    sig.declare("Exists", qt, Fixity("binder", display="EXISTS"))

    definition_text(lk, "iff_def", "P <-> Q == (P --> Q) & (Q --> P)")

    # structural rules: basic sequents, thinning, cut
    axiom_text(lk, "basic", "[| $H, P, $G |- $E, P, $F |]")
    axiom_text(lk, "thinR", "[| $H |- $E, $F |] ==> [| $H |- $E, P, $F |]")
    axiom_text(lk, "thinL", "[| $H, $G |- $E |] ==> [| $H, P, $G |- $E |]")
    axiom_text(lk, "cut",
               "[| $H |- $E, P |] ==> [| $H, P |- $E |] ==> [| $H |- $E |]")

    # connective rules
    axiom_text(lk, "conjR",
               "[| $H |- $E, P, $F |] ==> [| $H |- $E, Q, $F |] ==> "
               "[| $H |- $E, P & Q, $F |]")
    axiom_text(lk, "conjL",
               "[| $H, P, Q, $G |- $E |] ==> [| $H, P & Q, $G |- $E |]")
    axiom_text(lk, "disjR",
               "[| $H |- $E, P, Q, $F |] ==> [| $H |- $E, P | Q, $F |]")
    axiom_text(lk, "disjL",
               "[| $H, P, $G |- $E |] ==> [| $H, Q, $G |- $E |] ==> "
               "[| $H, P | Q, $G |- $E |]")
    axiom_text(lk, "impR",
               "[| $H, P |- $E, Q, $F |] ==> [| $H |- $E, P --> Q, $F |]")
    axiom_text(lk, "impL",
               "[| $H, $G |- $E, P |] ==> [| $H, Q, $G |- $E |] ==> "
               "[| $H, P --> Q, $G |- $E |]")
    axiom_text(lk, "notR",
               "[| $H, P |- $E, $F |] ==> [| $H |- $E, ~P, $F |]")
    axiom_text(lk, "notL",
               "[| $H, $G |- $E, P |] ==> [| $H, ~P, $G |- $E |]")

    # quantifier rules; left forall / right exists keep the quantified
    # formula for re-instantiation
    axiom_text(lk, "allR",
               "(!(x) [| $H |- $E, P(x), $F |]) ==> "
               "[| $H |- $E, ALL x. P(x), $F |]")
    axiom_text(lk, "allL",
               "[| $H, P(a), $G, ALL x. P(x) |- $E |] ==> "
               "[| $H, ALL x. P(x), $G |- $E |]")
    axiom_text(lk, "exR",
               "[| $H |- $E, P(a), $F, EXISTS x. P(x) |] ==> "
               "[| $H |- $E, EXISTS x. P(x), $F |]")
    axiom_text(lk, "exL",
               "(!(x) [| $H, P(x), $G |- $E |]) ==> "
               "[| $H, EXISTS x. P(x), $G |- $E |]")

    _derive_lk_rules(lk)
    return lk


def seq_parse(thy: Theory, text: str):
    """Parse a rule statement with $-variables read as fixed sequence
    parameters (Frees), for use in derivations."""
    from ..syntax import Parser, term_concretize
    from ..term import beta_eta_normalize, typecheck
    p = Parser(thy, text)
    p.dollar_as_free = True
    tm = p.parse()
    tm = term_concretize(tm, thy.default_free_type)
    tm = beta_eta_normalize(tm)
    typecheck(thy.signature, tm)
    return tm


def derive_seq(thy: Theory, name, premise_texts, concl_text, script):
    """derive() over sequent statements: $-variables become Frees during
    the proof and schematic variables on storage."""
    premises = [seq_parse(thy, s) for s in premise_texts]
    conclusion = seq_parse(thy, concl_text)

    def prove(state_thm, hyp_thms):
        st = tactic.ProofState(thy, state_thm)
        for out in script(hyp_thms)(st):
            if out.current.ngoals == 0:
                return out.current
        raise kernel.KernelError(f"derivation of {name} failed")

    thm = kernel.derive_rule(thy, premises, conclusion, prove)
    thy.store(name, thm)
    return thm


def _derive_lk_rules(lk: Theory):
    t = tactic

    # iffR: [$H,P |- $E,Q,$F]  [$H,Q |- $E,P,$F]  =>  [$H |- $E, P<->Q, $F]
    derive_seq(lk, "iffR",
               ["[| $H, P |- $E, Q, $F |]", "[| $H, Q |- $E, P, $F |]"],
               "[| $H |- $E, P <-> Q, $F |]",
               lambda hyps: t.then_all(
                   unfold_tac(lk, ["iff_def"], 1),
                   t.resolve_tac([lk.rule("conjR")], 1),
                   t.resolve_tac([lk.rule("impR")], 1),
                   t.resolve_tac([hyps[0]], 1),
                   t.resolve_tac([lk.rule("impR")], 1),
                   t.resolve_tac([hyps[1]], 1)))

    # iffL: [$H, P-->Q, Q-->P, $G |- $E]  =>  [$H, P<->Q, $G |- $E]
    derive_seq(lk, "iffL",
               ["[| $H, P --> Q, Q --> P, $G |- $E |]"],
               "[| $H, P <-> Q, $G |- $E |]",
               lambda hyps: t.then_all(
                   unfold_tac(lk, ["iff_def"], 1),
                   t.resolve_tac([lk.rule("conjL")], 1),
                   t.resolve_tac([hyps[0]], 1)))


def lk_profile():
    from ..prover import Profile
    # non-splitting decompositions before the branching rules
    return Profile(
        closers=("basic",),
        safe_intros=("conjL", "disjR", "impR", "notR", "notL", "iffL",
                     "allR", "exL", "conjR", "disjL", "impL", "iffR"),
        safe_elims=(),
        safe_mp=(),
        unsafe_intros=("allL", "exR"),
        unsafe_elims=(),
        quant_rules=frozenset({"allL", "exR"}),
        indexing="lk",
        use_assumption=False,
        thin_rules=("thinL", "thinR"))
