import pytest

from metaprover.term import (
    Abs, App, BaseType, Bound, Const, Free, FunType, LooseBoundVariable, PROP,
    Signature, TermError, TypeMismatch, UndeclaredConstant, Var, abstract_over,
    alpha_equal, apps, beta_eta_normalize, fast_type, fn_type, instantiate,
    loose_bounds, subst_schematics, typecheck,
)

from gen import FORM, TERM, random_term, rng_for

T2F = FunType(TERM, FORM)
T2T = FunType(TERM, TERM)


def fol_sig():
    sig = Signature()
    sig.declare_type("term")
    sig.declare_type("form")
    sig.declare("False", FORM)
    sig.declare("ALL", FunType(T2F, FORM))
    sig.declare("f", T2T)
    sig.declare("g", fn_type([TERM, TERM], TERM))
    return sig


class TestTypecheck:
    def test_bottom_is_form(self):
        sig = fol_sig()
        assert typecheck(sig, Const("False", FORM)) == FORM

    def test_identity_function(self):
        sig = fol_sig()
        assert typecheck(sig, Abs("x", TERM, Bound(0))) == T2T

    def test_forall_encoding(self):
        # ALL(%x. P(x)) : form
        sig = fol_sig()
        t = App(Const("ALL", FunType(T2F, FORM)),
                Abs("x", TERM, App(Free("P", T2F), Bound(0))))
        assert typecheck(sig, t) == FORM

    def test_undeclared_constant(self):
        sig = fol_sig()
        with pytest.raises(UndeclaredConstant):
            typecheck(sig, Const("mystery", FORM))

    def test_type_mismatch(self):
        sig = fol_sig()
        with pytest.raises(TypeMismatch):
            typecheck(sig, App(Const("f", T2T), Const("False", FORM)))

    def test_loose_bound_rejected(self):
        sig = fol_sig()
        with pytest.raises(LooseBoundVariable):
            typecheck(sig, Bound(0))

    def test_prop_in_domain_rejected(self):
        sig = fol_sig()
        with pytest.raises(TermError):
            sig.declare("bad", FunType(PROP, FORM))


class TestNormalize:
    def test_beta(self):
        # (%x. P(x))(t) -> P(t)
        P, t = Free("P", T2F), Free("t", TERM)
        redex = App(Abs("x", TERM, App(P, Bound(0))), t)
        assert beta_eta_normalize(redex) == App(P, t)

    def test_eta(self):
        # %x. f(x) -> f
        f = Const("f", T2T)
        assert beta_eta_normalize(Abs("x", TERM, App(f, Bound(0)))) == f

    def test_capture_avoided(self):
        # (%x. %y. x)(y) -> %z. y, not %y. y
        y = Free("y", TERM)
        t = App(Abs("x", TERM, Abs("y", TERM, Bound(1))), y)
        got = beta_eta_normalize(t)
        assert got == Abs("z", TERM, y)
        assert got != Abs("z", TERM, Bound(0))

    def test_idempotent_and_type_preserving_random(self):
        rng = rng_for(42)
        for i in range(300):
            t = random_term(rng, rng.choice([TERM, FORM, T2T, T2F]), depth=4)
            n = beta_eta_normalize(t)
            assert beta_eta_normalize(n) == n
            assert fast_type(n) == fast_type(t)
            assert not loose_bounds(n)


class TestSubst:
    def test_identity_subst(self):
        t = App(Free("Q", T2F), Var("a", 0, TERM))
        assert subst_schematics({}, t) == t

    def test_first_order_subst(self):
        # ?a := f(1) in Q(?a)
        one = Free("1", TERM)
        fa = App(Const("f", T2T), one)
        t = App(Free("Q", T2F), Var("a", 0, TERM))
        got = subst_schematics({("a", 0): fa}, t)
        assert got == App(Free("Q", T2F), fa)

    def test_higher_order_subst_beta_reduces(self):
        # ?F := %x. g(x,x) applied at ?F(a) gives g(a,a)
        g = Const("g", fn_type([TERM, TERM], TERM))
        a = Free("a", TERM)
        F = Var("F", 0, T2T)
        val = Abs("x", TERM, apps(g, Bound(0), Bound(0)))
        got = subst_schematics({("F", 0): val}, App(F, a))
        # oracle: reduce by hand — (%x. g(x,x))(a) = g(a,a)
        assert got == apps(g, a, a)

    def test_type_mismatch_rejected(self):
        t = Var("a", 0, TERM)
        with pytest.raises(TypeMismatch):
            instantiate(t, {("a", 0): Const("False", FORM)})


class TestAlphaEqual:
    def test_hints_ignored(self):
        P = Free("P", T2F)
        t1 = Abs("x", TERM, App(P, Bound(0)))
        t2 = Abs("y", TERM, App(P, Bound(0)))
        assert alpha_equal(t1, t2)

    def test_different_bodies_differ(self):
        t1 = Abs("x", TERM, App(Free("P", T2F), Bound(0)))
        t2 = Abs("x", TERM, App(Free("Q", T2F), Bound(0)))
        assert not alpha_equal(t1, t2)

    def test_normal_forms_compare(self):
        # ALL(%x. P(x)) vs ALL(%y. (%z. P(z))(y)): normalize then compare
        P = Free("P", T2F)
        allc = Const("ALL", FunType(T2F, FORM))
        t1 = App(allc, Abs("x", TERM, App(P, Bound(0))))
        inner = Abs("z", TERM, App(P, Bound(0)))
        t2 = App(allc, Abs("y", TERM, App(inner, Bound(0))))
        assert alpha_equal(beta_eta_normalize(t1), beta_eta_normalize(t2))


class TestAbstractOver:
    def test_inverse_of_beta(self):
        x = Free("x", TERM)
        t = App(Free("P", T2F), x)
        got = abstract_over(x, t)
        assert got == Abs("x", TERM, App(Free("P", T2F), Bound(0)))

    def test_constant_function(self):
        x = Free("x", TERM)
        c = Free("c", TERM)
        assert abstract_over(x, c) == Abs("x", TERM, c)

    def test_round_trip_random(self):
        rng = rng_for(7)
        x = Free("xt", TERM)
        for i in range(200):
            t = random_term(rng, rng.choice([TERM, FORM]), depth=3)
            lam = abstract_over(x, t)
            back = beta_eta_normalize(App(lam, x))
            assert back == beta_eta_normalize(t)


def test_subst_normalize_commute_random():
    rng = rng_for(11)
    g = Const("g", fn_type([TERM, TERM], TERM))
    val = Abs("x", TERM, apps(g, Bound(0), Free("ct", TERM)))
    mapping = {("XFtt", 0): val}  # the generator's ?X at type term -> term
    for i in range(200):
        t = random_term(rng, rng.choice([TERM, FORM]), depth=3)
        lhs = beta_eta_normalize(instantiate(t, mapping))
        rhs = instantiate(beta_eta_normalize(t), mapping)
        assert lhs == rhs
