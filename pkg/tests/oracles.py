"""Independent oracles the test-suite checks the engine against.

These deliberately do not share code paths with the modules they check:
a first-order unifier, a brute-force lambda-term enumerator, a truth-table
/ finite-model evaluator, and a list-splitting sequent matcher.
"""

import itertools

from metaprover.term import (
    Abs, App, Bound, Const, Free, FunType, Term, Var, apps,
    beta_eta_normalize, fast_type, strip_app,
)


# ------------------------------------------------- first-order unification

class FOFail(Exception):
    pass


def fo_unify(pairs):
    """Textbook first-order unification on App/Const/Free/Var trees.

    Returns a map (name, serial) -> Term or raises FOFail. Terms must not
    contain Abs/Bound (the caller guarantees a first-order problem).
    """
    subst = {}

    def walk(t):
        while isinstance(t, Var) and t.key in subst:
            t = subst[t.key]
        return t

    def occurs(key, t):
        t = walk(t)
        if isinstance(t, Var):
            return t.key == key
        if isinstance(t, App):
            return occurs(key, t.fun) or occurs(key, t.arg)
        return False

    def go(a, b):
        a, b = walk(a), walk(b)
        if a == b:
            return
        if isinstance(a, Var):
            if occurs(a.key, b):
                raise FOFail("occurs")
            subst[a.key] = b
            return
        if isinstance(b, Var):
            go(b, a)
            return
        if isinstance(a, App) and isinstance(b, App):
            go(a.fun, b.fun)
            go(a.arg, b.arg)
            return
        if a != b:
            raise FOFail(f"clash {a!r} vs {b!r}")

    for (a, b) in pairs:
        go(a, b)

    def resolve(t):
        t = walk(t)
        if isinstance(t, App):
            return App(resolve(t.fun), resolve(t.arg))
        return t

    return {k: resolve(v) for k, v in subst.items()}


# ------------------------------------------- brute-force term enumeration

def enumerate_lambdas(arg_tys, result_ty, atoms, depth):
    """All lambda-terms  lam z1..zn. body  with body built from `atoms` and
    the bound z's, of at most `depth` application nesting; used to find all
    unifier images by filtering with the beta-eta oracle."""
    n = len(arg_tys)

    def terms_of(ty, d):
        for i, aty in enumerate(arg_tys):
            if aty == ty:
                yield Bound(n - 1 - i)
        for a in atoms:
            if fast_type(a) == ty:
                yield a
        if d > 0:
            for a in atoms:
                aty = fast_type(a)
                doms = []
                while isinstance(aty, FunType):
                    doms.append(aty.dom)
                    aty = aty.rng
                if aty == ty and doms:
                    for combo in itertools.product(
                            *[list(terms_of(dty, d - 1)) for dty in doms]):
                        yield apps(a, *combo)

    for body in terms_of(result_ty, depth):
        t = body
        for aty in reversed(arg_tys):
            t = Abs("z", aty, t)
        yield t


# ------------------------------------------------------------ truth tables

def eval_prop(formula, valuation, ops):
    """Evaluate a connective tree given leaf truth-values; `formula` is a
    nested tuple ('&', l, r) / ('~', x) / atom-name."""
    if isinstance(formula, str):
        return valuation[formula]
    op = formula[0]
    args = [eval_prop(a, valuation, ops) for a in formula[1:]]
    return ops[op](*args)


PROP_OPS = {
    "&": lambda a, b: a and b,
    "|": lambda a, b: a or b,
    "-->": lambda a, b: (not a) or b,
    "<->": lambda a, b: a == b,
    "~": lambda a: not a,
    "False": lambda: False,
}


def tautology(formula, atoms):
    for bits in itertools.product([False, True], repeat=len(atoms)):
        if not eval_prop(formula, dict(zip(atoms, bits)), PROP_OPS):
            return False
    return True


# ------------------------------------------- sequent list-splitting oracle

def split_matches(items, pattern_items):
    """All ways to match a sequent side against a pattern of the shape
    [seqvar?, F1, seqvar?, F2, ...]: returns the list of index assignments
    for the concrete formulas. Pattern entries: '$' (any run) or 'P' (one
    formula, all 'P's equal)."""
    results = []

    def go(i, j, binding):
        if j == len(pattern_items):
            if i == len(items):
                results.append(dict(binding))
            return
        p = pattern_items[j]
        if p == "$":
            for k in range(i, len(items) + 1):
                go(k, j + 1, binding)
        else:
            if i < len(items):
                if p in binding and binding[p] != items[i]:
                    return
                binding2 = dict(binding)
                binding2[p] = items[i]
                go(i + 1, j + 1, binding2)

    go(0, 0, {})
    return results
