"""The meta-logic kernel: theories, theorems, resolution, lifting.

A Theorem is an assertion `[phi1,...,phim] ==> phi` readable as a rule
(premises/conclusion) or as a proof state (subgoals/final goal). This module
is the only place Theorem values are built; everything above it composes
these operations. Resolution and lifting are hand-coded for speed; the test
suite re-derives them by explicit meta-rule steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Optional

from .lazyseq import Seq, seq_of_iter
from .term import (
    ALL_NAME, Abs, App, Bound, Const, Free, FunType, IMP, IMP_NAME, PROP,
    Signature, Term, TermError, Type, TypeMismatch, Var, abstract_over,
    all_const, apps, beta_eta_normalize, fast_type, fn_type, frees_of,
    instantiate, max_serial, shift, strip_app, subst_bound, typecheck,
    variant_name, vars_of,
)
from .unify import Env, SearchLimits, unify, match


class KernelError(TermError):
    pass


class UnknownAxiom(KernelError):
    pass


class UnknownDefinition(KernelError):
    pass


class SubgoalOutOfRange(KernelError):
    pass


class TheoryMismatch(KernelError):
    pass


class SubgoalsRemain(KernelError):
    def __init__(self, count):
        super().__init__(f"{count} subgoals remain")
        self.count = count


class UndischargedHypothesis(KernelError):
    pass


class HypothesisVariable(KernelError):
    pass


# ------------------------------------------------------- prop structure

def mk_imp(a: Term, b: Term) -> Term:
    return apps(IMP, a, b)


def mk_imps(prems, concl: Term) -> Term:
    for p in reversed(list(prems)):
        concl = mk_imp(p, concl)
    return concl


def dest_imp(t: Term) -> Optional[tuple[Term, Term]]:
    if type(t) is App:
        f = t.fun
        if type(f) is App:
            c = f.fun
            if type(c) is Const and c.name == IMP_NAME:
                return (f.arg, t.arg)
    return None


def strip_imp(t: Term) -> tuple[list[Term], Term]:
    prems = []
    while (d := dest_imp(t)) is not None:
        prems.append(d[0])
        t = d[1]
    return prems, t


def dest_all(t: Term) -> Optional[tuple[str, Type, Term]]:
    if type(t) is App:
        c = t.fun
        if type(c) is Const and c.name == ALL_NAME:
            b = t.arg
            if type(b) is Abs:
                return (b.hint, b.bind_ty, b.body)
            # eta-short operand: !!(f) with f not a lambda
            ty = c.ty.dom.dom
            return ("x", ty, App(incr_term(b), Bound(0)))
    return None


def incr_term(t: Term) -> Term:
    from .term import shift
    return shift(t, 1)


def mk_all(param: Free, body: Term) -> Term:
    return App(all_const(param.ty), abstract_over(param, body))


def subgoals_of(prop: Term) -> list[Term]:
    return strip_imp(prop)[0]


def final_goal_of(prop: Term) -> Term:
    return strip_imp(prop)[1]


@dataclass(frozen=True)
class SubgoalView:
    """Subgoal i split into eigenvariable context, assumptions and goal."""

    index: int
    params: tuple[tuple[str, Type], ...]
    assumptions: tuple[Term, ...]   # opened: mention the param Frees
    goal: Term

    def param_frees(self) -> list[Free]:
        return [Free(n, ty) for n, ty in self.params]

    def close(self) -> Term:
        return close_subgoal(self.param_frees(), list(self.assumptions), self.goal)


def open_subgoal(t: Term, avoid=None) -> tuple[list[Free], list[Term], Term]:
    """Walk the !!/==> spine: eigenvariables become fresh Frees.

    `avoid` supplies names to stay clear of: a set, or a callable producing
    one (evaluated only if a binder is actually present)."""
    taken: Optional[set] = None
    params: list[Free] = []
    asms: list[Term] = []
    while True:
        if (d := dest_all(t)) is not None:
            if taken is None:
                taken = set(avoid() if callable(avoid) else (avoid or ()))
            hint, ty, body = d
            name = variant_name(hint or "x", taken)
            taken.add(name)
            x = Free(name, ty)
            params.append(x)
            t = beta_eta_normalize(subst_bound(body, x))
            continue
        if (d := dest_imp(t)) is not None:
            asms.append(d[0])
            t = d[1]
            continue
        return params, asms, t


def close_subgoal(params: list[Free], asms: list[Term], goal: Term) -> Term:
    t = mk_imps(asms, goal)
    for p in reversed(params):
        t = mk_all(p, t)
    return t


def normalize_subgoal(t: Term, avoid=None) -> Term:
    """Canonical form: all eigenvariable binders in front, then assumptions."""
    # already canonical if no !! occurs after the first ==> of the spine
    u = t
    while (d := dest_all(u)) is not None:
        u = d[2]
    needs = False
    while (d := dest_imp(u)) is not None:
        u = d[1]
        if dest_all(u) is not None:
            needs = True
            break
    if not needs:
        return t

    def taken():
        s = set(frees_of(t))
        if avoid:
            s |= set(avoid)
        return s

    params, asms, goal = open_subgoal(t, taken)
    return close_subgoal(params, asms, goal)


# ---------------------------------------------------------------- theory

class Theory:
    """A named signature extension with axioms and definitions.

    Child theories only ever extend the parent (same-name redeclaration at a
    different type is rejected by the signature).
    """

    def __init__(self, name: str, parent: Optional["Theory"] = None):
        self.name = name
        self.parent = parent
        self.signature: Signature = parent.signature.copy() if parent else Signature()
        self.axioms: dict[str, Term] = {}
        self.definitions: dict[str, Term] = {}
        self.theorems: dict[str, "Theorem"] = {}
        self.default_free_type: Optional[Type] = parent.default_free_type if parent else None
        self.sequent_judgement: Optional[str] = parent.sequent_judgement if parent else None
        self.truth_judgement: Optional[str] = parent.truth_judgement if parent else None
        # parser/printer extension points (notation beyond plain fixities)
        self.bracket_notations: list = list(parent.bracket_notations) if parent else []
        self.printer_hooks: list = list(parent.printer_hooks) if parent else []

    def print_special(self, printer, head, args, prec, taken):
        for fn in self.printer_hooks:
            s = fn(printer, head, args, prec, taken)
            if s is not None:
                return s
        return None

    def __repr__(self):
        return f"Theory({self.name})"

    def extend(self, name: str) -> "Theory":
        return Theory(name, parent=self)

    def ancestors(self) -> Iterator["Theory"]:
        t: Optional[Theory] = self
        while t is not None:
            yield t
            t = t.parent

    def extends(self, other: "Theory") -> bool:
        return any(t is other for t in self.ancestors())

    def compatible(self, other: "Theory") -> bool:
        return self.extends(other) or other.extends(self)

    def join(self, other: "Theory") -> "Theory":
        if self.extends(other):
            return self
        if other.extends(self):
            return other
        raise TheoryMismatch(f"{self.name} and {other.name} are unrelated")

    # -- declarations

    def add_axiom(self, name: str, prop: Term):
        if typecheck(self.signature, prop) != PROP:
            raise TypeMismatch(f"axiom {name} is not a prop")
        self.axioms[name] = _theorem_normal(prop)

    def add_definition(self, name: str, prop: Term):
        """prop must be `lhs == rhs`; the lhs head constant must be declared
        here and not defined twice."""
        if typecheck(self.signature, prop) != PROP:
            raise TypeMismatch(f"definition {name} is not a prop")
        prop = _theorem_normal(prop)
        lhs, rhs = dest_equals(prop)
        head, _ = strip_app(lhs)
        if not isinstance(head, Const):
            raise KernelError(f"definition {name}: left head must be a constant")
        if head.name not in self.signature.consts:
            raise UnknownDefinition(f"{head.name} not declared")
        for anc in self.ancestors():
            if name in anc.definitions:
                raise KernelError(f"definition {name} given twice")
        extra = set(vars_of(rhs)) - set(vars_of(lhs))
        if extra:
            raise KernelError(f"definition {name}: rhs has extra variables {extra}")
        self.definitions[name] = prop

    def axiom_term(self, name: str) -> Term:
        for anc in self.ancestors():
            if name in anc.axioms:
                return anc.axioms[name]
        raise UnknownAxiom(name)

    def definition_term(self, name: str) -> Term:
        for anc in self.ancestors():
            if name in anc.definitions:
                return anc.definitions[name]
        raise UnknownDefinition(name)

    def all_axiom_names(self) -> list[str]:
        seen, out = set(), []
        for anc in self.ancestors():
            for n in anc.axioms:
                if n not in seen:
                    seen.add(n)
                    out.append(n)
        return out

    def all_theorems(self) -> dict[str, "Theorem"]:
        out: dict[str, Theorem] = {}
        for anc in self.ancestors():
            for n, thm in anc.theorems.items():
                out.setdefault(n, thm)
        return out

    def store(self, name: str, thm: "Theorem"):
        self.theorems[name] = thm

    def rule(self, name: str) -> "Theorem":
        """An axiom or stored derived rule by name."""
        for anc in self.ancestors():
            if name in anc.theorems:
                return anc.theorems[name]
            if name in anc.axioms:
                return Theorem(self, anc.axioms[name], (), _token=_KERNEL)
        raise UnknownAxiom(name)


def dest_equals(prop: Term) -> tuple[Term, Term]:
    match prop:
        case App(App(Const(name, _), lhs), rhs) if name == "==":
            return (lhs, rhs)
    raise KernelError(f"not a meta-equality: {prop!r}")


def _theorem_normal(prop: Term) -> Term:
    """Outer and spine !!-binders stripped to schematic variables."""
    prop = beta_eta_normalize(prop)
    serial = max_serial(prop) + 1
    taken = {n for (n, _s) in vars_of(prop)}
    prems: list[Term] = []
    t = prop
    while True:
        if (d := dest_all(t)) is not None:
            hint, ty, body = d
            name = hint or "x"
            s = 0 if name not in taken else serial
            if name in taken:
                serial += 1
            taken.add(name)
            from .term import subst_bound
            t = beta_eta_normalize(subst_bound(body, Var(name, s, ty)))
            continue
        if (d := dest_imp(t)) is not None:
            prems.append(d[0])
            t = d[1]
            continue
        break
    return mk_imps(prems, t)


# --------------------------------------------------------------- theorem

_KERNEL = object()


class Theorem:
    """A proved assertion. Construct only through this module's operations.

    `constraints` is the flex-flex residue accumulated by resolution steps;
    it rejoins every later unification problem and is resolved at finalize.
    `ngoals` counts the leading premises that are read as subgoals: a rule's
    premises and a state's subgoals coincide except when the proved formula
    is itself a meta-implication, which the prop alone cannot distinguish.
    """

    __slots__ = ("theory", "prop", "hypotheses", "constraints", "ngoals",
                 "_maxserial", "_frees")

    def __init__(self, theory: Theory, prop: Term, hypotheses=(),
                 constraints=(), ngoals: Optional[int] = None, *, _token=None):
        if _token is not _KERNEL:
            raise KernelError("Theorems can only be made by kernel operations")
        self.theory = theory
        self.prop = prop
        self.hypotheses: tuple[Term, ...] = tuple(hypotheses)
        self.constraints: tuple = tuple(constraints)
        self.ngoals: int = (len(strip_imp(prop)[0]) if ngoals is None else ngoals)
        self._maxserial: Optional[int] = None
        self._frees: Optional[frozenset] = None

    def max_serial_cached(self) -> int:
        if self._maxserial is None:
            m = max_serial(self.prop)
            for (cs, ct) in self.constraints:
                m = max(m, max_serial(cs), max_serial(ct))
            self._maxserial = m
        return self._maxserial

    def frees_cached(self) -> frozenset:
        if self._frees is None:
            self._frees = frozenset(frees_of(self.prop))
        return self._frees

    def __eq__(self, other):
        return (isinstance(other, Theorem) and self.prop == other.prop
                and self.hypotheses == other.hypotheses
                and self.constraints == other.constraints
                and self.ngoals == other.ngoals)

    def __hash__(self):
        return hash((self.prop, self.hypotheses, self.constraints, self.ngoals))

    def __repr__(self):
        return f"Theorem({self.prop!r})"

    @property
    def subgoals(self) -> list[Term]:
        return split_goals(self.prop, self.ngoals)[0]

    @property
    def subgoal_count(self) -> int:
        return self.ngoals

    @property
    def concl(self) -> Term:
        return split_goals(self.prop, self.ngoals)[1]


def split_goals(prop: Term, n: int) -> tuple[list[Term], Term]:
    """First n premises and the remainder of the ==>-spine."""
    subs = []
    t = prop
    for _ in range(n):
        d = dest_imp(t)
        if d is None:
            raise KernelError(f"fewer than {n} premises in {prop!r}")
        subs.append(d[0])
        t = d[1]
    return subs, t


def axiom(thy: Theory, name: str) -> Theorem:
    return Theorem(thy, thy.axiom_term(name), (), _token=_KERNEL)


def trivial(thy: Theory, phi: Term) -> Theorem:
    if typecheck(thy.signature, phi) != PROP:
        raise TypeMismatch(f"goal is not a prop: {phi!r}")
    phi = beta_eta_normalize(phi)
    return Theorem(thy, mk_imp(phi, phi), (), (), 1, _token=_KERNEL)


def hypothesis(thy: Theory, phi: Term) -> Theorem:
    """phi as a meta-level assumption: a Theorem carrying itself as
    hypothesis. The working prop is quantifier-stripped (meta forall
    elimination at schematic arguments) so it is usable as a rule."""
    if typecheck(thy.signature, phi) != PROP:
        raise TypeMismatch(f"hypothesis is not a prop: {phi!r}")
    phi = beta_eta_normalize(phi)
    return Theorem(thy, _theorem_normal(phi), (phi,), _token=_KERNEL)


def view_subgoal(state: Theorem, i: int) -> SubgoalView:
    if not 1 <= i <= state.ngoals:
        raise SubgoalOutOfRange(f"subgoal {i} of {state.ngoals}")
    subs = state.subgoals
    params, asms, goal = open_subgoal(subs[i - 1],
                                      lambda: state.frees_cached())
    return SubgoalView(i, tuple((p.name, p.ty) for p in params),
                       tuple(asms), goal)


def rename_vars_apart(prop: Term, base: int) -> tuple[Term, int]:
    """Bump every schematic serial above `base`; returns new max serial."""
    vs = vars_of(prop)
    if not vs:
        return prop, base
    mapping = {}
    nxt = base + 1
    for (n, s), ty in sorted(vs.items()):
        mapping[(n, s)] = Var(n, nxt, ty)
        nxt += 1
    return instantiate(prop, mapping), nxt - 1


def lift(rule: Theorem, context: SubgoalView) -> Theorem:
    """Lift a rule into a subgoal context: schematic variables become
    functions of the context's parameters, premises and conclusion are
    wrapped in the context's binders and assumptions."""
    params = context.param_frees()
    asms = list(context.assumptions)
    rprems, rconcl = split_goals(rule.prop, rule.ngoals)
    lifted_prems, lifted_concl = _lift_parts(rprems, rconcl, params, asms,
                                             max_serial(rule.prop))
    return Theorem(rule.theory, mk_imps(lifted_prems, lifted_concl),
                   rule.hypotheses, rule.constraints, rule.ngoals,
                   _token=_KERNEL)


def _lift_parts(rprems: list[Term], rconcl: Term, params: list[Free],
                asms: list[Term], base: int) -> tuple[list[Term], Term]:
    param_tys = [p.ty for p in params]
    all_vars: dict = {}
    for t in rprems + [rconcl]:
        all_vars.update(vars_of(t))
    mapping = {}
    nxt = base + 1
    for (n, s), ty in sorted(all_vars.items()):
        v = Var(n, nxt, fn_type(param_tys, ty))
        nxt += 1
        mapping[(n, s)] = apps(v, *params)
    def taken():
        s = {p.name for p in params}
        for t in rprems + [rconcl]:
            s |= set(frees_of(t))
        return s

    out_prems = []
    for ps in rprems:
        ps2 = instantiate(ps, mapping) if params else ps
        inner_params, inner_asms, g = open_subgoal(ps2, taken)
        out_prems.append(close_subgoal(params + inner_params,
                                       asms + inner_asms, g))
    concl2 = instantiate(rconcl, mapping) if params else rconcl
    out_concl = close_subgoal(params, asms, concl2)
    return out_prems, out_concl


def resolve(rule: Theorem, i: int, state: Theorem,
            limits: SearchLimits = SearchLimits()) -> Seq:
    """Backward resolution: replace subgoal i of the state by the lifted
    rule's premises, once per unifier of the lifted conclusion with the
    subgoal. Lazy stream of successor states."""
    if not rule.theory.compatible(state.theory):
        raise TheoryMismatch(f"{rule.theory.name} vs {state.theory.name}")
    thy = rule.theory.join(state.theory)
    if not 1 <= i <= state.ngoals:
        raise SubgoalOutOfRange(f"subgoal {i} of {state.ngoals}")
    subs, final = split_goals(state.prop, state.ngoals)
    subgoal = subs[i - 1]

    base = max(state.max_serial_cached(), 0)
    rprop, rcons, base2 = _rename_thm_apart(rule, base)
    rprems, rconcl = split_goals(rprop, rule.ngoals)
    # a still-quantified conclusion blocks matching: strip it by meta
    # forall-elimination at fresh schematic arguments
    if dest_all(rconcl) is not None:
        rconcl, extra, base2 = _strip_concl(rconcl, base2)
        rprems = rprems + extra
    view = view_subgoal(state, i)
    lifted_prems, lifted_concl = _lift_parts(
        rprems, rconcl, view.param_frees(), list(view.assumptions), base2)

    hyp_keys = _hypothesis_var_keys(rule, state)
    serial_top = max([base2, max_serial(lifted_concl)]
                     + [max_serial(p) for p in lifted_prems])
    env0 = Env(max_serial=serial_top,
               constraints=tuple(state.constraints) + rcons)
    stream = unify(thy.signature, env0, [(lifted_concl, subgoal)], limits,
                   smash=False)
    hyps = _merge_hyps(rule.hypotheses, state.hypotheses)
    n_out = state.ngoals - 1 + len(lifted_prems)

    def results() -> Iterator[Theorem]:
        from .term import mentions_any_var
        seen = set()
        for env in stream:
            if any(k in env.assignments for k in hyp_keys):
                continue
            ch = env.assignments
            out_subs = [_subst_subgoal(s, env, ch) for s in subs[:i - 1]]
            out_subs += [normalize_subgoal(env.norm(p)) for p in lifted_prems]
            out_subs += [_subst_subgoal(s, env, ch) for s in subs[i:]]
            out_final = (env.norm(final)
                         if ch and mentions_any_var(final, ch) else final)
            prop = mk_imps(out_subs, out_final)
            key = (prop, env.constraints)
            if key in seen:
                continue
            seen.add(key)
            yield Theorem(thy, prop, hyps, env.constraints, n_out,
                          _token=_KERNEL)

    return seq_of_iter(results())


def _subst_subgoal(s: Term, env: Env, ch) -> Term:
    from .term import mentions_any_var
    if not ch or not mentions_any_var(s, ch):
        return s
    return normalize_subgoal(env.norm(s))


def _strip_concl(t: Term, base: int):
    """Strip a quantified conclusion by forall-elimination at fresh
    schematic variables; implications exposed on the way become premises."""
    extra: list[Term] = []
    nxt = base
    while True:
        d = dest_all(t)
        if d is not None:
            hint, ty, body = d
            nxt += 1
            t = beta_eta_normalize(subst_bound(body, Var(hint or "x", nxt, ty)))
            continue
        d = dest_imp(t)
        if d is not None:
            extra.append(d[0])
            t = d[1]
            continue
        return t, extra, nxt


def _rename_thm_apart(rule: Theorem, base: int):
    """Bump the rule's schematic serials above base, constraints included."""
    vs = dict(vars_of(rule.prop))
    for (cs, ct) in rule.constraints:
        vs.update(vars_of(cs))
        vs.update(vars_of(ct))
    if not vs:
        return rule.prop, tuple(rule.constraints), base
    mapping = {}
    nxt = base + 1
    for (n, s), ty in sorted(vs.items()):
        mapping[(n, s)] = Var(n, nxt, ty)
        nxt += 1
    rcons = tuple((instantiate(a, mapping), instantiate(b, mapping))
                  for (a, b) in rule.constraints)
    return instantiate(rule.prop, mapping), rcons, nxt - 1


def _renormalize_state(prop: Term, ngoals: int) -> Term:
    subs, final = split_goals(prop, ngoals)
    frees = set(frees_of(prop))
    return mk_imps([normalize_subgoal(p, frees) for p in subs], final)


def _merge_hyps(a, b):
    out = list(a)
    for h in b:
        if h not in out:
            out.append(h)
    return tuple(out)


def _hypothesis_var_keys(*thms: Theorem) -> set:
    keys = set()
    for t in thms:
        for h in t.hypotheses:
            keys |= set(vars_of(h))
    return keys


def assumption(state: Theorem, i: int,
               limits: SearchLimits = SearchLimits(),
               only_index: Optional[int] = None) -> Seq:
    """Close subgoal i by unifying its goal with one of its assumptions,
    newest assumption first. only_index (1-based) restricts the candidates
    to a single assumption."""
    if not 1 <= i <= state.ngoals:
        raise SubgoalOutOfRange(f"subgoal {i} of {state.ngoals}")
    subs, final = split_goals(state.prop, state.ngoals)
    view = view_subgoal(state, i)
    params = view.param_frees()
    hyp_keys = _hypothesis_var_keys(state)

    def close(t: Term) -> Term:
        for p in reversed(params):
            t = abstract_over(p, t)
        return t

    goal_l = close(view.goal)
    base = max(state.max_serial_cached(), 0)
    n_out = state.ngoals - 1

    def results() -> Iterator[Theorem]:
        from .term import mentions_any_var
        seen = set()
        order = range(len(view.assumptions) - 1, -1, -1)
        if only_index is not None:
            if not 1 <= only_index <= len(view.assumptions):
                return
            order = [only_index - 1]
        for j in order:
            asm_l = close(view.assumptions[j])
            env0 = Env(max_serial=base, constraints=state.constraints)
            for env in unify(state.theory.signature, env0,
                             [(asm_l, goal_l)], limits, smash=False):
                if any(k in env.assignments for k in hyp_keys):
                    continue
                ch = env.assignments
                out_subs = [_subst_subgoal(s, env, ch)
                            for s in subs[:i - 1] + subs[i:]]
                out_final = (env.norm(final)
                             if ch and mentions_any_var(final, ch) else final)
                prop = mk_imps(out_subs, out_final)
                key = (prop, env.constraints)
                if key in seen:
                    continue
                seen.add(key)
                yield Theorem(state.theory, prop, state.hypotheses,
                              env.constraints, n_out, _token=_KERNEL)

    return seq_of_iter(results())


def elim_resolve(rule: Theorem, i: int, state: Theorem,
                 limits: SearchLimits = SearchLimits()) -> Seq:
    """Elim-resolution: resolve with a rule whose first premise names the
    assumption being eliminated, close that premise with an assumption of
    the subgoal, and delete the used assumption from the rule's remaining
    subgoals (a weakening). The standard way to apply elimination rules
    without looping."""
    if rule.ngoals == 0:
        return Seq.empty()
    n_asms = len(view_subgoal(state, i).assumptions)
    m_rest = rule.ngoals - 1

    def results() -> Iterator[Theorem]:
        for mid in resolve(rule, i, state, limits):
            for j in range(n_asms, 0, -1):
                for closed in assumption(mid, i, limits, only_index=j):
                    out = closed
                    try:
                        for k in range(m_rest):
                            out = delete_assumption(out, i + k, j)
                    except SubgoalOutOfRange:
                        out = closed
                    yield out

    return seq_of_iter(results())


def delete_assumption(state: Theorem, i: int, j: int) -> Theorem:
    """Drop assumption j (1-based) of subgoal i: a weakening, hence sound."""
    if not 1 <= i <= state.ngoals:
        raise SubgoalOutOfRange(f"subgoal {i} of {state.ngoals}")
    subs, final = split_goals(state.prop, state.ngoals)
    view = view_subgoal(state, i)
    if not 1 <= j <= len(view.assumptions):
        raise SubgoalOutOfRange(f"assumption {j}")
    asms = [a for k, a in enumerate(view.assumptions, start=1) if k != j]
    sub = close_subgoal(view.param_frees(), asms, view.goal)
    prop = mk_imps(subs[:i - 1] + [sub] + subs[i:], final)
    return Theorem(state.theory, prop, state.hypotheses, state.constraints,
                   state.ngoals, _token=_KERNEL)


def finalize(state: Theorem) -> Theorem:
    if state.ngoals:
        raise SubgoalsRemain(state.ngoals)
    prop = beta_eta_normalize(state.prop)
    if state.constraints:
        from .unify import smash_flexflex
        env = smash_flexflex(Env(max_serial=max_serial(prop) + 1000,
                                 constraints=state.constraints))
        if env is None:
            raise KernelError("unresolvable residual constraints")
        prop = env.norm(prop)
    return Theorem(state.theory, prop, state.hypotheses, (), None,
                   _token=_KERNEL)


def instantiate_thm(env, thm: Theorem) -> Theorem:
    """Apply a substitution to a theorem; variables occurring in hypotheses
    are off-limits."""
    assigned = set(env.assignments) if isinstance(env, Env) else set(env)
    hyp_keys = _hypothesis_var_keys(thm)
    if assigned & hyp_keys:
        raise HypothesisVariable(f"{assigned & hyp_keys}")
    if isinstance(env, Env):
        prop = env.norm(thm.prop)
        cons = tuple((env.norm(a), env.norm(b)) for (a, b) in thm.constraints)
    else:
        prop = instantiate(thm.prop, env)
        cons = tuple((instantiate(a, env), instantiate(b, env))
                     for (a, b) in thm.constraints)
    typecheck(thm.theory.signature, prop)
    cons = tuple((a, b) for (a, b) in cons if a != b)
    return Theorem(thm.theory, prop, thm.hypotheses, cons, thm.ngoals,
                   _token=_KERNEL)


def generalize(thm: Theorem, free_names=None) -> Theorem:
    """Turn Frees into schematic variables (all of them by default).
    Frees occurring in hypotheses stay fixed."""
    hyp_frees = set()
    for h in thm.hypotheses:
        hyp_frees |= set(frees_of(h))
    frees = frees_of(thm.prop)
    names = [n for n in frees if n not in hyp_frees
             and (free_names is None or n in free_names)]
    taken = {n for (n, _s) in vars_of(thm.prop)}
    serial = max_serial(thm.prop) + 1
    prop = thm.prop

    def repl(t: Term) -> Term:
        match t:
            case Free(n, ty) if n in mapping:
                return Var(n, mapping[n], ty)
            case Abs(h, ty, b):
                return Abs(h, ty, repl(b))
            case App(f, a):
                return App(repl(f), repl(a))
            case _:
                return t

    mapping = {}
    for n in names:
        if n in taken:
            mapping[n] = serial
            serial += 1
        else:
            mapping[n] = 0
            taken.add(n)
    prop = repl(prop)
    cons = tuple((repl(a), repl(b)) for (a, b) in thm.constraints)
    return Theorem(thm.theory, prop, thm.hypotheses, cons, thm.ngoals,
                   _token=_KERNEL)


def derive_rule(thy: Theory, premises: list[Term], conclusion: Term,
                prove: Callable[[Theorem, list[Theorem]], Theorem]) -> Theorem:
    """Prove `conclusion` with the premises available as meta-assumptions,
    then discharge them into `[premises] ==> conclusion` and generalize the
    remaining Frees into schematic variables."""
    premises = [beta_eta_normalize(p) for p in premises]
    for p in premises:
        if typecheck(thy.signature, p) != PROP:
            raise TypeMismatch(f"premise is not a prop: {p!r}")
    hyp_thms = [hypothesis(thy, p) for p in premises]
    state = trivial(thy, conclusion)
    final = prove(state, hyp_thms)
    final = finalize(final)
    for h in final.hypotheses:
        if h not in premises:
            raise UndischargedHypothesis(f"{h!r}")
    prop = mk_imps(premises, final.prop)
    thm = Theorem(thy, prop, (), _token=_KERNEL)
    return generalize(thm)


# ------------------------------------------------------ definitional rules

def unfold(thy: Theory, names, thm: Theorem) -> Theorem:
    """Rewrite left-to-right with the named definitions, exhaustively."""
    rules = [dest_equals(thy.definition_term(n)) for n in names]
    prop = rewrite_term(thy.signature, rules, thm.prop)
    return Theorem(thm.theory, prop, thm.hypotheses, thm.constraints,
                   thm.ngoals, _token=_KERNEL)


def fold(thy: Theory, names, thm: Theorem) -> Theorem:
    """Rewrite right-to-left with the named definitions."""
    rules = [tuple(reversed(dest_equals(thy.definition_term(n)))) for n in names]
    prop = rewrite_term(thy.signature, rules, thm.prop)
    return Theorem(thm.theory, prop, thm.hypotheses, thm.constraints,
                   thm.ngoals, _token=_KERNEL)


def unfold_subgoal(thy: Theory, names, state: Theorem, i: int,
                   direction: str = "unfold") -> Theorem:
    """Definitional rewriting confined to subgoal i of a proof state."""
    if not 1 <= i <= state.ngoals:
        raise SubgoalOutOfRange(f"subgoal {i} of {state.ngoals}")
    subs, final = split_goals(state.prop, state.ngoals)
    rules = [dest_equals(thy.definition_term(n)) for n in names]
    if direction == "fold":
        rules = [(r, l) for (l, r) in rules]
    sub = rewrite_term(thy.signature, rules, subs[i - 1])
    prop = mk_imps(subs[:i - 1] + [sub] + subs[i:], final)
    return Theorem(state.theory, prop, state.hypotheses, state.constraints,
                   state.ngoals, _token=_KERNEL)


def rewrite_term(sig: Signature, rules, t: Term, max_passes: int = 200) -> Term:
    """Exhaustive outermost rewriting; binders are opened so patterns match
    under them without index surgery."""
    fresh = [0]

    def rw(t: Term) -> tuple[Term, bool]:
        ty = fast_type(t)
        for (lhs, rhs) in rules:
            if fast_type(lhs) != ty:
                continue
            env = match(sig, lhs, t, SearchLimits(depth=8, max_unifiers=1))
            if env is not None:
                # one-pass substitution: values may mention same-named object
                # variables, chasing would loop
                return instantiate(rhs, env.assignments), True
        match t:
            case App(f, a):
                f2, c1 = rw(f)
                a2, c2 = rw(a)
                return (App(f2, a2), True) if (c1 or c2) else (t, False)
            case Abs(h, bty, _):
                fresh[0] += 1
                x = Free(f".rw{fresh[0]}", bty)
                from .term import subst_bound
                body = beta_eta_normalize(subst_bound(t.body, x))
                body2, ch = rw(body)
                if not ch:
                    return t, False
                return Abs(h, bty, abstract_over(x, body2).body), True
            case _:
                return t, False

    for _ in range(max_passes):
        t = beta_eta_normalize(t)
        t, changed = rw(t)
        if not changed:
            return beta_eta_normalize(t)
    raise KernelError("rewriting did not terminate (cyclic definitions?)")
