"""Higher-order unification over simply typed lambda-terms.

Huet-style procedure: rigid-rigid pairs decompose, flex-rigid pairs branch
on imitation then projections (in argument order), flex-flex pairs are not
enumerated — each yielded solution folds them away by binding every flex
head to a constant function on a fresh variable.  The search is explored
depth-first under a configurable branch-depth bound and the result is a
lazy stream of substitutions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional

from .lazyseq import Seq, seq_of_iter
from .term import (
    Abs, App, Bound, Const, Free, FunType, Signature, Term, Type, TypeMismatch,
    Var, apps, beta_eta_normalize, fast_type, fn_type, lams, max_serial,
    strip_app, strip_fun, subst_bound, vars_of,
)

LOCAL_PREFIX = ".l"  # unifier-minted eigenvariables; not lexable, never escape


@dataclass(frozen=True)
class SearchLimits:
    depth: int = 20          # flex-rigid branch levels before pruning
    max_unifiers: Optional[int] = None
    absorb: bool = False     # depth-free absorption of ground sequent items


@dataclass
class SearchStats:
    branch_nodes: int = 0
    depth_prunes: int = 0
    steps: int = 0           # SIMPL passes; instrumentation for laziness tests


class Env:
    """Substitution for schematic variables plus a fresh-serial counter.

    Treated as an immutable value: bind/fresh return new Envs, so dropping
    an Env is all the backtracking there is. `constraints` holds deferred
    flex-flex pairs (closed over the unifier's eigenvariables); they are
    solvable by construction and are resolved at theorem finalization.
    """

    __slots__ = ("assignments", "max_serial", "constraints")

    def __init__(self, assignments=None, max_serial: int = 0, constraints=()):
        self.assignments: dict[tuple[str, int], Term] = assignments or {}
        self.max_serial = max_serial
        self.constraints: tuple = tuple(constraints)

    def bind(self, v: Var, t: Term) -> "Env":
        if fast_type(t) != v.ty:
            raise TypeMismatch(f"binding {v!r} : {v.ty!r} to term of type {fast_type(t)!r}")
        new = dict(self.assignments)
        new[v.key] = t
        return Env(new, self.max_serial, self.constraints)

    def lookup(self, v: Var) -> Optional[Term]:
        return self.assignments.get(v.key)

    def fresh(self, base: str, ty: Type) -> tuple[Var, "Env"]:
        s = self.max_serial + 1
        return Var(base, s, ty), Env(self.assignments, s, self.constraints)

    def bump_serial(self, n: int) -> "Env":
        return Env(self.assignments, max(self.max_serial, n), self.constraints)

    def with_constraints(self, constraints) -> "Env":
        return Env(self.assignments, self.max_serial, constraints)

    def norm(self, t: Term) -> Term:
        """Apply the substitution exhaustively, then beta-eta-normalize."""
        from .term import mentions_any_var
        if not self.assignments or not mentions_any_var(t, self.assignments):
            return beta_eta_normalize(t)
        return beta_eta_normalize(self._subst(t))

    def _subst(self, t: Term) -> Term:
        match t:
            case Var(n, s, _):
                v = self.assignments.get((n, s))
                return t if v is None else self._subst(v)
            case Abs(h, ty, b):
                b2 = self._subst(b)
                return t if b2 is b else Abs(h, ty, b2)
            case App(f, a):
                f2, a2 = self._subst(f), self._subst(a)
                return t if f2 is f and a2 is a else App(f2, a2)
            case _:
                return t

    def __repr__(self):
        items = ", ".join(f"?{n}{s or ''} := {t!r}" for (n, s), t in sorted(self.assignments.items()))
        return f"Env({items})"


def _is_local(t: Term) -> bool:
    return isinstance(t, Free) and t.name.startswith(LOCAL_PREFIX)


def _mentions_local(t: Term) -> bool:
    stack = [t]
    while stack:
        u = stack.pop()
        tu = type(u)
        if tu is Free:
            if u.name.startswith(LOCAL_PREFIX):
                return True
        elif tu is App:
            stack.append(u.fun)
            stack.append(u.arg)
        elif tu is Abs:
            stack.append(u.body)
    return False


def _contains_local_or_var(t: Term, key) -> tuple[bool, bool]:
    """(mentions a unifier-local Free, mentions the Var with this key)."""
    has_local = has_var = False
    stack = [t]
    while stack:
        u = stack.pop()
        match u:
            case Free(n, _):
                if n.startswith(LOCAL_PREFIX):
                    has_local = True
            case Var(n, s, _):
                if (n, s) == key:
                    has_var = True
            case Abs(_, _, b):
                stack.append(b)
            case App(f, a):
                stack.append(f)
                stack.append(a)
        if has_local and has_var:
            break
    return has_local, has_var


class Clash(Exception):
    """Rigid-rigid disagreement: the problem has no solution down this branch."""


def decompose_rigid(pair: tuple[Term, Term]) -> list[tuple[Term, Term]]:
    """One decomposition step on a rigid-rigid pair, or raise Clash.

    Matching binders are opened with a shared fresh local Free and yield the
    body pair; bare spines with the same head decompose argwise, differing
    heads clash.
    """
    counter = itertools.count(10**9)  # display-only serials for the opener
    s, t = pair
    opened = False
    while isinstance(s, Abs) or isinstance(t, Abs):
        ty = s.bind_ty if isinstance(s, Abs) else t.bind_ty
        x = Free(f"{LOCAL_PREFIX}d{next(counter)}", ty)
        s, t = _open_with(s, x), _open_with(t, x)
        opened = True
    if opened:
        return [(s, t)]
    hs, args_s = strip_app(s)
    ht, args_t = strip_app(t)
    if hs != ht or len(args_s) != len(args_t):
        raise Clash(f"{hs!r} vs {ht!r}")
    return list(zip(args_s, args_t))


def _open_with(t: Term, x: Free) -> Term:
    """Apply t to x and normalize: opens one binder (eta-expanding if needed)."""
    if isinstance(t, Abs):
        return beta_eta_normalize(subst_bound(t.body, x))
    out = App(t, x)
    if t._nf:
        out._nf = True  # normal non-Abs applied to an atom stays normal
        return out
    return beta_eta_normalize(out)


def unify(sig: Signature, env0: Env, pairs: list[tuple[Term, Term]],
          limits: SearchLimits = SearchLimits(),
          stats: Optional[SearchStats] = None, smash: bool = True) -> Seq:
    """Lazy stream of Envs extending env0 that solve all the pairs.

    With smash=True (the default), deferred flex-flex pairs are folded into
    each yielded Env by the trivial constant-function assignment; with
    smash=False they are carried in Env.constraints for later resolution
    (proof states do this so later steps can still instantiate them).
    Incoming env0.constraints always rejoin the problem.
    """
    st = stats if stats is not None else SearchStats()
    for (a, b) in pairs:
        ta, tb = fast_type(a), fast_type(b)
        if ta != tb:
            raise TypeMismatch(f"unification pair at different types: {ta!r} vs {tb!r}")
    # ground fast path: fully rigid problems are decided by alpha-comparison
    if not env0.assignments and not env0.constraints:
        from .term import has_vars
        trivial_ok = True
        for (a, b) in pairs:
            if a == b or beta_eta_normalize(a) == beta_eta_normalize(b):
                continue
            if has_vars(a) or has_vars(b):
                trivial_ok = False
                break
            return Seq.empty()  # ground and different: no unifier
        if trivial_ok:
            return Seq.single(env0)
    all_pairs = list(pairs) + list(env0.constraints)
    it = _solve(all_pairs, env0.with_constraints(()), limits.depth, limits, st,
                itertools.count(), smash)
    if limits.max_unifiers is not None:
        it = itertools.islice(it, limits.max_unifiers)
    return seq_of_iter(it)


def _var_keys(*ts: Term) -> frozenset:
    out = set()
    stack = list(ts)
    while stack:
        u = stack.pop()
        tu = type(u)
        if tu is Var:
            out.add((u.name, u.serial))
        elif tu is App:
            stack.append(u.fun)
            stack.append(u.arg)
        elif tu is Abs:
            stack.append(u.body)
    return frozenset(out)


_FRESH = frozenset({("\x00fresh", -1)})  # sentinel: normal, vars unknown


def _solve(pairs, env: Env, depth: int, limits: SearchLimits,
           stats: SearchStats, fresh_locals, smash: bool = True,
           dirty=None) -> Iterator[Env]:
    """DFS core. Queue entries are (s, t, vset): vset is the pair's schematic
    variable set when the pair is known normal under env, None for fresh
    input, or the _FRESH sentinel for pairs produced normal during this call.
    `dirty` names the variables bound since the entries were last normalized
    (None = renormalize everything)."""
    stats.steps += 1

    queue: list = [p if len(p) == 3 else (p[0], p[1], None) for p in pairs]
    flexflex: list = []
    flexrigid = None
    out: list = []
    qi = 0

    while qi < len(queue):
        s, t, vset = queue[qi]
        qi += 1
        if vset is None or (vset is not _FRESH
                            and (dirty is None or (vset & dirty))):
            s, t = env.norm(s), env.norm(t)
            vset = None
        if s == t:
            continue
        opened = False
        while isinstance(s, Abs) or isinstance(t, Abs):
            ty = s.bind_ty if isinstance(s, Abs) else t.bind_ty
            x = Free(f"{LOCAL_PREFIX}{next(fresh_locals)}", ty)
            s, t = _open_with(s, x), _open_with(t, x)
            opened = True
        if opened and s == t:
            continue
        hs, args_s = strip_app(s)
        ht, args_t = strip_app(t)
        s_flex, t_flex = type(hs) is Var, type(ht) is Var
        if not s_flex and not t_flex:
            if hs != ht or len(args_s) != len(args_t):
                return  # clash: dead branch
            fresh_pairs = [(a, b, _FRESH) for (a, b) in zip(args_s, args_t)]
            queue[qi:qi] = fresh_pairs
            continue

        def requeue(head, value):
            nonlocal env, queue, qi, out, flexflex, flexrigid, dirty
            env = env.bind(head, value)
            dirty = frozenset((head.key,))
            queue = queue[qi:] + out
            qi = 0
            out = []
            flexflex = []
            flexrigid = None

        if s_flex and t_flex:
            # eagerly solve pattern pairs with different heads (unique mgu)
            if hs.key != ht.key:
                patt = _pattern_solution(hs, args_s, t)
                if patt is not None:
                    requeue(hs, patt)
                    continue
                patt = _pattern_solution(ht, args_t, s)
                if patt is not None:
                    requeue(ht, patt)
                    continue
            if vset is None or vset is _FRESH:
                vset = _var_keys(s, t)
            flexflex.append((s, t, vset))
            out.append((s, t, vset))
            continue
        if not s_flex:
            s, t = t, s
            hs, args_s = ht, args_t
        # Miller pattern: unique mgu, bind immediately
        patt = _pattern_solution(hs, args_s, t)
        if patt is not None:
            requeue(hs, patt)
            continue
        if vset is None or vset is _FRESH:
            vset = _var_keys(s, t)
        if flexrigid is None:
            flexrigid = (s, t)
        out.append((s, t, vset))

    if flexrigid is None:
        if smash:
            fin = _finish_flexflex(env, [(s, t) for (s, t, _v) in flexflex])
            if fin is not None:
                yield fin
        else:
            yield env.with_constraints(
                tuple(_abstract_locals((s, t)) for (s, t, _v) in flexflex))
        return

    if depth <= 0:
        stats.depth_prunes += 1
        return

    fs, rt = flexrigid
    head, f_args = strip_app(fs)

    # first-order shortcut: bare ?x against a rigid term it does not occur in
    if not f_args:
        has_local, has_var = _contains_local_or_var(rt, head.key)
        if not has_local and not has_var:
            env2 = env.bind(head, rt)
            stats.branch_nodes += 1
            yield from _solve(out, env2, depth, limits, stats, fresh_locals,
                              smash, frozenset((head.key,)))
            return
        if has_var and not has_local:
            # occurs failure: no unifier exists on this branch
            return
    else:
        # constant-function shortcut: when the rigid side is ground (no
        # schematic variables, no unifier eigenvariables) but the flex
        # arguments mention eigenvariables — a sequence variable absorbing a
        # concrete item — try the binding that ignores the arguments first,
        # without charging depth: the general route costs depth proportional
        # to the item's size
        from .term import has_vars
        if (limits.absorb and not has_vars(rt) and not _mentions_local(rt)
                and any(_mentions_local(a) for a in f_args)):
            arg_tys, _ = strip_fun(head.ty)
            used = arg_tys[:len(f_args)]
            value = lams([(f"z{i}", ty) for i, ty in enumerate(used)], rt)
            stats.branch_nodes += 1
            yield from _solve(out, env.bind(head, beta_eta_normalize(value)),
                              depth, limits, stats, fresh_locals, smash,
                              frozenset((head.key,)))

    for value, env2 in _bindings(head, rt, env):
        stats.branch_nodes += 1
        yield from _solve(out, env2.bind(head, value), depth - 1, limits,
                          stats, fresh_locals, smash, frozenset((head.key,)))


def _pattern_solution(head: Var, args: list, rhs: Term) -> Optional[Term]:
    """Miller-pattern case: head applied to distinct locals, rhs's locals a
    subset of them, no occurrence of head in rhs. Returns the unique binding
    lam args. rhs, or None when the pattern condition fails."""
    if not args:
        return None
    a0 = args[0]
    if type(a0) is not Free or not a0.name.startswith(LOCAL_PREFIX):
        return None
    names = set()
    for a in args:
        if not (type(a) is Free and a.name.startswith(LOCAL_PREFIX)):
            return None
        if a.name in names:
            return None
        names.add(a.name)
    # rhs locals must be covered and head must not occur
    stack = [rhs]
    while stack:
        u = stack.pop()
        tu = type(u)
        if tu is Free:
            if u.name.startswith(LOCAL_PREFIX) and u.name not in names:
                return None
        elif tu is Var:
            if u.key == head.key:
                return None
        elif tu is App:
            stack.append(u.fun)
            stack.append(u.arg)
        elif tu is Abs:
            stack.append(u.body)
    from .term import abstract_over
    value = rhs
    for a in reversed(args):
        value = abstract_over(a, value)
    return beta_eta_normalize(value)


def _bindings(head: Var, rigid: Term, env: Env):
    """Candidate partial bindings for `head` against the rigid side:
    imitation first, then projections in argument order."""
    arg_tys, base = strip_fun(head.ty)
    rhead, _ = strip_app(rigid)

    def general(target_head: Term, target_ty: Type) -> Term:
        """lam zs. target_head (?H1 zs) ... (?Hm zs) with fresh ?Hi."""
        nonlocal env
        h_arg_tys, _ = strip_fun(target_ty)
        bound_args = [Bound(len(arg_tys) - 1 - i) for i in range(len(arg_tys))]
        spine = target_head
        for hty in h_arg_tys:
            hv, env = env.fresh("H", fn_type(arg_tys, hty))
            spine = App(spine, apps(hv, *bound_args))
        return lams([(f"z{i}", ty) for i, ty in enumerate(arg_tys)], spine)

    results = []
    # imitation: only for constants and global frees (locals are eigenvariables)
    if isinstance(rhead, (Const, Free)) and not _is_local(rhead):
        results.append(general(rhead, rhead.ty))
    # projections, in argument order, where the result type fits
    for i, aty in enumerate(arg_tys):
        _, abase = strip_fun(aty)
        if abase == base:
            results.append(general(Bound(len(arg_tys) - 1 - i), aty))
    for r in results:
        yield beta_eta_normalize(r), env


def _finish_flexflex(env: Env, flexflex) -> Optional[Env]:
    """Fold deferred flex-flex pairs into the Env: both heads become constant
    functions on one shared fresh variable per pair. Earlier bindings may
    surface rigid structure in later pairs; those go back through the full
    solver."""
    work = list(flexflex)
    counter = itertools.count(10**7)
    while work:
        s, t = work.pop(0)
        s, t = env.norm(s), env.norm(t)
        while isinstance(s, Abs) or isinstance(t, Abs):
            ty = s.bind_ty if isinstance(s, Abs) else t.bind_ty
            x = Free(f"{LOCAL_PREFIX}f{next(counter)}", ty)
            s, t = _open_with(s, x), _open_with(t, x)
        if s == t:
            continue
        hs, _ = strip_app(s)
        ht, _ = strip_app(t)
        if isinstance(hs, Var) and isinstance(ht, Var):
            _, base = strip_fun(fast_type(s))
            h, env = env.fresh("f", base)
            env = _bind_const_fn(env, hs, h)
            if ht.key != hs.key:
                env = _bind_const_fn(env, ht, h)
            continue
        sub = _solve([(s, t)] + work, env, 20, SearchLimits(), SearchStats(),
                     counter, True)
        for e in sub:
            return e
        return None
    return env


def _bind_const_fn(env: Env, v: Var, h: Var) -> Env:
    arg_tys, _ = strip_fun(v.ty)
    return env.bind(v, lams([(f"z{i}", ty) for i, ty in enumerate(arg_tys)], h))


def _abstract_locals(pair: tuple[Term, Term]) -> tuple[Term, Term]:
    """Close a deferred pair over the unifier's eigenvariables so it can be
    carried outside this unification run."""
    s, t = pair
    order: list[Free] = []
    seen: set[str] = set()

    def collect(u: Term):
        match u:
            case Free(n, _):
                if n.startswith(LOCAL_PREFIX) and n not in seen:
                    seen.add(n)
                    order.append(u)
            case Abs(_, _, b):
                collect(b)
            case App(f, a):
                collect(f)
                collect(a)

    collect(s)
    collect(t)
    from .term import abstract_over
    for x in reversed(order):
        s, t = abstract_over(x, s), abstract_over(x, t)
    return s, t


def smash_flexflex(env: Env) -> Optional[Env]:
    """Resolve carried constraints, flex-flex by the trivial assignment; the
    final step of turning a proof state's residue into a plain substitution."""
    if not env.constraints:
        return env
    it = _solve(list(env.constraints), env.with_constraints(()), 20,
                SearchLimits(), SearchStats(), itertools.count(10**8), True)
    for e in it:
        return e
    return None


# ----------------------------------------------------------------- match

def match(sig: Signature, pattern: Term, obj: Term,
          limits: SearchLimits = SearchLimits()) -> Optional[Env]:
    """One-sided unification: instantiate only the pattern's variables.

    The object's schematic variables are frozen as temporary rigid frees and
    the pattern's are renamed apart first, so accidental name sharing between
    pattern and object cannot produce cyclic bindings. The result maps the
    pattern's original variables; apply it with a one-pass substitution.
    """
    from .term import instantiate
    frozen = _freeze_vars(obj)
    base = _max_serial2(pattern, obj) + 1
    ren = {}
    for k, (key, ty) in enumerate(sorted(vars_of(pattern).items())):
        ren[key] = Var(key[0], base + 1 + k, ty)
    pat2 = instantiate(pattern, ren)
    env0 = Env(max_serial=base + 1 + len(ren))
    for cand in unify(sig, env0, [(pat2, frozen)], limits):
        out = {}
        for key, fresh in ren.items():
            val = cand.norm(fresh)
            if val != fresh:
                out[key] = _thaw_vars(val)
        return Env(out, cand.max_serial)
    return None


FREEZE_PREFIX = ".v"


def _freeze_vars(t: Term) -> Term:
    match t:
        case Var(n, s, ty):
            return Free(f"{FREEZE_PREFIX}{n}.{s}", ty)
        case Abs(h, ty, b):
            return Abs(h, ty, _freeze_vars(b))
        case App(f, a):
            return App(_freeze_vars(f), _freeze_vars(a))
        case _:
            return t


def _thaw_vars(t: Term) -> Term:
    match t:
        case Free(n, ty) if n.startswith(FREEZE_PREFIX):
            base, s = n[len(FREEZE_PREFIX):].rsplit(".", 1)
            return Var(base, int(s), ty)
        case Abs(h, ty, b):
            return Abs(h, ty, _thaw_vars(b))
        case App(f, a):
            return App(_thaw_vars(f), _thaw_vars(a))
        case _:
            return t


def _max_serial2(a: Term, b: Term) -> int:
    return max(max_serial(a), max_serial(b), 0)
