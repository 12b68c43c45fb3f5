"""Automatic proof search per logic, and the Pelletier benchmark harness.

auto_tac is a depth-first loop over the first subgoal: close by assumption
or a closing rule, apply safe rules, then branch on unsafe rules. Search
nodes carry a per-branch budget for the quantifier-instantiating rules so
bounded search always terminates.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Iterator, Optional

from . import kernel, syntax, tactic
from .kernel import Theorem, Theory
from .lazyseq import Seq, seq_of_iter
from .tactic import ProofState
from .term import Term, consts_of
from .unify import SearchLimits


@dataclass(frozen=True)
class Profile:
    """Which rules the automatic tactic uses and how."""

    closers: tuple[str, ...] = ()        # zero-premise rules tried as closers
    safe_intros: tuple[str, ...] = ()    # applied by resolution
    safe_elims: tuple[str, ...] = ()     # applied by elim-resolution
    safe_mp: tuple[str, ...] = ()        # elim + antecedent closed in place
    unsafe_intros: tuple[str, ...] = ()
    unsafe_elims: tuple[str, ...] = ()
    quant_rules: frozenset = frozenset()  # instantiating rules, budgeted
    quant_reuse: int = 3                 # per quantifier occurrence, per branch
    quant_triggers: frozenset = frozenset()  # consts that unfold to quantifiers
    unify_depth: int = 20
    use_assumption: bool = True
    indexing: str = "fol"                # "fol" | "lk" | "none"
    unfold_defs: tuple[str, ...] = ()    # definitions unfolded in place
    thin_rules: tuple[str, ...] = ()     # (thinL, thinR): enables contraction
    prune_improper: bool = False         # drop undecodable sequent states
    deepening: tuple[int, ...] = ()      # low quantifier budgets tried first


def _spine_end_and_asms(t: Term):
    """Goal atom and assumption atoms of a subgoal, read off without opening
    binders (loose indices are fine for head inspection)."""
    asms = []
    while True:
        d = kernel.dest_all(t)
        if d is not None:
            t = d[2]
            continue
        d = kernel.dest_imp(t)
        if d is not None:
            asms.append(d[0])
            t = d[1]
            continue
        return t, asms


def _fol_atom_key(thy: Theory, atom: Term):
    """(connective, antecedent-connective) of the judged formula; None parts
    mean unreadable/unconstrained. Two levels so the compound-implication
    eliminations index on (A op B) --> C shapes."""
    from .term import Const, Free, strip_app
    head, args = strip_app(atom)
    if (isinstance(head, Const) and thy.truth_judgement
            and head.name == thy.truth_judgement and len(args) == 1):
        f = args[0]
        h2, args2 = strip_app(f)
        if isinstance(h2, Free):
            return (f"#atom:{h2.name}", None)
        if not isinstance(h2, Const):
            return None
        if h2.name == "-->" and len(args2) == 2:
            h3, _ = strip_app(args2[0])
            if isinstance(h3, Const):
                sub = h3.name
            elif isinstance(h3, Free):
                sub = f"#atom:{h3.name}"
            else:
                sub = None
            return ("-->", sub)
        return (h2.name, None)
    return None


def _fol_key_match(rule_key, atom_key) -> bool:
    if rule_key is None or atom_key is None:
        return True
    if rule_key[0] != atom_key[0]:
        return False
    return (rule_key[1] is None or atom_key[1] is None
            or rule_key[1] == atom_key[1])


def _lk_item_keys(thy: Theory, atom: Term):
    """Head symbols of the items on each side of a sequent atom; None when
    the atom is not a readable sequent. Schematic items make it flexible."""
    from .syntax import decode_sequence
    from .term import Const, Free, strip_app
    head, args = strip_app(atom)
    if not (isinstance(head, Const) and thy.sequent_judgement
            and head.name == thy.sequent_judgement and len(args) == 2):
        return None
    out = {"L": set(), "R": set()}
    flexible = False
    for side, enc in (("L", args[0]), ("R", args[1])):
        items = decode_sequence(enc)
        if items is None:
            return None
        for kind, item in items:
            if kind == "seq":
                continue
            h, _ = strip_app(item)
            if isinstance(h, Const):
                out[side].add(h.name)
            elif isinstance(h, Free):
                out[side].add(f"#atom:{h.name}")
            else:
                flexible = True
    out["flex"] = flexible
    return out


@dataclass
class AutoStats:
    nodes: int = 0
    closed: int = 0
    deadline_hit: bool = False
    budget_hit: bool = False


def profile_for(thy: Theory) -> Profile:
    from .logics import fol, lk
    names = {t.name for t in thy.ancestors()}
    if "ZF" in names:
        from .logics.zf import zf_search_profile
        return zf_search_profile()
    if "LK" in names:
        return lk.lk_profile()
    if "Classical" in names:
        return Profile(
            closers=(),
            safe_intros=tuple(fol.CLASSICAL_SAFE_INTROS),
            safe_elims=tuple(fol.CLASSICAL_SAFE_ELIMS),
            safe_mp=tuple(fol.CLASSICAL_SAFE_MP),
            unsafe_intros=tuple(fol.CLASSICAL_UNSAFE_INTROS),
            unsafe_elims=tuple(fol.CLASSICAL_UNSAFE_ELIMS),
            quant_rules=frozenset(fol.CLASSICAL_QUANT_RULES))
    return Profile(
        closers=(),
        safe_intros=tuple(fol.NJ_SAFE_INTROS),
        safe_elims=tuple(fol.NJ_SAFE_ELIMS),
        safe_mp=tuple(fol.NJ_SAFE_MP),
        unsafe_intros=tuple(fol.NJ_UNSAFE_INTROS),
        unsafe_elims=tuple(fol.NJ_UNSAFE_ELIMS),
        quant_rules=frozenset(fol.NJ_QUANT_RULES))


def _quant_occurrences(thy: Theory, t: Term, extra=frozenset()) -> int:
    quants = {"All", "Ex", "Forall", "Exists"} | set(extra)

    def count(u) -> int:
        from .term import Abs, App, Const
        match u:
            case Const(n, _):
                return 1 if n in quants else 0
            case Abs(_, _, b):
                return count(b)
            case App(f, a):
                return count(f) + count(a)
            case _:
                return 0

    return count(t)


def _rule_entry(thy: Theory, prof: Profile, name: str, mode: str):
    r = thy.rule(name)
    key = None
    if prof.indexing == "fol":
        if mode == "elim":
            prem1 = kernel.split_goals(r.prop, r.ngoals)[0][0]
            key = _fol_atom_key(thy, _spine_end_and_asms(prem1)[0])
        else:
            key = _fol_atom_key(thy, r.concl)
    elif prof.indexing == "lk":
        key = _lk_item_keys(thy, r.concl)
        if mode == "elim":
            key = None
    return (name, r, mode, key)


def _goal_keys(thy: Theory, prof: Profile, subgoal: Term):
    """(goal key, assumption keys, wildcard?) for rule filtering."""
    atom, asms = _spine_end_and_asms(subgoal)
    if prof.indexing == "fol":
        gk = _fol_atom_key(thy, atom)
        aks, wild = set(), False
        for a in asms:
            a_atom, inner = _spine_end_and_asms(a)
            if inner:
                continue  # nested assumptions never match atomic majors
            k = _fol_atom_key(thy, a_atom)
            if k is None:
                wild = True
            else:
                aks.add(k)
        return gk, aks, wild, len(asms)
    if prof.indexing == "lk":
        return _lk_item_keys(thy, atom), set(), True, len(asms)
    return None, set(), True, len(asms)


def _applicable(prof: Profile, entry, gkeys) -> bool:
    name, r, mode, key = entry
    gk, aks, wild, nasms = gkeys
    if key is None:
        return True
    if prof.indexing == "fol":
        if mode == "elim":
            return wild or any(_fol_key_match(key, a) for a in aks)
        return _fol_key_match(key, gk)
    if prof.indexing == "lk":
        if gk is None or gk.get("flex"):
            return True
        return key["L"] <= gk["L"] and key["R"] <= gk["R"]
    return True


def auto_tac(thy: Theory, profile: Optional[Profile] = None,
             budget_nodes: int = 50_000, max_depth: int = 400,
             timeout_ms: Optional[int] = None,
             stats: Optional[AutoStats] = None) -> tactic.Tactic:
    """Depth-first automatic search; yields closed states lazily."""
    prof = profile or profile_for(thy)
    st_rec = stats if stats is not None else AutoStats()
    limits = SearchLimits(depth=prof.unify_depth)

    closers = [_rule_entry(thy, prof, n, "intro") for n in prof.closers]
    safe_mpr = [_rule_entry(thy, prof, n, "elim") for n in prof.safe_mp]
    safe_elr = [_rule_entry(thy, prof, n, "elim") for n in prof.safe_elims]
    safe_inr = [_rule_entry(thy, prof, n, "intro") for n in prof.safe_intros]
    unsafe = ([_rule_entry(thy, prof, n, "intro") for n in prof.unsafe_intros]
              + [_rule_entry(thy, prof, n, "elim") for n in prof.unsafe_elims])
    unfold_trigger = set()
    for dn in prof.unfold_defs:
        lhs, _rhs = kernel.dest_equals(thy.definition_term(dn))
        unfold_trigger |= {c for c in consts_of(lhs) if c != ":"}
    thin_rules = [thy.rule(n) for n in prof.thin_rules]

    def dedup_step(cur: Theorem):
        """Contract a duplicated sequent item (sound: the deduplicated
        subgoal implies the original by thinning)."""
        from .syntax import decode_sequence
        from .term import Const, strip_app
        atom, asms = _spine_end_and_asms(cur.subgoals[0])
        if asms:
            return None
        head, args = strip_app(atom)
        if not (isinstance(head, Const)
                and head.name == thy.sequent_judgement and len(args) == 2):
            return None
        for side, enc in enumerate(args):
            items = decode_sequence(enc)
            if items is None:
                continue
            forms = [it for k, it in items if k == "form"]
            seen_items = set()
            dup = None
            for it in forms:
                if it in seen_items:
                    dup = it
                    break
                seen_items.add(it)
            if dup is None:
                continue
            want_count = forms.count(dup) - 1
            rule = thin_rules[side]
            for thm in kernel.resolve(rule, 1, cur, limits):
                atom2, _ = _spine_end_and_asms(thm.subgoals[0])
                _h2, args2 = strip_app(atom2)
                items2 = decode_sequence(args2[side])
                if items2 is None:
                    continue
                forms2 = [it for k, it in items2 if k == "form"]
                if (forms2.count(dup) == want_count
                        and len(forms2) == len(forms) - 1):
                    return thm
        return None

    def successors(cur: Theorem, quant_left: int):
        """Ordered successor stream of (theorem, quant_left').

        On subgoals without schematic variables the safe (invertible) rules
        commit: the first applicable safe step is the only child. With
        variables present every alternative is kept for backtracking."""
        from .term import has_vars
        subgoal = cur.subgoals[0]
        if unfold_trigger and (consts_of(subgoal) & unfold_trigger):
            thm = kernel.unfold_subgoal(thy, prof.unfold_defs, cur, 1)
            if thm.prop != cur.prop:
                yield thm, quant_left
                return  # definitional rewriting commits
        if thin_rules:
            thm = dedup_step(cur)
            if thm is not None:
                yield thm, quant_left
                return  # contraction commits
        gkeys = _goal_keys(thy, prof, subgoal)
        ground = not has_vars(subgoal) and not cur.constraints
        if prof.use_assumption and gkeys[3] > 0:
            for thm in kernel.assumption(cur, 1, limits):
                yield thm, quant_left
                if ground:
                    return
        for entry in closers:
            if _applicable(prof, entry, gkeys):
                for thm in kernel.resolve(entry[1], 1, cur, limits):
                    yield thm, quant_left
                    if ground:
                        return
        for entry in safe_mpr:
            # modus ponens in place: eliminate, then the antecedent must
            # close from the assumptions at once
            if _applicable(prof, entry, gkeys):
                for thm in kernel.elim_resolve(entry[1], 1, cur, limits):
                    if thm.ngoals == cur.ngoals - 1:
                        yield thm, quant_left
                        if ground:
                            return
                        continue
                    for thm2 in kernel.assumption(thm, 1, limits):
                        yield thm2, quant_left
                        if ground:
                            return
        for entry in safe_elr:
            if _applicable(prof, entry, gkeys):
                for thm in kernel.elim_resolve(entry[1], 1, cur, limits):
                    yield thm, quant_left
                    if ground:
                        return
        for entry in safe_inr:
            if _applicable(prof, entry, gkeys):
                for thm in kernel.resolve(entry[1], 1, cur, limits):
                    yield thm, quant_left
                    if ground:
                        return
        for entry in unsafe:
            name, r, mode, _ = entry
            is_quant = name in prof.quant_rules
            if is_quant and quant_left <= 0:
                continue
            if not _applicable(prof, entry, gkeys):
                continue
            ql = quant_left - 1 if is_quant else quant_left
            stream = (kernel.elim_resolve(r, 1, cur, limits) if mode == "elim"
                      else kernel.resolve(r, 1, cur, limits))
            for thm in stream:
                yield thm, ql

    def fingerprint(cur: Theorem):
        if prof.indexing == "lk":
            key = _lk_multiset_key(thy, cur)
            if key is not None:
                return key
        return (cur.prop, cur.constraints, cur.ngoals)

    def proper(cur: Theorem) -> bool:
        """Prune sequent states whose sides no longer decode as item lists
        (schematic tails from unproductive unifiers)."""
        if not prof.prune_improper or prof.indexing != "lk":
            return True
        return _lk_proper(thy, cur)

    def tac(root: ProofState) -> Seq:
        deadline = (time.monotonic() + timeout_ms / 1000.0
                    if timeout_ms else None)
        quant_total = prof.quant_reuse * max(
            1, _quant_occurrences(thy, root.current.prop,
                                  prof.quant_triggers))

        def walk(qb: int) -> Iterator[ProofState]:
            # seen maps state -> largest remaining instantiation budget it
            # was expanded with; arriving with more budget re-expands
            seen: dict = {}
            stack = [iter([(root.current, qb)])]
            while stack:
                if len(stack) > max_depth:
                    stack.pop()
                    continue
                try:
                    cur, ql = next(stack[-1])
                except StopIteration:
                    stack.pop()
                    continue
                if cur.ngoals == 0:
                    st_rec.closed += 1
                    yield root.push(cur)
                    continue
                if not proper(cur):
                    continue
                key = fingerprint(cur)
                if seen.get(key, -1) >= ql:
                    continue
                seen[key] = ql
                if st_rec.nodes >= budget_nodes:
                    st_rec.budget_hit = True
                    return
                if deadline is not None and time.monotonic() > deadline:
                    st_rec.deadline_hit = True
                    return
                st_rec.nodes += 1
                stack.append(iter(successors(cur, ql)))

        def deepening() -> Iterator[ProofState]:
            # optional cheap low-budget passes find shallow proofs before
            # the full-budget pass opens deep instantiation branches
            budgets = [b for b in prof.deepening if b < quant_total]
            budgets.append(quant_total)
            yielded = set()
            for qb in budgets:
                for node in walk(qb):
                    key = fingerprint(node.current)
                    if key not in yielded:
                        yielded.add(key)
                        yield node
                if st_rec.budget_hit or st_rec.deadline_hit:
                    return

        return seq_of_iter(deepening())

    return tac


def _lk_proper(thy: Theory, cur: Theorem) -> bool:
    from .syntax import decode_sequence
    from .term import strip_app, Const
    for sub in cur.subgoals:
        atom = sub
        while (d := kernel.dest_all(atom)) is not None:
            atom = d[2]
        while (d := kernel.dest_imp(atom)) is not None:
            atom = d[1]
        head, args = strip_app(atom)
        if not (isinstance(head, Const) and head.name == thy.sequent_judgement
                and len(args) == 2):
            continue
        for enc in args:
            if decode_sequence(enc) is None:
                return False
    return True


def _lk_multiset_key(thy: Theory, cur: Theorem):
    """Order-insensitive state key: sequent sides as sorted item hashes.
    Exchange is admissible, so states differing only by item order are
    interchangeable for the search."""
    from .syntax import decode_sequence
    from .term import strip_app, Const
    subkeys = []
    for sub in cur.subgoals:
        nall = 0
        atom = sub
        while (d := kernel.dest_all(atom)) is not None:
            atom = d[2]
            nall += 1
        if kernel.dest_imp(atom) is not None:
            return None
        head, args = strip_app(atom)
        if not (isinstance(head, Const) and head.name == thy.sequent_judgement
                and len(args) == 2):
            return None
        sides = []
        for enc in args:
            items = decode_sequence(enc)
            if items is None:
                return None
            sides.append(tuple(sorted(hash(it) for _k, it in items)))
        subkeys.append((nall, sides[0], sides[1]))
    return (tuple(sorted(subkeys)), cur.constraints)


def prove(thy: Theory, goal: Term | str, profile: Optional[Profile] = None,
          budget_nodes: int = 50_000, timeout_ms: Optional[int] = None,
          max_depth: int = 400,
          stats: Optional[AutoStats] = None) -> Optional[Theorem]:
    """Run the automatic tactic on a goal; the finished Theorem or None."""
    from .logics.fol import goal_term
    g = goal_term(thy, goal) if isinstance(goal, str) else goal
    st = tactic.initial_state(thy, g)
    t = auto_tac(thy, profile, budget_nodes=budget_nodes, max_depth=max_depth,
                 timeout_ms=timeout_ms, stats=stats)
    for out in t(st):
        return kernel.finalize(out.current)
    return None


# ------------------------------------------------------------- benchmarks

@dataclass
class ProblemResult:
    problem: str
    status: str          # proved | failed | timeout
    nodes: int
    millis: int


@dataclass
class Report:
    entries: list[ProblemResult] = field(default_factory=list)

    @property
    def proved(self) -> list[str]:
        return [e.problem for e in self.entries if e.status == "proved"]

    def render_text(self) -> str:
        lines = [f"{e.problem:<12} {e.status:<8} nodes={e.nodes:<8} millis={e.millis}"
                 for e in self.entries]
        lines.append(f"total proved: {len(self.proved)}/{len(self.entries)}")
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps(
            [{"problem": e.problem, "status": e.status, "nodes": e.nodes,
              "millis": e.millis} for e in self.entries], indent=0)

    def write(self, path: str):
        with open(path, "w") as fh:
            fh.write(self.render_text() + "\n")
        with open(path + ".json", "w") as fh:
            fh.write(self.to_json() + "\n")


def run_suite(thy: Theory, problems: list[tuple[str, str]],
              budget_nodes: int = 50_000, timeout_ms: int = 10_000,
              profile: Optional[Profile] = None) -> Report:
    """Prove a list of (name, goal-text) problems, collecting statistics."""
    rep = Report()
    for name, text in problems:
        st = AutoStats()
        t0 = time.monotonic()
        try:
            thm = prove(thy, text, profile, budget_nodes=budget_nodes,
                        timeout_ms=timeout_ms, stats=st)
        except kernel.KernelError:
            thm = None
        ms = int((time.monotonic() - t0) * 1000)
        status = ("proved" if thm is not None
                  else "timeout" if st.deadline_hit else "failed")
        rep.entries.append(ProblemResult(name, status, st.nodes, ms))
    return rep


def pelletier_run(thy: Theory, selection: Optional[list[int]] = None,
                  budget_nodes: int = 50_000,
                  timeout_ms: int = 10_000) -> Report:
    from .pelletier import PROBLEMS
    probs = [(f"pelletier{n}", text) for n, text in PROBLEMS.items()
             if selection is None or n in selection]
    return run_suite(thy, probs, budget_nodes, timeout_ms)


def intuitionistic_filter_check(goals: list[str],
                                depth: int = 12,
                                budget_nodes: int = 200_000) -> list[dict]:
    """For each goal: bounded NJ search must fail, classical search succeeds."""
    from .logics import get_theory
    nj, cl = get_theory("NJ"), get_theory("FOLc")
    out = []
    for text in goals:
        nj_thm = prove(nj, text, budget_nodes=budget_nodes, max_depth=depth)
        cl_thm = prove(cl, text, budget_nodes=budget_nodes)
        out.append({"goal": text, "nj": nj_thm is not None,
                    "classical": cl_thm is not None})
    return out
