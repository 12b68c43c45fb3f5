"""Tactics and tacticals: a tactic maps a proof state to a lazy sequence of
successor states; tacticals compose tactics with full backtracking across
the seams."""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from . import kernel
from .kernel import SubgoalOutOfRange, Theorem, Theory
from .lazyseq import Seq, seq_of_iter
from .term import Term
from .unify import SearchLimits


@dataclass(frozen=True)
class ProofState:
    """Current assertion plus history for undo."""

    theory: Theory
    current: Theorem
    history: tuple[Theorem, ...] = ()

    def push(self, thm: Theorem) -> "ProofState":
        return ProofState(self.theory, thm, self.history + (self.current,))

    def undo(self) -> "ProofState":
        if not self.history:
            return self
        return ProofState(self.theory, self.history[-1], self.history[:-1])


Tactic = Callable[[ProofState], Seq]


def initial_state(thy: Theory, goal: Term) -> ProofState:
    return ProofState(thy, kernel.trivial(thy, goal))


# ------------------------------------------------------------ basic tactics

def resolve_tac(rules: list[Theorem], i: int,
                limits: SearchLimits = SearchLimits()) -> Tactic:
    """Apply each rule to subgoal i, concatenating result streams in rule
    order. Out-of-range subgoals give an empty sequence."""

    def tac(st: ProofState) -> Seq:
        def alts() -> Iterator[ProofState]:
            for r in rules:
                try:
                    stream = kernel.resolve(r, i, st.current, limits)
                except SubgoalOutOfRange:
                    return
                for thm in stream:
                    yield st.push(thm)

        return seq_of_iter(alts())

    return tac


def assume_tac(i: int, limits: SearchLimits = SearchLimits()) -> Tactic:
    def tac(st: ProofState) -> Seq:
        def alts() -> Iterator[ProofState]:
            try:
                stream = kernel.assumption(st.current, i, limits)
            except SubgoalOutOfRange:
                return
            for thm in stream:
                yield st.push(thm)

        return seq_of_iter(alts())

    return tac


def eresolve_tac(rules: list[Theorem], i: int,
                 limits: SearchLimits = SearchLimits()) -> Tactic:
    """Elim-resolution against each rule in order (kernel.elim_resolve)."""

    def tac(st: ProofState) -> Seq:
        def alts() -> Iterator[ProofState]:
            for r in rules:
                try:
                    stream = kernel.elim_resolve(r, i, st.current, limits)
                except SubgoalOutOfRange:
                    return
                for thm in stream:
                    yield st.push(thm)

        return seq_of_iter(alts())

    return tac


# -------------------------------------------------------------- tacticals

def then(t1: Tactic, t2: Tactic) -> Tactic:
    """Sequencing with full backtracking across the seam."""

    def tac(st: ProofState) -> Seq:
        return t1(st).flat_map(t2)

    return tac


def then_all(*ts: Tactic) -> Tactic:
    out = ts[0]
    for t in ts[1:]:
        out = then(out, t)
    return out


def orelse(t1: Tactic, t2: Tactic) -> Tactic:
    def tac(st: ProofState) -> Seq:
        s1 = t1(st)
        return Seq.defer(lambda: s1 if not s1.is_empty() else t2(st))

    return tac


def fail_tac(st: ProofState) -> Seq:
    return Seq.empty()


def id_tac(st: ProofState) -> Seq:
    return Seq.single(st)


def try_(t: Tactic) -> Tactic:
    return orelse(t, id_tac)


def repeat(t: Tactic) -> Tactic:
    """Apply t until it yields nothing, returning all maximal results; the
    sequence backtracks into earlier iterations on demand."""

    def tac(st: ProofState) -> Seq:
        s = t(st)
        return Seq.defer(
            lambda: Seq.single(st) if s.is_empty() else s.flat_map(tac))

    return tac


def first_of(ts: list[Tactic]) -> Tactic:
    out = fail_tac
    for t in reversed(ts):
        out = orelse(t, out)
    return out


# ------------------------------------------------------------------ search

@dataclass
class SearchStatistics:
    expansions: int = 0
    budget_exhausted: bool = False


def no_subgoals(st: ProofState) -> bool:
    return st.current.ngoals == 0


def depth_first(is_goal: Callable[[ProofState], bool], t: Tactic,
                budget: int = 50_000,
                stats: Optional[SearchStatistics] = None) -> Tactic:
    """Depth-first search over t's successor tree, yielding goal states
    lazily; revisited states (alpha-canonical fingerprints) are pruned."""
    st_rec = stats if stats is not None else SearchStatistics()

    def tac(root: ProofState) -> Seq:
        def walk() -> Iterator[ProofState]:
            seen = set()
            stack: list[Iterator[ProofState]] = [iter([root])]
            while stack:
                try:
                    node = next(stack[-1])
                except StopIteration:
                    stack.pop()
                    continue
                key = _fingerprint(node.current)
                if key in seen:
                    continue
                seen.add(key)
                if is_goal(node):
                    yield node
                    continue
                if st_rec.expansions >= budget:
                    st_rec.budget_exhausted = True
                    return
                st_rec.expansions += 1
                stack.append(iter(t(node)))

        return seq_of_iter(walk())

    return tac


def best_first(score: Callable[[ProofState], float], t: Tactic,
               budget: int = 50_000,
               stats: Optional[SearchStatistics] = None) -> Tactic:
    """Best-first search on `score` (lower is better); ties broken by
    insertion order for determinism."""
    st_rec = stats if stats is not None else SearchStatistics()

    def tac(root: ProofState) -> Seq:
        def walk() -> Iterator[ProofState]:
            seen = set()
            counter = itertools.count()
            heap = [(score(root), next(counter), root)]
            while heap:
                _, _, node = heapq.heappop(heap)
                key = _fingerprint(node.current)
                if key in seen:
                    continue
                seen.add(key)
                if no_subgoals(node):
                    yield node
                    continue
                if st_rec.expansions >= budget:
                    st_rec.budget_exhausted = True
                    return
                st_rec.expansions += 1
                for child in t(node):
                    heapq.heappush(heap, (score(child), next(counter), child))

        return seq_of_iter(walk())

    return tac


def state_size(st: ProofState) -> int:
    return _term_size(st.current.prop)


def _term_size(t) -> int:
    from .term import Abs, App
    match t:
        case App(f, a):
            return 1 + _term_size(f) + _term_size(a)
        case Abs(_, _, b):
            return 1 + _term_size(b)
        case _:
            return 1


def _fingerprint(thm: Theorem):
    return (thm.prop, thm.constraints, thm.ngoals)
