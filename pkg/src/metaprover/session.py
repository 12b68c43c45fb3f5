"""Interactive proof sessions: the engine behind the REPL, the script
runner and the network service.

Commands (one per line in scripts, `--` starts a comment):
    theory NAME          select the working theory
    goal TEXT            start a proof (bare formulas get the truth wrapper)
    by (TACTIC ARGS..)   apply a tactic to the proof state
    back                 switch to the next result of the last tactic
    undo                 return to the previous state
    print                show the current state
    rules                list rule names
    qed NAME             finish the proof and store the theorem
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from . import kernel, prover, syntax, tactic
from .kernel import KernelError, Theorem, Theory
from .lazyseq import Seq
from .term import TermError
from .unify import SearchLimits


class SessionError(Exception):
    def __init__(self, kind: str, message: str, position=None):
        super().__init__(message)
        self.kind = kind
        self.message = message
        self.position = position


@dataclass
class Snapshot:
    state: tactic.ProofState
    alts: Optional[Seq] = None   # the tactic result sequence `back` walks


@dataclass
class Limits:
    unify_depth: int = 24
    search_depth: int = 400
    budget_nodes: int = 50_000
    timeout_ms: int = 10_000


class Session:
    def __init__(self, theory_name: str = "NJ", limits: Optional[Limits] = None):
        from .logics import get_theory
        self.theory: Theory = get_theory(theory_name).extend("session")
        self.theory_name = theory_name
        self.limits = limits or Limits()
        self.trail: list[Snapshot] = []
        self.goal_name: Optional[str] = None
        self.proved: dict[str, Theorem] = {}
        self.stats: list[dict] = []
        self._t0: Optional[float] = None
        self._auto_stats: Optional[prover.AutoStats] = None

    # ------------------------------------------------------------- state

    @property
    def state(self) -> Optional[tactic.ProofState]:
        return self.trail[-1].state if self.trail else None

    def state_summary(self) -> dict:
        st = self.state
        if st is None:
            return {"goalText": None, "subgoals": [], "history_len": 0}
        thm = st.current
        subgoals = []
        for i in range(1, thm.ngoals + 1):
            view = kernel.view_subgoal(thm, i)
            subgoals.append({
                "params": [{"name": n, "type": syntax._type_str(ty)}
                           for (n, ty) in view.params],
                "assumptions": [syntax.print_term(self.theory, a)
                                for a in view.assumptions],
                "goal": syntax.print_term(self.theory, view.goal),
            })
        return {
            "goalText": syntax.print_term(self.theory, thm.concl),
            "subgoals": subgoals,
            "history_len": len(self.trail),
        }

    def render_state(self) -> str:
        st = self.state
        if st is None:
            return "No goal."
        thm = st.current
        if thm.ngoals == 0:
            return (f"No subgoals!\n{syntax.print_term(self.theory, thm.concl)}")
        lines = [f"goal: {syntax.print_term(self.theory, thm.concl)}"]
        for i in range(1, thm.ngoals + 1):
            view = kernel.view_subgoal(thm, i)
            ctx = ""
            if view.params:
                ctx += "!(" + ",".join(n for (n, _t) in view.params) + ") "
            for a in view.assumptions:
                ctx += f"[{syntax.print_term(self.theory, a)}] "
            lines.append(f" {i}. {ctx}{syntax.print_term(self.theory, view.goal)}")
        return "\n".join(lines)

    # ----------------------------------------------------------- commands

    def command(self, line: str) -> str:
        """Execute one command; returns a message. Raises SessionError."""
        line = _strip_comment(line).strip()
        if not line:
            return ""
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "theory":
            return self.cmd_theory(rest)
        if head == "goal":
            return self.cmd_goal(rest)
        if head == "by":
            return self.cmd_by(rest)
        if head == "back":
            return self.cmd_back()
        if head == "undo":
            return self.cmd_undo()
        if head == "print":
            return self.render_state()
        if head == "rules":
            return ", ".join(self.rule_names())
        if head == "qed":
            return self.cmd_qed(rest or None)
        raise SessionError("UnknownCommand", f"unknown command {head!r}")

    def cmd_theory(self, name: str) -> str:
        from .logics import get_theory, THEORY_NAMES
        if not name:
            raise SessionError("UsageError", "theory NAME")
        try:
            base = get_theory(name)
        except KeyError:
            raise SessionError(
                "UnknownTheory",
                f"unknown theory {name!r} (one of {', '.join(THEORY_NAMES)})")
        self.theory = base.extend("session")
        self.theory_name = name
        self.trail = []
        return f"theory {name}"

    def cmd_goal(self, text: str) -> str:
        """Open a goal. `$H`-style sequence variables denote fixed context
        parameters while proving (they become schematic on qed), so padded
        sequent lemmas can be stated and then used like primitive rules.
        Explicit ?x unknowns stay schematic."""
        try:
            g = self._parse_goal(text)
        except TermError as e:
            pos = None
            if getattr(e, "line", None) is not None:
                pos = (e.line, e.col)
            raise SessionError(type(e).__name__, str(e), pos)
        self.trail = [Snapshot(tactic.initial_state(self.theory, g))]
        self.goal_name = None
        self._t0 = time.monotonic()
        self._auto_stats = prover.AutoStats()
        return self.render_state()

    def _parse_goal(self, text: str):
        from .term import App, PROP, beta_eta_normalize, typecheck
        p = syntax.Parser(self.theory, text)
        p.dollar_as_free = True
        t = p.parse()
        t = syntax.term_concretize(
            t, self.theory.default_free_type or PROP)
        t = beta_eta_normalize(t)
        ty = typecheck(self.theory.signature, t)
        if ty == PROP:
            return t
        if self.theory.truth_judgement:
            tr = self.theory.signature.const(self.theory.truth_judgement)
            if ty == tr.ty.dom:
                return App(tr, t)
        raise SessionError("TypeMismatch",
                           f"goal must be a formula or prop, got {ty!r}")

    def cmd_by(self, text: str) -> str:
        st = self.state
        if st is None:
            raise SessionError("NoGoal", "no goal is open")
        tac = self.parse_tactic(text)
        try:
            alts = tac(st)
            if alts.is_empty():
                raise SessionError("TacticFailed", f"by {text}: no result")
            nxt = alts.head()
        except (KernelError, TermError) as e:
            raise SessionError(type(e).__name__, str(e))
        self.trail.append(Snapshot(nxt, alts))
        return self.render_state()

    def cmd_back(self) -> str:
        if not self.trail or self.trail[-1].alts is None:
            raise SessionError("NoAlternatives", "nothing to go back over")
        alts = self.trail[-1].alts.rest()
        if alts.is_empty():
            raise SessionError("NoAlternatives", "no more results")
        self.trail.append(Snapshot(alts.head(), alts))
        return self.render_state()

    def cmd_undo(self) -> str:
        if len(self.trail) > 1:
            self.trail.pop()
        return self.render_state()

    def cmd_qed(self, name: Optional[str]) -> str:
        st = self.state
        if st is None:
            raise SessionError("NoGoal", "no goal is open")
        try:
            thm = kernel.finalize(st.current)
        except KernelError as e:
            raise SessionError("SubgoalsRemain", str(e))
        name = name or f"thm{len(self.proved) + 1}"
        thm = kernel.generalize(thm)
        self.proved[name] = thm
        self.theory.store(name, thm)
        millis = (int((time.monotonic() - self._t0) * 1000)
                  if self._t0 else 0)
        nodes = self._auto_stats.nodes if self._auto_stats else 0
        self.stats.append({"problem": name, "status": "proved",
                           "nodes": nodes, "millis": millis})
        self.trail = []
        return f"theorem {name}: {syntax.print_term(self.theory, thm.prop)}"

    def rule_names(self) -> list[str]:
        names = list(self.theory.all_axiom_names())
        names += [n for n in self.theory.all_theorems() if not n.startswith(".")]
        return sorted(set(names))

    # ------------------------------------------------------------ tactics

    def parse_tactic(self, text: str) -> tactic.Tactic:
        toks = _tokenize_tactic(text)
        tac, rest = self._parse_tac(toks)
        if rest:
            raise SessionError("TacticSyntax", f"unparsed: {' '.join(rest)}")
        return tac

    def _parse_tac(self, toks: list[str]):
        if not toks:
            raise SessionError("TacticSyntax", "expected a tactic")
        if toks[0] == "(":
            depth = 0
            for j, tk in enumerate(toks):
                depth += tk == "(" and 1 or (tk == ")" and -1 or 0)
                if depth == 0:
                    inner = toks[1:j]
                    return self._parse_tac_call(inner), toks[j + 1:]
            raise SessionError("TacticSyntax", "unbalanced parentheses")
        return self._parse_tac_call([toks[0]]), toks[1:]

    def _depths(self):
        top = self.limits.unify_depth
        steps = [d for d in (8, 14, 20, 28, 40) if d < top] + [top]
        return steps

    def _deepening(self, mk):
        """Try a tactic at increasing unification depths: proofs that need
        only shallow matching never pay for the deep search trees."""
        tacs = [mk(SearchLimits(depth=d, absorb=True)) for d in self._depths()]
        out = tacs[-1]
        for t in reversed(tacs[:-1]):
            out = tactic.orelse(t, out)
        return out

    def _parse_tac_call(self, toks: list[str]) -> tactic.Tactic:
        if not toks:
            raise SessionError("TacticSyntax", "empty tactic")
        name, args = toks[0], toks[1:]
        lim = SearchLimits(depth=self.limits.unify_depth, absorb=True)

        def subgoal_index(default=1):
            if args and args[-1].isdigit():
                return int(args[-1]), args[:-1]
            return default, args

        if name in ("resolve", "rule", "eresolve", "erule"):
            i, rest = subgoal_index()
            rules = [self._lookup_rule(n) for n in rest]
            if not rules:
                raise SessionError("TacticSyntax", f"{name} needs rule names")
            if name in ("resolve", "rule"):
                return self._deepening(
                    lambda l: tactic.resolve_tac(rules, i, l))
            return self._deepening(
                lambda l: tactic.eresolve_tac(rules, i, l))
        if name in ("assume", "assumption"):
            i, _ = subgoal_index()
            return self._deepening(lambda l: tactic.assume_tac(i, l))
        if name == "auto":
            stats = self._auto_stats or prover.AutoStats()
            return prover.auto_tac(
                self.theory, budget_nodes=self.limits.budget_nodes,
                max_depth=self.limits.search_depth,
                timeout_ms=self.limits.timeout_ms, stats=stats)
        if name in ("unfold", "fold"):
            i, rest = subgoal_index()
            from .logics.fol import unfold_tac, fold_tac
            fn = unfold_tac if name == "unfold" else fold_tac
            return fn(self.theory, list(rest), i)
        if name == "cut":
            i, rest = subgoal_index()
            text = " ".join(rest).strip('"')
            formula = syntax.parse(self.theory, text)
            cut_rule = self._lookup_rule("cut")
            inst = kernel.instantiate_thm(
                {("P", _serial_of(cut_rule, "P")): formula}, cut_rule)
            return self._deepening(
                lambda l: tactic.resolve_tac([inst], i, l))
        if name in ("thin", "thinr"):
            i, rest = subgoal_index()
            text = " ".join(rest).strip('"')
            formula = syntax.parse(self.theory, text)
            rule = self._lookup_rule("thinL" if name == "thin" else "thinR")
            inst = kernel.instantiate_thm(
                {("P", _serial_of(rule, "P")): formula}, rule)
            return self._deepening(
                lambda l: tactic.resolve_tac([inst], i, l))
        if name == "then":
            parts = self._parse_tac_list(args)
            return tactic.then_all(*parts)
        if name == "orelse":
            parts = self._parse_tac_list(args)
            out = parts[-1]
            for p in reversed(parts[:-1]):
                out = tactic.orelse(p, out)
            return out
        if name == "repeat":
            [inner] = self._parse_tac_list(args)
            return tactic.repeat(inner)
        if name == "try":
            [inner] = self._parse_tac_list(args)
            return tactic.try_(inner)
        raise SessionError("TacticSyntax", f"unknown tactic {name!r}")

    def _parse_tac_list(self, toks: list[str]):
        out = []
        rest = toks
        while rest:
            tac, rest = self._parse_tac(rest)
            out.append(tac)
        return out

    def _lookup_rule(self, name: str) -> Theorem:
        try:
            return self.theory.rule(name)
        except KernelError:
            raise SessionError("UnknownRule", f"unknown rule {name!r}")


def _serial_of(thm: Theorem, base_name: str) -> int:
    from .term import vars_of
    for (n, s) in vars_of(thm.prop):
        if n == base_name:
            return s
    return 0


def _strip_comment(line: str) -> str:
    out = []
    i = 0
    while i < len(line):
        if line.startswith("--", i) and not line.startswith("-->", i):
            break
        out.append(line[i])
        i += 1
    return "".join(out)


def _tokenize_tactic(text: str) -> list[str]:
    toks = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in "()":
            toks.append(c)
            i += 1
            continue
        if c == '"':
            j = text.index('"', i + 1)
            toks.append(text[i:j + 1])
            i = j + 1
            continue
        j = i
        while j < len(text) and not text[j].isspace() and text[j] not in "()":
            j += 1
        toks.append(text[i:j])
        i = j
    return toks
