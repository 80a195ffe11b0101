"""Budget-limited reachability exploration over abstract value states.

The explorer runs an explicit-value analysis: each abstract state maps the
variables assigned so far to either a concrete integer or ``top`` (any
integer).  States are organized as an abstract reachability tree whose
edges carry CFA statements; interrupting the analysis and serializing the
tree's explored region yields an assumption automaton.

Covering (stopping re-expansion of already-represented states) is what
makes loops converge, but merging abstract states can hide path
constraints: a ``top`` that has passed through an assume no longer tells
us which integers are actually reachable, and merging on it could lose
the only witness of a later branch.  The policy here is therefore strict:
a node is covered only when valuations agree pointwise and every ``top``
variable still live at the location is *fresh* on both sides (assigned
from nondet() and never read since, hence genuinely unconstrained).  Dead
variables use plain subsumption.  Candidate counterexamples are always
confirmed by concrete replay before being reported.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from . import lang
from .automaton import (FALSE_STATE, AssumptionAutomaton, step)
from .cfa import (ASSERT, ASSIGN, ASSUME, Cfa, Edge, live_variables,
                  postorder_index)

# ---------------------------------------------------------------------------
# Abstract values
# ---------------------------------------------------------------------------


class Top:
    """Any integer.  `fresh` means: straight from nondet(), never read."""

    __slots__ = ("fresh",)

    def __init__(self, fresh: bool):
        self.fresh = fresh

    def __repr__(self) -> str:
        return "top"


TOP_FRESH = Top(True)
TOP_CONSTRAINED = Top(False)

Valuation = Dict[str, object]  # var -> int | Top


def is_top(value: object) -> bool:
    return isinstance(value, Top)


def abstract_eval(expr: lang.Expr, valuation: Valuation) -> object:
    """Evaluate to an int or Top.  Any top operand makes the result top."""
    if isinstance(expr, lang.IntLit):
        return expr.value
    if isinstance(expr, lang.Var):
        return valuation[expr.name]
    if isinstance(expr, lang.Nondet):
        return TOP_FRESH
    if isinstance(expr, lang.Unary):
        v = abstract_eval(expr.operand, valuation)
        if is_top(v):
            return TOP_CONSTRAINED
        return (0 if v else 1) if expr.op == "!" else -v
    a = abstract_eval(expr.lhs, valuation)
    b = abstract_eval(expr.rhs, valuation)
    if is_top(a) or is_top(b):
        return TOP_CONSTRAINED
    try:
        return lang.concrete_eval(
            lang.Binary(expr.op, lang.IntLit(a), lang.IntLit(b)), {}, _no_nondet)
    except lang.EvalError:
        return TOP_CONSTRAINED


def _no_nondet() -> int:
    raise AssertionError("nondet inside a concrete-operand evaluation")


def truth(value: object) -> Optional[bool]:
    if is_top(value):
        return None
    return value != 0


def valuation_key(valuation: Valuation) -> Tuple:
    """Semantic identity: both top flavors collapse to one symbol."""
    return tuple(sorted(
        (name, value if not is_top(value) else "top")
        for name, value in valuation.items()))


def _constrain_reads(valuation: Valuation, expr: lang.Expr) -> Valuation:
    """Reading a fresh top couples it to the context: drop freshness."""
    out = dict(valuation)
    for name in lang.expr_variables(expr):
        v = out.get(name)
        if is_top(v) and v.fresh:
            out[name] = TOP_CONSTRAINED
    return out


def _strengthened(guard: lang.Expr) -> Optional[Tuple[str, int]]:
    """Match guards of shape `var == const` (either side, possibly !(!=))."""
    e = guard
    negated = False
    while isinstance(e, lang.Unary) and e.op == "!":
        negated = not negated
        e = e.operand
    if not isinstance(e, lang.Binary):
        return None
    op = e.op
    if negated:
        op = {"==": "!=", "!=": "=="}.get(op, "")
    if op != "==":
        return None
    if isinstance(e.lhs, lang.Var) and isinstance(e.rhs, lang.IntLit):
        return e.lhs.name, e.rhs.value
    if isinstance(e.rhs, lang.Var) and isinstance(e.lhs, lang.IntLit):
        return e.rhs.name, e.lhs.value
    return None


# ---------------------------------------------------------------------------
# Exploration inputs and outputs
# ---------------------------------------------------------------------------

ASSERTIONS = "assertions"
REACH_EXIT = "reach-exit"
COVER = "cover"

STATUS_FRONTIER = "frontier"
STATUS_EXPANDED = "expanded"
STATUS_COVERED = "covered-by"
STATUS_PRUNED = "pruned"

SAFE = "safe"
COUNTEREXAMPLES = "counterexamples"
UNKNOWN = "unknown"

DEFAULT_NONDET_DOMAIN: Tuple[int, ...] = tuple(range(-8, 9))
DEFAULT_REPLAY_STEP_LIMIT = 2_000_000


@dataclass
class Spec:
    """What counts as a violation during exploration.

    * assertions: a confirmed failing assert.
    * reach-exit: any feasible path into the exit location.
    * cover: a feasible, assertion-clean path into exit that exercises at
      least one statement from `remaining` while the given automaton has
      not yet entered FALSE.  With `stop_on_violation`, a confirmed
      failing assert aborts the whole exploration (bug short-circuit).
    """

    kind: str
    remaining: FrozenSet[int] = frozenset()
    aa: Optional[AssumptionAutomaton] = None
    stop_on_violation: bool = False

    @staticmethod
    def assertions() -> "Spec":
        return Spec(ASSERTIONS)

    @staticmethod
    def reach_exit() -> "Spec":
        return Spec(REACH_EXIT)

    @staticmethod
    def cover(remaining, aa: AssumptionAutomaton,
              stop_on_violation: bool = False) -> "Spec":
        remaining = frozenset(remaining)
        if not remaining:
            raise ValueError("cover spec needs a non-empty remaining set")
        return Spec(COVER, remaining, aa, stop_on_violation)


@dataclass
class Budget:
    """Positive resource limits; None means unlimited."""

    time_limit: Optional[float] = 900.0
    max_nodes: Optional[int] = None
    max_counterexamples: int = 10

    def __post_init__(self) -> None:
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")
        if self.max_nodes is not None and self.max_nodes <= 0:
            raise ValueError("max_nodes must be positive")
        if self.max_counterexamples <= 0:
            raise ValueError("max_counterexamples must be positive")


@dataclass
class Execution:
    """A statement path plus one concrete choice per nondet occurrence."""

    statements: Tuple[int, ...]
    witness: Dict[int, int]


@dataclass
class ArtNode:
    id: int
    cfa_node: int
    valuation: Valuation
    parent: Optional[int]
    incoming_stmt: Optional[int]
    status: str = STATUS_FRONTIER
    covered_by: Optional[int] = None
    aa_state: Optional[str] = None
    tracked: FrozenSet[int] = frozenset()

    def status_text(self) -> str:
        if self.status == STATUS_COVERED:
            return f"covered-by({self.covered_by})"
        return self.status


@dataclass
class ArtStats:
    nodes_created: int = 0
    nodes_expanded: int = 0
    nodes_frontier: int = 0
    nodes_covered: int = 0
    nodes_pruned: int = 0
    lines_touched: Tuple[int, ...] = ()


@dataclass
class ExplorationResult:
    verdict: str
    counterexamples: List[Execution]
    aa: AssumptionAutomaton
    art_stats: ArtStats
    bug_found: bool = False
    bug_execution: Optional[Execution] = None
    nodes: List[ArtNode] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Traversal strategies
# ---------------------------------------------------------------------------

BFS = "bfs"
DFS_POSTORDER = "dfs-postorder"
DFS_POSTORDER_SCORE = "dfs-postorder+score"


class MissingScores(Exception):
    pass


@dataclass
class TraversalStrategy:
    kind: str
    scores: Optional[Dict[str, int]] = None


def make_strategy(kind: str, scores: Optional[Dict[str, int]] = None) -> TraversalStrategy:
    if kind not in (BFS, DFS_POSTORDER, DFS_POSTORDER_SCORE):
        raise ValueError(f"unknown strategy kind {kind!r}")
    if kind == DFS_POSTORDER_SCORE and scores is None:
        raise MissingScores("dfs-postorder+score needs a score map")
    return TraversalStrategy(kind, scores)


# ---------------------------------------------------------------------------
# Concrete replay
# ---------------------------------------------------------------------------

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
INCONCLUSIVE = "inconclusive"

MODE_ASSUMES = "assumes"
MODE_PHI = "phi"
MODE_VIOLATION = "violation"


@dataclass
class ReplayResult:
    verdict: str
    witness: Optional[Dict[int, int]] = None


class _StepBudget:
    def __init__(self, limit: int):
        self.left = limit


def _run_path(edges: Sequence[Edge], choices: List[int], mode: str,
              steps: _StepBudget) -> Tuple[str, int]:
    """Run the path under the given nondet choices.

    Returns (status, used) with status "ok" (all constraints met),
    "fail" (some constraint failed), or "need" (one more nondet choice
    is required); `used` counts consumed choices.
    """
    env: Dict[str, int] = {}
    used = 0

    def next_nondet() -> int:
        nonlocal used
        if used < len(choices):
            used += 1
            return choices[used - 1]
        raise _NeedChoice

    last = len(edges) - 1
    for i, edge in enumerate(edges):
        if steps.left <= 0:
            raise _OutOfSteps
        steps.left -= 1
        stmt = edge.stmt
        try:
            if stmt.kind == ASSIGN:
                env[stmt.var] = lang.concrete_eval(stmt.expr, env, next_nondet)
            elif stmt.kind == ASSUME:
                if lang.concrete_eval(stmt.expr, env, next_nondet) == 0:
                    return "fail", used
            elif stmt.kind == ASSERT:
                holds = lang.concrete_eval(stmt.expr, env, next_nondet) != 0
                if mode == MODE_PHI and not holds:
                    return "fail", used
                if mode == MODE_VIOLATION:
                    if i == last and holds:
                        return "fail", used
                    if i != last and not holds:
                        return "fail", used
        except _NeedChoice:
            return "need", used
        except lang.EvalError:
            return "fail", used
    return "ok", used


class _NeedChoice(Exception):
    pass


class _OutOfSteps(Exception):
    pass


def _search_witness(edges: Sequence[Edge], domain: Sequence[int], mode: str,
                    step_limit: int) -> ReplayResult:
    """Backtracking search for nondet choices satisfying the path mode."""
    domain = list(domain)
    steps = _StepBudget(step_limit)
    stack: List[int] = []  # indices into domain, one per occurrence
    while True:
        choices = [domain[i] for i in stack]
        try:
            status, used = _run_path(edges, choices, mode, steps)
        except _OutOfSteps:
            return ReplayResult(INCONCLUSIVE)
        if status == "ok":
            return ReplayResult(FEASIBLE, {i: v for i, v in enumerate(choices)})
        if status == "need":
            if not domain:
                return ReplayResult(INFEASIBLE)
            stack.append(0)
            continue
        # Failure consumed `used` choices; later positions are irrelevant.
        del stack[used:]
        while stack and stack[-1] == len(domain) - 1:
            stack.pop()
        if not stack:
            return ReplayResult(INFEASIBLE)
        stack[-1] += 1


def _edges_for_path(cfa: Cfa, path: Sequence[int]) -> List[Edge]:
    by_id = {e.stmt.id: e for e in cfa.edges}
    edges = []
    expected = cfa.entry
    for stmt_id in path:
        edge = by_id.get(stmt_id)
        if edge is None:
            raise ValueError(f"no statement with id {stmt_id}")
        if edge.src != expected:
            raise ValueError("path is not connected from entry")
        edges.append(edge)
        expected = edge.dst
    return edges


def replay(cfa: Cfa, path: Sequence[int],
           nondet_domain: Sequence[int] = DEFAULT_NONDET_DOMAIN,
           step_limit: int = DEFAULT_REPLAY_STEP_LIMIT) -> ReplayResult:
    """Search nondet choices under which every assume on the path holds.

    The path must start at entry and be edge-connected.  Returns feasible
    with the first witness in domain order, infeasible when the whole
    domain space is exhausted, or inconclusive when `step_limit` runs out
    first.
    """
    edges = _edges_for_path(cfa, path)
    return _search_witness(edges, nondet_domain, MODE_ASSUMES, step_limit)


# ---------------------------------------------------------------------------
# Exploration
# ---------------------------------------------------------------------------


class _CoverIndex:
    """Per-(location[, automaton state]) index of potential coverers.

    Separate fast paths: candidates whose valuation is semantically equal
    (dict lookup) and candidates carrying at least one top value (the only
    ones that can subsume a different valuation).
    """

    __slots__ = ("exact", "tops")

    def __init__(self) -> None:
        self.exact: Dict[Tuple, List[int]] = {}
        self.tops: List[Tuple[int, Tuple]] = []

    def candidates(self, key: Tuple):
        for node_id in self.exact.get(key, ()):
            yield node_id
        for node_id, node_key in self.tops:
            if node_key != key:
                yield node_id

    def add(self, node_id: int, key: Tuple, has_top: bool) -> None:
        self.exact.setdefault(key, []).append(node_id)
        if has_top:
            self.tops.append((node_id, key))


class _Explorer:
    def __init__(self, cfa: Cfa, spec: Spec, budget: Budget,
                 strategy: TraversalStrategy,
                 nondet_domain: Sequence[int],
                 replay_step_limit: int):
        self.cfa = cfa
        self.spec = spec
        self.budget = budget
        self.strategy = strategy
        self.domain = list(nondet_domain)
        self.replay_step_limit = replay_step_limit
        self.postorder = postorder_index(cfa)
        self.live = live_variables(cfa)
        self.edge_by_id = {e.stmt.id: e for e in cfa.edges}
        self.nodes: List[ArtNode] = []
        self.by_state: Dict[Tuple, _CoverIndex] = {}
        self.cex: List[Execution] = []
        self.bug: Optional[Execution] = None
        if strategy.kind == BFS:
            self.waitlist: deque = deque()
        else:
            self.waitlist = []

    # -- plumbing ------------------------------------------------------------

    def path_to(self, node: ArtNode, extra: Optional[int] = None) -> Tuple[int, ...]:
        path: List[int] = []
        cur: Optional[ArtNode] = node
        while cur is not None and cur.incoming_stmt is not None:
            path.append(cur.incoming_stmt)
            cur = self.nodes[cur.parent] if cur.parent is not None else None
        path.reverse()
        if extra is not None:
            path.append(extra)
        return tuple(path)

    def _replay_path(self, path: Tuple[int, ...], mode: str) -> ReplayResult:
        edges = [self.edge_by_id[i] for i in path]
        return _search_witness(edges, self.domain, mode, self.replay_step_limit)

    def _bucket(self, node: ArtNode) -> Tuple:
        if self.spec.kind == COVER:
            return (node.cfa_node, node.aa_state)
        return (node.cfa_node,)

    def _covers(self, j: ArtNode, v: ArtNode) -> bool:
        if j.status in (STATUS_COVERED, STATUS_PRUNED):
            return False
        if self.spec.kind == COVER and not j.tracked >= v.tracked:
            return False
        if j.valuation.keys() != v.valuation.keys():
            return False
        live_here = self.live[v.cfa_node]
        for name, vv in v.valuation.items():
            jv = j.valuation[name]
            if name in live_here:
                if is_top(vv) and is_top(jv):
                    if not (vv.fresh and jv.fresh):
                        return False
                elif is_top(vv) or is_top(jv) or vv != jv:
                    return False
            else:
                if is_top(jv):
                    continue
                if is_top(vv) or jv != vv:
                    return False
        return True

    # -- node creation -------------------------------------------------------

    def _index_node(self, node: ArtNode) -> None:
        index = self.by_state.setdefault(self._bucket(node), _CoverIndex())
        index.add(node.id, valuation_key(node.valuation),
                  any(is_top(v) for v in node.valuation.values()))

    def make_root(self) -> ArtNode:
        aa_state = None
        if self.spec.kind == COVER:
            aa_state = self.spec.aa.initial
        root = ArtNode(0, self.cfa.entry, {}, None, None, aa_state=aa_state)
        if self.spec.kind == COVER and aa_state == FALSE_STATE:
            # Collection can never start: nothing to explore.
            root.status = STATUS_PRUNED
            self.nodes.append(root)
            return root
        self.nodes.append(root)
        self.waitlist.append(root)
        self._index_node(root)
        return root

    def create_child(self, parent: ArtNode, edge: Edge,
                     valuation: Valuation) -> Optional[ArtNode]:
        stmt = edge.stmt
        aa_state = None
        tracked = parent.tracked
        prune = False
        if self.spec.kind == COVER:
            aa_state = step(self.spec.aa, parent.aa_state, stmt.id)
            if aa_state != FALSE_STATE and stmt.id in self.spec.remaining:
                tracked = tracked | {stmt.id}
            if aa_state == FALSE_STATE and not tracked:
                prune = True
        node = ArtNode(len(self.nodes), edge.dst, valuation, parent.id,
                       stmt.id, aa_state=aa_state, tracked=tracked)
        self.nodes.append(node)
        if prune:
            node.status = STATUS_PRUNED
            return node
        self.check_violation(node)
        index = self.by_state.setdefault(self._bucket(node), _CoverIndex())
        key = valuation_key(node.valuation)
        for jid in index.candidates(key):
            if self._covers(self.nodes[jid], node):
                node.status = STATUS_COVERED
                node.covered_by = jid
                return node
        index.add(node.id, key, any(is_top(v) for v in node.valuation.values()))
        return node

    def check_violation(self, node: ArtNode) -> None:
        if len(self.cex) >= self.budget.max_counterexamples:
            return
        if node.cfa_node != self.cfa.exit:
            return
        if self.spec.kind == REACH_EXIT:
            path = self.path_to(node)
            result = self._replay_path(path, MODE_ASSUMES)
            if result.verdict == FEASIBLE:
                self.cex.append(Execution(path, result.witness))
        elif self.spec.kind == COVER and node.tracked:
            path = self.path_to(node)
            result = self._replay_path(path, MODE_PHI)
            if result.verdict == FEASIBLE:
                self.cex.append(Execution(path, result.witness))

    def check_assert(self, parent: ArtNode, edge: Edge) -> None:
        """Candidate assertion violation at this edge; confirm by replay."""
        watching = self.spec.kind == ASSERTIONS or self.spec.stop_on_violation
        if not watching:
            return
        if self.spec.kind == ASSERTIONS and \
                len(self.cex) >= self.budget.max_counterexamples:
            return
        path = self.path_to(parent, extra=edge.stmt.id)
        result = self._replay_path(path, MODE_VIOLATION)
        if result.verdict != FEASIBLE:
            return
        execution = Execution(path, result.witness)
        if self.spec.kind == ASSERTIONS:
            self.cex.append(execution)
        else:
            self.bug = execution

    # -- expansion -----------------------------------------------------------

    def expand(self, node: ArtNode) -> None:
        node.status = STATUS_EXPANDED
        children: List[ArtNode] = []
        for edge in self.cfa.out_edges(node.cfa_node):
            child = self.transfer(node, edge)
            if self.bug is not None:
                return
            if child is not None and child.status == STATUS_FRONTIER:
                children.append(child)
        self.push_children(children)

    def transfer(self, node: ArtNode, edge: Edge) -> Optional[ArtNode]:
        stmt = edge.stmt
        val = node.valuation
        if stmt.kind == ASSIGN:
            value = abstract_eval(stmt.expr, val)
            if is_top(value) and not isinstance(stmt.expr, lang.Nondet):
                value = TOP_CONSTRAINED
            out = _constrain_reads(val, stmt.expr)
            out[stmt.var] = value
            return self.create_child(node, edge, out)
        if stmt.kind == ASSUME:
            t = truth(abstract_eval(stmt.expr, val))
            if t is False:
                return None
            if t is True:
                return self.create_child(node, edge, dict(val))
            out = _constrain_reads(val, stmt.expr)
            match = _strengthened(stmt.expr)
            if match is not None and is_top(out.get(match[0])):
                out[match[0]] = match[1]
            return self.create_child(node, edge, out)
        if stmt.kind == ASSERT:
            t = truth(abstract_eval(stmt.expr, val))
            if t is not True:
                self.check_assert(node, edge)
                if self.bug is not None:
                    return None
            if t is False and self.spec.kind == COVER:
                # No assertion-clean continuation exists down this edge.
                child = ArtNode(len(self.nodes), edge.dst, dict(val), node.id,
                                stmt.id, status=STATUS_PRUNED)
                self.nodes.append(child)
                return child
            out = dict(val) if t is not None else _constrain_reads(val, stmt.expr)
            return self.create_child(node, edge, out)
        # skip / halt
        return self.create_child(node, edge, dict(val))

    def push_children(self, children: List[ArtNode]) -> None:
        if self.strategy.kind == BFS:
            self.waitlist.extend(children)
            return
        scores = self.strategy.scores or {}

        def key(c: ArtNode) -> Tuple:
            if self.strategy.kind == DFS_POSTORDER_SCORE:
                score = scores.get(c.aa_state, 0) if c.aa_state else 0
                return (self.postorder[c.cfa_node], -score, c.id)
            return (self.postorder[c.cfa_node], c.id)

        for child in sorted(children, key=key, reverse=True):
            self.waitlist.append(child)

    def pop(self) -> ArtNode:
        if self.strategy.kind == BFS:
            return self.waitlist.popleft()
        return self.waitlist.pop()

    # -- main loop -----------------------------------------------------------

    def run(self) -> ExplorationResult:
        start = time.monotonic()
        self.make_root()
        interrupted = False
        while self.waitlist:
            if self.bug is not None:
                break
            if len(self.cex) >= self.budget.max_counterexamples:
                break
            if self.budget.max_nodes is not None and \
                    len(self.nodes) >= self.budget.max_nodes:
                interrupted = True
                break
            if self.budget.time_limit is not None and \
                    time.monotonic() - start > self.budget.time_limit:
                interrupted = True
                break
            node = self.pop()
            self.expand(node)
        if self.cex:
            verdict = COUNTEREXAMPLES
        elif interrupted or self.bug is not None:
            verdict = UNKNOWN
        else:
            verdict = SAFE
        aa = emit_assumption_automaton(self.nodes, self.cfa, verdict,
                                       name=self.cfa.name)
        return ExplorationResult(
            verdict=verdict,
            counterexamples=self.cex,
            aa=aa,
            art_stats=self._stats(),
            bug_found=self.bug is not None,
            bug_execution=self.bug,
            nodes=self.nodes,
        )

    def _stats(self) -> ArtStats:
        stats = ArtStats(nodes_created=len(self.nodes))
        lines = set()
        for node in self.nodes:
            if node.status == STATUS_EXPANDED:
                stats.nodes_expanded += 1
            elif node.status == STATUS_FRONTIER:
                stats.nodes_frontier += 1
            elif node.status == STATUS_COVERED:
                stats.nodes_covered += 1
            else:
                stats.nodes_pruned += 1
            if node.incoming_stmt is not None:
                lines.add(self.edge_by_id[node.incoming_stmt].stmt.source_line)
        stats.lines_touched = tuple(sorted(lines))
        return stats


def explore(cfa: Cfa, spec: Spec, budget: Budget,
            strategy: Optional[TraversalStrategy] = None,
            nondet_domain: Sequence[int] = DEFAULT_NONDET_DOMAIN,
            replay_step_limit: int = DEFAULT_REPLAY_STEP_LIMIT) -> ExplorationResult:
    """Explore the program under the spec until a verdict or a budget stop.

    Deterministic: identical inputs produce identical trees, automata and
    counterexample lists.  A node budget never truncates an expansion in
    progress; the node being expanded is completed first.
    """
    if strategy is None:
        strategy = make_strategy(DFS_POSTORDER)
    ex = _Explorer(cfa, spec, budget, strategy, nondet_domain, replay_step_limit)
    return ex.run()


# ---------------------------------------------------------------------------
# Automaton emission
# ---------------------------------------------------------------------------


def emit_assumption_automaton(art: List[ArtNode], cfa: Cfa, verdict: str,
                              name: str = "art") -> AssumptionAutomaton:
    """Serialize the explored region of an ART as an assumption automaton.

    Expanded nodes become states, merged when their abstract states agree;
    covered nodes redirect to their coverer.  Edges into frontier or pruned
    nodes become explicit FALSE transitions.  On a Safe verdict every
    direction the analysis did not take is routed to TRUE instead, so FALSE
    is unreachable in the automaton of a completed exploration.
    """
    nodes = art
    aa = AssumptionAutomaton(name=name, initial=FALSE_STATE)
    if not nodes or nodes[0].status != STATUS_EXPANDED:
        return aa

    def state_key(node: ArtNode) -> Tuple:
        return (node.cfa_node, valuation_key(node.valuation),
                node.aa_state, node.tracked)

    def resolve(node: ArtNode) -> ArtNode:
        while node.status == STATUS_COVERED:
            node = nodes[node.covered_by]
        return node

    state_name: Dict[Tuple, str] = {}
    for node in nodes:
        if node.status != STATUS_EXPANDED:
            continue
        key = state_key(node)
        if key not in state_name:
            state_name[key] = f"q{len(state_name)}"
            aa.add_state(state_name[key], node.cfa_node)

    aa.initial = state_name[state_key(nodes[0])]

    children: Dict[int, List[ArtNode]] = {}
    for node in nodes:
        if node.parent is not None:
            children.setdefault(node.parent, []).append(node)

    transitions: Dict[Tuple[str, int], str] = {}
    for node in nodes:
        if node.status != STATUS_EXPANDED:
            continue
        src = state_name[state_key(node)]
        for child in children.get(node.id, []):
            target = resolve(child)
            if target.status == STATUS_EXPANDED:
                tgt = state_name[state_key(target)]
            else:
                tgt = FALSE_STATE
            key = (src, child.incoming_stmt)
            old = transitions.get(key)
            if old is None or (old == FALSE_STATE and tgt != FALSE_STATE):
                transitions[key] = tgt
    if verdict == SAFE:
        # A completed exploration proved the untaken and deliberately cut
        # directions irrelevant to the spec: route them to TRUE so FALSE
        # is unreachable in the emitted automaton.
        from .automaton import TRUE_STATE
        for node in nodes:
            if node.status != STATUS_EXPANDED:
                continue
            src = state_name[state_key(node)]
            for edge in cfa.out_edges(node.cfa_node):
                key = (src, edge.stmt.id)
                if transitions.get(key, FALSE_STATE) == FALSE_STATE:
                    transitions[key] = TRUE_STATE
    for (src, stmt_id), tgt in transitions.items():
        aa.add_transition(src, stmt_id, tgt)
    return aa
