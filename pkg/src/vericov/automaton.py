"""Assumption automata: which statement sequences a prior analysis covered.

An automaton reads statement IDs.  Two reserved absorbing sinks exist:
``__FALSE`` (the walk left the explored state space) and ``__TRUE`` (the
walk entered a fully verified region).  A sequence satisfies the automaton
(`psi`) exactly when its walk never enters FALSE; any transition not
declared falls to FALSE, so unexplored means unverified.

Text format (canonical serialization; `#` starts a comment line):

    AUTOMATON <name>
    INITIAL <state>
    STATE <state> @L<cfa-node>
      ON <stmt-id> -> <state or __FALSE or __TRUE>
    ...
    END

States are declared in first-use order and ON lines are sorted by
statement ID, so serialize(parse(text)) is the identity on canonical
files.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

FALSE_STATE = "__FALSE"
TRUE_STATE = "__TRUE"
_SINKS = (FALSE_STATE, TRUE_STATE)


class FormatError(Exception):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class DuplicateTransition(Exception):
    def __init__(self, state: str, stmt_id: int):
        super().__init__(f"duplicate transition from {state} on {stmt_id}")
        self.state = state
        self.stmt_id = stmt_id


class UnknownState(Exception):
    pass


class StatementIdMismatch(Exception):
    """An automaton refers to statement IDs a CFA does not define."""


@dataclass
class AssumptionAutomaton:
    name: str
    initial: str
    states: List[str] = field(default_factory=list)
    location_of: Dict[str, int] = field(default_factory=dict)
    transitions: Dict[Tuple[str, int], str] = field(default_factory=dict)

    def add_state(self, state: str, location: int) -> None:
        if state in _SINKS:
            raise ValueError(f"{state} is reserved")
        if state in self.location_of:
            raise ValueError(f"state {state} already declared")
        self.states.append(state)
        self.location_of[state] = location

    def add_transition(self, state: str, stmt_id: int, target: str) -> None:
        key = (state, stmt_id)
        if key in self.transitions:
            raise DuplicateTransition(state, stmt_id)
        self.transitions[key] = target

    def alphabet(self) -> set:
        return {stmt_id for (_, stmt_id) in self.transitions}


def step(aa: AssumptionAutomaton, state: str, stmt_id: int) -> str:
    """Successor state; unmatched pairs go to FALSE, sinks absorb."""
    if state in _SINKS:
        return state
    if state not in aa.location_of:
        raise UnknownState(state)
    return aa.transitions.get((state, stmt_id), FALSE_STATE)


def psi(aa: AssumptionAutomaton, stmt_seq: Sequence[int]) -> bool:
    """True iff the walk over the sequence never enters FALSE."""
    state = aa.initial
    if state == FALSE_STATE:
        return False
    for stmt_id in stmt_seq:
        state = step(aa, state, stmt_id)
        if state == FALSE_STATE:
            return False
    return True


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------


def serialize_aa(aa: AssumptionAutomaton) -> str:
    lines = [f"AUTOMATON {aa.name}", f"INITIAL {aa.initial}"]
    for state in aa.states:
        lines.append(f"STATE {state} @L{aa.location_of[state]}")
        ons = sorted((sid, tgt) for (src, sid), tgt in aa.transitions.items()
                     if src == state)
        for sid, tgt in ons:
            lines.append(f"  ON {sid} -> {tgt}")
    lines.append("END")
    return "\n".join(lines) + "\n"


def parse_aa(text: str) -> AssumptionAutomaton:
    aa = AssumptionAutomaton(name="", initial="")
    current: str = ""
    seen_header = seen_initial = seen_end = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if seen_end:
            raise FormatError(lineno, "content after END")
        parts = line.split()
        if parts[0] == "AUTOMATON":
            if seen_header:
                raise FormatError(lineno, "duplicate AUTOMATON header")
            if len(parts) != 2:
                raise FormatError(lineno, "AUTOMATON needs exactly one name")
            aa.name = parts[1]
            seen_header = True
        elif parts[0] == "INITIAL":
            if not seen_header:
                raise FormatError(lineno, "INITIAL before AUTOMATON")
            if seen_initial:
                raise FormatError(lineno, "duplicate INITIAL")
            if len(parts) != 2:
                raise FormatError(lineno, "INITIAL needs exactly one state")
            aa.initial = parts[1]
            seen_initial = True
        elif parts[0] == "STATE":
            if not seen_initial:
                raise FormatError(lineno, "STATE before INITIAL")
            if len(parts) != 3 or not parts[2].startswith("@L"):
                raise FormatError(lineno, "expected: STATE <name> @L<node>")
            name = parts[1]
            if name in _SINKS:
                raise FormatError(lineno, f"{name} is reserved")
            try:
                location = int(parts[2][2:])
            except ValueError:
                raise FormatError(lineno, f"bad location {parts[2]!r}") from None
            if name in aa.location_of:
                raise FormatError(lineno, f"state {name} declared twice")
            aa.add_state(name, location)
            current = name
        elif parts[0] == "ON":
            if not current:
                raise FormatError(lineno, "ON outside a STATE block")
            if len(parts) != 4 or parts[2] != "->":
                raise FormatError(lineno, "expected: ON <stmt-id> -> <state>")
            try:
                stmt_id = int(parts[1])
            except ValueError:
                raise FormatError(lineno, f"bad statement id {parts[1]!r}") from None
            aa.add_transition(current, stmt_id, parts[3])
        elif parts[0] == "END":
            if not seen_initial:
                raise FormatError(lineno, "END before INITIAL")
            seen_end = True
        else:
            raise FormatError(lineno, f"unrecognized directive {parts[0]!r}")
    if not seen_header:
        raise FormatError(1, "missing AUTOMATON header")
    if not seen_end:
        raise FormatError(1, "missing END")
    if aa.initial not in _SINKS and aa.initial not in aa.location_of:
        raise FormatError(1, f"initial state {aa.initial!r} never declared")
    for (src, sid), tgt in aa.transitions.items():
        if tgt not in _SINKS and tgt not in aa.location_of:
            raise FormatError(1, f"transition target {tgt!r} never declared")
    return aa


def check_alphabet(aa: AssumptionAutomaton, valid_ids: set) -> None:
    """Raise StatementIdMismatch if the automaton mentions foreign IDs."""
    foreign = aa.alphabet() - valid_ids
    if foreign:
        raise StatementIdMismatch(
            f"automaton {aa.name!r} refers to unknown statement ids "
            f"{sorted(foreign)}")
