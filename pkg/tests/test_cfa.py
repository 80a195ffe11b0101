"""Control-flow automaton construction, numbering, and utilities."""

from __future__ import annotations

import pytest

from vericov import (dump_cfa, live_variables, parse_program, postorder_index,
                     source_to_cfa, statement_ids, statements)
from vericov.cfa import ASSIGN, ASSUME, HALT, Cfa, Edge, Statement
from vericov.lowering import lower

import oracle
from conftest import ALL_FIXTURES, fixture_cfa, fixture_source, golden

DIAMOND = ("int nondet();\n"
           "int main() { int x = nondet(); if (x > 0) { x = 1; } "
           "else { x = 2; } return 0; }")


def test_bigloop_dump_matches_golden():
    cfa = fixture_cfa("bigloop.c")
    assert dump_cfa(cfa) == golden("bigloop.dump")


def test_bigloop_statement_count():
    # Hand count: loop init, exit assume, body assume, skip body, update,
    # assert, halt.
    assert len(statements(fixture_cfa("bigloop.c"))) == 7


def test_deadbranch_branch_statements_present():
    cfa = fixture_cfa("deadbranch.c")
    texts = {(s.kind, s.text()) for s in statements(cfa)}
    assert ("assume", "x * x < 0") in texts
    assert ("assume", "!(x * x < 0)") in texts
    assert ("assign", "reached_dead_code = 1") in texts
    assert len(statements(cfa)) == 8


def test_empty_main_is_one_halt_edge():
    cfa = source_to_cfa("int main() { }")
    assert dump_cfa(cfa) == "entry L0\nexit L1\nL0 -[0:halt]-> L1\n"


def test_uninitialized_declaration_reads_nondet():
    cfa = source_to_cfa("int main() { int x; return 0; }")
    assert statements(cfa)[0].text() == "x = nondet()"


def test_out_edges_sorted_by_statement_id():
    cfa = fixture_cfa("bigloop.c")
    for node in cfa.nodes:
        ids = [e.stmt.id for e in cfa.out_edges(node)]
        assert ids == sorted(ids)


def test_statement_ids_dense():
    for name in ALL_FIXTURES:
        cfa = fixture_cfa(name)
        assert statement_ids(cfa) == set(range(len(statements(cfa))))


def test_loop_exit_assume_has_lower_id_than_body_assume():
    cfa = fixture_cfa("bigloop.c")
    by_text = {s.text(): s.id for s in statements(cfa) if s.kind == "assume"}
    assert by_text["!(i < 1000000)"] < by_text["i < 1000000"]


def test_then_assume_precedes_else_assume():
    cfa = source_to_cfa(DIAMOND)
    assumes = [s for s in statements(cfa) if s.kind == "assume"]
    assert assumes[0].text() == "x > 0"
    assert assumes[1].text() == "!(x > 0)"
    assert assumes[0].id < assumes[1].id


def test_return_mid_branch_targets_exit():
    cfa = fixture_cfa("early_return.c")
    halts = [e for e in cfa.edges if e.stmt.kind == "halt"]
    assert all(e.dst == cfa.exit for e in halts)
    assert len(halts) == 2  # branch return and trailing return


def test_dead_code_after_return_still_lowered():
    cfa = fixture_cfa("dead_after_return.c")
    kinds = [s.kind for s in statements(cfa)]
    # x = 0; return; x = 1; assert; implicit halt
    assert kinds == ["assign", "halt", "assign", "assert", "halt"]


# Postorder numbering ---------------------------------------------------------


def test_postorder_chain():
    cfa = source_to_cfa("int main() { int a = 1; return 0; }")
    # entry -> L2 -> exit: exit finishes first, entry last.
    assert postorder_index(cfa) == {1: 0, 2: 1, 0: 2}


def test_postorder_diamond():
    cfa = source_to_cfa(DIAMOND)
    # Hand derivation. Nodes: 0 entry, 1 exit, 2 split, 4 then-mid,
    # 5 else-mid, 3 join. DFS follows ascending statement ids:
    # 0,2,4,3,1 finish as 1:0, 3:1, 4:2; then 5:3, 2:4, 0:5.
    assert postorder_index(cfa) == {1: 0, 3: 1, 4: 2, 5: 3, 2: 4, 0: 5}
    index = postorder_index(cfa)
    split, then_mid, else_mid = 2, 4, 5
    assert index[then_mid] < index[split]
    assert index[else_mid] < index[split]


def test_postorder_bigloop():
    cfa = fixture_cfa("bigloop.c")
    assert postorder_index(cfa) == {1: 0, 6: 1, 2: 2, 4: 3, 5: 4, 3: 5, 0: 6}
    # The loop-exit successor (L2) sits below the loop body head (L5).
    assert postorder_index(cfa)[2] < postorder_index(cfa)[5]


@pytest.mark.parametrize("name", ALL_FIXTURES)
def test_postorder_is_bijection(name):
    cfa = fixture_cfa(name)
    index = postorder_index(cfa)
    assert sorted(index) == sorted(cfa.nodes)
    assert sorted(index.values()) == list(range(len(cfa.nodes)))


@pytest.mark.parametrize("name", ALL_FIXTURES)
def test_postorder_acyclic_edges_point_downward(name):
    cfa = fixture_cfa(name)
    index = postorder_index(cfa)
    back_edges = _back_edges(cfa)
    for e in cfa.edges:
        if (e.src, e.stmt.id, e.dst) not in back_edges:
            assert index[e.dst] < index[e.src], e


def _back_edges(cfa):
    """Edges closing a cycle, found by an independent DFS from entry."""
    back = set()
    state = {}  # node -> "active" | "done"

    def visit(node):
        state[node] = "active"
        for e in cfa.out_edges(node):
            if state.get(e.dst) == "active":
                back.add((e.src, e.stmt.id, e.dst))
            elif e.dst not in state:
                visit(e.dst)
        state[node] = "done"

    for node in cfa.nodes:
        if node not in state:
            visit(node)
    return back


def test_postorder_deterministic():
    first = postorder_index(fixture_cfa("bigloop.c"))
    second = postorder_index(fixture_cfa("bigloop.c"))
    assert first == second


# Liveness --------------------------------------------------------------------


def test_live_variables_simple():
    cfa = source_to_cfa("int main() { int x = 1; assert(x > 0); return 0; }")
    live = live_variables(cfa)
    # x is live between its assignment and the assert read, dead elsewhere.
    assign_edge = cfa.edges[0]
    assert_edge = cfa.edges[1]
    assert live[assign_edge.src] == frozenset()
    assert live[assert_edge.src] == frozenset({"x"})
    assert live[cfa.exit] == frozenset()


def test_live_variables_loop_carried():
    cfa = fixture_cfa("loop_concrete.c")
    live = live_variables(cfa)
    loop_head = next(e.src for e in cfa.edges
                     if e.stmt.kind == "assume" and e.stmt.text() == "i < 4")
    assert {"s", "i"} <= set(live[loop_head])


# Validation ------------------------------------------------------------------


def test_validate_rejects_sparse_statement_ids():
    edges = [Edge(0, Statement(1, HALT), 1)]
    with pytest.raises(ValueError):
        Cfa("bad", [0, 1], edges, entry=0, exit=1).validate()


def test_validate_rejects_edge_into_entry():
    edges = [Edge(0, Statement(0, ASSUME, expr=None), 1),
             Edge(1, Statement(1, HALT), 0)]
    with pytest.raises(ValueError):
        Cfa("bad", [0, 1], edges, entry=0, exit=1).validate()


def test_validate_rejects_edge_out_of_exit():
    edges = [Edge(0, Statement(0, HALT), 1),
             Edge(1, Statement(1, HALT), 0)]
    with pytest.raises(ValueError):
        Cfa("bad", [0, 1], edges, entry=0, exit=1).validate()


# Correspondence with source control paths ------------------------------------


@pytest.mark.parametrize("name", ALL_FIXTURES)
def test_cfa_paths_match_ast_control_paths(name):
    """Entry-to-exit CFA label paths = AST control paths, up to length 50.

    The AST side is enumerated by an independent walker that never looks
    at the lowering code.
    """
    program = parse_program(fixture_source(name))
    cfa = lower(program)
    ast_side = oracle.ast_label_paths(program, max_len=50)
    cfa_side = oracle.cfa_label_paths(cfa, max_len=50)
    assert ast_side == cfa_side
    assert ast_side  # at least one terminating control path


def test_statements_stable_across_lowerings():
    a = dump_cfa(fixture_cfa("deadbranch.c"))
    b = dump_cfa(fixture_cfa("deadbranch.c"))
    assert a == b
