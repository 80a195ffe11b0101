"""Lowering from the AST to a control-flow automaton.

Conventions, all load-bearing for downstream determinism:

* Node 0 is entry, node 1 is exit; further locations are allocated in
  lowering order.
* Statement IDs are allocated in a pre-order walk of the AST.  Within a
  loop, the exit-side assume receives the lower ID, before the body-side
  assume; an `if` keeps source order (then-side assume first).  DFS
  traversals that follow ascending statement IDs therefore leave loops
  before diving into their bodies.
* Branch guards lower to a complementary assume pair; the negated side
  carries the literal `!(cond)` expression.
* `int x;` without initializer lowers to `x = nondet()`: reading an
  uninitialized local may observe any integer.
* `return` lowers to a single halt edge into exit; the returned value is
  unobservable (single function) and is discarded.  Statements after a
  `return` are still lowered — their locations are unreachable from entry
  and deliberately kept, so syntactically dead code deflates coverage.
* If control can fall off the end of main, an implicit halt edge with its
  own statement ID closes the automaton.
"""

from __future__ import annotations

from typing import List, Optional

from . import lang
from .cfa import ASSERT, ASSIGN, ASSUME, HALT, SKIP, Cfa, Edge, Statement


class _Lowerer:
    def __init__(self) -> None:
        self.edges: List[Edge] = []
        self.next_node = 2  # 0 = entry, 1 = exit
        self.next_stmt = 0

    def fresh(self) -> int:
        node = self.next_node
        self.next_node += 1
        return node

    def edge(self, src: int, dst: int, kind: str, var: Optional[str] = None,
             expr: Optional[lang.Expr] = None, line: int = 0) -> None:
        stmt = Statement(self.next_stmt, kind, var=var, expr=expr, source_line=line)
        self.next_stmt += 1
        self.edges.append(Edge(src, stmt, dst))

    # Each statement is lowered between two given locations.  Returns
    # nothing; a Return ignores its target and jumps to exit instead.

    def lower_block(self, stmts: List[lang.Stmt], src: int, dst: int) -> None:
        if not stmts:
            raise AssertionError("empty block needs caller handling")
        current = src
        for stmt in stmts[:-1]:
            nxt = self.fresh()
            self.lower_stmt(stmt, current, nxt)
            current = nxt
        self.lower_stmt(stmts[-1], current, dst)

    def lower_body(self, stmts: List[lang.Stmt], src: int, dst: int) -> None:
        """A block that may be empty; empty means src and dst coincide."""
        if stmts:
            self.lower_block(stmts, src, dst)

    def lower_stmt(self, stmt: lang.Stmt, src: int, dst: int) -> None:
        if isinstance(stmt, lang.Decl):
            init = stmt.init if stmt.init is not None else lang.Nondet()
            self.edge(src, dst, ASSIGN, var=stmt.name, expr=init, line=stmt.line)
        elif isinstance(stmt, lang.Assign):
            self.edge(src, dst, ASSIGN, var=stmt.name, expr=stmt.expr, line=stmt.line)
        elif isinstance(stmt, lang.Skip):
            self.edge(src, dst, SKIP, line=stmt.line)
        elif isinstance(stmt, lang.Assert):
            self.edge(src, dst, ASSERT, expr=stmt.cond, line=stmt.line)
        elif isinstance(stmt, lang.Return):
            self.edge(src, 1, HALT, line=stmt.line)
        elif isinstance(stmt, lang.If):
            self.lower_if(stmt, src, dst)
        elif isinstance(stmt, lang.While):
            self.lower_loop(stmt.cond, None, stmt.body, src, dst, stmt.line)
        elif isinstance(stmt, lang.For):
            head = src
            if stmt.init is not None:
                head = self.fresh()
                self.lower_stmt(stmt.init, src, head)
            cond = stmt.cond if stmt.cond is not None else lang.IntLit(1)
            self.lower_loop(cond, stmt.update, stmt.body, head, dst, stmt.line)
        else:
            raise AssertionError(f"unhandled statement {stmt!r}")

    def lower_if(self, stmt: lang.If, src: int, dst: int) -> None:
        if stmt.then:
            then_head = self.fresh()
            self.edge(src, then_head, ASSUME, expr=stmt.cond, line=stmt.line)
            self.lower_block(stmt.then, then_head, dst)
        else:
            self.edge(src, dst, ASSUME, expr=stmt.cond, line=stmt.line)
        negated = lang.Unary("!", stmt.cond)
        if stmt.orelse:
            else_head = self.fresh()
            self.edge(src, else_head, ASSUME, expr=negated, line=stmt.line)
            self.lower_block(stmt.orelse, else_head, dst)
        else:
            self.edge(src, dst, ASSUME, expr=negated, line=stmt.line)

    def lower_loop(self, cond: lang.Expr, update: Optional[lang.Stmt],
                   body: List[lang.Stmt], head: int, dst: int, line: int) -> None:
        # Exit-side assume first: see module docstring.
        self.edge(head, dst, ASSUME, expr=lang.Unary("!", cond), line=line)
        back = head
        if update is not None:
            back = self.fresh()
        if body:
            body_head = self.fresh()
            self.edge(head, body_head, ASSUME, expr=cond, line=line)
            self.lower_block(body, body_head, back)
        else:
            self.edge(head, back, ASSUME, expr=cond, line=line)
        if update is not None:
            self.lower_stmt(update, back, head)


def lower(program: lang.Program) -> Cfa:
    """Build the CFA of a parsed program."""
    lw = _Lowerer()
    body = program.body
    if body and isinstance(body[-1], lang.Return):
        lw.lower_block(body, 0, 1)
    else:
        last_line = body[-1].line if body else 0
        if body:
            fall_off = lw.fresh()
            lw.lower_block(body, 0, fall_off)
        else:
            fall_off = 0
        lw.edge(fall_off, 1, HALT, line=last_line)
    nodes = list(range(lw.next_node))
    cfa = Cfa(program.name, nodes, lw.edges, entry=0, exit=1)
    cfa.validate()
    return cfa


def source_to_cfa(source: str, name: str = "main") -> Cfa:
    return lower(lang.parse_program(source, name=name))
