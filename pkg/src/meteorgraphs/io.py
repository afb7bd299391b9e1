"""Reading and writing graphs and matrices.

Text graph format, one construct per line::

    # comment
    vertex v
    edge loop v -> v
    edge t v -> w

Edge lines may mention vertices that were never declared; they are created
on first use. JSON graphs look like
``{"vertices": ["v", "w"], "edges": [{"name": "t", "src": "v", "dst": "w"}]}``.
Matrix files hold ``n`` on the first line followed by ``n`` rows.
"""

from __future__ import annotations

import json
from pathlib import Path

from .graph import Edge, Graph
from .matrix import IntMatrix


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class _Builder:
    def __init__(self):
        self.vid: dict[str, int] = {}
        self.edges: list[Edge] = []
        self.enames: dict[int, str] = {}

    def vertex(self, name: str, line: int | None = None) -> int:
        if name not in self.vid:
            self.vid[name] = len(self.vid)
        return self.vid[name]

    def edge(self, name: str | None, src: str, dst: str, line: int | None = None) -> None:
        eid = len(self.edges)
        name = name or f"e{eid}"
        if name in self.enames.values():
            raise ParseError(f"duplicate edge name {name!r}", line)
        self.edges.append(Edge(eid, self.vertex(src), self.vertex(dst)))
        self.enames[eid] = name

    def build(self) -> Graph:
        return Graph(self.vid.values(), self.edges, {i: n for n, i in self.vid.items()}, self.enames)


def parse_graph_text(text: str) -> Graph:
    b = _Builder()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "vertex":
            if len(tok) != 2:
                raise ParseError("expected 'vertex <name>'", lineno)
            if tok[1] in b.vid:
                raise ParseError(f"duplicate vertex {tok[1]!r}", lineno)
            b.vertex(tok[1], lineno)
        elif tok[0] == "edge":
            if len(tok) != 5 or tok[3] != "->":
                raise ParseError("expected 'edge <name> <src> -> <dst>'", lineno)
            b.edge(tok[1], tok[2], tok[4], lineno)
        else:
            raise ParseError(f"unknown directive {tok[0]!r}", lineno)
    return b.build()


def parse_graph_json(data: dict | str) -> Graph:
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, exc.lineno) from exc
    if not isinstance(data, dict) or "vertices" not in data or "edges" not in data:
        raise ParseError("graph JSON needs 'vertices' and 'edges'")
    b = _Builder()
    for name in data["vertices"]:
        name = str(name)
        if name in b.vid:
            raise ParseError(f"duplicate vertex {name!r}")
        b.vertex(name)
    for rec in data["edges"]:
        try:
            b.edge(rec.get("name"), str(rec["src"]), str(rec["dst"]))
        except (KeyError, AttributeError, TypeError) as exc:
            raise ParseError(f"bad edge record {rec!r}") from exc
    return b.build()


def graph_to_text(g: Graph) -> str:
    lines = [f"vertex {g.label(v)}" for v in g.vertices]
    lines += [f"edge {g.edge_label(e.id)} {g.label(e.src)} -> {g.label(e.dst)}" for e in g.edges]
    return "\n".join(lines) + "\n"


def graph_to_json(g: Graph) -> dict:
    return {
        "vertices": [g.label(v) for v in g.vertices],
        "edges": [
            {"name": g.edge_label(e.id), "src": g.label(e.src), "dst": g.label(e.dst)}
            for e in g.edges
        ],
    }


def parse_matrix_text(text: str) -> IntMatrix:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    numbered = [(i + 1, ln) for i, ln in enumerate(lines) if ln]
    if not numbered:
        raise ParseError("empty matrix file")
    lineno, first = numbered[0]
    try:
        n = int(first)
    except ValueError:
        raise ParseError("first line must be the dimension n", lineno) from None
    rows = []
    for lineno, ln in numbered[1:]:
        try:
            row = [int(x) for x in ln.split()]
        except ValueError:
            raise ParseError("non-integer entry", lineno) from None
        if len(row) != n:
            raise ParseError(f"expected {n} entries, got {len(row)}", lineno)
        if any(x < 0 for x in row):
            raise ParseError("negative entry", lineno)
        rows.append(row)
    if len(rows) != n:
        raise ParseError(f"expected {n} rows, got {len(rows)}")
    return IntMatrix(rows, ncols=n)


def matrix_to_text(m: IntMatrix) -> str:
    return "\n".join([str(m.nrows)] + [" ".join(map(str, r)) for r in m.rows]) + "\n"


def load_graph(path: str | Path) -> Graph:
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        return parse_graph_json(text)
    return parse_graph_text(text)


def load_matrix(path: str | Path) -> IntMatrix:
    return parse_matrix_text(Path(path).read_text(encoding="utf-8"))
