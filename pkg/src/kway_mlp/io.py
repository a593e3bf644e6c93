"""METIS graph files and partition files."""

from __future__ import annotations

import os

from .graph import Graph, Partition

FORMATS = {0: (False, False), 1: (False, True), 10: (True, False), 11: (True, True)}


class MetisFormatError(ValueError):
    """Malformed input; ``line`` is 1-based (0 when the problem spans the file)."""

    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def _ints(tokens, lineno):
    try:
        values = [int(t) for t in tokens]
    except ValueError:
        raise MetisFormatError(f"expected unsigned integers, got {' '.join(tokens)!r}",
                               lineno) from None
    if any(x < 0 for x in values):
        raise MetisFormatError("negative value", lineno)
    return values


def parse_metis(text: str) -> Graph:
    lines = [(i, raw) for i, raw in enumerate(text.splitlines(), 1)
             if not raw.lstrip().startswith("%")]
    if not lines or not lines[0][1].split():
        raise MetisFormatError("missing header", lines[0][0] if lines else 1)
    head_no, head = lines[0]
    header = _ints(head.split(), head_no)
    if len(header) not in (2, 3):
        raise MetisFormatError("header must be 'n m [fmt]'", head_no)
    n, m = header[0], header[1]
    fmt = header[2] if len(header) == 3 else 0
    if fmt not in FORMATS:
        raise MetisFormatError(f"unsupported fmt code {fmt}", head_no)
    node_w, edge_w = FORMATS[fmt]
    body = lines[1:]
    # trailing blank lines are tolerated, other extra lines are not
    while len(body) > n and not body[-1][1].strip():
        body.pop()
    if len(body) != n:
        raise MetisFormatError(f"expected {n} vertex lines, found {len(body)}",
                               body[-1][0] if body else head_no)
    vwgt = [1] * n
    arcs = {}
    line_of = [0] * n
    listed = 0
    for v, (lineno, raw) in enumerate(body):
        line_of[v] = lineno
        vals = _ints(raw.split(), lineno)
        if node_w:
            if not vals:
                raise MetisFormatError("missing node weight", lineno)
            vwgt[v] = vals[0]
            vals = vals[1:]
        step = 2 if edge_w else 1
        if len(vals) % step:
            raise MetisFormatError("odd number of entries in a weighted adjacency list", lineno)
        for i in range(0, len(vals), step):
            u = vals[i]
            if not 1 <= u <= n:
                raise MetisFormatError(f"neighbour {u} out of range 1..{n}", lineno)
            w = vals[i + 1] if edge_w else 1
            key = (v, u - 1)
            listed += 1 if key[0] == key[1] else 0.5
            arcs[key] = arcs.get(key, 0) + w
    edges = []
    for (v, u), w in arcs.items():
        if arcs.get((u, v)) != w:
            raise MetisFormatError(
                f"asymmetric adjacency between vertices {v + 1} and {u + 1}", line_of[v])
        if v <= u:
            edges.append((v, u, w))
    # parallel edges may be counted either merged or as listed
    if m not in (len(edges), listed):
        raise MetisFormatError(f"header declares {m} edges, found {len(edges)}", head_no)
    return Graph.from_edges(n, edges, vwgt)


def read_metis(path) -> Graph:
    with open(path) as fh:
        return parse_metis(fh.read())


def format_metis(graph: Graph, fmt: int | None = None) -> str:
    if fmt is None:
        node_w = any(w != 1 for w in graph.vwgt)
        edge_w = any(w != 1 for w in graph.adjwgt)
        fmt = (10 if node_w else 0) + (1 if edge_w else 0)
    node_w, edge_w = FORMATS[fmt]
    head = f"{graph.n} {graph.m}" + (f" {fmt}" if fmt else "")
    out = [head]
    for v in range(graph.n):
        parts = [str(graph.vwgt[v])] if node_w else []
        for u, w in graph.adj[v]:
            parts.append(str(u + 1))
            if edge_w:
                parts.append(str(w))
        out.append(" ".join(parts))
    return "\n".join(out) + "\n"


def write_metis(path, graph: Graph, fmt: int | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(format_metis(graph, fmt))


def parse_partition(text: str, n: int, k: int) -> list:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if len(lines) != n:
        raise MetisFormatError(f"expected {n} block ids, found {len(lines)}",
                               len(lines) if lines else 0)
    block_of = []
    for lineno, raw in enumerate(lines, 1):
        try:
            b = int(raw.strip())
        except ValueError:
            raise MetisFormatError(f"not a block id: {raw.strip()!r}", lineno) from None
        if not 0 <= b < k:
            raise MetisFormatError(f"block id {b} outside 0..{k - 1}", lineno)
        block_of.append(b)
    return block_of


def read_partition(path, n: int, k: int) -> list:
    with open(path) as fh:
        return parse_partition(fh.read(), n, k)


def write_partition(path, partition) -> None:
    block_of = partition.block_of if isinstance(partition, Partition) else partition
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "w") as fh:
        fh.write("".join(f"{b}\n" for b in block_of))
    os.replace(tmp, path)
