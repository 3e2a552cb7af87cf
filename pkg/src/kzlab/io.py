"""Graph serialisation: graph6 and a plain edge-list text format.

Edge-list format::

    n
    u v
    u v
    ...

with 0-based vertex ids, one edge per line.
"""
from __future__ import annotations

from .errors import DomainError
from .graph import Graph

_HEADER = ">>graph6<<"


def _encode_n(n: int) -> bytes:
    if n < 63:
        return bytes([n + 63])
    if n < 258048:
        return bytes([126] + [((n >> s) & 63) + 63 for s in (12, 6, 0)])
    if n < 68719476736:
        return bytes([126, 126] + [((n >> s) & 63) + 63 for s in (30, 24, 18, 12, 6, 0)])
    raise DomainError("graph too large for graph6")


def _decode_n(data: bytes) -> tuple[int, int]:
    if not data:
        raise DomainError("empty graph6 string")
    if data[0] != 126:
        return data[0] - 63, 1
    if len(data) > 1 and data[1] == 126:
        fields, start = data[2:8], 8
    else:
        fields, start = data[1:4], 4
    n = 0
    for c in fields:
        n = (n << 6) | (c - 63)
    return n, start


def to_graph6_bytes(g: Graph) -> bytes:
    """graph6 encoding without header or trailing newline."""
    n = g.n
    adj = g.masks
    bits = []
    for j in range(1, n):
        mj = adj[j]
        for i in range(j):
            bits.append((mj >> i) & 1)
    while len(bits) % 6:
        bits.append(0)
    body = bytearray()
    for k in range(0, len(bits), 6):
        x = 0
        for b in bits[k:k + 6]:
            x = (x << 1) | b
        body.append(x + 63)
    return _encode_n(n) + bytes(body)


def to_graph6(g: Graph) -> str:
    return to_graph6_bytes(g).decode("ascii")


def from_graph6(s: str | bytes) -> Graph:
    data = s.encode("ascii") if isinstance(s, str) else bytes(s)
    data = data.strip()
    if data.startswith(_HEADER.encode()):
        data = data[len(_HEADER):]
    for c in data:
        if not 63 <= c <= 126:
            raise DomainError(f"invalid graph6 byte {c!r}")
    n, start = _decode_n(data)
    body = data[start:]
    need = (n * (n - 1) // 2 + 5) // 6
    if len(body) != need:
        raise DomainError(f"graph6 body has {len(body)} bytes, expected {need}")
    bits = []
    for c in body:
        x = c - 63
        bits.extend((x >> s) & 1 for s in range(5, -1, -1))
    edges = []
    k = 0
    for j in range(1, n):
        for i in range(j):
            if bits[k]:
                edges.append((i, j))
            k += 1
    return Graph(n, frozenset(edges))


def to_edgelist(g: Graph) -> str:
    lines = [str(g.n)] + [f"{u} {v}" for u, v in g.sorted_edges]
    return "\n".join(lines) + "\n"


def from_edgelist(text: str) -> Graph:
    rows = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    rows = [r for r in rows if r]
    if not rows:
        raise DomainError("empty edge list")
    n = int(rows[0])
    edges = []
    for r in rows[1:]:
        parts = r.split()
        if len(parts) != 2:
            raise DomainError(f"bad edge line {r!r}")
        u, v = int(parts[0]), int(parts[1])
        if not (0 <= u < n and 0 <= v < n):
            raise DomainError(f"edge {u} {v} out of range for n={n}")
        edges.append((u, v))
    return Graph.from_edges(n, edges)
