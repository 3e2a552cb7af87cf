"""The k-round Ehrenfeucht game on two graphs: rules, transcripts and an exact solver.

Sides are ``LEFT = 0`` and ``RIGHT = 1``. A Spoiler move is ``(side, vertex)``;
a Duplicator move is a vertex of the other graph. Pebbles are stored as
``(left vertex, right vertex)`` pairs in selection order.

Two rule sets are supported. ``"full"`` lets Spoiler re-pick a pebbled vertex,
which forces Duplicator to answer with its partner. ``"distinct"`` only allows
fresh vertices. Duplicator must always answer a fresh vertex with a fresh one.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace
from typing import Callable

from .canon import canonical_form
from .config import cap
from .errors import CapExceeded, DomainError
from .graph import Graph
from .io import from_graph6, to_graph6

LEFT, RIGHT = 0, 1
FULL, DISTINCT = "full", "distinct"


class Winner(str, enum.Enum):
    SPOILER = "spoiler"
    DUPLICATOR = "duplicator"


@dataclass(frozen=True)
class GamePosition:
    left: Graph
    right: Graph
    k: int
    pebbles: tuple = ()
    pending: tuple | None = None

    @property
    def phase(self) -> str:
        return "duplicator" if self.pending is not None else "spoiler"

    @property
    def finished(self) -> bool:
        return self.pending is None and len(self.pebbles) >= self.k

    def graph(self, side: int) -> Graph:
        return self.left if side == LEFT else self.right

    def pebbled(self, side: int) -> list[int]:
        return [pair[side] for pair in self.pebbles]


def new_game(g: Graph, h: Graph, k: int) -> GamePosition:
    if k < 1:
        raise DomainError(f"the game needs at least one round, got k={k}")
    return GamePosition(g, h, k)


def _partner(pos: GamePosition, side: int, v: int) -> int | None:
    for pair in pos.pebbles:
        if pair[side] == v:
            return pair[1 - side]
    return None


def legal_moves(pos: GamePosition, rules: str = FULL) -> list:
    if pos.finished:
        return []
    if pos.pending is None:
        moves = []
        for side in (LEFT, RIGHT):
            used = set(pos.pebbled(side)) if rules == DISTINCT else set()
            moves.extend((side, v) for v in range(pos.graph(side).n) if v not in used)
        return moves
    side, v = pos.pending
    partner = _partner(pos, side, v)
    if partner is not None:
        return [partner]
    other = 1 - side
    used = set(pos.pebbled(other))
    return [w for w in range(pos.graph(other).n) if w not in used]


def apply_move(pos: GamePosition, move) -> GamePosition:
    if pos.pending is None:
        side, v = move
        return replace(pos, pending=(int(side), int(v)))
    side, v = pos.pending
    pair = (v, int(move)) if side == LEFT else (int(move), v)
    return replace(pos, pebbles=pos.pebbles + (pair,), pending=None)


def partial_isomorphism_holds(pos: GamePosition) -> bool:
    """The pairing of pebbled vertices is a bijection preserving adjacency and non-adjacency."""
    fwd: dict[int, int] = {}
    back: dict[int, int] = {}
    for a, b in pos.pebbles:
        if fwd.setdefault(a, b) != b or back.setdefault(b, a) != a:
            return False
    items = list(fwd.items())
    for i, (a, b) in enumerate(items):
        for c, d in items[i + 1:]:
            if pos.left.has_edge(a, c) != pos.right.has_edge(b, d):
                return False
    return True


# --- exact solver ---------------------------------------------------------------


def _distinct_pairs(pebbles) -> tuple:
    seen = set()
    out = []
    for pair in pebbles:
        if pair not in seen:
            seen.add(pair)
            out.append(pair)
    return tuple(out)


class Solver:
    """Minimax over positions with fresh-vertex pebbles.

    Spoiler re-picks are never better than a fresh pick (they spend a round
    and change nothing), so the search only branches on fresh vertices. A
    position is lost for Duplicator as soon as the fresh vertices on the two
    sides realise different adjacency patterns towards the pebbles.
    ``memo`` is ``"canonical"`` (pebble-coloured canonical forms), ``"raw"``
    or ``"none"``.
    """

    def __init__(self, g: Graph, h: Graph, k: int, memo: str = "canonical",
                 max_vertices: int | None = None, max_rounds: int | None = None):
        vcap = cap(max_vertices, "game_vertices")
        rcap = cap(max_rounds, "game_rounds")
        if max(g.n, h.n) > vcap:
            raise CapExceeded("solve vertices", max(g.n, h.n), vcap)
        if k > rcap:
            raise CapExceeded("solve rounds", k, rcap)
        if memo not in ("canonical", "raw", "none"):
            raise DomainError(f"unknown memo mode {memo!r}")
        self.g, self.h, self.k = g, h, k
        self.memo = memo
        self.table: dict = {}
        self.nodes = 0
        self._graphs = (g, h)
        self._cap = max(vcap, g.n, h.n)

    def _sig(self, side: int, v: int, peb) -> int:
        adj = self._graphs[side].adj[v]
        out = 0
        for j, pair in enumerate(peb):
            if pair[side] in adj:
                out |= 1 << j
        return out

    def _fresh(self, side: int, peb) -> list[int]:
        used = {pair[side] for pair in peb}
        return [v for v in range(self._graphs[side].n) if v not in used]

    def _key(self, peb, left: int):
        if self.memo == "raw":
            return frozenset(peb), left
        cl = [0] * self.g.n
        cr = [0] * self.h.n
        for j, (a, b) in enumerate(peb):
            cl[a] = cr[b] = j + 1
        return (canonical_form(self.g, cl, self._cap), canonical_form(self.h, cr, self._cap), left)

    def _sig_sets(self, peb):
        return tuple({self._sig(s, v, peb) for v in self._fresh(s, peb)} for s in (LEFT, RIGHT))

    def spoiler_wins(self, peb, left: int) -> bool:
        """Whether Spoiler wins from consistent pebbles ``peb`` with ``left`` rounds to go."""
        if left <= 0:
            return False
        key = self._key(peb, left) if self.memo != "none" else None
        if key is not None and key in self.table:
            return self.table[key]
        self.nodes += 1
        gs, hs = self._sig_sets(peb)
        if gs != hs:
            res = True
        elif left == 1:
            res = False
        else:
            res = any(self._move_wins(peb, side, v, left) for side in (LEFT, RIGHT) for v in self._fresh(side, peb))
        if key is not None:
            self.table[key] = res
        return res

    def _replies(self, peb, side: int, v: int) -> list[int]:
        want = self._sig(side, v, peb)
        other = 1 - side
        return [w for w in self._fresh(other, peb) if self._sig(other, w, peb) == want]

    @staticmethod
    def _extend(peb, side: int, v: int, w: int):
        return peb + (((v, w) if side == LEFT else (w, v)),)

    def _move_wins(self, peb, side: int, v: int, left: int) -> bool:
        return all(self.spoiler_wins(self._extend(peb, side, v, w), left - 1) for w in self._replies(peb, side, v))

    # --- strategies derived from the table ---------------------------------------

    def winner(self, pos: GamePosition | None = None) -> Winner:
        if pos is None:
            peb, left = (), self.k
        else:
            if not partial_isomorphism_holds(pos):
                return Winner.SPOILER
            peb = _distinct_pairs(pos.pebbles)
            left = pos.k - len(pos.pebbles)
        return Winner.SPOILER if self.spoiler_wins(peb, left) else Winner.DUPLICATOR

    def spoiler_move(self, pos: GamePosition):
        peb = _distinct_pairs(pos.pebbles)
        left = pos.k - len(pos.pebbles)
        first = None
        if partial_isomorphism_holds(pos):
            for side in (LEFT, RIGHT):
                for v in self._fresh(side, peb):
                    if first is None:
                        first = (side, v)
                    if self._move_wins(peb, side, v, left):
                        return side, v
        else:
            fresh = [(s, v) for s in (LEFT, RIGHT) for v in self._fresh(s, peb)]
            first = fresh[0] if fresh else None
        if first is None and peb:
            return LEFT, peb[0][0]
        return first

    def duplicator_move(self, pos: GamePosition):
        side, v = pos.pending
        partner = _partner(pos, side, v)
        if partner is not None:
            return partner
        peb = _distinct_pairs(pos.pebbles)
        left = pos.k - len(pos.pebbles) - 1
        options = self._fresh(1 - side, peb)
        if not options:
            return None
        if partial_isomorphism_holds(pos):
            good = self._replies(peb, side, v)
            for w in good:
                if not self.spoiler_wins(self._extend(peb, side, v, w), left):
                    return w
            if good:
                return good[0]
        return options[0]


def solve(g: Graph, h: Graph, k: int, memo: str = "canonical",
          max_vertices: int | None = None, max_rounds: int | None = None):
    """``(winner, solver)``; the solver doubles as the optimal move map for both players."""
    if k < 1:
        raise DomainError(f"the game needs at least one round, got k={k}")
    solver = Solver(g, h, k, memo, max_vertices, max_rounds)
    return solver.winner(), solver


# --- playing and transcripts ------------------------------------------------------


Strategy = Callable[[GamePosition], object]


@dataclass
class Transcript:
    left: str
    right: str
    k: int
    rules: str
    moves: list = field(default_factory=list)
    winner: Winner | None = None
    forfeit: dict | None = None
    trace: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "left": self.left,
            "right": self.right,
            "k": self.k,
            "rules": self.rules,
            "moves": self.moves,
            "winner": self.winner.value if self.winner else None,
            "forfeit": self.forfeit,
            "trace": self.trace,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> Transcript:
        d = json.loads(text)
        w = Winner(d["winner"]) if d.get("winner") else None
        return cls(d["left"], d["right"], d["k"], d["rules"], d["moves"], w, d.get("forfeit"), d.get("trace", []))

    @property
    def rounds_played(self) -> int:
        return sum(1 for m in self.moves if m["actor"] == "duplicator")


def _outcome(pos: GamePosition) -> Winner:
    return Winner.DUPLICATOR if partial_isomorphism_holds(pos) else Winner.SPOILER


def play(g: Graph, h: Graph, k: int, spoiler: Strategy, duplicator: Strategy, rules: str = DISTINCT) -> Transcript:
    """Run one game. A strategy may return ``None`` to resign; an illegal move forfeits.

    Strategies exposing a ``notes`` list get its new entries copied into the trace.
    """
    pos = new_game(g, h, k)
    tr = Transcript(to_graph6(g), to_graph6(h), k, rules)
    while not pos.finished:
        actor, strat = ("spoiler", spoiler) if pos.pending is None else ("duplicator", duplicator)
        legal = legal_moves(pos, rules)
        if not legal:
            # Spoiler without a fresh vertex ends the game early; Duplicator without a reply loses
            tr.winner = _outcome(pos) if actor == "spoiler" else Winner.SPOILER
            return tr
        move = strat(pos)
        notes = getattr(strat, "notes", None)
        if notes:
            tr.trace.extend(notes)
            notes.clear()
        if move is None or (move if actor == "duplicator" else tuple(move)) not in [
            m if actor == "duplicator" else tuple(m) for m in legal
        ]:
            reason = "resigned" if move is None else f"illegal move {move!r}"
            tr.forfeit = {"actor": actor, "reason": reason}
            tr.winner = Winner.DUPLICATOR if actor == "spoiler" else Winner.SPOILER
            return tr
        if actor == "spoiler":
            tr.moves.append({"actor": actor, "side": int(move[0]), "vertex": int(move[1])})
        else:
            tr.moves.append({"actor": actor, "vertex": int(move)})
        pos = apply_move(pos, move)
    tr.winner = _outcome(pos)
    return tr


def replay(tr: Transcript) -> Winner:
    """Re-apply the recorded moves under the recorded rules and return the resulting winner."""
    pos = new_game(from_graph6(tr.left), from_graph6(tr.right), tr.k)
    for m in tr.moves:
        move = (m["side"], m["vertex"]) if m["actor"] == "spoiler" else m["vertex"]
        legal = legal_moves(pos, tr.rules)
        norm = [tuple(x) if isinstance(x, tuple) else x for x in legal]
        if (tuple(move) if isinstance(move, tuple) else move) not in norm:
            raise DomainError(f"illegal move {m} in transcript")
        pos = apply_move(pos, move)
    if tr.forfeit is not None:
        return Winner.DUPLICATOR if tr.forfeit["actor"] == "spoiler" else Winner.SPOILER
    if not pos.finished:
        if legal_moves(pos, tr.rules):
            raise DomainError("transcript stops before the game is over")
        return _outcome(pos) if pos.pending is None else Winner.SPOILER
    return _outcome(pos)


def minimax_spoiler(solver: Solver) -> Strategy:
    return solver.spoiler_move


def minimax_duplicator(solver: Solver) -> Strategy:
    return solver.duplicator_move


def lowest_id_duplicator(pos: GamePosition, rules: str = DISTINCT):
    moves = legal_moves(pos, rules)
    return moves[0] if moves else None
