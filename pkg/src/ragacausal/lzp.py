"""Lempel-Ziv penalty causality between symbol sequences.

P(x -> y) = C(xy) - C(y): the extra phrases ``y`` costs when parsed after
``x``'s history instead of on its own. The direction with the smaller
penalty is taken as causal; equal penalties mean no edge.
"""
from __future__ import annotations

import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from graphlib import CycleError, TopologicalSorter

import numpy as np

from .errors import EmptySequence, LengthMismatch, NoCrossPairs
from .lz import _as_array, lz76_complexity
from .melody import SequenceLabel, SymbolSequence
from .raga import Group


class Decision(Enum):
    X_CAUSES_Y = "x->y"
    Y_CAUSES_X = "y->x"
    TIE = "tie"


class Orientation(Enum):
    TOP_DOWN = "TB"
    LEFT_RIGHT = "LR"


@dataclass(frozen=True)
class PenaltyPair:
    p_xy: int
    p_yx: int

    @property
    def decision(self) -> Decision:
        if self.p_xy < self.p_yx:
            return Decision.X_CAUSES_Y
        if self.p_yx < self.p_xy:
            return Decision.Y_CAUSES_X
        return Decision.TIE


def _complexity(arr: np.ndarray) -> int:
    return lz76_complexity(arr).phrase_count


def _concat(x: np.ndarray, y: np.ndarray) -> int:
    return _complexity(np.concatenate([x, y]))


def penalty(x, y) -> int:
    """Penalty of explaining ``y`` with the grammar of ``x``."""
    xa, ya = _as_array(x), _as_array(y)
    if xa.size == 0 or ya.size == 0:
        raise EmptySequence("penalty needs two non-empty sequences")
    return _concat(xa, ya) - _complexity(ya)


def direction(x, y) -> PenaltyPair:
    return PenaltyPair(penalty(x, y), penalty(y, x))


@dataclass
class CausalGraph:
    nodes: list[SequenceLabel]
    # (cause, effect, penalty margin)
    edges: list[tuple[int, int, int]]
    ties: list[tuple[int, int]]
    cross_pair_count: int
    penalties: np.ndarray | None = None
    # one cycle as a closed walk along cause -> effect edges, or None
    cycle: list[int] | None = field(default=None)

    @property
    def has_cycle(self) -> bool:
        return self.cycle is not None


@dataclass(frozen=True)
class AccuracyStats:
    E: int
    E_prime: float
    accuracy_pct: float
    tie_count: int = 0


def cross_pair_count(n_melakarta: int, n_janya: int) -> int:
    return n_melakarta * n_janya


def _is_cross(a: SequenceLabel | None, b: SequenceLabel | None) -> bool:
    if a is None or b is None:
        return False
    return a.group != b.group


def _find_cycle(n: int, edges) -> list[int] | None:
    ts = TopologicalSorter({i: set() for i in range(n)})
    for cause, effect, _ in edges:
        ts.add(effect, cause)
    try:
        ts.prepare()
    except CycleError as exc:
        return list(exc.args[1])
    return None


def build_graph(pool: list[SymbolSequence], workers: int | None = None) -> CausalGraph:
    """Decide the direction of every unordered pair in ``pool``.

    Pairs are evaluated in parallel; results are assembled in canonical
    (i < j) order, so the graph does not depend on scheduling.
    """
    if len(pool) < 2:
        raise ValueError("a causal graph needs at least two sequences")
    lengths = {len(s) for s in pool}
    if len(lengths) != 1:
        raise LengthMismatch(f"pool sequences differ in length: {sorted(lengths)}")
    arrays = [_as_array(s) for s in pool]
    n = len(arrays)
    workers = workers or os.cpu_count() or 1
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def one_pair(ij):
        i, j = ij
        return _concat(arrays[i], arrays[j]), _concat(arrays[j], arrays[i])

    with ThreadPoolExecutor(max_workers=workers) as ex:
        single = list(ex.map(_complexity, arrays))
        joint = list(ex.map(one_pair, pairs))

    pen = np.zeros((n, n), dtype=np.int64)
    edges, ties = [], []
    for (i, j), (c_ij, c_ji) in zip(pairs, joint):
        pen[i, j] = c_ij - single[j]
        pen[j, i] = c_ji - single[i]
        pp = PenaltyPair(int(pen[i, j]), int(pen[j, i]))
        margin = abs(pp.p_xy - pp.p_yx)
        if pp.decision is Decision.X_CAUSES_Y:
            edges.append((i, j, margin))
        elif pp.decision is Decision.Y_CAUSES_X:
            edges.append((j, i, margin))
        else:
            ties.append((i, j))

    labels = [s.label for s in pool]
    n_mela = sum(1 for lb in labels if lb is not None and lb.group is Group.MELAKARTA)
    n_janya = sum(1 for lb in labels if lb is not None and lb.group is Group.JANYA)
    return CausalGraph(
        nodes=labels,
        edges=edges,
        ties=ties,
        cross_pair_count=cross_pair_count(n_mela, n_janya),
        penalties=pen,
        cycle=_find_cycle(n, edges),
    )


def accuracy_pct(correct: float, evaluated: int) -> float:
    """Share of evaluated cross pairs pointing melakarta -> janya, in percent."""
    if evaluated <= 0:
        raise NoCrossPairs("no melakarta/janya pairs to score")
    return correct / evaluated * 100.0


def causal_accuracy(graph: CausalGraph) -> AccuracyStats:
    E = graph.cross_pair_count
    if E == 0:
        raise NoCrossPairs("graph has no melakarta/janya pairs")
    nodes = graph.nodes
    correct = sum(
        1
        for cause, effect, _ in graph.edges
        if nodes[cause].group is Group.MELAKARTA and nodes[effect].group is Group.JANYA
    )
    cross_ties = sum(1 for i, j in graph.ties if _is_cross(nodes[i], nodes[j]))
    return AccuracyStats(E, correct, accuracy_pct(correct, E), cross_ties)


_DOT_ID = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _dot_id(name: str) -> str:
    if _DOT_ID.match(name):
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def node_names(graph: CausalGraph) -> list[str]:
    names, seen = [], {}
    for i, lb in enumerate(graph.nodes):
        base = lb.composition_name if lb is not None and lb.composition_name else f"n{i}"
        k = seen.get(base, 0)
        seen[base] = k + 1
        names.append(base if k == 0 else f"{base}_{k}")
    return names


def to_dot(graph: CausalGraph, orientation: Orientation | str = Orientation.TOP_DOWN) -> bytes:
    """Graphviz digraph; melakarta nodes are drawn white on black."""
    orientation = Orientation(orientation) if isinstance(orientation, str) else orientation
    names = [_dot_id(x) for x in node_names(graph)]
    lines = ["digraph lzp {", f"  rankdir={orientation.value};"]
    for name, lb in zip(names, graph.nodes):
        if lb is not None and lb.group is Group.MELAKARTA:
            lines.append(f"  {name} [style=filled, fillcolor=black, fontcolor=white];")
        else:
            lines.append(f"  {name};")
    for cause, effect, margin in graph.edges:
        lines.append(f"  {names[cause]} -> {names[effect]} [penalty_margin={margin}];")
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def graph_to_dict(graph: CausalGraph) -> dict:
    names = node_names(graph)
    return {
        "nodes": [
            {
                "name": name,
                "group": lb.group.value if lb else None,
                "origin": lb.origin.value if lb else None,
                "raga_id": lb.raga_id if lb else None,
            }
            for name, lb in zip(names, graph.nodes)
        ],
        "edges": [
            {"cause": names[c], "effect": names[e], "margin": m} for c, e, m in graph.edges
        ],
        "ties": [[names[i], names[j]] for i, j in graph.ties],
        "penalties": graph.penalties.tolist() if graph.penalties is not None else None,
        "cross_pair_count": graph.cross_pair_count,
        "cycle": [names[i] for i in graph.cycle] if graph.cycle else None,
    }
