"""Undirected agent graph, G(n, p) generation and the red agent's rewiring."""
from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np


class AgentGraph:
    """Simple undirected graph over vertices ``0..n-1`` stored as adjacency sets."""

    __slots__ = ("n", "_adj", "_matrix")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 1:
            raise ValueError(f"graph needs at least one vertex, got n={n}")
        self.n = n
        self._adj: list[set[int]] = [set() for _ in range(n)]
        self._matrix: np.ndarray | None = None
        for i, j in edges:
            self.add_edge(i, j)

    def _check(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise IndexError(f"vertex {i} out of range [0, {self.n})")

    def add_edge(self, i: int, j: int) -> None:
        self._check(i)
        self._check(j)
        if i == j:
            raise ValueError(f"self-loop on vertex {i}")
        if j in self._adj[i]:
            raise ValueError(f"duplicate edge ({i}, {j})")
        self._adj[i].add(j)
        self._adj[j].add(i)
        self._matrix = None

    def remove_edge(self, i: int, j: int) -> None:
        self._adj[i].remove(j)
        self._adj[j].remove(i)
        self._matrix = None

    def has_edge(self, i: int, j: int) -> bool:
        return j in self._adj[i]

    def neighbors(self, i: int) -> frozenset[int]:
        self._check(i)
        return frozenset(self._adj[i])

    def degree(self, i: int) -> int:
        self._check(i)
        return len(self._adj[i])

    def edges(self) -> set[tuple[int, int]]:
        return {(i, j) for i in range(self.n) for j in self._adj[i] if i < j}

    def iter_edges(self) -> Iterator[tuple[int, int]]:
        for i in range(self.n):
            for j in sorted(self._adj[i]):
                if i < j:
                    yield i, j

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self._adj) // 2

    def is_connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            for j in self._adj[stack.pop()]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == self.n

    def copy(self) -> "AgentGraph":
        g = AgentGraph.__new__(AgentGraph)
        g.n = self.n
        g._adj = [set(a) for a in self._adj]
        g._matrix = self._matrix
        return g

    def adjacency_matrix(self) -> np.ndarray:
        """Dense ``uint8`` adjacency matrix, cached until the next mutation."""
        if self._matrix is None:
            m = np.zeros((self.n, self.n), dtype=np.uint8)
            for i, nbrs in enumerate(self._adj):
                for j in nbrs:
                    m[i, j] = 1
            m.flags.writeable = False
            self._matrix = m
        return self._matrix

    def to_edge_list(self) -> str:
        """One ``i j`` pair per line, sorted."""
        return "".join(f"{i} {j}\n" for i, j in self.iter_edges())

    @classmethod
    def from_edge_list(cls, n: int, text: str) -> "AgentGraph":
        edges = []
        for line in text.splitlines():
            line = line.strip()
            if line:
                a, b = line.split()
                edges.append((int(a), int(b)))
        return cls(n, edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AgentGraph):
            return NotImplemented
        return self.n == other.n and self._adj == other._adj

    def __repr__(self) -> str:
        return f"AgentGraph(n={self.n}, edges={sorted(self.edges())})"


def generate_random_graph(n: int, p: float, rng: np.random.Generator) -> AgentGraph:
    """Erdos-Renyi G(n, p): every unordered pair is linked independently with probability ``p``.

    Pairs are visited in lexicographic order with one uniform draw each.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return AgentGraph(n, zip(iu[keep].tolist(), ju[keep].tolist()))


def _pick(candidates: list[int], rng: np.random.Generator) -> int:
    return candidates[int(rng.integers(len(candidates)))]


def rewire_red(graph: AgentGraph, red: int, leader: int, rng: np.random.Generator) -> AgentGraph:
    """Move one blue-blue edge so that it lands on the red agent.

    Picks a blue ``a_i`` linked to red, then a blue ``a_j`` linked to ``a_i``,
    breaks ``(a_i, a_j)`` and links red to ``a_j``. If red already reaches
    ``a_j``, the new link goes to a random blue agent red is not linked to.
    Returns a new graph; when no candidate exists at some step the result is
    an unchanged copy. The leader's links are never touched.
    """
    if red == leader:
        raise ValueError("red and leader must be distinct vertices")
    out = graph.copy()
    adj = graph._adj
    excluded = (red, leader)

    first = sorted(v for v in adj[red] if v != leader)
    if not first:
        return out
    a_i = _pick(first, rng)

    second = sorted(v for v in adj[a_i] if v not in excluded)
    if not second:
        return out
    a_j = _pick(second, rng)

    target = a_j
    if a_j in adj[red]:
        free = [v for v in range(graph.n) if v not in excluded and v not in adj[red]]
        if not free:
            return out
        target = _pick(free, rng)

    out.remove_edge(a_i, a_j)
    out.add_edge(red, target)
    return out
