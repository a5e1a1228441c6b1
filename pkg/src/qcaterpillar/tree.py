"""Rooted trees and caterpillar shapes.

A caterpillar shape is the sequence of stalk-interior degrees
``(m_1, ..., m_{r-1})``; the two stalk ends have degree 1 and the root is
the first end, vertex 0.
"""
from __future__ import annotations

import heapq
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InvalidShape, InvalidTree, NotCaterpillar, RootNotStalkEnd


@dataclass(frozen=True, order=True)
class CaterpillarShape:
    interior_degrees: tuple[int, ...] = ()

    def __post_init__(self):
        degs = tuple(int(m) for m in self.interior_degrees)
        object.__setattr__(self, "interior_degrees", degs)
        bad = [m for m in degs if m < 2]
        if bad:
            raise InvalidShape(f"interior degrees must be >= 2, got {bad}")

    @classmethod
    def of(cls, *degrees: int) -> "CaterpillarShape":
        return cls(tuple(degrees))

    @property
    def vertex_count(self) -> int:
        # (r + 1) stalk vertices plus m_i - 2 leaves per interior vertex
        return len(self.interior_degrees) + 2 + sum(m - 2 for m in self.interior_degrees)

    @property
    def edge_count(self) -> int:
        return self.vertex_count - 1

    def reversed(self) -> "CaterpillarShape":
        return CaterpillarShape(self.interior_degrees[::-1])

    def canonical(self) -> "CaterpillarShape":
        """Representative of the unrooted isomorphism class (min of the sequence and its reversal)."""
        return min(self, self.reversed())

    def __len__(self) -> int:
        return len(self.interior_degrees)

    def __iter__(self):
        return iter(self.interior_degrees)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.interior_degrees)) + ")"

    def to_json(self) -> dict:
        return {"interior_degrees": list(self.interior_degrees)}

    @classmethod
    def from_json(cls, obj: dict) -> "CaterpillarShape":
        return cls(tuple(obj["interior_degrees"]))

    @classmethod
    def parse(cls, text: str) -> "CaterpillarShape":
        """Parse ``"5,3,2,4"``; an empty string or ``"()"`` is the single edge."""
        text = text.strip().strip("()[]").strip()
        if not text:
            return cls(())
        try:
            return cls(tuple(int(t) for t in text.split(",")))
        except ValueError as exc:
            raise InvalidShape(f"cannot parse degree list {text!r}") from exc


@dataclass(frozen=True)
class Tree:
    """Tree on vertices 0..p-1; vertex 0 is the root."""

    p: int
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        p = int(self.p)
        edges = tuple((int(a), int(b)) for a, b in self.edges)
        object.__setattr__(self, "edges", edges)
        if p < 1:
            raise InvalidTree("a tree needs at least one vertex")
        if len(edges) != p - 1:
            raise InvalidTree(f"{p} vertices need {p - 1} edges, got {len(edges)}")
        adj: list[list[int]] = [[] for _ in range(p)]
        for a, b in edges:
            if not (0 <= a < p and 0 <= b < p) or a == b:
                raise InvalidTree(f"bad edge ({a}, {b})")
            adj[a].append(b)
            adj[b].append(a)
        object.__setattr__(self, "adjacency", tuple(tuple(x) for x in adj))
        if len(self.bfs_distances(0)) != p or any(len(set(x)) != len(x) for x in adj):
            raise InvalidTree("graph is not connected or has multi-edges")

    @property
    def degrees(self) -> list[int]:
        return [len(n) for n in self.adjacency]

    def adjacency_matrix(self) -> list[list[int]]:
        a = [[0] * self.p for _ in range(self.p)]
        for u, v in self.edges:
            a[u][v] = a[v][u] = 1
        return a

    def bfs_distances(self, source: int) -> dict[int, int]:
        dist = {source: 0}
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for v in self.adjacency[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist

    def to_json(self) -> dict:
        return {"p": self.p, "edges": [list(e) for e in self.edges], "root": 0}

    @classmethod
    def from_json(cls, obj: dict) -> "Tree":
        if obj.get("root", 0) != 0:
            raise InvalidTree("root must be vertex 0")
        return cls(obj["p"], tuple(tuple(e) for e in obj["edges"]))

    @classmethod
    def from_parents(cls, parents: Sequence[int]) -> "Tree":
        """Tree where vertex i > 0 hangs off ``parents[i - 1]``."""
        return cls(len(parents) + 1, tuple((parent, i + 1) for i, parent in enumerate(parents)))


def shape_to_tree(shape: CaterpillarShape) -> Tree:
    """Stalk v_0..v_r gets indices 0..r; leaves follow, grouped by parent in stalk order."""
    degs = shape.interior_degrees
    r = len(degs) + 1
    edges = [(i, i + 1) for i in range(r)]
    nxt = r + 1
    for i, m in enumerate(degs, start=1):
        for _ in range(m - 2):
            edges.append((i, nxt))
            nxt += 1
    return Tree(nxt, tuple(edges))


def tree_to_shape(tree: Tree) -> CaterpillarShape:
    """Read the stalk-interior degrees off a caterpillar rooted at a stalk end."""
    deg = tree.degrees
    if tree.p == 1:
        raise InvalidTree("single vertex has no stalk")
    spine = {v for v in range(tree.p) if deg[v] > 1}
    for v in spine:
        if sum(1 for u in tree.adjacency[v] if u in spine) > 2:
            raise NotCaterpillar(f"vertex {v} branches off the central path")
    if deg[0] != 1:
        raise RootNotStalkEnd(f"root has degree {deg[0]}")
    if not spine:
        return CaterpillarShape(())
    (start,) = tree.adjacency[0]
    if sum(1 for u in tree.adjacency[start] if u in spine) > 1:
        raise RootNotStalkEnd("root hangs off an interior stalk vertex")
    # walk the spine path from the root's neighbour
    order = [start]
    prev, cur = None, start
    while True:
        step = [u for u in tree.adjacency[cur] if u in spine and u != prev]
        if not step:
            break
        prev, cur = cur, step[0]
        order.append(cur)
    return CaterpillarShape(tuple(deg[v] for v in order))


def enumerate_shapes(p: int) -> list[CaterpillarShape]:
    """All rooted shapes on p vertices in lexicographic order.

    These are the compositions of p - 2 with parts m_i - 1.
    """
    if p < 2:
        raise ValueError("p must be >= 2")
    n = p - 2
    out: list[tuple[int, ...]] = []

    def rec(remaining: int, prefix: list[int]):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for part in range(1, remaining + 1):
            prefix.append(part + 1)
            rec(remaining - part, prefix)
            prefix.pop()

    rec(n, [])
    return [CaterpillarShape(t) for t in sorted(out)]


def random_shape(p: int, seed: int) -> CaterpillarShape:
    """Uniform draw from ``enumerate_shapes(p)`` (each composition gap is a fair coin)."""
    if p < 2:
        raise ValueError("p must be >= 2")
    n = p - 2
    if n == 0:
        return CaterpillarShape(())
    rng = random.Random(seed)
    parts, run = [], 1
    for _ in range(n - 1):
        if rng.getrandbits(1):
            parts.append(run)
            run = 1
        else:
            run += 1
    parts.append(run)
    return CaterpillarShape(tuple(x + 1 for x in parts))


def random_tree(p: int, seed: int) -> Tree:
    """Random labelled tree on p vertices (uniform via Pruefer code), vertex 0 as root."""
    rng = random.Random(seed)
    if p == 1:
        return Tree(1, ())
    if p == 2:
        return Tree(2, ((0, 1),))
    code = [rng.randrange(p) for _ in range(p - 2)]
    degree = [1] * p
    for x in code:
        degree[x] += 1
    edges = []
    leaves = [i for i in range(p) if degree[i] == 1]
    heapq.heapify(leaves)
    for x in code:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, v))
    return Tree(p, tuple(edges))


def shapes_up_to(p_max: int) -> Iterable[CaterpillarShape]:
    for p in range(2, p_max + 1):
        yield from enumerate_shapes(p)
