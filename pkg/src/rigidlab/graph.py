"""Abstract graphs, Laplacians and deterministic generators."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from pathlib import Path

import numpy as np

from rigidlab import linalg
from rigidlab._validation import InvalidInputError, check_positive_int


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``0..n-1``.

    Edges are stored as ``(min, max)`` tuples in the order given; that order
    fixes the row order of rigidity matrices built from this graph.
    """

    n: int
    edges: tuple = ()

    def __post_init__(self):
        n = check_positive_int(self.n, "n")
        normalized = []
        seen = set()
        for edge in self.edges:
            i, j = (int(k) for k in edge)
            if i == j:
                raise InvalidInputError(f"self-loop at vertex {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise InvalidInputError(f"edge ({i}, {j}) out of range for n={n}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise InvalidInputError(f"duplicate edge {key}")
            seen.add(key)
            normalized.append(key)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(normalized))

    @property
    def m(self):
        return len(self.edges)

    @cached_property
    def edge_array(self) -> np.ndarray:
        """``(|E|, 2)`` integer array of the edges in edge order."""
        arr = np.array(self.edges, dtype=int).reshape(-1, 2)
        arr.setflags(write=False)
        return arr

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=int)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def components(self) -> list[list[int]]:
        """Connected components by breadth-first search."""
        adj = [[] for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        seen = [False] * self.n
        out = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            comp, queue = [], [s]
            while queue:
                v = queue.pop(0)
                comp.append(v)
                for w in adj[v]:
                    if not seen[w]:
                        seen[w] = True
                        queue.append(w)
            out.append(sorted(comp))
        return out

    def is_connected(self) -> bool:
        return len(self.components()) <= 1


def laplacian(g: Graph) -> np.ndarray:
    """Combinatorial Laplacian: degrees on the diagonal, -1 per edge."""
    lap = np.zeros((g.n, g.n))
    for i, j in g.edges:
        lap[i, j] = lap[j, i] = -1.0
        lap[i, i] += 1.0
        lap[j, j] += 1.0
    return lap


def algebraic_connectivity(g: Graph):
    """Second-smallest Laplacian eigenvalue and a unit Fiedler vector.

    The eigenvector is taken from the Laplacian compressed to the complement
    of the all-ones vector, so it is orthogonal to the ones vector even when
    the graph is disconnected and the zero eigenvalue is repeated.
    """
    if g.n < 2:
        raise InvalidInputError("algebraic connectivity needs at least 2 vertices")
    ones = np.full((g.n, 1), 1.0 / np.sqrt(g.n))
    value, vec = linalg.min_rayleigh_pair(laplacian(g), ones)
    vec = linalg._fix_signs(vec[:, None])[:, 0]
    return max(value, 0.0), vec


def _lex(edges):
    return tuple(sorted((min(e), max(e)) for e in edges))


def path(n):
    check_positive_int(n, "n")
    return Graph(n, _lex((i, i + 1) for i in range(n - 1)))


def cycle(n):
    check_positive_int(n, "n", minimum=3)
    return Graph(n, _lex([(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]))


def complete(n):
    check_positive_int(n, "n")
    return Graph(n, tuple(combinations(range(n), 2)))


def complete_bipartite(a, b):
    check_positive_int(a, "a")
    check_positive_int(b, "b")
    return Graph(a + b, tuple((i, a + j) for i in range(a) for j in range(b)))


def erdos_renyi(n, prob, seed=None):
    """G(n, prob) with each lexicographic pair kept independently."""
    check_positive_int(n, "n")
    if not 0.0 <= prob <= 1.0:
        raise InvalidInputError(f"prob must lie in [0, 1], got {prob}")
    rng = np.random.default_rng(seed)
    pairs = list(combinations(range(n), 2))
    keep = rng.random(len(pairs)) < prob
    return Graph(n, tuple(p for p, k in zip(pairs, keep) if k))


GENERATORS = {
    "path": path,
    "cycle": cycle,
    "complete": complete,
    "complete_bipartite": complete_bipartite,
    "erdos_renyi": erdos_renyi,
}


def generate(kind: str, *args, **kwargs) -> Graph:
    try:
        factory = GENERATORS[kind]
    except KeyError:
        raise InvalidInputError(f"unknown graph kind {kind!r}") from None
    return factory(*args, **kwargs)


def parse_graph(text: str) -> Graph:
    """Parse the ``n <N>`` / ``i j`` edge-list text format."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise InvalidInputError("empty graph file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "n":
        raise InvalidInputError(f"expected header 'n <N>', got {lines[0]!r}")
    try:
        n = int(head[1])
        edges = []
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 2:
                raise InvalidInputError(f"malformed edge line {ln!r}")
            edges.append((int(parts[0]), int(parts[1])))
    except ValueError as exc:
        raise InvalidInputError(f"malformed graph file: {exc}") from None
    return Graph(n, tuple(edges))


def format_graph(g: Graph) -> str:
    return "".join([f"n {g.n}\n"] + [f"{i} {j}\n" for i, j in g.edges])


def read_graph(path) -> Graph:
    return parse_graph(Path(path).read_text())


def write_graph(g: Graph, path) -> None:
    Path(path).write_text(format_graph(g))
