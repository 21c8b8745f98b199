"""Random graphs and configurations for property checks and fuzzing."""
import numpy as np

from rigidlab.graph import Graph, algebraic_connectivity, erdos_renyi
from rigidlab.rigidity import Configuration, Framework

CONFIG_KINDS = ("generic", "flat", "collinear", "coincident")


def random_unit(rng, d):
    x = rng.standard_normal(d)
    return x / np.linalg.norm(x)


def random_rotation(rng, d):
    """Haar-distributed special orthogonal ``d x d`` matrix."""
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_graph(rng, n, connected=None):
    """Erdos-Renyi graph with a random edge probability.

    ``connected=True`` resamples until connected (a spanning path is added
    after a few misses); ``connected=False`` splits the vertices into two
    groups with no edges between them.
    """
    if connected is False and n >= 2:
        cut = int(rng.integers(1, n))
        prob = rng.uniform(0.3, 1.0)
        a = erdos_renyi(cut, prob, int(rng.integers(2**32)))
        b = erdos_renyi(n - cut, prob, int(rng.integers(2**32)))
        return Graph(n, a.edges + tuple((i + cut, j + cut) for i, j in b.edges))
    for _ in range(10):
        g = erdos_renyi(n, rng.uniform(0.2, 1.0), int(rng.integers(2**32)))
        if connected is None or g.is_connected():
            return g
    path = {(i, i + 1) for i in range(n - 1)}
    return Graph(n, tuple(sorted(set(g.edges) | path)))


def random_configuration(rng, n, d, kind="generic"):
    """Points of a given kind.

    ``flat`` lies in a random affine subspace of dimension below ``d``,
    ``collinear`` on a random line (with some repeated points), and
    ``coincident`` is generic apart from a few repeated points.
    """
    if kind == "generic":
        pts = rng.standard_normal((n, d))
    elif kind == "flat":
        m = int(rng.integers(0, d)) if d > 1 else 0
        basis = rng.standard_normal((m, d))
        pts = rng.standard_normal(d) + rng.standard_normal((n, m)) @ basis
    elif kind == "collinear":
        x = random_unit(rng, d)
        t = rng.standard_normal(n)
        repeat = rng.random(n) < 0.3
        t[repeat] = t[0]
        if n >= 2 and np.all(t == t[0]):
            t[-1] = t[0] + 1.0
        pts = rng.standard_normal(d) + np.outer(t, x)
    elif kind == "coincident":
        pts = rng.standard_normal((n, d))
        for i in range(1, n):
            if rng.random() < 0.3:
                pts[i] = pts[int(rng.integers(0, i))]
    else:
        raise ValueError(f"unknown configuration kind {kind!r}")
    return Configuration(pts * rng.uniform(0.5, 3.0))


def random_framework(rng, max_n=10, max_d=4, min_n=2, connected=None, kind=None):
    n = int(rng.integers(min_n, max_n + 1))
    d = int(rng.integers(1, max_d + 1))
    if connected is None:
        connected = bool(rng.random() < 0.75)
    kind = kind or CONFIG_KINDS[int(rng.integers(len(CONFIG_KINDS)))]
    g = random_graph(rng, n, connected)
    return Framework(g, random_configuration(rng, n, d, kind))


def degenerate_witness_framework(rng, graph, d):
    """Configuration whose position matrix is orthogonal to the Fiedler vector.

    Every column of ``M`` has the Fiedler vector projected out, so
    ``M^T v = 0`` and the witness rotation degenerates to the identity.
    """
    _, v = algebraic_connectivity(graph)
    M = rng.standard_normal((graph.n, d))
    M = M - np.outer(v, v @ M)
    return Framework(graph, Configuration(M))
