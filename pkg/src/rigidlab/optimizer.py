"""Lower-bounding the d-dimensional algebraic connectivity.

The rigidity eigenvalue is maximized over configurations by multi-restart
ascent. Every configuration visited gives a valid lower bound; the
classical algebraic connectivity is reported alongside as the upper bound.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from rigidlab import linalg
from rigidlab._validation import (
    InvalidInputError,
    check_positive_float,
    check_positive_int,
)
from rigidlab.graph import Graph, algebraic_connectivity
from rigidlab.rigidity import Configuration, Framework, rigidity_eigenvalue, stiffness_matrix

logger = logging.getLogger(__name__)

GRADIENT_MODES = ("analytic", "finite_difference")
SIMPLE_GAP = 1e-7
VIOLATION_TOL = 1e-8


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 20
    seed: int = 0
    max_iters: int = 500
    gradient: str = "analytic"
    fd_step: float = 1e-6
    initial_step: float = 0.1
    min_step: float = 1e-9
    improvement_tol: float = 1e-10
    patience: int = 10

    def __post_init__(self):
        check_positive_int(self.restarts, "restarts")
        check_positive_int(self.max_iters, "max_iters")
        check_positive_int(self.patience, "patience")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)):
            raise InvalidInputError(f"seed must be an integer, got {self.seed!r}")
        if not 0 <= self.seed < 2**64:
            raise InvalidInputError("seed must fit in 64 unsigned bits")
        if self.gradient not in GRADIENT_MODES:
            raise InvalidInputError(f"gradient must be one of {GRADIENT_MODES}")
        for name in ("fd_step", "initial_step", "min_step", "improvement_tol"):
            check_positive_float(getattr(self, name), name)


def _framework(graph, p, d):
    return Framework(graph, Configuration.from_stacked(p, d))


def objective(graph: Graph, p, d: int) -> float:
    """Rigidity eigenvalue of ``graph`` at the stacked configuration `p`.

    The trivial dimension is recomputed from the affine dimension of `p`
    on every call, so the objective jumps where that dimension changes.
    """
    return rigidity_eigenvalue(_framework(graph, p, d))


def _gap(values, k):
    gaps = [values[k] - values[k - 1]] if k > 0 else []
    if k + 1 < len(values):
        gaps.append(values[k + 1] - values[k])
    return float(min(gaps)) if gaps else np.inf


def eigen_gap(graph: Graph, p, d: int) -> float:
    """Distance from the rigidity eigenvalue to its nearest neighbours."""
    fw = _framework(graph, p, d)
    return _gap(linalg.eigvalsh(stiffness_matrix(fw)), fw.D)


def _analytic_gradient(fw: Framework, u=None) -> np.ndarray:
    if u is None:
        u = linalg.eigh(stiffness_matrix(fw)).vectors[:, fw.D]
    u = u.reshape(fw.n, fw.d)
    grad = np.zeros((fw.n, fw.d))
    if fw.graph.m == 0:
        return grad.ravel()
    ij = fw.graph.edge_array
    e = fw.config.points[ij[:, 0]] - fw.config.points[ij[:, 1]]
    r = np.linalg.norm(e, axis=1)
    delta = e / r[:, None]
    w = u[ij[:, 0]] - u[ij[:, 1]]
    s = np.sum(delta * w, axis=1)
    # d/de of (delta . w)^2 with delta = e / |e|
    ge = 2.0 * s[:, None] * (w - s[:, None] * delta) / r[:, None]
    np.add.at(grad, ij[:, 0], ge)
    np.add.at(grad, ij[:, 1], -ge)
    return grad.ravel()


def _fd_gradient(graph, p, d, rel_step):
    h = rel_step * max(1.0, float(np.max(np.abs(p))))
    grad = np.zeros_like(p)
    for k in range(p.size):
        e = np.zeros_like(p)
        e[k] = h
        grad[k] = (objective(graph, p + e, d) - objective(graph, p - e, d)) / (2.0 * h)
    return grad


def _has_coincident_edge(fw: Framework) -> bool:
    if not fw.graph.m:
        return False
    ij = fw.graph.edge_array
    pts = fw.config.points
    dist = np.linalg.norm(pts[ij[:, 0]] - pts[ij[:, 1]], axis=1)
    return bool(np.any(dist <= fw._threshold))


def _perturb(p):
    scale = max(1.0, float(np.max(np.abs(p))))
    return p + 1e-6 * scale * np.random.default_rng(0).standard_normal(p.size)


def gradient(graph: Graph, p, d: int, mode: str = "finite_difference",
             fd_step: float = 1e-6) -> np.ndarray:
    """Gradient of :func:`objective` with respect to the stacked configuration.

    ``"finite_difference"`` uses central differences with step
    ``fd_step * max(1, ||p||_inf)``. ``"analytic"`` uses first-order
    eigenvalue perturbation ``u' (dL/dp) u``. Both assume the rigidity
    eigenvalue is simple. If two adjacent vertices coincide the derivative
    of their edge direction does not exist; the configuration is then
    perturbed by ``1e-6 * scale`` (fixed seed) and the gradient taken there.
    """
    if mode not in GRADIENT_MODES:
        raise InvalidInputError(f"gradient mode must be one of {GRADIENT_MODES}")
    p = np.asarray(p, dtype=float).ravel()
    fw = _framework(graph, p, d)
    if _has_coincident_edge(fw):
        p = _perturb(p)
        fw = _framework(graph, p, d)
    if mode == "analytic":
        return _analytic_gradient(fw)
    return _fd_gradient(graph, p, d, fd_step)


def _probe(graph, p, d, cfg):
    """Gap and ascent gradient at `p`, sharing one eigendecomposition."""
    fw = _framework(graph, p, d)
    if _has_coincident_edge(fw):
        return 0.0, None
    if cfg.gradient == "analytic":
        values, vectors = np.linalg.eigh(stiffness_matrix(fw))
        gap = _gap(values, fw.D)
        if gap <= SIMPLE_GAP:
            return gap, None
        return gap, _analytic_gradient(fw, vectors[:, fw.D])
    gap = _gap(linalg.eigvalsh(stiffness_matrix(fw)), fw.D)
    if gap <= SIMPLE_GAP:
        return gap, None
    return gap, _fd_gradient(graph, p, d, cfg.fd_step)


def _gauge(p, n, d):
    pts = p.reshape(n, d)
    pts = pts - pts.mean(axis=0)
    norm = np.linalg.norm(pts)
    if norm == 0.0:
        return pts.ravel()
    return (pts * (np.sqrt(n) / norm)).ravel()


def _tangent(g, p, n, d):
    g = g.reshape(n, d)
    g = (g - g.mean(axis=0)).ravel()
    norm2 = p @ p
    if norm2 > 0:
        g = g - (g @ p) / norm2 * p
    return g


def _ascend(graph, d, p, cfg: OptimizerConfig):
    n = graph.n
    p = _gauge(p, n, d)
    value = objective(graph, p, d)
    step = cfg.initial_step
    stall = 0
    it = 0
    for it in range(1, cfg.max_iters + 1):
        best_p, best_val = None, value
        _, g = _probe(graph, p, d, cfg)
        if g is not None:
            g = _tangent(g, p, n, d)
            gnorm = np.linalg.norm(g)
            if gnorm > 0:
                cand = _gauge(p + step * g / gnorm, n, d)
                val = objective(graph, cand, d)
                if val > best_val:
                    best_p, best_val = cand, val
        if best_p is None:
            # coordinate search: the eigenvalue is clustered or the gradient step failed
            for k in range(2 * p.size):
                cand = p.copy()
                cand[k // 2] += step if k % 2 == 0 else -step
                cand = _gauge(cand, n, d)
                val = objective(graph, cand, d)
                if val > best_val:
                    best_p, best_val = cand, val
                    break
        if best_p is None:
            step *= 0.5
            gain = 0.0
        else:
            gain = best_val - value
            p, value = best_p, best_val
        stall = stall + 1 if gain < cfg.improvement_tol else 0
        if stall >= cfg.patience or step < cfg.min_step:
            break
    return p, value, it


@dataclass
class EstimateResult:
    best_value: float
    best_config: np.ndarray
    d: int
    n: int
    algebraic_connectivity: float
    per_restart: list = field(default_factory=list)
    best_restart: int = 0

    @property
    def certificate(self) -> float:
        """Gap between the upper bound ``a_1`` and the achieved lower bound."""
        return self.algebraic_connectivity - self.best_value

    @property
    def violation(self) -> bool:
        return self.best_value > self.algebraic_connectivity + VIOLATION_TOL

    @property
    def restarts(self) -> int:
        return len(self.per_restart)

    def to_dict(self):
        return {
            "best_value": self.best_value,
            "certificate": self.certificate,
            "algebraic_connectivity": self.algebraic_connectivity,
            "violation": self.violation,
            "d": self.d,
            "n": self.n,
            "restarts": self.restarts,
            "best_restart": self.best_restart,
            "best_config": self.best_config.tolist(),
            "per_restart": self.per_restart,
        }


def restart_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for restart `index`; independent of the total restart count."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def estimate_ad(graph: Graph, d: int, cfg: OptimizerConfig | None = None, init=None) -> EstimateResult:
    """Multi-restart ascent of the rigidity eigenvalue.

    Restart ``k`` starts from a standard Gaussian configuration drawn from
    :func:`restart_rng`, centered and scaled to norm ``sqrt(n)``. If `init`
    is given it replaces the starting point of restart 0. Ties between
    restarts go to the lowest index.
    """
    cfg = cfg or OptimizerConfig()
    d = check_positive_int(d, "d")
    if not isinstance(graph, Graph):
        raise InvalidInputError("graph must be a Graph")
    if graph.n < 2:
        raise InvalidInputError("need at least 2 vertices")
    a1, _ = algebraic_connectivity(graph)
    best = None
    trace = []
    for k in range(cfg.restarts):
        if k == 0 and init is not None:
            p0 = np.asarray(init, dtype=float).ravel()
            if p0.size != graph.n * d:
                raise InvalidInputError("init has the wrong size")
        else:
            p0 = restart_rng(cfg.seed, k).standard_normal(graph.n * d)
        p, value, iters = _ascend(graph, d, p0, cfg)
        trace.append({"restart": k, "value": value, "iterations": iters})
        if best is None or value > best[1]:
            best = (k, value, p)
    k, value, p = best
    # recompute independently from the stored configuration
    value = objective(graph, p, d)
    result = EstimateResult(max(value, 0.0), p.reshape(graph.n, d), d, graph.n, a1, trace, k)
    if result.violation:
        logger.error(
            "rigidity eigenvalue %.12g exceeds algebraic connectivity %.12g", result.best_value, a1
        )
    return result


class RigidityEmbedding(BaseEstimator):
    """Embed a graph in ``R^d`` so its rigidity eigenvalue is as large as found.

    Parameters mirror :class:`OptimizerConfig`. After :meth:`fit`,
    ``embedding_`` holds the best configuration (``n x d``),
    ``rigidity_eigenvalue_`` the lower bound it certifies,
    ``algebraic_connectivity_`` the upper bound and ``result_`` the full
    :class:`EstimateResult`.
    """

    def __init__(self, n_components=2, restarts=20, seed=0, max_iters=500,
                 gradient="analytic", fd_step=1e-6):
        self.n_components = n_components
        self.restarts = restarts
        self.seed = seed
        self.max_iters = max_iters
        self.gradient = gradient
        self.fd_step = fd_step

    def _config(self):
        return OptimizerConfig(
            restarts=self.restarts,
            seed=self.seed,
            max_iters=self.max_iters,
            gradient=self.gradient,
            fd_step=self.fd_step,
        )

    def fit(self, X, y=None):
        graph = X if isinstance(X, Graph) else Graph(*X)
        self.result_ = estimate_ad(graph, self.n_components, self._config())
        self.embedding_ = self.result_.best_config
        self.rigidity_eigenvalue_ = self.result_.best_value
        self.algebraic_connectivity_ = self.result_.algebraic_connectivity
        self.n_features_in_ = graph.n
        return self

    def fit_transform(self, X, y=None):
        return self.fit(X).embedding_
