"""Bar-joint frameworks, rigidity and stiffness matrices, trivial motions."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from pathlib import Path

import numpy as np

from rigidlab import linalg
from rigidlab._validation import (
    ConsistencyError,
    InvalidInputError,
    check_points,
    check_positive_float,
)
from rigidlab.graph import Graph

COINCIDENCE_TOL = 1e-12
AFFINE_TOL = 1e-9
RIGIDITY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Configuration:
    """Positions of ``n`` points in ``R^d``; row ``i`` of `points` is ``p_i``."""

    points: np.ndarray

    def __post_init__(self):
        pts = check_points(self.points)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_stacked(cls, p, d):
        return cls(check_points(p, d))

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def d(self):
        return self.points.shape[1]

    @property
    def M(self):
        return self.points

    @property
    def stacked(self):
        return self.points.ravel()

    def transformed(self, rotation=None, shift=None, scale=1.0):
        """Apply ``p_i -> scale * Q p_i + shift`` to every point."""
        pts = self.points
        if rotation is not None:
            pts = pts @ np.asarray(rotation, dtype=float).T
        pts = scale * pts
        if shift is not None:
            pts = pts + np.asarray(shift, dtype=float)
        return Configuration(pts)


def affine_dim(config: Configuration, tol: float = AFFINE_TOL):
    """Dimension of the affine hull of the points, plus its direction if a line.

    Counts singular values of the centered position matrix above
    ``tol * (1 + s_max)``. For ``m == 1`` the unit direction is returned with
    its first nonzero coordinate positive; otherwise the direction is None.
    """
    check_positive_float(tol, "tol")
    pts = config.points if isinstance(config, Configuration) else check_points(config)
    centered = pts - pts.mean(axis=0)
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    smax = s[0] if s.size else 0.0
    m = int(np.sum(s > tol * (1.0 + smax)))
    if m != 1:
        return m, None
    x = vt[0] / np.linalg.norm(vt[0])
    nz = np.flatnonzero(np.abs(x) > 1e-12)
    if x[nz[0]] < 0:
        x = -x
    return 1, x


def trivial_dimension(d: int, m: int) -> int:
    return (m + 1) * (2 * d - m) // 2


@dataclass(frozen=True, eq=False)
class Framework:
    """A graph realized in ``R^d``.

    Derived quantities (affine dimension ``m``, trivial dimension ``D``, edge
    directions, rigidity and stiffness matrices) are computed lazily and
    cached; the instance is otherwise immutable.
    """

    graph: Graph
    config: Configuration
    coincidence_tol: float = COINCIDENCE_TOL
    affine_tol: float = AFFINE_TOL

    def __post_init__(self):
        if not isinstance(self.config, Configuration):
            object.__setattr__(self, "config", Configuration(self.config))
        if self.config.n != self.graph.n:
            raise InvalidInputError(
                f"configuration has {self.config.n} points but graph has {self.graph.n} vertices"
            )
        check_positive_float(self.coincidence_tol, "coincidence_tol")
        check_positive_float(self.affine_tol, "affine_tol")

    @property
    def n(self):
        return self.graph.n

    @property
    def d(self):
        return self.config.d

    @cached_property
    def _affine(self):
        return affine_dim(self.config, self.affine_tol)

    @property
    def m(self) -> int:
        return self._affine[0]

    @property
    def line_direction(self):
        return self._affine[1]

    @property
    def D(self) -> int:
        return trivial_dimension(self.d, self.m)

    @cached_property
    def _threshold(self):
        scale = np.max(np.linalg.norm(self.config.points, axis=1)) if self.n else 0.0
        return self.coincidence_tol * (1.0 + scale)

    def coincident(self, i, j) -> bool:
        diff = self.config.points[i] - self.config.points[j]
        return bool(np.linalg.norm(diff) <= self._threshold)

    def edge_direction(self, i, j) -> np.ndarray:
        """Unit direction of ``p_i - p_j`` with the degenerate-case rule.

        Coincident endpoints get the spanning line direction when the
        points are collinear (``m == 1``) and the zero vector otherwise.
        """
        diff = self.config.points[i] - self.config.points[j]
        norm = np.linalg.norm(diff)
        if norm > self._threshold:
            return diff / norm
        if self.m == 1:
            return self.line_direction.copy()
        return np.zeros(self.d)

    @cached_property
    def directions(self) -> np.ndarray:
        """``(|E|, d)`` array of edge directions in edge order."""
        out = np.zeros((self.graph.m, self.d))
        if self.graph.m:
            ij = self.graph.edge_array
            diff = self.config.points[ij[:, 0]] - self.config.points[ij[:, 1]]
            norms = np.linalg.norm(diff, axis=1)
            apart = norms > self._threshold
            out[apart] = diff[apart] / norms[apart, None]
            if not apart.all() and self.m == 1:
                out[~apart] = self.line_direction
        out.setflags(write=False)
        return out

    def rigidity_matrix(self) -> np.ndarray:
        return rigidity_matrix(self)

    def stiffness_matrix(self) -> np.ndarray:
        return stiffness_matrix(self)

    def with_config(self, config):
        return Framework(self.graph, config, self.coincidence_tol, self.affine_tol)


def rigidity_matrix(fw: Framework) -> np.ndarray:
    """Normalized rigidity matrix, one row per edge in edge order."""
    E = fw.graph.m
    R = np.zeros((E, fw.n, fw.d))
    if E:
        ij = fw.graph.edge_array
        rows = np.arange(E)
        R[rows, ij[:, 0]] = fw.directions
        R[rows, ij[:, 1]] = -fw.directions
    return R.reshape(E, fw.n * fw.d)


def stiffness_matrix(fw: Framework) -> np.ndarray:
    """``R^T R`` for the framework's rigidity matrix ``R``."""
    R = rigidity_matrix(fw)
    L = R.T @ R
    return 0.5 * (L + L.T)


def stiffness_blocks(fw: Framework) -> np.ndarray:
    """Stiffness matrix assembled block by block.

    Off-diagonal block ``(i, j)`` is ``-delta delta^T`` for an edge and zero
    otherwise; each diagonal block is minus the sum of its row's
    off-diagonal blocks.
    """
    n, d = fw.n, fw.d
    blocks = np.zeros((n, n, d, d))
    for i, j in fw.graph.edges:
        delta = fw.edge_direction(i, j)
        blocks[i, j] = blocks[j, i] = -np.outer(delta, delta)
    for i in range(n):
        blocks[i, i] = -blocks[i].sum(axis=0)
    return blocks.transpose(0, 2, 1, 3).reshape(n * d, n * d)


def stiffness_spectrum(fw: Framework) -> linalg.Spectrum:
    return linalg.eigh(stiffness_matrix(fw))


@dataclass(frozen=True)
class TrivialBasis:
    """Orthonormal basis (columns of `vectors`) of the rigid-motion space.

    `generators` names the generating vectors that survived
    orthonormalization: ``("t", k)`` for a translation along axis ``k`` and
    ``("r", k, l)`` for a rotation in the ``(k, l)`` coordinate plane.
    """

    vectors: np.ndarray
    generators: tuple

    def __len__(self):
        return self.vectors.shape[1]


def trivial_generators(config: Configuration):
    """Translations ``1_n (x) e_k`` and rotations ``(I_n (x) A_kl) p``.

    ``A_kl = E_kl - E_lk`` so the rotation moves ``p_i`` by ``p_i[l]`` along
    axis ``k`` and by ``-p_i[k]`` along axis ``l``.
    """
    n, d = config.n, config.d
    pts = config.points
    vectors, labels = [], []
    for k in range(d):
        t = np.zeros((n, d))
        t[:, k] = 1.0
        vectors.append(t.ravel())
        labels.append(("t", k))
    for k, l in combinations(range(d), 2):
        r = np.zeros((n, d))
        r[:, k] = pts[:, l]
        r[:, l] = -pts[:, k]
        vectors.append(r.ravel())
        labels.append(("r", k, l))
    return vectors, labels


def trivial_basis(fw: Framework, tol: float = linalg.DROP_TOL) -> TrivialBasis:
    vectors, labels = trivial_generators(fw.config)
    kept, kept_labels = [], []
    basis = np.zeros((fw.d * fw.n, 0))
    # orthonormalize incrementally so the surviving generators can be named
    for v, label in zip(vectors, labels):
        cand = linalg.orthonormalize(list(basis.T) + [v], tol)
        if cand.shape[1] > basis.shape[1]:
            basis = cand
            kept_labels.append(label)
    if basis.shape[1] != fw.D:
        raise ConsistencyError(
            f"trivial basis has {basis.shape[1]} vectors, expected D={fw.D} (m={fw.m}, d={fw.d})"
        )
    return TrivialBasis(basis, tuple(kept_labels))


def rigidity_eigenvalue(fw: Framework) -> float:
    """The ``(D+1)``-th smallest stiffness eigenvalue."""
    if fw.d * fw.n <= fw.D:
        raise InvalidInputError(f"d*n={fw.d * fw.n} leaves no eigenvalue above index D={fw.D}")
    return float(linalg.eigvalsh(stiffness_matrix(fw))[fw.D])


def is_infinitesimally_rigid(fw: Framework, tol: float = RIGIDITY_TOL) -> bool:
    return rigidity_eigenvalue(fw) > tol


def parse_configuration(text: str) -> Configuration:
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise InvalidInputError("empty configuration file")
    try:
        pts = [[float(c) for c in r] for r in rows]
    except ValueError as exc:
        raise InvalidInputError(f"malformed configuration file: {exc}") from None
    if len({len(r) for r in pts}) != 1:
        raise InvalidInputError("configuration rows have differing lengths")
    return Configuration(np.array(pts))


def format_configuration(config: Configuration) -> str:
    return "".join(",".join(format(x, ".17g") for x in row) + "\n" for row in config.points)


def read_configuration(path) -> Configuration:
    return parse_configuration(Path(path).read_text())


def write_configuration(config: Configuration, path) -> None:
    Path(path).write_text(format_configuration(config))
