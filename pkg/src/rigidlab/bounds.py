"""Numerical checks of the spectral inequalities relating stiffness matrices
to the graph Laplacian, and the rotation that makes the lifted Fiedler
vector orthogonal to every rigid motion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from rigidlab import linalg
from rigidlab._validation import InvalidInputError, OutOfDomainError
from rigidlab.graph import algebraic_connectivity, laplacian
from rigidlab.rigidity import (
    Framework,
    rigidity_eigenvalue,
    stiffness_matrix,
    trivial_basis,
    trivial_dimension,
)

BOUND_TOL = 1e-9
LEMMA1_IDENTITY_TOL = 1e-10
WITNESS_TOL = 1e-9


@dataclass
class BoundReport:
    """One evaluated inequality ``lhs <= rhs``.

    ``holds`` is ``margin >= -tol``. A skipped check (hypothesis not met)
    has ``lhs``, ``rhs``, ``margin`` and ``holds`` set to None and the reason
    in ``context["skipped"]``.
    """

    name: str
    lhs: float | None
    rhs: float | None
    tol: float = BOUND_TOL
    context: dict = field(default_factory=dict)
    margin: float | None = field(init=False)
    holds: bool | None = field(init=False)

    def __post_init__(self):
        if self.lhs is None or self.rhs is None:
            self.margin = None
            self.holds = None
        else:
            self.lhs = float(self.lhs)
            self.rhs = float(self.rhs)
            self.margin = self.rhs - self.lhs
            self.holds = bool(self.margin >= -self.tol)

    @classmethod
    def skipped(cls, name, reason, **context):
        return cls(name, None, None, context={**context, "skipped": reason})

    @property
    def failed(self):
        return self.holds is False

    def to_dict(self):
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "holds": self.holds,
            "context": _jsonable(self.context),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        obj = float(obj)
        return obj if math.isfinite(obj) else None
    return obj


def _context(fw: Framework, **extra):
    return {"d": fw.d, "n": fw.n, "m": fw.m, "D": fw.D, **extra}


def lemma1_check(fw: Framework, tol: float = BOUND_TOL,
                 identity_tol: float = LEMMA1_IDENTITY_TOL) -> BoundReport:
    """Collinear frameworks: stiffness matrix equals ``Lap (x) x x^T``.

    ``lhs`` is the largest of three deviations: the entrywise identity gap,
    the gap between ``lambda_{z+i}(L)`` and ``lambda_i(Lap)`` (with the first
    ``z = (d-1)n`` stiffness eigenvalues compared against zero), and the
    distance between ``u_{z+i}`` and ``+-v_i (x) x`` for Laplacian
    eigenvalues that are simple in both spectra. ``rhs`` is 0.
    """
    if fw.m > 1:
        raise InvalidInputError(f"points span an affine space of dimension {fw.m} > 1")
    if fw.m == 0:
        return BoundReport.skipped(
            "lemma1", "all points coincide; no spanning direction", **_context(fw)
        )
    x = fw.line_direction
    lap = laplacian(fw.graph)
    L = stiffness_matrix(fw)
    identity_dev = float(np.max(np.abs(L - linalg.kron(lap, np.outer(x, x)))))

    z = (fw.d - 1) * fw.n
    stiff = linalg.eigh(L)
    lap_spec = linalg.eigh(lap)
    expected = np.concatenate([np.zeros(z), lap_spec.values])
    spectrum_dev = float(np.max(np.abs(stiff.values - expected)))

    scale = 1.0 + float(np.max(np.abs(lap_spec.values)))
    eigvec_dev = 0.0
    checked = []
    for i, lam in enumerate(lap_spec.values):
        # simple and nonzero, so the paired stiffness eigenvector is unique up to sign
        gaps = np.abs(expected - lam)
        gaps[z + i] = np.inf
        if np.min(gaps) <= 1e-6 * scale:
            continue
        target = np.kron(lap_spec.vectors[:, i], x)
        u = stiff.vectors[:, z + i]
        sign = 1.0 if u @ target >= 0 else -1.0
        eigvec_dev = max(eigvec_dev, float(np.linalg.norm(u - sign * target)))
        checked.append(i)

    lhs = max(identity_dev, spectrum_dev, eigvec_dev)
    ctx = _context(
        fw,
        z=z,
        line_direction=x,
        identity_deviation=identity_dev,
        identity_ok=identity_dev <= identity_tol,
        spectrum_deviation=spectrum_dev,
        eigenvector_deviation=eigvec_dev,
        eigenvector_indices=checked,
    )
    report = BoundReport("lemma1", lhs, 0.0, tol, ctx)
    if not ctx["identity_ok"]:
        report.holds = False
    return report


def edges_aligned(fw: Framework, x, edge_mask=None, tol: float = 1e-9) -> bool:
    """True when every (selected) edge direction equals ``+x`` or ``-x``."""
    x = np.asarray(x, dtype=float)
    dirs = fw.directions
    if edge_mask is not None:
        dirs = dirs[np.asarray(edge_mask, dtype=bool)]
    if dirs.shape[0] == 0:
        return True
    return bool(np.all(1.0 - np.abs(dirs @ x) <= tol))


def lemma2_check(fw: Framework, x, v, tol: float = 1e-10, eq_tol: float = 1e-9) -> BoundReport:
    """Quadratic forms of ``u = v (x) x``: ``u'L(p)u <= v' Lap v``.

    Equality is flagged when the two sides agree within
    ``eq_tol * (1 + rhs)`` and cross-checked against edge alignment: the
    forms agree exactly when every edge whose endpoints carry different
    ``v`` values is parallel to ``x``.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.shape != (fw.d,) or abs(np.linalg.norm(x) - 1.0) > 1e-12:
        raise InvalidInputError("x must be a unit vector in R^d")
    if v.shape != (fw.n,):
        raise InvalidInputError("v must have one entry per vertex")
    u = np.kron(v, x)
    lhs = float(u @ stiffness_matrix(fw) @ u)
    rhs = float(v @ laplacian(fw.graph) @ v)
    equal = abs(lhs - rhs) <= eq_tol * (1.0 + abs(rhs))
    if fw.graph.m:
        ij = np.asarray(fw.graph.edges)
        active = np.abs(v[ij[:, 0]] - v[ij[:, 1]]) > 1e-12 * (1.0 + np.max(np.abs(v)))
    else:
        active = np.zeros(0, dtype=bool)
    aligned_all = edges_aligned(fw, x)
    aligned_active = edges_aligned(fw, x, active)
    ctx = _context(
        fw,
        equality=equal,
        all_edges_aligned=aligned_all,
        active_edges_aligned=aligned_active,
        equality_consistent=equal == aligned_active,
    )
    return BoundReport("lemma2", lhs, rhs, tol, ctx)


def jordan_bound_check(fw: Framework, tol: float = BOUND_TOL) -> list[BoundReport]:
    """``lambda_k(L(p)) <= lambda_ceil(k/d)(Lap)`` for every ``k``."""
    stiff = linalg.eigvalsh(stiffness_matrix(fw))
    lap = linalg.eigvalsh(laplacian(fw.graph))
    d = fw.d
    reports = []
    for k in range(1, d * fw.n + 1):
        idx = -(-k // d)
        reports.append(
            BoundReport("jordan", stiff[k - 1], lap[idx - 1], tol, _context(fw, k=k, laplacian_index=idx))
        )
    return reports


def ceiling_index(d: int, m: int) -> int:
    """``ceil((D + 1) / d)`` evaluated by both closed forms.

    The second form is ``ceil(m + 1 - (C(m+1, 2) - 1) / d)``; the two are
    asserted equal.
    """
    if d < 1 or m < 1:
        raise InvalidInputError("need d >= 1 and m >= 1")
    if m > d:
        raise InvalidInputError(f"m={m} exceeds d={d}")
    D = trivial_dimension(d, m)
    first = math.ceil(Fraction(D + 1, d))
    second = math.ceil(m + 1 - Fraction(math.comb(m + 1, 2) - 1, d))
    if first != second:
        raise AssertionError(f"closed forms disagree at d={d}, m={m}: {first} != {second}")
    return first


def lew_bounds(n: int, d: int):
    """Lower and upper bounds on ``a_d(K_n)``, valid for ``n >= 2d``, ``d >= 2``."""
    if d < 2:
        raise OutOfDomainError("the upper bound needs d >= 2")
    if n < 2 * d:
        raise OutOfDomainError(f"bounds hold for n >= 2d, got n={n}, d={d}")
    lower = math.ceil(Fraction(n, 2 * d)) - 2 * d + 1
    upper = Fraction(2 * n, 3 * (d - 1)) + Fraction(1, 3)
    return float(lower), float(upper)


def theorem_check(fw: Framework, tol: float = BOUND_TOL) -> BoundReport:
    """Pointwise form ``lambda_{D+1}(L(p)) <= lambda_2(Lap)``."""
    if fw.n < 2:
        raise InvalidInputError("needs at least 2 vertices")
    lhs = rigidity_eigenvalue(fw)
    rhs, _ = algebraic_connectivity(fw.graph)
    return BoundReport("theorem", lhs, rhs, tol, _context(fw))


@dataclass(frozen=True)
class WitnessRotation:
    """Rotation aligning ``M^T v`` with the first axis.

    `rotation` is special orthogonal with rows ``q_1..q_d``; `fiedler` is the
    unit Fiedler vector ``v`` and `lifted` is ``v (x) e_1``.
    """

    rotation: np.ndarray
    fiedler: np.ndarray
    lifted: np.ndarray
    degenerate: bool
    algebraic_connectivity: float

    @property
    def rows(self):
        return list(self.rotation)


def _complete_rotation(q1: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    d = q1.shape[0]
    rows = [q1]
    for k in range(d):
        if len(rows) == d:
            break
        e = np.zeros(d)
        e[k] = 1.0
        w = e.copy()
        for _ in range(2):
            for r in rows:
                w -= (r @ w) * r
        norm = np.linalg.norm(w)
        if norm <= tol:
            continue
        rows.append(w / norm)
    Q = np.vstack(rows)
    if np.linalg.det(Q) < 0:
        Q[-1] = -Q[-1]
    return Q


def witness_rotation(fw: Framework, tol: float = 1e-9) -> WitnessRotation:
    """Rotation ``Q`` with ``v' M q_l = 0`` for every row ``l >= 2``.

    Takes ``q_1 = M^T v / ||M^T v||`` and completes it by Gram-Schmidt over
    the standard basis in index order, flipping the last row if needed to
    make the determinant +1. When ``M^T v`` vanishes any rotation works and
    the identity is returned with ``degenerate=True``.
    """
    d = fw.d
    if d < 1:
        raise InvalidInputError("d must be >= 1")
    lam2, v = algebraic_connectivity(fw.graph)
    e1 = np.zeros(d)
    e1[0] = 1.0
    lifted = np.kron(v, e1)
    M = fw.config.M
    w = M.T @ v
    scale = 1.0 + float(np.max(np.abs(M)))
    degenerate = bool(np.linalg.norm(w) <= tol * scale)
    if d == 1 or degenerate:
        Q = np.eye(d)
    else:
        Q = _complete_rotation(w / np.linalg.norm(w))
    return WitnessRotation(Q, v, lifted, degenerate, lam2)


def witness_verify(fw: Framework, tol: float = WITNESS_TOL) -> list[BoundReport]:
    """Run the proof chain for the witness rotation.

    Returns four reports, in order:

    a. the lifted Fiedler vector is orthogonal to every rigid motion of the
       rotated framework;
    b. its stiffness Rayleigh quotient is at most ``lambda_2``;
    c. the rotated framework's rigidity eigenvalue is at most ``lambda_2``
       (cross-checked against the minimum Rayleigh quotient on the
       complement of the rigid motions);
    d. the stiffness spectrum is unchanged by the rotation.
    """
    wit = witness_rotation(fw)
    lam2 = wit.algebraic_connectivity
    rotated = fw.with_config(fw.config.transformed(rotation=wit.rotation))
    ctx = _context(fw, degenerate=wit.degenerate, rotation=wit.rotation)

    basis = trivial_basis(rotated)
    ortho = float(np.max(np.abs(basis.vectors.T @ wit.lifted))) if len(basis) else 0.0
    row_dots = [float(wit.fiedler @ fw.config.M @ q) for q in wit.rotation[1:]]
    a = BoundReport("witness_orthogonality", ortho, 0.0, tol, {**ctx, "fiedler_row_products": row_dots})

    L_rot = stiffness_matrix(rotated)
    quotient = float(wit.lifted @ L_rot @ wit.lifted)
    b = BoundReport("witness_rayleigh", quotient, lam2, tol, ctx)

    rig = rigidity_eigenvalue(rotated)
    # smallest quotient on the complement of the rigid motions; equals rig
    # because the rigid motions lie in the kernel
    restricted = linalg.min_rayleigh(L_rot, basis.vectors)
    c = BoundReport(
        "witness_rigidity_eigenvalue", rig, lam2, tol,
        {**ctx, "restricted_min_rayleigh": restricted, "restricted_gap": abs(restricted - rig)},
    )
    if abs(restricted - rig) > tol * (1.0 + abs(rig)):
        c.holds = False

    spec_before = linalg.eigvalsh(stiffness_matrix(fw))
    spec_after = linalg.eigvalsh(L_rot)
    d_dev = float(np.max(np.abs(spec_before - spec_after)))
    d = BoundReport("witness_rotation_invariance", d_dev, 0.0, tol, ctx)
    return [a, b, c, d]
