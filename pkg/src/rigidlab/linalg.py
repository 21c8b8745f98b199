"""Dense symmetric linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays. Sets of vectors (bases) are stored as
2-D arrays whose *columns* are the vectors.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from rigidlab._validation import InvalidInputError

DROP_TOL = 1e-9
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with paired orthonormal eigenvectors.

    ``vectors[:, k]`` is the eigenvector for ``values[k]``.
    """

    values: np.ndarray
    vectors: np.ndarray

    def __len__(self):
        return len(self.values)


def as_symmetric(a) -> np.ndarray:
    """Return a float copy of `a` with symmetry enforced by averaging."""
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise InvalidInputError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix has non-finite entries")
    return 0.5 * (a + a.T)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # largest-magnitude entry of each column made positive
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def jacobi_eigh(a, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi eigenvalue iteration for a real symmetric matrix.

    Sweeps over all off-diagonal pairs in row order until the off-diagonal
    Frobenius norm drops below ``tol * ||a||_F``. Returns unsorted
    ``(values, vectors)``.
    """
    a = as_symmetric(a)
    n = a.shape[0]
    v = np.eye(n)
    scale = np.linalg.norm(a)
    if scale == 0.0 or n == 1:
        return np.diag(a).copy(), v
    threshold = tol * scale
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
    return np.diag(a).copy(), v


def eigh(a, method: str = "lapack") -> Spectrum:
    """Full eigendecomposition of a symmetric matrix.

    Parameters
    ----------
    a : array_like
        Square symmetric matrix; symmetry is enforced by averaging.
    method : {"lapack", "jacobi"}
        ``"lapack"`` calls ``numpy.linalg.eigh``; ``"jacobi"`` runs the
        cyclic Jacobi iteration in :func:`jacobi_eigh`.

    Returns
    -------
    Spectrum
        Values ascending (stable sort), eigenvector signs fixed so the
        largest-magnitude entry of each vector is positive.
    """
    a = as_symmetric(a)
    if method == "lapack":
        values, vectors = np.linalg.eigh(a)
    elif method == "jacobi":
        values, vectors = jacobi_eigh(a)
    else:
        raise InvalidInputError(f"unknown eigensolver {method!r}")
    order = np.argsort(values, kind="stable")
    return Spectrum(values[order], _fix_signs(vectors[:, order]))


def eigvalsh(a) -> np.ndarray:
    return np.linalg.eigvalsh(as_symmetric(a))


def kron(a, b) -> np.ndarray:
    """Kronecker product; block ``(i, j)`` equals ``a[i, j] * b``."""
    return np.kron(np.atleast_2d(np.asarray(a, dtype=float)), np.atleast_2d(np.asarray(b, dtype=float)))


def orthonormalize(vectors, tol: float = DROP_TOL) -> np.ndarray:
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    `vectors` is an iterable of 1-D arrays of equal length. A vector is
    dropped when its residual norm after projection is at most
    ``tol * (1 + ||original||)``. Returns an ``(N, k)`` array of
    orthonormal columns spanning the same subspace.
    """
    if tol <= 0:
        raise InvalidInputError("tol must be positive")
    vectors = [np.asarray(v, dtype=float).ravel() for v in vectors]
    if not vectors:
        return np.zeros((0, 0))
    size = vectors[0].shape[0]
    basis: list[np.ndarray] = []
    for v in vectors:
        if v.shape[0] != size:
            raise InvalidInputError("vectors must share one length")
        w = v.copy()
        for _ in range(2):
            for b in basis:
                w -= (b @ w) * b
        norm = np.linalg.norm(w)
        if norm <= tol * (1.0 + np.linalg.norm(v)):
            continue
        basis.append(w / norm)
    if not basis:
        return np.zeros((size, 0))
    return np.column_stack(basis)


def _as_basis(basis, size=None) -> np.ndarray:
    if basis is None:
        return np.zeros((size or 0, 0))
    basis = np.asarray(basis, dtype=float)
    if basis.size == 0:
        return np.zeros((size if size is not None else basis.shape[0], 0))
    if basis.ndim == 1:
        basis = basis[:, None]
    return basis


def project_out(v, basis) -> np.ndarray:
    """Return ``v - sum_b (b.v) b`` for the orthonormal columns of `basis`."""
    v = np.asarray(v, dtype=float)
    basis = _as_basis(basis, v.shape[0])
    if basis.shape[1] == 0:
        return v.copy()
    w = v - basis @ (basis.T @ v)
    # second pass keeps the residual orthogonal to round-off
    return w - basis @ (basis.T @ w)


def complement_basis(basis, size: int) -> np.ndarray:
    """Orthonormal basis (columns) of the orthogonal complement of `basis`."""
    basis = _as_basis(basis, size)
    k = basis.shape[1]
    if k == 0:
        return np.eye(size)
    if basis.shape[0] != size:
        raise InvalidInputError("basis vectors have the wrong length")
    q, _ = np.linalg.qr(basis, mode="complete")
    comp = q[:, k:]
    # re-orthogonalize against the given basis
    comp = comp - basis @ (basis.T @ comp)
    q2, _ = np.linalg.qr(comp)
    return q2


def min_rayleigh_pair(a, constraint_basis=None):
    """Minimum of ``u'Au / u'u`` over ``u`` orthogonal to `constraint_basis`.

    Returns ``(value, minimizer)``; the minimizer is a unit vector.
    Computed from the smallest eigenpair of the compressed matrix
    ``B' A B`` with ``B`` an orthonormal basis of the complement.
    """
    a = as_symmetric(a)
    size = a.shape[0]
    basis = _as_basis(constraint_basis, size)
    if basis.shape[1] and basis.shape[0] != size:
        raise InvalidInputError("constraint vectors have the wrong length")
    if basis.shape[1] >= size:
        raise InvalidInputError("constraints span the whole space")
    comp = complement_basis(basis, size)
    if comp.shape[1] == 0:
        raise InvalidInputError("constraints span the whole space")
    spec = eigh(comp.T @ a @ comp)
    u = comp @ spec.vectors[:, 0]
    return float(spec.values[0]), u / np.linalg.norm(u)


def min_rayleigh(a, constraint_basis=None) -> float:
    return min_rayleigh_pair(a, constraint_basis)[0]
