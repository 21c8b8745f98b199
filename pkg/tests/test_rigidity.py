import numpy as np
import pytest

from rigidlab import linalg
from rigidlab._validation import InvalidInputError
from rigidlab.graph import Graph, complete, laplacian, path
from rigidlab.rigidity import (
    Configuration,
    Framework,
    affine_dim,
    is_infinitesimally_rigid,
    parse_configuration,
    read_configuration,
    rigidity_eigenvalue,
    rigidity_matrix,
    stiffness_blocks,
    stiffness_matrix,
    stiffness_spectrum,
    trivial_basis,
    write_configuration,
)
from rigidlab.sampling import random_framework, random_rotation

COLLINEAR_K3 = Framework(complete(3), [[0.0, 0.0], [1.0, 0.0], [3.0, 0.0]])


def test_affine_dim_examples():
    assert affine_dim(Configuration(np.ones((4, 3))))[0] == 0
    m, x = affine_dim(Configuration([[0, 0], [1, 0], [2, 0]]))
    assert m == 1 and np.allclose(x, [1, 0])
    assert affine_dim(Configuration([[0, 0], [1, 0], [0, 1]]))[0] == 2


def test_line_direction_sign_fixed():
    m, x = affine_dim(Configuration([[0, 0], [-1, -2], [-3, -6]]))
    assert m == 1 and x[0] > 0
    assert np.allclose(x, np.array([1, 2]) / np.sqrt(5))


def test_edge_direction_examples():
    fw = Framework(complete(2), [[1.0, 0.0], [0.0, 0.0]])
    assert np.allclose(fw.edge_direction(0, 1), [1, 0])
    on_axis = Framework(path(3), [[0.0, 1.0], [0.0, 1.0], [0.0, 4.0]])
    assert on_axis.m == 1
    assert np.allclose(on_axis.edge_direction(0, 1), [0, 1])
    planar = Framework(Graph(4, [(0, 1), (1, 2)]), [[0.5, 0.5], [0.5, 0.5], [2.0, 3.0], [0.0, 1.0]])
    assert planar.m == 2
    assert np.array_equal(planar.edge_direction(0, 1), [0, 0])


def test_vectorized_directions_match_per_edge(rng):
    for _ in range(50):
        fw = random_framework(rng)
        per_edge = np.array([fw.edge_direction(i, j) for i, j in fw.graph.edges]).reshape(-1, fw.d)
        assert np.allclose(fw.directions, per_edge, rtol=0, atol=1e-15)


def test_coincidence_threshold():
    g = complete(2)
    assert Framework(g, [[1.0, 2.0], [1.0, 2.0]]).coincident(0, 1)
    assert not Framework(g, [[0.0, 0.0], [1.0, 0.0]]).coincident(0, 1)
    assert Framework(g, [[0.5, 0.5], [0.5 + 1e-15, 0.5]]).coincident(0, 1)


def test_rigidity_matrix_examples():
    assert np.array_equal(rigidity_matrix(Framework(complete(2), [[0.0], [1.0]])), [[-1, 1]])
    assert np.array_equal(
        rigidity_matrix(Framework(complete(2), [[0.0, 0.0], [1.0, 0.0]])), [[-1, 0, 1, 0]]
    )


def test_rigidity_matrix_rows_and_translations(rng):
    for _ in range(30):
        fw = random_framework(rng)
        R = rigidity_matrix(fw)
        norms = np.sum(R * R, axis=1)
        assert np.all(np.isclose(norms, 2.0) | (norms == 0.0))
        for k in range(fw.d):
            t = np.kron(np.ones(fw.n), np.eye(fw.d)[k])
            assert np.allclose(R @ t, 0, atol=1e-12)


def test_stiffness_examples(triangle):
    L = stiffness_matrix(Framework(complete(2), [[0.0], [1.0]]))
    assert np.array_equal(L, laplacian(complete(2)))
    expected = np.kron(laplacian(complete(3)), np.diag([1.0, 0.0]))
    assert np.allclose(stiffness_matrix(COLLINEAR_K3), expected, atol=1e-15)


def test_equilateral_spectrum_against_gram_oracle(triangle):
    # nonzero stiffness eigenvalues are those of R R^T = (3/2) I + (1/2) J
    gram = 1.5 * np.eye(3) + 0.5 * np.ones((3, 3))
    oracle = np.linalg.eigvalsh(gram)
    assert np.allclose(oracle, [1.5, 1.5, 3.0])
    R = rigidity_matrix(triangle)
    assert np.allclose(np.abs(R @ R.T), gram, atol=1e-12)
    spec = stiffness_spectrum(triangle).values
    assert np.allclose(spec, [0, 0, 0, 1.5, 1.5, 3.0], atol=1e-9)


@pytest.mark.parametrize(
    "fw, size",
    [
        (Framework(Graph(1), [[0.0, 0.0]]), 2),
        (Framework(complete(3), [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), 3),
        (COLLINEAR_K3, 3),
    ],
)
def test_trivial_basis_examples(fw, size):
    basis = trivial_basis(fw)
    assert len(basis) == size == fw.D
    V = basis.vectors
    assert np.allclose(V.T @ V, np.eye(size), atol=1e-12)
    assert np.max(np.abs(rigidity_matrix(fw) @ V), initial=0.0) <= 1e-9


def test_trivial_basis_single_point_is_translations():
    basis = trivial_basis(Framework(Graph(1), [[0.0, 0.0]]))
    assert basis.generators == (("t", 0), ("t", 1))


def test_rigidity_eigenvalue_examples(triangle):
    assert rigidity_eigenvalue(triangle) == pytest.approx(1.5, abs=1e-12)
    assert rigidity_eigenvalue(COLLINEAR_K3) == pytest.approx(0.0, abs=1e-12)
    assert rigidity_eigenvalue(Framework(complete(2), [[0.0], [1.0]])) == pytest.approx(2.0)
    with pytest.raises(InvalidInputError):
        rigidity_eigenvalue(Framework(Graph(1), [[0.0, 0.0]]))


def test_infinitesimal_rigidity_examples(triangle):
    assert is_infinitesimally_rigid(triangle)
    bent = Framework(path(3), [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
    assert not is_infinitesimally_rigid(bent)
    assert not is_infinitesimally_rigid(COLLINEAR_K3)


def test_framework_rejects_mismatch():
    with pytest.raises(InvalidInputError):
        Framework(complete(3), [[0.0, 0.0]])
    with pytest.raises(InvalidInputError):
        Framework(complete(2), [[0.0, np.inf], [1.0, 0.0]])


def test_invariance_properties(rng):
    for _ in range(100):
        fw = random_framework(rng)
        base = linalg.eigvalsh(stiffness_matrix(fw))
        Q = random_rotation(rng, fw.d)
        for cfg in (
            fw.config.transformed(shift=rng.standard_normal(fw.d)),
            fw.config.transformed(scale=rng.uniform(0.1, 10)),
            fw.config.transformed(rotation=Q),
        ):
            other = linalg.eigvalsh(stiffness_matrix(fw.with_config(cfg)))
            assert np.max(np.abs(base - other)) <= 1e-9


def test_kernel_and_edge_constraints(rng):
    for _ in range(100):
        fw = random_framework(rng)
        V = trivial_basis(fw).vectors
        R = rigidity_matrix(fw)
        assert np.max(np.abs(R @ V), initial=0.0) <= 1e-9
        pts = fw.config.points
        for u in V.T:
            u = u.reshape(fw.n, fw.d)
            for i, j in fw.graph.edges:
                assert abs((pts[i] - pts[j]) @ (u[i] - u[j])) <= 1e-9 * (1 + np.abs(pts).max())


def test_block_identity(rng):
    for _ in range(100):
        fw = random_framework(rng)
        assert np.max(np.abs(stiffness_matrix(fw) - stiffness_blocks(fw))) <= 1e-12


def test_one_dimensional_reduction(rng):
    for _ in range(50):
        n = int(rng.integers(2, 9))
        g = random_framework(rng, max_n=n, min_n=n).graph
        x = rng.integers(-3, 4, size=(n, 1)).astype(float)
        if np.all(x == x[0]):
            x[0] += 1
        fw = Framework(g, x)
        assert np.array_equal(stiffness_matrix(fw), laplacian(g))


def test_configuration_csv_roundtrip(tmp_path):
    cfg = Configuration([[0.1, 1 / 3], [np.pi, -2e-17]])
    path = tmp_path / "p.csv"
    write_configuration(cfg, path)
    assert np.array_equal(read_configuration(path).points, cfg.points)
    assert path.read_text().splitlines()[0] == "0.10000000000000001,0.33333333333333331"


@pytest.mark.parametrize("text", ["", "1,2\n3\n", "a,b\n"])
def test_configuration_csv_rejects(text):
    with pytest.raises(InvalidInputError):
        parse_configuration(text)
