import numpy as np
import pytest

import kronlap


def adjacency():
    return np.array(
        [
            [0, 1, 0, 1, 0, 0],
            [1, 0, 1, 0, 1, 0],
            [0, 1, 0, 0, 0, 1],
            [1, 0, 0, 0, 1, 0],
            [0, 1, 0, 1, 0, 1],
            [0, 0, 1, 0, 1, 0],
        ],
        dtype=float,
    )


def test_kron_matches_numpy():
    rng = np.random.default_rng(0)
    a, b = rng.standard_normal((2, 3)), rng.standard_normal((4, 2))
    np.testing.assert_allclose(kronlap.kron(a, b), np.kron(a, b), rtol=0, atol=1e-14)


def test_embed_and_partial_trace_are_adjoint():
    rng = np.random.default_rng(1)
    dims = [2, 3, 2]
    x = rng.standard_normal((3, 3))
    a = rng.standard_normal((12, 12))
    lhs = np.sum(kronlap.embed(1, x, dims) * a)
    rhs = np.sum(x * kronlap.partial_trace(a, dims, 1))
    assert abs(lhs - rhs) < 1e-12


def test_decompose_adjacency():
    r = kronlap.decompose(adjacency(), [2, 3])
    assert r["alpha"] == 0.0
    np.testing.assert_array_equal(r["factors"][0], [[0, 1], [1, 0]])
    np.testing.assert_array_equal(r["factors"][1], [[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    assert r["residual_fro"] <= 1e-12
    np.testing.assert_allclose(r["projection"].to_dense(), adjacency(), atol=1e-14)
    it = kronlap.decompose(adjacency(), [2, 3], method="iterative")
    assert it["method"] == "iterative"
    assert it["sweeps_used"] >= 1


def test_membership():
    member, rel = kronlap.laplacian_distance(adjacency(), [2, 3])
    assert member and rel <= 1e-12
    member, rel = kronlap.laplacian_distance(np.ones((6, 6)), [2, 3])
    assert not member and rel > 0.5


def test_exp_and_bracket():
    rng = np.random.default_rng(2)
    dims = [2, 3]
    l1 = kronlap.LaplacianLike(dims, 0.3, [rng.standard_normal((2, 2)), rng.standard_normal((3, 3))])
    l2 = kronlap.LaplacianLike(dims, -1.0, [rng.standard_normal((2, 2)), rng.standard_normal((3, 3))])
    a, b = l1.to_dense(), l2.to_dense()
    np.testing.assert_allclose(kronlap.lie_bracket(l1, l2).to_dense(), a @ b - b @ a, atol=1e-12)
    f = kronlap.lap_exp(l1)
    np.testing.assert_allclose(np.kron(f[0], f[1]), kronlap.dense_exp(a), rtol=1e-10)


def test_grou_poisson_matches_direct():
    p = kronlap.build_poisson(4)
    r = kronlap.grou(p["op"], p["rhs"])
    direct = kronlap.direct_solve(p["op"].to_dense(), p["rhs"])
    assert np.max(np.abs(r["x"] - direct)) / np.max(np.abs(direct)) <= 1e-5
    hist = r["residual_history"]
    assert all(b <= a for a, b in zip(hist, hist[1:]))
    assert r["stop_reason"] in {"residual_below_eps", "stagnation", "rank_max_reached"}


def test_grou_dense_operator():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((6, 6)) + 6 * np.eye(6)
    b = rng.standard_normal(6)
    r = kronlap.grou(a, b, dims=[2, 3], eps=1e-10, tol=1e-15, rank_max=500)
    np.testing.assert_allclose(a @ r["x"], b, atol=1e-8)


def test_errors_map_to_exceptions(tmp_path):
    with pytest.raises(kronlap.ValidationError):
        kronlap.decompose(np.eye(6), [4, 2])
    with pytest.raises(kronlap.SingularMatrixError):
        kronlap.direct_solve(np.ones((3, 3)), np.ones(3))
    with pytest.raises(kronlap.IoError):
        kronlap.read_matrix_market(tmp_path / "missing.mtx")
    assert issubclass(kronlap.ValidationError, kronlap.KronlapError)


def test_matrix_market_round_trip(tmp_path):
    rng = np.random.default_rng(4)
    m = rng.standard_normal((5, 4))
    path = tmp_path / "m.mtx"
    kronlap.write_matrix_market(path, m)
    np.testing.assert_array_equal(kronlap.read_matrix_market(path), m)
    kronlap.write_matrix_market(path, adjacency(), coordinate=True)
    np.testing.assert_array_equal(kronlap.read_matrix_market(path), adjacency())
