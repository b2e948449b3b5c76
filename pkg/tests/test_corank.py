import numpy as np
import pytest
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from pathrank.corank import PathSet, build_relation_tensor, corank, corank_paths
from pathrank.errors import PathError
from pathrank.linalg import SparseTensor3, reachable_matrix
from pathrank.paths import parse_path, reverse_path
from pathrank.rank import RankParams, iterate_asymmetric

from conftest import assert_simplex, dense_corank, enumerate_instances, random_bib


def _paths(bib, *exprs):
    return PathSet(tuple(parse_path(e, bib) for e in exprs))


class TestTensorConstruction:
    def test_two_authors(self, two_authors, bib):
        x = build_relation_tensor(two_authors, _paths(bib, "A-P-A|P.L=DM", "A-P-A|P.L=IR"))
        expect = np.zeros((2, 2, 2))
        expect[0, 0, 1] = expect[1, 0, 0] = 1
        np.testing.assert_array_equal(x.to_dense(), expect)

    def test_symmetric_paths_give_symmetric_slices(self, bib):
        g = random_bib(3)
        x = build_relation_tensor(g, _paths(bib, "A-P-A|P.L=DM", "A-P-A|P.L=IR", "A-P-C-P-A")).to_dense()
        np.testing.assert_array_equal(x, x.transpose(2, 1, 0))
        assert np.all(np.einsum("iji->ij", x) == 0)

    @pytest.mark.parametrize("seed", range(4))
    def test_path_count_against_enumeration(self, bib, seed):
        g = random_bib(seed, n_a=10, n_p=15, n_c=3, density=0.2)
        exprs = ["A-P-A|P.L=DM", "A-P-C-P-A", "A-P-C-P-A|P[1].L=IR && C=C0"]
        ps = _paths(bib, *exprs)
        x = build_relation_tensor(g, ps).to_dense()
        for j, p in enumerate(ps.paths):
            expect = np.zeros((10, 10))
            for (a, b), c in enumerate_instances(g, p).items():
                if a != b:
                    expect[a, b] = c
            np.testing.assert_array_equal(x[:, j, :], expect)

    def test_asymmetric_keeps_all_pairs(self, bib):
        g = random_bib(2)
        ps = _paths(bib, "A-P-C|P.L=DM", "A-P-C|P.L=IR")
        x = build_relation_tensor(g, ps).to_dense()
        for j, p in enumerate(ps.paths):
            expect = np.zeros(x[:, j, :].shape)
            for (a, b), c in enumerate_instances(g, p).items():
                expect[a, b] = c
            np.testing.assert_array_equal(x[:, j, :], expect)

    def test_reachable_prob_mode(self, bib):
        g = random_bib(5)
        ps = _paths(bib, "A-P-C", "A-P-C|P.L=DM")
        x = build_relation_tensor(g, ps, "reachable_prob").to_dense()
        for j, p in enumerate(ps.paths):
            np.testing.assert_allclose(x[:, j, :], reachable_matrix(g, p).toarray())

    def test_mismatched_endpoints(self, bib):
        with pytest.raises(PathError):
            _paths(bib, "A-P-A", "A-P-C")
        with pytest.raises(PathError):
            PathSet(())

    def test_bad_count_mode(self, two_authors, bib):
        with pytest.raises(ValueError):
            build_relation_tensor(two_authors, _paths(bib, "A-P-A"), "weights")


class TestCorank:
    def test_uniform(self):
        res = corank(SparseTensor3.from_dense(np.ones((2, 2, 2))))
        for v in (res.x, res.y, res.z):
            np.testing.assert_allclose(v.values, 0.5)
        assert res.converged

    def test_single_path_weight_is_one(self, bib):
        g = random_bib(1)
        res = corank_paths(g, _paths(bib, "A-P-A"))
        np.testing.assert_allclose(res.y.values, [1.0])
        assert res.y.ids == ("A-P-A",)

    @pytest.mark.parametrize("seed", range(5))
    def test_dense_oracle(self, seed):
        a = np.random.default_rng(seed).integers(0, 4, size=(3, 3, 3)).astype(float)
        a[0, 0, 0] += 1
        x, y, z = dense_corank(a)
        res = corank(SparseTensor3.from_dense(a), tol=1e-14, max_iters=10000)
        assert res.converged
        np.testing.assert_allclose(res.x.values, x, atol=1e-12)
        np.testing.assert_allclose(res.y.values, y, atol=1e-12)
        np.testing.assert_allclose(res.z.values, z, atol=1e-12)

    def test_every_iterate_on_simplex(self):
        a = np.random.default_rng(0).integers(0, 3, size=(6, 4, 5)).astype(float)
        a[:, :, 4] = 0  # an empty target loses mass every sweep
        t = SparseTensor3.from_dense(a)
        for k in range(1, 12):
            res = corank(t, tol=1e-300, max_iters=k)
            for v in (res.x, res.y, res.z):
                assert_simplex(v.values, atol=1e-12)

    def test_permutation_equivariance(self):
        a = np.random.default_rng(4).integers(0, 3, size=(7, 3, 5)).astype(float)
        perm = np.random.default_rng(5).permutation(7)
        base = corank(SparseTensor3.from_dense(a), tol=1e-13)
        moved = corank(SparseTensor3.from_dense(a[perm]), tol=1e-13)
        np.testing.assert_allclose(moved.x.values, base.x.values[perm], atol=1e-10)
        np.testing.assert_allclose(moved.y.values, base.y.values, atol=1e-10)

    def test_slice_scaling_does_not_demote_path(self):
        for seed in range(10):
            a = np.random.default_rng(seed).integers(0, 3, size=(6, 4, 6)).astype(float)
            base = corank(SparseTensor3.from_dense(a), tol=1e-12).y.values
            for j in range(4):
                b = a.copy()
                b[:, j, :] *= 3.0
                _, y_oracle, _ = dense_corank(b)
                scaled = corank(SparseTensor3.from_dense(b), tol=1e-12).y.values
                np.testing.assert_allclose(scaled, y_oracle, atol=1e-9)
                assert (scaled > scaled[j]).sum() <= (base > base[j]).sum()

    def test_reduces_to_restart_free_asymmetric_ranking(self, bib):
        checked = 0
        for seed in range(60):
            g = random_bib(seed, n_a=8, n_p=10, n_c=3, density=0.25)
            w = g.adjacency("AP")
            bip = sp.bmat([[None, w], [w.T, None]])
            if connected_components(bip, directed=False)[0] != 1:
                continue
            p = parse_path("A-P", bib)
            res = corank_paths(g, PathSet((p,)), tol=1e-13, max_iters=5000)
            src, tgt = iterate_asymmetric(
                reachable_matrix(g, p), reachable_matrix(g, reverse_path(p)),
                RankParams(alpha=1.0, tol=1e-13, max_iters=5000),
            )
            if not (res.converged and src.converged):
                continue
            np.testing.assert_allclose(res.x.values, src.values, atol=1e-6)
            np.testing.assert_allclose(res.z.values, tgt.values, atol=1e-6)
            checked += 1
        assert checked >= 10

    def test_theta_smoothing(self):
        a = np.random.default_rng(1).integers(0, 2, size=(5, 3, 5)).astype(float)
        res = corank(SparseTensor3.from_dense(a), theta=0.1)
        for v in (res.x, res.y, res.z):
            assert_simplex(v.values)
            assert v.values.min() >= 0.1 / len(v) - 1e-15

    def test_errors(self):
        with pytest.raises(ValueError):
            corank(SparseTensor3.from_dense(np.zeros((2, 2, 2))))
        t = SparseTensor3.from_dense(np.ones((2, 2, 2)))
        with pytest.raises(ValueError):
            corank(t, x0=[0.9, 0.9])
        with pytest.raises(ValueError):
            corank(t, theta=1.0)

    def test_nonconvergence_flagged(self):
        res = corank(SparseTensor3.from_dense(np.random.default_rng(2).random((4, 3, 4))), tol=1e-300, max_iters=4)
        assert not res.converged and res.iterations_used == 4 and len(res.residual_trace) == 4

    def test_custom_start(self):
        t = SparseTensor3.from_dense(np.ones((2, 2, 2)))
        res = corank(t, x0=[1.0, 0.0], y0=[0.5, 0.5], z0=[0.0, 1.0])
        np.testing.assert_allclose(res.x.values, 0.5)
