import numpy as np
import pytest

from rbfit import (
    ConfigurationError,
    DuplicatePointError,
    Kernel,
    PointCloud,
    PolyBasis,
    assemble_dense,
    assemble_sparse,
    densify,
    fit,
    kernel_eval,
    radius_neighbors,
    side_condition_defect,
)

from conftest import random_cloud, well_spaced_cloud, wendland_for


def unit_line(n=10):
    return PointCloud(np.arange(float(n)), np.arange(float(n)) ** 2)


class TestPolyBasis:
    @pytest.mark.parametrize(
        "degree,dim,m", [(0, 2, 1), (1, 1, 2), (1, 2, 3), (1, 3, 4), (2, 2, 6), (2, 3, 10)]
    )
    def test_column_counts(self, degree, dim, m):
        assert PolyBasis(degree, dim).m == m

    def test_fixed_column_order_2d(self):
        basis = PolyBasis(2, 2)
        # [1, x, y, x^2, xy, y^2]
        assert basis.exponents == ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))
        row = basis.matrix(np.array([[2.0, 3.0]]))[0]
        assert row.tolist() == [1.0, 2.0, 3.0, 4.0, 6.0, 9.0]

    def test_known_coefficients_reproduced(self):
        basis = PolyBasis(2, 2)
        rng = np.random.default_rng(5)
        pts = rng.uniform(-2, 2, size=(50, 2))
        coeffs = rng.uniform(-1, 1, size=6)
        x, y = pts[:, 0], pts[:, 1]
        direct = (
            coeffs[0]
            + coeffs[1] * x
            + coeffs[2] * y
            + coeffs[3] * x**2
            + coeffs[4] * x * y
            + coeffs[5] * y**2
        )
        assert np.allclose(basis.matrix(pts) @ coeffs, direct, rtol=1e-14, atol=1e-14)

    def test_degree_out_of_range(self):
        with pytest.raises(ConfigurationError):
            PolyBasis(3, 2)


class TestDenseAssembly:
    def test_single_site_no_tail(self):
        cloud = PointCloud([[0.0, 0.0]], [5.0])
        system = assemble_dense(cloud, Kernel("wendland-c2", 1.0), None)
        assert system.B.shape == (1, 1) and system.B[0, 0] == 1.0
        assert system.m == 0
        assert system.rhs.tolist() == [5.0]

    def test_three_sites_degree_one_layout(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        cloud = PointCloud(pts, [1.0, 2.0, 3.0])
        kernel = Kernel("wendland-c2", 1.0)
        system = assemble_dense(cloud, kernel, PolyBasis(1, 2))
        full = system.full_matrix()
        assert full.shape == (6, 6)  # N + 3 for d = 2
        # row i: [phi_i1 phi_i2 phi_i3 | 1 x_i y_i], trailing rows mirror P^T
        for i in range(3):
            assert full[i, 3:].tolist() == [1.0, pts[i, 0], pts[i, 1]]
            assert full[3 + 0, i] == 1.0
            assert full[4, i] == pts[i, 0]
            assert full[5, i] == pts[i, 1]
        assert np.all(full[3:, 3:] == 0.0)
        assert full[0, 1] == kernel_eval(kernel, 1.0)  # sites 0,1 are unit distance apart
        assert full[1, 2] == 0.0  # sites 1,2 are sqrt(2) apart, outside support
        assert np.array_equal(full, full.T)

    def test_rhs_tail_zeros(self):
        cloud = random_cloud(0, 12, 2)
        system = assemble_dense(cloud, Kernel("wendland-c2", 2.0), PolyBasis(2, 2))
        assert np.all(system.rhs[12:] == 0.0)
        assert np.array_equal(system.rhs[:12], cloud.values)

    def test_diagonal_is_phi0(self):
        cloud = random_cloud(1, 20, 3)
        for kind, shape in [("wendland-c4", 1.3), ("gaussian", 2.0), ("multiquadric", 0.5)]:
            kernel = Kernel(kind, shape)
            poly = PolyBasis(1, 3) if kind == "multiquadric" else None
            system = assemble_dense(cloud, kernel, poly)
            assert np.all(np.diag(system.B) == kernel_eval(kernel, 0.0))

    def test_far_points_give_identity_block(self):
        cloud = PointCloud([[0.0, 0.0], [10.0, 0.0]], [1.0, 2.0])
        system = assemble_dense(cloud, Kernel("wendland-c2", 1.0), None)
        assert np.array_equal(system.B, np.eye(2))

    def test_duplicate_points_rejected(self):
        cloud = PointCloud([[0.0, 0.0], [1.0, 1.0], [0.0, 0.0]], [1.0, 2.0, 3.0])
        with pytest.raises(DuplicatePointError):
            assemble_dense(cloud, Kernel("wendland-c2", 1.0), None)

    def test_tps_requires_linear_tail(self):
        cloud = random_cloud(2, 10, 2)
        with pytest.raises(ConfigurationError):
            assemble_dense(cloud, Kernel("tps"), None)
        with pytest.raises(ConfigurationError):
            assemble_dense(cloud, Kernel("tps"), PolyBasis(0, 2))
        assemble_dense(cloud, Kernel("tps"), PolyBasis(1, 2))

    def test_multiquadric_requires_constant(self):
        cloud = random_cloud(2, 10, 2)
        with pytest.raises(ConfigurationError):
            assemble_dense(cloud, Kernel("multiquadric"), None)
        assemble_dense(cloud, Kernel("multiquadric"), PolyBasis(0, 2))

    @pytest.mark.parametrize("seed", range(10))
    def test_exact_symmetry(self, seed):
        cloud = random_cloud(seed, 60, 2)
        system = assemble_dense(cloud, Kernel("gaussian", 1.5), PolyBasis(1, 2))
        full = system.full_matrix()
        assert np.array_equal(full, full.T)


class TestSparseAssembly:
    def test_unit_line_tridiagonal_nnz(self):
        # support 1/0.8 = 1.25 covers only adjacent unit-spaced sites:
        # 9 off-diagonal pairs mirrored + 10 diagonal entries = 28
        system = assemble_sparse(unit_line(10), Kernel("wendland-c2", 0.8), None)
        assert system.B.nnz == 28
        dense = system.B.toarray()
        assert np.count_nonzero(dense - np.diag(np.diag(dense))) == 18

    def test_nnz_matches_brute_force_pair_count(self):
        cloud = random_cloud(11, 150, 2)
        kernel = Kernel("wendland-c2", 3.0)
        system = assemble_sparse(cloud, kernel, None)
        pts = cloud.points
        iu, ju = np.triu_indices(cloud.n, k=1)
        within = np.linalg.norm(pts[iu] - pts[ju], axis=1) < 1.0 / 3.0
        assert system.B.nnz == cloud.n + 2 * int(within.sum())

    def test_diagonal_only_regime(self):
        cloud = unit_line(10)
        system = assemble_sparse(cloud, Kernel("wendland-c2", 2.0), None)  # support 0.5
        assert system.B.nnz == 10

    def test_requires_compact_kernel(self):
        with pytest.raises(ConfigurationError):
            assemble_sparse(random_cloud(0, 10, 2), Kernel("gaussian", 1.0), None)

    def test_duplicate_points_rejected(self):
        cloud = PointCloud([[0.0, 0.0], [0.0, 0.0]], [1.0, 2.0])
        with pytest.raises(DuplicatePointError):
            assemble_sparse(cloud, Kernel("wendland-c2", 1.0), None)

    @pytest.mark.parametrize("seed", range(50))
    def test_sparse_equals_dense_entrywise(self, seed):
        rng = np.random.default_rng(seed)
        dim = int(rng.integers(1, 4))
        n = int(rng.integers(5, 120))
        cloud = random_cloud(seed + 1000, n, dim)
        kind = ["wendland-c0", "wendland-c2", "wendland-c4"][seed % 3]
        kernel = Kernel(kind, float(rng.uniform(0.5, 6.0)))
        poly = PolyBasis(int(rng.integers(0, 3)), dim) if seed % 2 else None
        sparse = assemble_sparse(cloud, kernel, poly)
        dense = assemble_dense(cloud, kernel, poly)
        assert np.array_equal(sparse.B.toarray(), dense.B)  # exact, not approx
        assert np.array_equal(sparse.P, dense.P)
        assert np.array_equal(sparse.rhs, dense.rhs)
        assert np.array_equal(densify(sparse).B, dense.B)

    @pytest.mark.parametrize("seed", range(8))
    def test_zero_pattern_matches_radius_neighbors(self, seed):
        cloud = random_cloud(seed, 80, 2)
        kernel = Kernel("wendland-c2", 2.5)
        system = assemble_sparse(cloud, kernel, None)
        csr = system.B
        for i in range(cloud.n):
            row_cols = sorted(csr.indices[csr.indptr[i] : csr.indptr[i + 1]].tolist())
            expected = [j for j, _ in radius_neighbors(cloud, i, 1.0 / 2.5)]
            assert row_cols == expected


class TestSideConditions:
    def test_defect_small_after_fit(self):
        cloud = well_spaced_cloud(3, 20, 2)
        kernel = wendland_for(cloud)
        model = fit(cloud, kernel, degree=1)
        defect = side_condition_defect(model, cloud, PolyBasis(1, 2))
        assert defect.shape == (3,)
        scale = np.abs(model.weights).sum() * max(
            1.0, np.abs(model.normalization.apply(cloud.points)).max()
        )
        assert np.all(np.abs(defect) <= 1e-8 * scale + 1e-14)

    def test_zero_weights_zero_defect(self):
        cloud = well_spaced_cloud(4, 15, 2)
        model = fit(cloud, wendland_for(cloud), degree=1)
        zeroed = type(model)(
            kernel=model.kernel,
            centers=model.centers,
            weights=np.zeros(model.n),
            poly=model.poly,
            poly_coeffs=model.poly_coeffs,
            normalization=model.normalization,
            fit_report=model.fit_report,
        )
        assert np.all(side_condition_defect(zeroed, cloud, PolyBasis(1, 2)) == 0.0)

    def test_no_tail_empty_defect(self):
        cloud = well_spaced_cloud(5, 15, 2)
        model = fit(cloud, wendland_for(cloud), degree=None)
        assert side_condition_defect(model, cloud, None).shape == (0,)
