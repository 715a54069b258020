import numpy as np
import pytest

from conftest import random_point, random_spd, rel_fro
from spdsubspace import linalg
from spdsubspace.basis import basis_matrix
from spdsubspace.errors import DimensionMismatch, Overflow
from spdsubspace.manifold import (
    CholeskyPoint,
    distance,
    exp_map,
    inner,
    log_map,
    norm,
    riemannian_grad,
)


class TestCholeskyPoint:
    def test_validation(self):
        with pytest.raises(ValueError):
            CholeskyPoint(np.array([[1.0, 0.5], [0.0, 1.0]]))  # upper entry
        with pytest.raises(ValueError):
            CholeskyPoint(np.diag([1.0, -2.0]))  # negative diagonal
        with pytest.raises(ValueError):
            CholeskyPoint(np.diag([1.0, np.inf]))

    def test_logdet(self, rng):
        p = random_point(5, rng)
        sign, ref = np.linalg.slogdet(p.x())
        assert sign > 0
        assert abs(p.logdet() - ref) < 1e-10


class TestInner:
    def test_identity_trace(self):
        p = CholeskyPoint.identity(4)
        assert inner(p, np.eye(4), np.eye(4)) == pytest.approx(4.0)

    def test_basis_orthonormality(self, rng):
        # <G_ij, G_kl>_X = delta for any X, with G = B E B^T
        p = random_point(5, rng)
        pairs = [(0, 0), (2, 1), (4, 4), (3, 0), (4, 2)]
        for a, (i, j) in enumerate(pairs):
            gi = p.b @ basis_matrix(5, i, j) @ p.b.T
            for k, l in pairs[a:]:
                gk = p.b @ basis_matrix(5, k, l) @ p.b.T
                expected = 1.0 if (i, j) == (k, l) else 0.0
                assert inner(p, gi, gk) == pytest.approx(expected, abs=1e-10)

    def test_against_dense_inverse(self, rng):
        p = random_point(4, rng)
        xi = 0.5 * (lambda m: m + m.T)(rng.standard_normal((4, 4)))
        eta = 0.5 * (lambda m: m + m.T)(rng.standard_normal((4, 4)))
        x_inv = np.linalg.inv(p.x())
        dense = np.trace(x_inv @ xi @ x_inv @ eta)
        assert inner(p, xi, eta) == pytest.approx(dense, abs=1e-10 * max(1, abs(dense)))
        assert inner(p, xi, eta) == pytest.approx(inner(p, eta, xi))
        assert inner(p, xi, xi) >= 0

    def test_congruence_invariance(self, rng):
        # metric invariant under B -> A B, xi -> A xi A^T
        n = 4
        p = random_point(n, rng)
        xi = 0.5 * (lambda m: m + m.T)(rng.standard_normal((n, n)))
        eta = 0.5 * (lambda m: m + m.T)(rng.standard_normal((n, n)))
        a = np.tril(rng.standard_normal((n, n))) + 2 * np.eye(n)
        q = CholeskyPoint(a @ p.b)
        base = inner(p, xi, eta)
        moved = inner(q, a @ xi @ a.T, a @ eta @ a.T)
        assert abs(moved - base) < 1e-9 * max(1, abs(base))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            inner(CholeskyPoint.identity(3), np.eye(2), np.eye(2))


class TestExpMap:
    def test_zero_time(self, rng):
        p = random_point(4, rng)
        xi = 0.5 * (lambda m: m + m.T)(rng.standard_normal((4, 4)))
        q = exp_map(p, xi, 0.0)
        assert rel_fro(q.b, p.b) < 1e-14

    def test_identity_direction(self):
        q = exp_map(CholeskyPoint.identity(3), np.eye(3), 1.0)
        assert rel_fro(q.x(), np.e * np.eye(3)) < 1e-12

    def test_against_sqrt_form(self, rng):
        for _ in range(10):
            p = random_point(3, rng)
            xi = 0.5 * (lambda m: m + m.T)(rng.standard_normal((3, 3)))
            got = exp_map(p, xi, 1.0).x()
            x = p.x()
            xh = linalg.sym_matfn(x, "sqrt")
            xih = linalg.sym_matfn(x, "inv_sqrt")
            want = xh @ linalg.sym_matfn(xih @ xi @ xih, "exp") @ xh
            assert rel_fro(got, want) < 1e-10

    def test_time_scaling_consistency(self, rng):
        # gamma_{xi}(s * t) equals gamma_{s xi}(t) from the closed form
        p = random_point(4, rng)
        xi = 0.5 * (lambda m: m + m.T)(rng.standard_normal((4, 4)))
        a = exp_map(p, xi, 1.0).x()
        b = exp_map(p, 2.0 * xi, 0.5).x()
        assert rel_fro(a, b) < 1e-9
        c = exp_map(exp_map(p, xi, 0.0), xi, 1.0).x()
        assert rel_fro(c, a) < 1e-9

    def test_positive_diagonal_preserved(self, rng):
        p = random_point(5, rng)
        for _ in range(5):
            w = 0.3 * (lambda m: 0.5 * (m + m.T))(rng.standard_normal((5, 5)))
            xi = p.b @ w @ p.b.T  # whitened step of bounded size
            p = exp_map(p, xi, 1.0)
            assert (np.diag(p.b) > 0).all()

    def test_overflow_guard(self):
        p = CholeskyPoint.identity(2)
        with pytest.raises(Overflow):
            exp_map(p, 800.0 * np.eye(2), 1.0)
        # 700 exactly still allowed
        exp_map(p, 699.0 * np.eye(2), 1.0)


class TestRiemannianGrad:
    def test_identity(self, rng):
        g = 0.5 * (lambda m: m + m.T)(rng.standard_normal((3, 3)))
        assert np.allclose(riemannian_grad(CholeskyPoint.identity(3), g), g)

    def test_scalar_scaling(self):
        p = CholeskyPoint(np.sqrt(2.0) * np.eye(3))  # X = 2I
        g = np.diag([1.0, 2.0, 3.0])
        assert np.allclose(riemannian_grad(p, g), 4.0 * g)

    def test_duality(self, rng):
        p = random_point(4, rng)
        g = 0.5 * (lambda m: m + m.T)(rng.standard_normal((4, 4)))
        gr = riemannian_grad(p, g)
        for _ in range(10):
            xi = 0.5 * (lambda m: m + m.T)(rng.standard_normal((4, 4)))
            lhs = inner(p, gr, xi)
            rhs = np.trace(g @ xi)
            assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(rhs))


class TestDistance:
    def test_coincident(self, rng):
        p = random_point(4, rng)
        assert distance(p, p) == pytest.approx(0.0, abs=1e-7)

    def test_scalar(self):
        p = CholeskyPoint.identity(1)
        q = CholeskyPoint(np.array([[np.e]]))  # X = e^2
        assert distance(p, q) == pytest.approx(2.0, abs=1e-12)

    def test_log_eigenvalues_from_identity(self, rng):
        q = random_point(5, rng)
        lam = np.linalg.eigvalsh(q.x())
        want = np.sqrt(np.sum(np.log(lam) ** 2))
        assert distance(CholeskyPoint.identity(5), q) == pytest.approx(want, abs=1e-9)

    def test_symmetry_positivity(self, rng):
        p = random_point(4, rng)
        q = random_point(4, rng)
        assert distance(p, q) == pytest.approx(distance(q, p), abs=1e-9)
        assert distance(p, q) > 0


class TestLogMap:
    def test_inverse_of_exp(self, rng):
        p = random_point(4, rng)
        q = random_point(4, rng)
        xi = log_map(p, q)
        assert rel_fro(exp_map(p, xi, 1.0).x(), q.x()) < 1e-9
        # norm of the log equals the distance
        assert norm(p, xi) == pytest.approx(distance(p, q), abs=1e-9)
