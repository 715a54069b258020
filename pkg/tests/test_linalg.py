import math

import numpy as np
import pytest

from conftest import random_spd, rel_fro
from spdsubspace import io as sio
from spdsubspace import linalg
from spdsubspace.errors import (
    DimensionMismatch,
    DomainError,
    NotPositiveDefinite,
    SingularFactor,
)
from spdsubspace.ledger import FlopLedger


class TestCholesky:
    def test_identity(self):
        for n in (1, 3, 7):
            assert np.array_equal(linalg.cholesky(np.eye(n)), np.eye(n))

    def test_two_by_two(self):
        r = linalg.cholesky(np.array([[4.0, 2.0], [2.0, 3.0]]))
        expected = np.array([[2.0, 0.0], [1.0, math.sqrt(2.0)]])
        assert np.allclose(r, expected, rtol=0, atol=1e-15)

    def test_indefinite_rejected(self):
        with pytest.raises(NotPositiveDefinite):
            linalg.cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_reconstruction(self, rng):
        for n in (2, 5, 11, 24):
            a = random_spd(n, rng)
            r = linalg.cholesky(a)
            assert np.linalg.norm(r @ r.T - a) <= 1e-12 * np.linalg.norm(a)
            assert (np.diag(r) > 0).all()
            assert np.abs(np.triu(r, 1)).max() == 0.0

    def test_flop_charge(self):
        led = FlopLedger()
        linalg.cholesky(np.eye(6), led)
        assert led.count == 6**3 // 3
        before = led.count
        linalg.cholesky(np.eye(1), led)
        assert led.count > before  # minimum charge keeps it strictly increasing

    def test_rejects_nonsquare(self):
        with pytest.raises(DimensionMismatch):
            linalg.cholesky(np.ones((2, 3)))


class TestTriSolve:
    def test_identity(self, rng):
        a = rng.standard_normal((4, 4))
        assert np.allclose(linalg.tri_solve_lower(np.eye(4), a, "left"), a)

    def test_left_example(self):
        l = np.array([[2.0, 0.0], [1.0, 1.0]])
        x = linalg.tri_solve_lower(l, np.eye(2), "left")
        assert np.allclose(x, np.array([[0.5, 0.0], [-0.5, 1.0]]), atol=1e-15)

    def test_singular(self):
        with pytest.raises(SingularFactor):
            linalg.tri_solve_lower(np.diag([1.0, 0.0]), np.eye(2), "left")

    def test_multiply_back_both_sides(self, rng):
        for n in (3, 8):
            l = np.tril(rng.standard_normal((n, n))) + 2 * np.eye(n)
            rhs = rng.standard_normal((n, n))
            x = linalg.tri_solve_lower(l, rhs, "left")
            assert rel_fro(l @ x, rhs) < 1e-12
            y = linalg.tri_solve_lower(l, rhs, "right_t")
            assert rel_fro(y @ l.T, rhs) < 1e-12

    def test_vector_rhs(self, rng):
        l = np.tril(rng.standard_normal((5, 5))) + 3 * np.eye(5)
        b = rng.standard_normal(5)
        x = linalg.tri_solve_lower(l, b, "left")
        assert x.shape == (5,)
        assert np.allclose(l @ x, b)

    def test_flop_charge(self):
        led = FlopLedger()
        linalg.tri_solve_lower(np.eye(4), np.eye(4), "left", led)
        assert led.count == 4 * 4 * 4 // 2


class TestSymEig:
    def test_diagonal_permutation(self):
        eig = linalg.sym_eig(np.diag([3.0, 1.0, 2.0]))
        assert np.allclose(eig.values, [1.0, 2.0, 3.0])
        # eigenvector matrix is a signed permutation
        assert np.allclose(np.abs(eig.vectors) @ np.abs(eig.vectors).T, np.eye(3), atol=1e-12)

    def test_two_by_two(self):
        eig = linalg.sym_eig(np.array([[2.0, 1.0], [1.0, 2.0]]))
        assert np.allclose(eig.values, [1.0, 3.0], atol=1e-12)

    def test_reconstruction_random(self, rng):
        for n in (2, 5, 13, 30):
            a = 0.5 * (lambda m: m + m.T)(rng.standard_normal((n, n)))
            eig = linalg.sym_eig(a)
            scale = max(1.0, np.linalg.norm(a))
            assert np.linalg.norm(eig.reconstruct() - a) <= 1e-10 * scale
            assert np.linalg.norm(eig.vectors @ eig.vectors.T - np.eye(n)) <= 1e-12 * n
            assert (np.diff(eig.values) >= 0).all()
            # independent route: LAPACK eigenvalues
            assert np.allclose(eig.values, np.linalg.eigvalsh(a), atol=1e-11 * scale)

    def test_spd_positive_values(self, rng):
        a = random_spd(9, rng)
        assert linalg.sym_eig(a).values[0] > 0

    def test_rotation_charge(self):
        led = FlopLedger()
        eig = linalg.sym_eig(np.array([[2.0, 1.0], [1.0, 2.0]]), led)
        assert led.count == 6 * 2 * eig.rotations
        assert eig.rotations >= 1


class TestSymMatfn:
    def test_exp_zero(self):
        assert np.allclose(linalg.sym_matfn(np.zeros((4, 4)), "exp"), np.eye(4))

    def test_sqrt_scalar_case(self):
        assert np.allclose(linalg.sym_matfn(4.0 * np.eye(3), "sqrt"), 2.0 * np.eye(3))

    def test_exp_matches_taylor(self, rng):
        for _ in range(5):
            m = rng.standard_normal((3, 3))
            a = 0.5 * (m + m.T)
            a *= 1.0 / max(1.0, np.linalg.norm(a))
            series = np.zeros((3, 3))
            term = np.eye(3)
            for k in range(1, 21):
                series += term
                term = term @ a / k
            assert rel_fro(linalg.sym_matfn(a, "exp"), series) < 1e-12

    def test_exp_log_roundtrip(self, rng):
        for _ in range(5):
            m = rng.standard_normal((4, 4))
            a = 0.5 * (m + m.T)
            a *= 10.0 / max(10.0, np.linalg.norm(a, 2))
            back = linalg.sym_matfn(linalg.sym_matfn(a, "exp"), "log")
            assert np.linalg.norm(back - a) < 1e-8

    def test_domain_errors(self):
        bad = np.diag([1.0, -1.0])
        for fn in ("log", "sqrt", "inv", "inv_sqrt"):
            with pytest.raises(DomainError):
                linalg.sym_matfn(bad, fn)
        # integer powers are fine on indefinite input
        assert np.allclose(linalg.sym_matfn(bad, "power", exponent=2), np.eye(2))
        with pytest.raises(DomainError):
            linalg.sym_matfn(bad, "power", exponent=0.5)

    def test_inv(self, rng):
        a = random_spd(5, rng)
        assert rel_fro(linalg.sym_matfn(a, "inv") @ a, np.eye(5)) < 1e-11


class TestMatrixText:
    def test_round_trip(self, tmp_path, rng):
        m = rng.standard_normal((4, 4))
        path = tmp_path / "m.txt"
        sio.save_matrix(path, m)
        assert np.array_equal(sio.load_matrix(path), m)

    def test_format_shape(self, tmp_path):
        path = tmp_path / "m.txt"
        sio.save_matrix(path, np.eye(2))
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "2"
        assert len(lines) == 3
        assert [float(v) for v in lines[1].split()] == [1.0, 0.0]


def test_ledger_monotone(rng):
    led = FlopLedger()
    marks = [led.count]
    a = random_spd(6, rng)
    linalg.cholesky(a, led)
    marks.append(led.count)
    linalg.sym_eig(a, led)
    marks.append(led.count)
    linalg.sym_matfn(a, "sqrt", led)
    marks.append(led.count)
    linalg.tri_solve_lower(np.eye(6), a, "left", led)
    marks.append(led.count)
    linalg.matmul(a, a, led)
    marks.append(led.count)
    assert all(b > a for a, b in zip(marks, marks[1:]))
    with pytest.raises(ValueError):
        led.add(-1)
