import math

import numpy as np
import pytest

from conftest import random_point, rel_fro
from spdsubspace import linalg
from spdsubspace.basis import (
    DirectionSet,
    UpdateFactor,
    apply_update,
    basis_matrix,
    beta_from_F,
    greedy_direction_set,
    invert_update_factor,
    random_direction_set,
    uniform_direction,
    update_factor_multi,
    update_factor_uni,
)
from spdsubspace.errors import Overflow, OverlappingDirections, StructureViolation
from spdsubspace.ledger import FlopLedger
from spdsubspace.manifold import CholeskyPoint, exp_map
from spdsubspace.rng import Xorshift


def dense_exponential(n, pairs, alpha=1.0):
    """Oracle: exp(-alpha * sum beta E_ij) through the spectral path."""
    s = np.zeros((n, n))
    for i, j, beta in pairs:
        s += beta * basis_matrix(n, i, j)
    return linalg.sym_matfn(-alpha * s, "exp")


class TestBetaFromF:
    def test_diagonal(self):
        assert beta_from_F(1.0, 2, 2) == 1.0

    def test_off_diagonal(self):
        assert beta_from_F(3.0, 3, 1) == pytest.approx(3.0 * math.sqrt(2.0))

    def test_identity_table_norm(self):
        # F = I: beta_ii = 1, beta_ij = 0, and sum of squares equals n
        n = 5
        f = np.eye(n)
        total = sum(
            beta_from_F(f[i, j], i, j) ** 2 for i in range(n) for j in range(i + 1)
        )
        assert total == pytest.approx(n)

    def test_rejects_upper(self):
        with pytest.raises(ValueError):
            beta_from_F(1.0, 0, 1)


class TestUpdateFactorUni:
    def test_zero_theta_identity(self):
        f = update_factor_uni(4, 2, 1, 0.0)
        assert np.array_equal(f.to_dense(), np.eye(4))

    def test_diagonal_case(self):
        f = update_factor_uni(3, 1, 1, 2.0)
        dense = f.to_dense()
        assert dense[1, 1] == pytest.approx(math.exp(-1.0), abs=1e-15)
        assert rel_fro(dense @ dense.T, dense_exponential(3, [(1, 1, 2.0)])) < 1e-12

    def test_worked_offdiagonal_case(self):
        # direction (3, 1) 1-based, theta = sqrt(2):
        # w = e^-1, u = sqrt(cosh 1), values frozen from the dense oracle
        f = update_factor_uni(3, 2, 0, math.sqrt(2.0)).to_dense()
        assert f[0, 0] == pytest.approx(1.242207967618645, abs=1e-12)
        assert f[2, 2] == pytest.approx(0.805018182194592, abs=1e-12)
        assert f[2, 0] == pytest.approx(-0.946058328620048, abs=1e-12)
        dense = dense_exponential(3, [(2, 0, math.sqrt(2.0))])
        chol = linalg.cholesky(dense)
        assert rel_fro(f, chol) < 1e-12

    def test_matches_dense_exponential(self, rng):
        for _ in range(50):
            n = int(rng.integers(2, 8))
            i = int(rng.integers(0, n))
            j = int(rng.integers(0, i + 1))
            theta = float(rng.uniform(-5.0, 5.0))
            f = update_factor_uni(n, i, j, theta).to_dense()
            want = dense_exponential(n, [(i, j, theta)])
            assert rel_fro(f @ f.T, want) < 1e-12

    def test_overflow_cap(self):
        with pytest.raises(Overflow):
            update_factor_uni(3, 1, 1, 701.0)
        with pytest.raises(Overflow):
            update_factor_uni(3, 2, 0, 700.0 * math.sqrt(2.0) + 1.0)
        update_factor_uni(3, 1, 1, 699.0)

    def test_determinants(self):
        theta = 1.7
        assert update_factor_uni(4, 2, 2, theta).det() == pytest.approx(
            math.exp(-theta / 2.0), abs=1e-14
        )
        assert update_factor_uni(4, 3, 1, theta).det() == pytest.approx(1.0, abs=1e-14)


class TestUpdateFactorMulti:
    def test_zero_betas_identity(self):
        dirs = DirectionSet(4, [2, 3], [1, 3], [0.0, 0.0])
        f = update_factor_multi(dirs, 0.7)
        assert np.array_equal(f.to_dense(), np.eye(4))

    def test_single_direction_reduces_to_uni(self):
        dirs = DirectionSet(5, [3], [1], [1.3])
        multi = update_factor_multi(dirs, 0.7).to_dense()
        uni = update_factor_uni(5, 3, 1, 0.7 * 1.3).to_dense()
        assert np.allclose(multi, uni, rtol=1e-14, atol=1e-15)

    def test_worked_example(self):
        # directions (2,1) and (4,3) 1-based with betas 1, -2 at alpha 0.5
        dirs = DirectionSet(4, [1, 3], [0, 2], [1.0, -2.0])
        f = update_factor_multi(dirs, 0.5)
        dense = f.to_dense()
        want = dense_exponential(4, [(1, 0, 1.0), (3, 2, -2.0)], alpha=0.5)
        assert rel_fro(dense @ dense.T, want) < 1e-11
        # equals the sum of uni factors minus (K-1) I
        summed = (
            update_factor_uni(4, 1, 0, 0.5).to_dense()
            + update_factor_uni(4, 3, 2, -1.0).to_dense()
            - np.eye(4)
        )
        assert np.allclose(dense, summed, rtol=1e-14, atol=1e-15)

    def test_matches_dense_exponential(self, rng):
        stream = Xorshift(17)
        for _ in range(50):
            n = int(rng.integers(2, 9))
            ii, jj = random_direction_set(n, stream)
            betas = rng.uniform(-5.0, 5.0, size=ii.shape[0])
            dirs = DirectionSet(n, ii, jj, betas)
            f = update_factor_multi(dirs, 1.0).to_dense()
            want = dense_exponential(n, list(zip(ii, jj, betas)))
            assert rel_fro(f @ f.T, want) < 1e-11

    def test_overlap_rejected(self):
        with pytest.raises(OverlappingDirections):
            DirectionSet(4, [2, 2], [1, 2], [1.0, 1.0])
        with pytest.raises(OverlappingDirections):
            DirectionSet(4, [2, 3], [1, 1], [1.0, 1.0])
        with pytest.raises(OverlappingDirections):
            DirectionSet(4, [], [], [])  # K >= 1


class TestInvertUpdateFactor:
    def test_identity(self):
        f = update_factor_uni(3, 1, 1, 0.0)
        assert np.array_equal(invert_update_factor(f).to_dense(), np.eye(3))

    def test_two_by_two_block(self):
        u, v = 1.7, -0.4
        dense = np.array([[u, 0.0], [v, 1.0 / u]])
        f = UpdateFactor.from_dense(dense)
        inv = invert_update_factor(f).to_dense()
        assert np.allclose(inv, np.array([[1.0 / u, 0.0], [-v, u]]))
        assert np.allclose(dense @ inv, np.eye(2), atol=1e-15)

    def test_multi_product_is_identity(self, rng):
        stream = Xorshift(23)
        for _ in range(20):
            n = int(rng.integers(2, 9))
            ii, jj = random_direction_set(n, stream)
            betas = rng.uniform(-3.0, 3.0, size=ii.shape[0])
            f = update_factor_multi(DirectionSet(n, ii, jj, betas), 0.8)
            prod = f.to_dense() @ invert_update_factor(f).to_dense()
            assert np.abs(prod - np.eye(n)).max() < 1e-13

    def test_from_dense_structure_violations(self):
        with pytest.raises(StructureViolation):
            UpdateFactor.from_dense(np.array([[1.0, 0.5], [0.0, 1.0]]))  # upper entry
        bad = np.eye(3)
        bad[1, 0] = 0.3
        bad[2, 0] = 0.2  # two off-diagonals in one column
        with pytest.raises(StructureViolation):
            UpdateFactor.from_dense(bad)
        bad = np.eye(3)
        bad[2, 2] = -1.0
        with pytest.raises(StructureViolation):
            UpdateFactor.from_dense(bad)


class TestApplyUpdate:
    def test_identity_factor(self, rng):
        p = random_point(5, rng)
        f = update_factor_uni(5, 2, 2, 0.0)
        q = apply_update(p, f)
        assert np.array_equal(q.b, p.b)

    def test_touches_only_named_columns(self, rng):
        p = random_point(6, rng)
        f = update_factor_uni(6, 4, 1, 0.9)
        q = apply_update(p, f)
        changed = [c for c in range(6) if not np.array_equal(q.b[:, c], p.b[:, c])]
        assert changed == [1, 4]

    def test_matches_exp_map(self, rng):
        stream = Xorshift(31)
        for _ in range(25):
            n = int(rng.integers(2, 9))
            p = random_point(n, rng)
            ii, jj = random_direction_set(n, stream)
            betas = rng.uniform(-2.0, 2.0, size=ii.shape[0])
            dirs = DirectionSet(n, ii, jj, betas)
            alpha = 0.6
            fast = apply_update(p, update_factor_multi(dirs, alpha))
            xi = np.zeros((n, n))
            for i, j, b in dirs.pairs():
                xi += b * (p.b @ basis_matrix(n, i, j) @ p.b.T)
            slow = exp_map(p, xi, -alpha)
            assert rel_fro(fast.x(), slow.x()) < 1e-10

    def test_flop_charge(self, rng):
        p = random_point(8, rng)
        led = FlopLedger()
        apply_update(p, update_factor_uni(8, 5, 2, 1.0), led)
        assert led.count == 3 * 8
        led2 = FlopLedger()
        apply_update(p, update_factor_uni(8, 4, 4, 1.0), led2)
        assert led2.count == 8


def reference_direction_set(n, stream):
    """Pure-python replica of the sampling rule, consuming the same
    stream: permutation, consecutive pairs, one uniform per pair."""
    perm = stream.permutation(n)
    out = []
    for c in range(n // 2):
        k, l = int(perm[2 * c]), int(perm[2 * c + 1])
        if stream.uniform() < 1.0 / n:
            out.append((k, k))
            out.append((l, l))
        else:
            out.append((max(k, l), min(k, l)))
    return out


class TestRandomDirectionSet:
    def test_matches_reference_rule(self):
        for seed in range(50):
            for n in (2, 5, 6, 7, 12, 31):
                a = Xorshift(seed)
                b = Xorshift(seed)
                ii, jj = random_direction_set(n, a)
                want = reference_direction_set(n, b)
                assert list(zip(ii.tolist(), jj.tolist())) == want
                assert a.state == b.state

    def test_bounds_and_validity(self):
        stream = Xorshift(2)
        for n in (2, 3, 8, 15):
            for _ in range(200):
                ii, jj = random_direction_set(n, stream)
                k = len(ii)
                assert n // 2 <= k <= n
                DirectionSet(n, ii, jj, np.zeros(k))  # raises if overlapping

    def test_n2_single_column(self):
        stream = Xorshift(8)
        ks = {len(random_direction_set(2, stream)[0]) for _ in range(50)}
        assert ks <= {1, 2} and ks

    def test_expected_capture_light(self):
        # quick version of the sampling-expectation property (n = 6)
        n = 6
        rng = np.random.default_rng(0)
        beta = np.tril(rng.uniform(-2, 2, size=(n, n)))
        total = float((beta**2).sum())
        stream = Xorshift(99)
        acc = 0.0
        draws = 20000
        for _ in range(draws):
            ii, jj = random_direction_set(n, stream)
            acc += float((beta[ii, jj] ** 2).sum())
        assert acc / draws == pytest.approx(total / n, rel=0.04)


class TestUniformDirection:
    def test_bounds(self):
        stream = Xorshift(4)
        for n in (2, 3, 10):
            for _ in range(300):
                i, j = uniform_direction(n, stream)
                assert 0 <= j <= i < n

    def test_uniform_over_pairs(self):
        n = 4
        d = n * (n + 1) // 2
        stream = Xorshift(6)
        counts = {}
        trials = 30000
        for _ in range(trials):
            p = uniform_direction(n, stream)
            counts[p] = counts.get(p, 0) + 1
        assert len(counts) == d
        for c in counts.values():
            assert abs(c / trials - 1.0 / d) < 0.01


class TestGreedyDirectionSet:
    def test_identity_table_selects_diagonals(self):
        ii, jj = greedy_direction_set(np.eye(3))
        assert set(zip(ii.tolist(), jj.tolist())) == {(0, 0), (1, 1), (2, 2)}

    def test_hand_example(self):
        # |F| entries, 1-based: (2,1)=5 (3,3)=4 (1,1)=3 (3,1)=2 (2,2)=1 (3,2)=0.5
        f = np.zeros((3, 3))
        f[1, 0] = 5.0
        f[2, 2] = 4.0
        f[0, 0] = 3.0
        f[2, 0] = 2.0
        f[1, 1] = 1.0
        f[2, 1] = 0.5
        ii, jj = greedy_direction_set(f)
        assert list(zip(ii.tolist(), jj.tolist())) == [(1, 0), (2, 2)]

    def test_sign_ignored_and_ties_lexicographic(self):
        f = np.zeros((3, 3))
        f[1, 0] = -2.0
        f[2, 0] = 2.0  # tie in |F|; (1,0) precedes (2,0)
        f[2, 2] = 2.0  # also ties; consumed check decides
        ii, jj = greedy_direction_set(f)
        assert (int(ii[0]), int(jj[0])) == (1, 0)
        assert (2, 2) in set(zip(ii.tolist(), jj.tolist()))

    def test_nonoverlap_and_bounds(self, rng):
        for n in (2, 5, 9, 16):
            for _ in range(50):
                f = rng.standard_normal((n, n))
                ii, jj = greedy_direction_set(np.tril(f))
                k = len(ii)
                assert n // 2 <= k <= n
                DirectionSet(n, ii, jj, np.zeros(k))

    def test_capture_bound(self, rng):
        # selected beta mass >= (1/2n) of the total (greedy guarantee)
        for n in (5, 20):
            for _ in range(50):
                table = np.tril(rng.standard_normal((n, n)))
                ii, jj = greedy_direction_set(table)
                scale = np.where(ii == jj, 1.0, math.sqrt(2.0))
                sel = float(((scale * table[ii, jj]) ** 2).sum())
                tot = sum(
                    beta_from_F(table[i, j], i, j) ** 2
                    for i in range(n)
                    for j in range(i + 1)
                )
                assert sel >= tot / (2.0 * n) - 1e-12
