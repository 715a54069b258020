import numpy as np
import pytest

from spdsubspace.manifold import CholeskyPoint


def random_spd(n, rng, spread=1.0):
    """SPD matrix with eigenvalues bounded away from zero."""
    m = rng.standard_normal((n, n)) * spread
    return 0.5 * (m @ m.T + (m @ m.T).T) + n * np.eye(n)


def random_point(n, rng, scale=0.5):
    """Cholesky point sampled as the factor of exp-like perturbation of I."""
    w = rng.standard_normal((n, n)) * scale
    s = 0.5 * (w + w.T)
    lam, u = np.linalg.eigh(s)
    x = (u * np.exp(lam)) @ u.T
    return CholeskyPoint(np.linalg.cholesky(0.5 * (x + x.T)))


def rel_fro(a, b):
    """Frobenius residual relative to the reference scale."""
    return float(np.linalg.norm(a - b) / max(1.0, np.linalg.norm(b)))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# the 3x3 instance printed in the experiments section, used by the
# condition-number checks
PAPER_C3 = np.array(
    [
        [5.6667, 10.0000, 5.8889],
        [10.0000, 26.2222, 17.5556],
        [5.8889, 17.5556, 12.1111],
    ]
)
