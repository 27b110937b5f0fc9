import numpy as np
import pytest

from metaequiv import linalg, model


def general_spec(dim, seed):
    """Random instance with nonzero biases and a non-identity omega."""
    rng = np.random.default_rng([seed, dim, 17])
    sigma = linalg.random_spd(2 * dim, seed, ridge=0.1 * dim)
    return model.make_spec(
        sigma[:dim, :dim], sigma[dim:, dim:], sigma[:dim, dim:],
        b1=rng.standard_normal(dim), b2=rng.standard_normal(dim),
        omega=linalg.random_spd(dim, seed + 10_000, ridge=0.5),
    )


def amse_oracle(spec, w):
    """AMSE from the stacked-error form: [I - W, W] sigma [I - W, W]^T + b b^T."""
    k = spec.dim
    mix = np.hstack([np.eye(k) - w, w])
    bias = mix @ np.concatenate([spec.model.b1, spec.model.b2])
    return mix @ spec.model.sigma @ mix.T + np.outer(bias, bias)


def scalar_grid_argmin(f, lo, hi, step):
    """Brute-force minimiser of a vectorised scalar function on a grid."""
    grid = np.arange(lo, hi + step / 2, step)
    values = f(grid)
    i = int(np.argmin(values))
    return grid[i], values[i]


def canonical_scalar_risk(w):
    """Risk of the K=1 instance v1=2, v2=1, c=0.5 written out by hand."""
    return 2.0 * (1.0 - w) ** 2 + w ** 2 + w * (1.0 - w)


@pytest.fixture
def canonical():
    return model.canonical_spec()


@pytest.fixture
def symmetric_spec():
    return model.make_spec(np.eye(2), np.eye(2), np.zeros((2, 2)))
