from fractions import Fraction

import numpy as np
import pytest

from fracanalytic import ClassParams, FractionalSeries, KernelCoeffs, KernelFamily, preset
from fracanalytic.classes import PresetName, WeightVariant


@pytest.fixture
def sstar() -> ClassParams:
    return preset(PresetName.STARLIKE_MU)


@pytest.fixture
def kpreset() -> ClassParams:
    return preset(PresetName.CONVEX_MU)


def random_params(rng: np.random.Generator, mus=(Fraction(1), Fraction(3, 2), Fraction(2))) -> ClassParams:
    """A valid parameter set drawn from the preset kernels and random A, B, gamma, k, m."""
    mu = mus[rng.integers(len(mus))]
    pairs = [
        (KernelFamily.KOEBE, KernelFamily.ALL_ONES),
        (KernelFamily.KOEBE2, KernelFamily.KOEBE),
        (KernelFamily.KOEBE2, KernelFamily.ALL_ONES),
    ]
    phi, psi = pairs[rng.integers(len(pairs))]
    B = -float(rng.uniform(0.05, 1.0))
    A = float(rng.uniform(B + 0.05, 1.0))
    m = int(rng.integers(0, 2))
    k = m + int(rng.integers(0, 2))
    return ClassParams(
        phi=KernelCoeffs(phi, mu), psi=KernelCoeffs(psi, mu),
        A=A, B=B, gamma=float(rng.uniform(0.0, 0.9)), k=k, m=m, mu=mu,
        weight_variant=WeightVariant.LAMBDA,
    )


def random_member(rng: np.random.Generator, p: ClassParams, terms: int = 4) -> FractionalSeries:
    """Random negative-coefficient series with Xi-weighted sum at most the class scale."""
    from fracanalytic import xi_weight

    idx = sorted(rng.choice(np.arange(2, 12), size=terms, replace=False).tolist())
    share = rng.dirichlet(np.ones(terms + 1))[:terms] * rng.uniform(0.2, 1.0)
    coeffs = {int(n): float(s * p.scale / xi_weight(p, int(n))) for n, s in zip(idx, share)}
    return FractionalSeries(p.mu, coeffs)
