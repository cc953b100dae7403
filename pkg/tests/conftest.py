import pathlib

import numpy as np
import pytest

from pmlkit import Alphabet, DiscreteChannel, DiscreteDistribution, JointModel

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def random_full_support_model(rng, n_in, n_out):
    """Random joint model with strictly positive prior and channel entries."""
    alpha_x = Alphabet([f"x{i}" for i in range(n_in)])
    alpha_y = Alphabet([f"y{j}" for j in range(n_out)])
    prior = rng.dirichlet(np.ones(n_in))
    prior = prior / prior.sum()
    matrix = rng.dirichlet(np.ones(n_out), size=n_in)
    matrix = matrix / matrix.sum(axis=1, keepdims=True)
    return JointModel(
        DiscreteDistribution(alpha_x, prior),
        DiscreteChannel(alpha_x, alpha_y, matrix),
    )


@pytest.fixture
def fixtures_dir():
    return FIXTURES
