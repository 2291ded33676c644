"""Shared fixtures: small seeded chains reused across test modules."""

import numpy as np
import pytest

from openxxz.params import sample_boundary, sample_model
from openxxz.transfer import Chain


def make_chain(seed: int, n_sites: int, homogeneous: bool = False) -> Chain:
    """A generically sampled chain; one rng stream for model and boundary."""
    rng = np.random.default_rng(seed)
    model = sample_model(rng, n_sites=n_sites, homogeneous=homogeneous)
    boundary = sample_boundary(rng)
    return Chain(model, boundary)


@pytest.fixture(scope="session")
def chain1() -> Chain:
    return make_chain(101, 1)


@pytest.fixture(scope="session")
def chain2() -> Chain:
    return make_chain(102, 2)


@pytest.fixture(scope="session")
def chain3() -> Chain:
    return make_chain(103, 3)
