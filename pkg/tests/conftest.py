import pytest

from polyharmonic_cubature import PoissonDensity, from_density


@pytest.fixture(scope="session")
def poisson2():
    """Damped Poisson density (alpha = 2) on the unit disk, harmonics up to degree 12."""
    return from_density(PoissonDensity(2.0), 0.0, 1.0, k_max=12)


@pytest.fixture(scope="session")
def poisson2_k16():
    return from_density(PoissonDensity(2.0), 0.0, 1.0, k_max=16)


@pytest.fixture(scope="session")
def poisson2_annulus():
    return from_density(PoissonDensity(2.0), 0.5, 1.0, k_max=12)
