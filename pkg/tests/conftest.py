import pytest

from levi_ramsey import ConfigDocument, ExperimentConfig, ReducedCouplings


@pytest.fixture(scope="session")
def config():
    return ExperimentConfig()


@pytest.fixture(scope="session")
def document(config):
    return ConfigDocument(config=config)


@pytest.fixture(scope="session")
def rc(document):
    """Reduced couplings of the shipped design point."""
    return document.reduced()


@pytest.fixture(scope="session")
def fig2():
    """Trajectory-figure couplings: l = 0.5, dl = 0.05 (in hbar*omega_z units)."""
    return ReducedCouplings.from_dimensionless(l=0.5, dl=0.05)


@pytest.fixture(scope="session")
def fig2_aniso():
    """Same couplings with a nonzero dimensionless anisotropy."""
    return ReducedCouplings.from_dimensionless(l=0.5, dl=0.05, d=0.3)
