import pytest

from secrecysim.model import NetworkConfig
from secrecysim.sweep import reference_config


@pytest.fixture
def fig2_cfg():
    return reference_config(n_bs=64, n_fj=1).with_rho_db(20.0)


@pytest.fixture
def fig3_cfg():
    return reference_config(n_bs=256, n_fj=4).with_rho_db(30.0)


@pytest.fixture
def small_cfg():
    return NetworkConfig(n_bs=8, n_fj=2, mu_fr=0.5).with_rho_db(20.0)
