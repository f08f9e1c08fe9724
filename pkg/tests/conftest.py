import warnings

import numpy as np
import pytest

from pvtnet.channel import ChannelParams, db_to_linear
from pvtnet.config import load_profile
from pvtnet.power import PowerParams
from pvtnet.traffic import TrafficModel

# lambda_inf slightly above lambda_b (edge-case intensity config) warns by design
warnings.filterwarnings("ignore", message="lambda_inf exceeds lambda_b")

LAMBDA_B = 1.0 / (np.pi * 800.0 ** 2)


def make_power_params(ratio=130.0, beta=3.8, sigma=6.0, theta=1.8, rho_min=2.0,
                      inf_frac=0.8, e_s=1e-10, p_max=40.0, eta=0.047,
                      pc=354.4, **kw) -> PowerParams:
    ch = ChannelParams(path_loss_exp=beta, shadowing_db=sigma,
                       gain_const=db_to_linear(-31.54),
                       sir_gap=db_to_linear(8.6), bandwidth=1.0)
    tr = TrafficModel(theta=theta, rho_min=rho_min,
                      lambda_m=ratio * LAMBDA_B, lambda_b=LAMBDA_B)
    return PowerParams(channel=ch, traffic=tr, lambda_inf=inf_frac * LAMBDA_B,
                       recv_moment=e_s, p_max=p_max, eta_rf=eta, p_circuit=pc, **kw)


@pytest.fixture(scope="session")
def default_config():
    return load_profile("sec52_default")


@pytest.fixture(scope="session")
def traffic_config():
    return load_profile("sec33_traffic")


@pytest.fixture(scope="session")
def default_power():
    return make_power_params()


@pytest.fixture(scope="session")
def cf_test_matrix():
    """Twelve parameter points spanning the study's configuration space."""
    combos = [
        dict(ratio=15, beta=3.8, theta=1.8, rho_min=2.0, inf_frac=0.8),
        dict(ratio=30, beta=3.5, theta=1.8, rho_min=2.0, inf_frac=0.9),
        dict(ratio=130, beta=3.8, theta=1.8, rho_min=2.0, inf_frac=0.8),
        dict(ratio=130, beta=3.6, theta=1.8, rho_min=2.0, inf_frac=0.8),
        dict(ratio=130, beta=4.0, theta=1.8, rho_min=2.0, inf_frac=0.8),
        dict(ratio=130, beta=3.8, theta=1.2, rho_min=2.0, inf_frac=0.8),
        dict(ratio=130, beta=3.8, theta=1.2, rho_min=3.0, inf_frac=0.8),
        dict(ratio=130, beta=3.8, theta=1.8, rho_min=3.0, inf_frac=0.8),
        dict(ratio=5, beta=3.8, theta=2.0, rho_min=2.0, inf_frac=0.8),
        dict(ratio=130, beta=3.8, theta=1.5, rho_min=2.0, inf_frac=0.6),
        dict(ratio=200, beta=3.8, theta=1.8, rho_min=2.0, inf_frac=1.0),
        dict(ratio=60, beta=3.8, theta=1.8, rho_min=2.0, sigma=8.0, inf_frac=0.8),
    ]
    return [make_power_params(**c) for c in combos]
