import dataclasses

import pytest
from hypothesis import strategies as st

from rfharvest import NetworkParams, validate


def make_params(**kw) -> NetworkParams:
    """Validated parameter set; defaults follow the common study setup."""
    base = dict(lambda_p_total=0.01, lambda_s=0.1, power_p=1.0, power_s=0.1,
                alpha=4.0, eta=0.1, r_g=3.0, r_h=1.0, d_p=0.5, d_s=0.5,
                theta_p=5.0, theta_s=5.0, eps_p=0.2, eps_s=0.3,
                access_prob=1.0, noise=0.0)
    base.update(kw)
    return validate(NetworkParams(**base), warn=False)


@pytest.fixture
def fig9_params() -> NetworkParams:
    return make_params(lambda_s=0.1, power_p=1.0, power_s=0.1, r_g=3.0, r_h=1.0)


def replace_params(params, **kw) -> NetworkParams:
    return validate(dataclasses.replace(params, **kw), warn=False)


@st.composite
def valid_params(draw):
    r_g = draw(st.floats(1.5, 8.0))
    return make_params(
        alpha=draw(st.floats(2.3, 6.0)),
        eta=draw(st.floats(0.02, 0.9)),
        r_g=r_g,
        r_h=r_g * draw(st.floats(0.1, 0.8)),
        d_p=r_g * draw(st.floats(0.05, 0.5)),
        d_s=draw(st.floats(0.1, 1.5)),
        lambda_p_total=draw(st.floats(1e-4, 0.05)),
        lambda_s=draw(st.floats(0.05, 0.5)),
        access_prob=draw(st.floats(0.1, 1.0)),
        power_p=draw(st.floats(0.5, 4.0)),
        power_s=draw(st.floats(1e-3, 0.5)),
        theta_p=draw(st.floats(0.5, 20.0)),
        theta_s=draw(st.floats(0.5, 20.0)),
        eps_p=draw(st.floats(0.02, 0.5)),
        eps_s=draw(st.floats(0.02, 0.5)),
    )


@st.composite
def zone_draws(draw):
    """Random consistent zone probabilities: p_1 + p2_prime + p_3 = p_h."""
    from rfharvest import ZoneProbabilities

    p_g = draw(st.floats(0.05, 0.99))
    p_h = draw(st.floats(1e-4, 0.9))
    u = sorted((draw(st.floats(0.0, 1.0)), draw(st.floats(0.0, 1.0))))
    p_1, p2p, p_3 = p_h * u[0], p_h * (u[1] - u[0]), p_h * (1.0 - u[1])
    return ZoneProbabilities(p_g=p_g, p_h=p_h, p_1=p_1, p_2=p_h - p_1,
                             p2_prime=p2p, p_3=p_3)
