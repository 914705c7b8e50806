import numpy as np
import pytest

from fxregime.calibration import EURUSD_REFERENCE_MATRIX, TransitionEstimate, embed_generator
from fxregime.markov import MarkovRegimeModel, RegimeParameters
from fxregime.modelfile import default_model


@pytest.fixture(scope="session")
def three_state():
    """Shipped illustrative parameters and chain."""
    return default_model()


@pytest.fixture(scope="session")
def calibrated_chain() -> MarkovRegimeModel:
    """Generator embedded from the reference EURUSD transition matrix at daily bars."""
    counts = np.rint(EURUSD_REFERENCE_MATRIX * 10_000).astype(int)
    est = TransitionEstimate(
        matrix=EURUSD_REFERENCE_MATRIX, counts=counts, bar_interval=1.0 / 252.0
    )
    return embed_generator(est)


@pytest.fixture(scope="session")
def single_state_flat() -> tuple[RegimeParameters, MarkovRegimeModel]:
    """One-regime market with zero rates: prices reduce to plain Black-Scholes."""
    params = RegimeParameters(mu=[0.0], sigma=[0.2], lam=[0.0], r_d=[0.0], r_f=[0.0])
    chain = MarkovRegimeModel(generator=[[0.0]], initial_distribution=[1.0])
    return params, chain
