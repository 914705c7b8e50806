from pathlib import Path

import numpy as np
import pytest

from fxregime.errors import InputError
from fxregime.modelfile import (
    default_model,
    format_model,
    parse_model_file,
    parse_model_text,
    write_model_file,
)

REPO_ROOT = Path(__file__).resolve().parents[1]


def test_round_trip_preserves_values(tmp_path):
    params, chain = default_model()
    path = tmp_path / "model.cfg"
    write_model_file(path, params, chain)
    params2, chain2 = parse_model_file(path)
    for name in ("mu", "sigma", "lam", "r_d", "r_f"):
        np.testing.assert_array_equal(getattr(params2, name), getattr(params, name))
    np.testing.assert_array_equal(chain2.generator, chain.generator)
    np.testing.assert_array_equal(chain2.initial_distribution, chain.initial_distribution)


def test_shipped_config_matches_builtin_default():
    params, chain = default_model()
    params2, chain2 = parse_model_file(REPO_ROOT / "configs" / "three_state.cfg")
    np.testing.assert_array_equal(params2.mu, params.mu)
    np.testing.assert_array_equal(params2.lam, params.lam)
    np.testing.assert_array_equal(chain2.generator, chain.generator)


def test_comments_and_separators():
    params, chain = parse_model_text(
        """
        # one state, comma or space separated
        n_states = 1
        mu = 0.0
        sigma = 0.2
        lambda = 0.0
        r_d = 0.02   # domestic
        r_f = 0.0
        generator = 0.0
        """
    )
    assert params.n_states == chain.n_states == 1
    assert params.value_at("r_d", 0) == 0.02


@pytest.mark.parametrize(
    "text,match",
    [
        ("mu = 0.1", "missing required keys"),
        ("n_states = 2\nmu = 0.1\nsigma = 0.2\nlambda = 0\nr_d = 0\nr_f = 0\ngenerator = 0.0", "n_states"),
        ("mu = 0.1\nmu = 0.2", "duplicate"),
        ("bogus line without equals", "key = value"),
        ("mu = 0.1\nsigma = 0.2\nlambda = 0\nr_d = 0\nr_f = 0\ngenerator = 0.0\nextra = 1", "unknown keys"),
        ("mu = abc\nsigma = 0.2\nlambda = 0\nr_d = 0\nr_f = 0\ngenerator = 0.0", "could not parse"),
    ],
)
def test_malformed_inputs(text, match):
    with pytest.raises(InputError, match=match):
        parse_model_text(text)


def test_missing_file():
    with pytest.raises(InputError):
        parse_model_file("/nonexistent/model.cfg")


def test_format_is_reparseable_text():
    params, chain = default_model()
    text = format_model(params, chain)
    params2, chain2 = parse_model_text(text)
    np.testing.assert_array_equal(params2.sigma, params.sigma)
    np.testing.assert_array_equal(chain2.generator, chain.generator)
