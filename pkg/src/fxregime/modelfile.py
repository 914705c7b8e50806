"""Declarative text format for regime parameters and the chain generator.

The format is line-oriented ``key = value`` with ``#`` comments.  Vectors are
comma- or whitespace-separated; the generator lists its rows separated by
semicolons.  ``initial_distribution`` is optional and defaults to the
stationary distribution of the generator.  Example::

    n_states = 3
    mu = 0.02, 0.05, -0.01
    sigma = 0.12, 0.25, 0.18
    lambda = 1.0, 2.0, 0.5
    r_d = 0.03, 0.05, 0.02
    r_f = 0.01, 0.02, 0.015
    generator = -0.9 0.6 0.3 ; 0.4 -1.0 0.6 ; 0.5 0.5 -1.0
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import InputError
from .markov import MarkovRegimeModel, RegimeParameters

_VECTOR_KEYS = ("mu", "sigma", "lambda", "r_d", "r_f")


def default_model() -> tuple[RegimeParameters, MarkovRegimeModel]:
    """Built-in three-state model used when no config file is given.

    The values are illustrative defaults chosen to exercise all three regimes;
    they are not calibrated to any market.
    """
    params = RegimeParameters(
        mu=[0.02, 0.05, -0.01],
        sigma=[0.12, 0.25, 0.18],
        lam=[1.0, 2.0, 0.5],
        r_d=[0.03, 0.05, 0.02],
        r_f=[0.01, 0.02, 0.015],
    )
    chain = MarkovRegimeModel(
        generator=[[-0.9, 0.6, 0.3], [0.4, -1.0, 0.6], [0.5, 0.5, -1.0]]
    )
    return params, chain


def _parse_vector(text: str, key: str, lineno: int) -> np.ndarray:
    parts = [p for p in text.replace(",", " ").split() if p]
    try:
        return np.asarray([float(p) for p in parts])
    except ValueError:
        raise InputError(f"line {lineno}: could not parse {key} entries from {text!r}") from None


def parse_model_text(text: str) -> tuple[RegimeParameters, MarkovRegimeModel]:
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in entries:
            raise InputError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = (value, lineno)

    missing = [k for k in (*_VECTOR_KEYS, "generator") if k not in entries]
    if missing:
        raise InputError(f"missing required keys: {missing}")

    vectors = {}
    for key in _VECTOR_KEYS:
        value, lineno = entries.pop(key)
        vectors[key] = _parse_vector(value, key, lineno)

    value, lineno = entries.pop("generator")
    rows = [r for r in value.split(";") if r.strip()]
    generator = np.asarray([_parse_vector(r, "generator", lineno) for r in rows])

    initial = None
    if "initial_distribution" in entries:
        value, lineno = entries.pop("initial_distribution")
        initial = _parse_vector(value, "initial_distribution", lineno)

    if "n_states" in entries:
        value, lineno = entries.pop("n_states")
        declared = int(value)
        if declared != vectors["mu"].size:
            raise InputError(
                f"line {lineno}: n_states = {declared} but vectors have length {vectors['mu'].size}"
            )
    if entries:
        raise InputError(f"unknown keys: {sorted(entries)}")

    params = RegimeParameters(
        mu=vectors["mu"],
        sigma=vectors["sigma"],
        lam=vectors["lambda"],
        r_d=vectors["r_d"],
        r_f=vectors["r_f"],
    )
    chain = MarkovRegimeModel(generator=generator, initial_distribution=initial)
    if params.n_states != chain.n_states:
        raise InputError(
            f"vectors cover {params.n_states} states but the generator is {chain.n_states}x{chain.n_states}"
        )
    return params, chain


def parse_model_file(path) -> tuple[RegimeParameters, MarkovRegimeModel]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"could not read model file {path}: {exc}") from exc
    return parse_model_text(text)


def format_model(params: RegimeParameters, chain: MarkovRegimeModel) -> str:
    """Render a model in the file format at full double precision."""

    def vec(values) -> str:
        return ", ".join(repr(float(v)) for v in values)

    lines = [
        f"n_states = {params.n_states}",
        f"mu = {vec(params.mu)}",
        f"sigma = {vec(params.sigma)}",
        f"lambda = {vec(params.lam)}",
        f"r_d = {vec(params.r_d)}",
        f"r_f = {vec(params.r_f)}",
        "generator = " + " ; ".join(vec(row) for row in chain.generator),
        f"initial_distribution = {vec(chain.initial_distribution)}",
    ]
    return "\n".join(lines) + "\n"


def write_model_file(path, params: RegimeParameters, chain: MarkovRegimeModel) -> None:
    Path(path).write_text(format_model(params, chain))
