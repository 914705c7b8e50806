"""Continuous-time Markov regime chain: model types, exact simulation, occupation times.

The chain is specified by a generator (rate) matrix ``Q`` in the row convention:
``Q[i, j]`` for ``j != i`` is the instantaneous rate of jumping from state ``i``
to state ``j`` (per year), and each row sums to zero.  All regime-dependent
market parameters are plain per-state vectors looked up along the simulated
state path.

The only chain statistic the pricing layer consumes is the occupation-time
vector ``J[i]`` = time spent in state ``i`` over ``[0, T]``.  Its joint moment
generating function has the closed form

    E[exp(<u, J>)] = p0^T expm((Q + diag(u)) T) 1

which this module evaluates as an independent cross-check of the exact path
simulation.  (With a row-convention generator the initial distribution
multiplies on the left; putting it on the right would silently use the
transposed generator, which differs whenever Q is asymmetric.)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import InvalidModelError

_ROW_SUM_TOL = 1e-12

#: Parameter selectors accepted by :meth:`RegimeParameters.value_at`.
PARAMETER_FIELDS = ("mu", "sigma", "lambda", "r_d", "r_f")


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def stationary_distribution(generator: np.ndarray) -> np.ndarray:
    """Solve pi @ Q = 0 with sum(pi) = 1 for a valid generator Q.

    For a generator with several closed classes (e.g. the all-zero matrix) the
    stationary vector is not unique; the minimum-norm least-squares solution is
    returned, which is the uniform vector in the fully degenerate case.
    """
    q = np.asarray(generator, dtype=float)
    n = q.shape[0]
    a = np.vstack([q.T, np.ones(n)])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(a, b, rcond=None)
    pi = np.clip(pi, 0.0, None)
    total = pi.sum()
    if total <= 0.0 or not np.all(np.isfinite(pi)):
        raise InvalidModelError("could not compute a stationary distribution")
    pi = pi / total
    residual = np.abs(pi @ q).max()
    if residual > 1e-8:
        raise InvalidModelError(
            f"stationary solve left residual {residual:.3e}; generator may be ill-conditioned"
        )
    return pi


@dataclass(frozen=True)
class MarkovRegimeModel:
    """Finite-state CTMC given by a row-convention generator matrix.

    ``initial_distribution`` defaults to the stationary distribution of the
    generator when omitted.
    """

    generator: np.ndarray
    initial_distribution: np.ndarray | None = None

    def __post_init__(self):
        q = np.array(self.generator, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise InvalidModelError(f"generator must be square, got shape {q.shape}")
        if not np.all(np.isfinite(q)):
            raise InvalidModelError("generator entries must be finite")
        n = q.shape[0]
        off = q[~np.eye(n, dtype=bool)]
        if off.size and off.min() < 0.0:
            raise InvalidModelError("off-diagonal generator entries must be non-negative")
        row_sums = np.abs(q.sum(axis=1))
        if row_sums.size and row_sums.max() > _ROW_SUM_TOL:
            raise InvalidModelError(
                f"generator rows must sum to 0 within {_ROW_SUM_TOL}, got max |sum| {row_sums.max():.3e}"
            )
        object.__setattr__(self, "generator", _frozen_array(q))

        if self.initial_distribution is None:
            p0 = stationary_distribution(q)
        else:
            p0 = np.array(self.initial_distribution, dtype=float)
            if p0.shape != (n,):
                raise InvalidModelError(
                    f"initial_distribution must have length {n}, got shape {p0.shape}"
                )
            if not np.all(np.isfinite(p0)) or p0.min() < 0.0:
                raise InvalidModelError("initial_distribution entries must be finite and >= 0")
            if abs(p0.sum() - 1.0) > _ROW_SUM_TOL:
                raise InvalidModelError("initial_distribution must sum to 1")
        object.__setattr__(self, "initial_distribution", _frozen_array(p0))

    @property
    def n_states(self) -> int:
        return self.generator.shape[0]


@dataclass(frozen=True)
class RegimeParameters:
    """Per-state market parameters: drift, volatility, jump intensity, rates.

    ``mu`` and the rate vectors are in 1/year, ``sigma`` in 1/sqrt(year) and
    strictly positive, ``lam`` in expected jumps/year and non-negative.
    """

    mu: np.ndarray
    sigma: np.ndarray
    lam: np.ndarray
    r_d: np.ndarray
    r_f: np.ndarray

    def __post_init__(self):
        arrays = {}
        n = None
        for name in ("mu", "sigma", "lam", "r_d", "r_f"):
            arr = np.atleast_1d(np.array(getattr(self, name), dtype=float))
            if arr.ndim != 1:
                raise InvalidModelError(f"{name} must be a vector")
            if not np.all(np.isfinite(arr)):
                raise InvalidModelError(f"{name} entries must be finite")
            if n is None:
                n = arr.size
            elif arr.size != n:
                raise InvalidModelError(
                    f"all parameter vectors must share one length; {name} has {arr.size}, expected {n}"
                )
            arrays[name] = arr
        if arrays["sigma"].min() <= 0.0:
            raise InvalidModelError("sigma entries must be strictly positive")
        if arrays["lam"].min() < 0.0:
            raise InvalidModelError("lambda entries must be non-negative")
        for name, arr in arrays.items():
            object.__setattr__(self, name, _frozen_array(arr))

    @property
    def n_states(self) -> int:
        return self.mu.size

    def value_at(self, parameter: str, state: int) -> float:
        """Look up one per-state parameter; ``parameter`` is one of PARAMETER_FIELDS."""
        if parameter not in PARAMETER_FIELDS:
            raise KeyError(f"unknown parameter {parameter!r}; expected one of {PARAMETER_FIELDS}")
        if not 0 <= state < self.n_states:
            raise IndexError(f"state {state} out of range for {self.n_states} states")
        attr = "lam" if parameter == "lambda" else parameter
        return float(getattr(self, attr)[state])


def regime_value_at(params: RegimeParameters, parameter: str, state: int) -> float:
    """Functional alias for :meth:`RegimeParameters.value_at`."""
    return params.value_at(parameter, state)


@dataclass(frozen=True)
class OccupationTimes:
    """Time spent in each state over one simulated horizon."""

    occupation: np.ndarray
    horizon: float
    terminal_state: int

    def __post_init__(self):
        occ = np.array(self.occupation, dtype=float)
        if occ.min() < 0.0:
            raise InvalidModelError("occupation entries must be non-negative")
        if abs(occ.sum() - self.horizon) > 1e-10:
            raise InvalidModelError(
                f"occupation must sum to the horizon: {occ.sum()!r} vs {self.horizon!r}"
            )
        object.__setattr__(self, "occupation", _frozen_array(occ))


def _as_generator(rng_seed) -> np.random.Generator:
    if isinstance(rng_seed, np.random.Generator):
        return rng_seed
    return np.random.default_rng(rng_seed)


def simulate_occupation(model: MarkovRegimeModel, horizon: float, rng_seed) -> OccupationTimes:
    """Simulate one exact chain path and return its occupation-time vector.

    The initial state is drawn from ``model.initial_distribution``; holding
    times are exponential with the state's exit rate and the next state is
    chosen proportionally to the off-diagonal row entries.  No time grid is
    involved, so occupation times carry no discretization bias.

    ``rng_seed`` may be an integer seed or a ``numpy.random.Generator``.
    Identical seeds produce identical paths.
    """
    if horizon <= 0.0:
        raise InvalidModelError(f"horizon must be positive, got {horizon!r}")
    rng = _as_generator(rng_seed)
    q = model.generator
    n = model.n_states
    occupation = np.zeros(n)
    state = int(rng.choice(n, p=model.initial_distribution))
    remaining = float(horizon)
    while True:
        rate = -q[state, state]
        if rate <= 0.0:
            occupation[state] += remaining
            break
        hold = rng.exponential(1.0 / rate)
        if hold >= remaining:
            occupation[state] += remaining
            break
        occupation[state] += hold
        remaining -= hold
        probs = np.clip(q[state], 0.0, None)
        probs[state] = 0.0
        state = int(rng.choice(n, p=probs / probs.sum()))
    return OccupationTimes(occupation=occupation, horizon=float(horizon), terminal_state=state)


def simulate_occupation_batch(
    model: MarkovRegimeModel, horizon: float, n_paths: int, rng_seed
) -> tuple[np.ndarray, np.ndarray]:
    """Simulate ``n_paths`` independent exact chain paths at once.

    Returns ``(occupation, terminal_state)`` with shapes ``(n_paths, n_states)``
    and ``(n_paths,)``.  Paths advance in synchronized rounds of vectorized
    exponential draws, which is equivalent in law to per-path simulation.
    """
    if horizon <= 0.0:
        raise InvalidModelError(f"horizon must be positive, got {horizon!r}")
    if n_paths < 1:
        raise InvalidModelError("n_paths must be >= 1")
    rng = _as_generator(rng_seed)
    q = model.generator
    n = model.n_states
    rates = -np.diag(q)
    jump_probs = np.clip(q, 0.0, None)
    np.fill_diagonal(jump_probs, 0.0)
    with np.errstate(invalid="ignore"):
        jump_probs = np.where(rates[:, None] > 0, jump_probs / np.where(rates > 0, rates, 1.0)[:, None], 0.0)
    cum_probs = np.cumsum(jump_probs, axis=1)
    cum_probs[rates > 0, -1] = 1.0

    occupation = np.zeros((n_paths, n))
    state = rng.choice(n, size=n_paths, p=model.initial_distribution)
    remaining = np.full(n_paths, float(horizon))
    active = np.arange(n_paths)

    while active.size:
        s = state[active]
        r = rates[s]
        absorbed = r <= 0.0
        if absorbed.any():
            idx = active[absorbed]
            occupation[idx, s[absorbed]] += remaining[idx]
            active = active[~absorbed]
            s = s[~absorbed]
            r = r[~absorbed]
            if not active.size:
                break
        hold = rng.standard_exponential(active.size) / r
        expired = hold >= remaining[active]
        if expired.any():
            idx = active[expired]
            occupation[idx, s[expired]] += remaining[idx]
        moving = ~expired
        idx = active[moving]
        if not idx.size:
            break
        s_move = s[moving]
        h_move = hold[moving]
        occupation[idx, s_move] += h_move
        remaining[idx] -= h_move
        u = rng.random(idx.size)
        nxt = (cum_probs[s_move] <= u[:, None]).sum(axis=1)
        state[idx] = np.minimum(nxt, n - 1)
        active = idx

    return occupation, state


def occupation_char_function(model: MarkovRegimeModel, u, horizon: float):
    """Joint MGF of the occupation-time vector, E[exp(<u, J(0, T)>)].

    Evaluated as ``p0^T expm((Q + diag(u)) T) 1`` via the scaling-and-squaring
    matrix exponential.  Accepts real or complex transform variables; returns a
    float for real input, complex otherwise.
    """
    if horizon < 0.0:
        raise InvalidModelError(f"horizon must be non-negative, got {horizon!r}")
    u = np.atleast_1d(np.asarray(u))
    if u.shape != (model.n_states,):
        raise InvalidModelError(
            f"u must have length {model.n_states}, got shape {u.shape}"
        )
    a = (model.generator + np.diag(u)) * horizon
    value = model.initial_distribution @ expm(a) @ np.ones(model.n_states)
    if np.iscomplexobj(u):
        return complex(value)
    return float(np.real(value))
