"""Exponential-tilt (Esscher) parameters and the risk-neutral jump model.

The discounted spot FX rate is a martingale under the tilted measure exactly
when, state by state,

    r_f - r_d + mu + theta_c * sigma^2 + lambda_q * k_q = 0,

where ``lambda_q = lambda * M(theta_j)`` is the tilted jump intensity,
``M`` the MGF of the physical jump law, and ``k_q`` the mean of ``e^Z - 1``
under the transformed law.  This module adopts the parameterization that sets
``k_q = 0``, which decouples the two parameters:

* ``theta_c[i] = (r_d[i] - r_f[i] - mu[i]) / sigma[i]^2``  per state, and
* ``theta_j`` solves ``M(theta + 1) = M(theta)``, independent of the state.

Closed forms: for the double-exponential law the condition reduces to a
quadratic (linear when ``p*theta1 == (1-p)*theta2``, e.g. symmetric
parameters) whose unique admissible root lies in ``(-theta2, theta1 - 1)``;
for normal log jumps ``theta_j = -(mu_j + sigma_j^2/2) / sigma_j^2``.  A
generic bisection solver doubles as the oracle for both closed forms.

The transformed jump law keeps the double-exponential decay rates and moves
only the branch probability to

    p_new = (M(t+1)/M(t) - theta2/(theta2+1)) / (theta1/(theta1-1) - theta2/(theta2+1)),

tilts a normal law by shifting its mean to ``mu_j + theta_j * sigma_j^2``, and
tilts a custom law literally: ``x -> exp(theta x) density(x) / M(theta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, InconsistencyError, InvalidModelError, NoSolutionError
from .jumps import Custom, DoubleExponential, JumpDistribution, Normal
from .markov import MarkovRegimeModel, RegimeParameters, _frozen_array

#: Residual bound enforced on the per-state martingale condition.
MARTINGALE_TOL = 1e-10

#: Bound enforced on |M(theta*+1)/M(theta*) - 1| and on |k_q|.
RATIO_TOL = 1e-9


@dataclass(frozen=True)
class EsscherParameters:
    """Solved tilt parameters: per-state diffusion tilt and one jump tilt."""

    theta_c: np.ndarray
    theta_j: float

    def __post_init__(self):
        object.__setattr__(self, "theta_c", _frozen_array(np.atleast_1d(self.theta_c)))


@dataclass(frozen=True)
class RiskNeutralModel:
    """Everything pricing needs about the tilted measure.

    ``lambda_q[i] = base.lam[i] * M(theta_j)`` is the tilted intensity,
    ``jump_q`` the transformed jump law (``jump_p`` keeps the physical one so
    callers can choose which measure's jump variance to feed the series), and
    ``k_q`` the mean of ``e^Z - 1`` under ``jump_q`` (zero by construction,
    kept as a field so the invariant is visible and checkable).
    """

    base: RegimeParameters
    chain: MarkovRegimeModel
    esscher: EsscherParameters
    lambda_q: np.ndarray
    jump_q: JumpDistribution
    jump_p: JumpDistribution
    k_q: float

    def __post_init__(self):
        object.__setattr__(self, "lambda_q", _frozen_array(np.atleast_1d(self.lambda_q)))


def solve_theta_c(params: RegimeParameters) -> np.ndarray:
    """Per-state diffusion tilt (r_d - r_f - mu) / sigma^2."""
    return (params.r_d - params.r_f - params.mu) / params.sigma**2


def _mgf_ratio(dist: JumpDistribution, theta: float) -> float:
    """M(theta + 1) / M(theta), mapping over/underflow to the correct limit sign."""
    with np.errstate(over="ignore"):
        num = dist.mgf(theta + 1.0)
        den = dist.mgf(theta)
    num_ok = math.isfinite(num) and num > 0.0
    den_ok = math.isfinite(den) and den > 0.0
    if num_ok and den_ok:
        return num / den
    if den_ok:
        return math.inf
    if num_ok:
        return 0.0
    raise NoSolutionError(
        f"MGF over- or underflowed on both sides at theta={theta!r}; "
        "restrict the search interval"
    )


def _probe(g, bound: float, other: float, want_negative: bool) -> float | None:
    """Walk toward ``bound`` until g has the wanted sign; None if it never does."""

    def accepts(value: float) -> bool:
        return value <= 0.0 if want_negative else value >= 0.0

    if math.isfinite(bound):
        gap = abs(other - bound) if math.isfinite(other) else 1.0
        for _ in range(100):
            gap *= 0.5
            t = bound + gap if want_negative else bound - gap
            if accepts(g(t)):
                return t
            if gap < 1e-14 * max(1.0, abs(bound)):
                return None
        return None
    t = -1.0 if want_negative else 1.0
    for _ in range(60):
        if accepts(g(t)):
            return t
        t *= 2.0
    return None


def solve_theta_j_bisection(dist: JumpDistribution, tol: float = 1e-12) -> float:
    """Solve M(theta + 1) = M(theta) by bisection on the (monotone) MGF ratio.

    Works for any jump law; serves both as the solver for custom laws and as
    the independent oracle for the closed forms.
    """
    lo, hi = dist.mgf_interval
    a_bound, b_bound = lo, hi - 1.0
    if not a_bound < b_bound:
        raise NoSolutionError(
            f"admissible interval ({a_bound!r}, {b_bound!r}) for theta_j is empty"
        )

    def g(t: float) -> float:
        return _mgf_ratio(dist, t) - 1.0

    a = _probe(g, a_bound, b_bound, want_negative=True)
    b = _probe(g, b_bound, a_bound, want_negative=False)
    if a is None or b is None:
        raise NoSolutionError("no sign change of M(theta+1) - M(theta) on the admissible interval")
    if a > b:
        # both probes walked to within rounding of the root and crossed over
        if a - b > 1e-9 * max(1.0, abs(a)):
            raise NoSolutionError(
                "no sign change of M(theta+1) - M(theta) on the admissible interval"
            )
        root = 0.5 * (a + b)
        _verify_root(dist, root)
        return root
    for _ in range(300):
        if b - a <= tol:
            break
        mid = 0.5 * (a + b)
        if g(mid) < 0.0:
            a = mid
        else:
            b = mid
    root = 0.5 * (a + b)
    _verify_root(dist, root)
    return root


def _verify_root(dist: JumpDistribution, theta: float) -> None:
    try:
        ratio = _mgf_ratio(dist, theta)
    except NoSolutionError as exc:
        raise InconsistencyError(
            f"theta_j={theta!r} cannot be verified: the MGF leaves the representable "
            "range at the root (jump-law parameters are too extreme)"
        ) from exc
    if abs(ratio - 1.0) > RATIO_TOL:
        raise InconsistencyError(
            f"theta_j={theta!r} fails the martingale identity: |M(t+1)/M(t) - 1| = {abs(ratio - 1.0):.3e}"
        )


def _double_exponential_root(dist: DoubleExponential) -> float:
    t1, t2, p = dist.theta1, dist.theta2, dist.p
    lo, hi = -t2, t1 - 1.0
    if not lo < hi:
        raise NoSolutionError(f"admissible interval ({lo!r}, {hi!r}) for theta_j is empty")
    a2 = p * t1 - (1.0 - p) * t2
    a1 = p * t1 + 2.0 * t1 * t2 - (1.0 - p) * t2
    a0 = p * t1 * t2**2 + p * t2 * t1**2 - t2 * t1**2 + t1 * t2
    scale = p * t1 + (1.0 - p) * t2
    if abs(a2) <= 1e-12 * scale:
        # symmetric-weight case: the quadratic degenerates to a linear equation
        return -a0 / a1
    disc = a1 * a1 - 4.0 * a2 * a0
    if disc < 0.0:
        raise NoSolutionError("quadratic for theta_j has no real root")
    sqrt_disc = math.sqrt(disc)
    q = -0.5 * (a1 + math.copysign(sqrt_disc, a1))
    roots = [q / a2]
    if q != 0.0:
        roots.append(a0 / q)
    else:
        roots.append(-a1 / a2 - roots[0])
    inside = [r for r in roots if lo < r < hi]
    if len(inside) == 1:
        return inside[0]
    if not inside:
        raise NoSolutionError(
            f"neither quadratic root {roots!r} lies in the admissible interval ({lo!r}, {hi!r})"
        )
    raise InconsistencyError(
        f"both quadratic roots {roots!r} lie in ({lo!r}, {hi!r}); the MGF ratio is monotone so this is a bug"
    )


def solve_theta_j(dist: JumpDistribution) -> float:
    """Jump tilt solving M(theta + 1) = M(theta); closed form where available.

    Double-exponential and normal laws use their closed forms (the former
    including the degenerate linear branch); custom laws fall back to
    :func:`solve_theta_j_bisection`.  Every branch re-verifies
    ``|M(theta*+1)/M(theta*) - 1| <= 1e-9`` before returning.
    """
    if isinstance(dist, DoubleExponential):
        root = _double_exponential_root(dist)
    elif isinstance(dist, Normal):
        root = -(dist.mu_j + 0.5 * dist.sigma_j**2) / dist.sigma_j**2
    else:
        return solve_theta_j_bisection(dist)
    _verify_root(dist, root)
    return root


def risk_neutral_intensity(lambda_p, dist: JumpDistribution, theta_j: float) -> np.ndarray:
    """Tilted per-state jump intensity lambda_i * M(theta_j).

    For normal log jumps at the solved tilt this equals
    ``lambda * exp(-mu_j^2 / (2 sigma_j^2) + sigma_j^2 / 8)``; note that the
    superficially simpler ``lambda * (-mu_j / (2 sigma_j^2) + sigma_j^2 / 8)``
    (no exponential, mu_j not squared) is *not* an intensity at all -- it can
    go negative -- and does not satisfy lambda * M(theta).
    """
    lam = np.atleast_1d(np.asarray(lambda_p, dtype=float))
    if lam.min() < 0.0:
        raise InvalidModelError("intensities must be non-negative")
    return lam * dist.mgf(theta_j)


def transform_jump_law(dist: JumpDistribution, theta_j: float) -> JumpDistribution:
    """Jump law under the tilted measure; see module docstring for the forms."""
    if theta_j == 0.0:
        return dist
    if isinstance(dist, DoubleExponential):
        t1, t2 = dist.theta1, dist.theta2
        if not -t2 < theta_j < t1 - 1.0:
            raise DivergenceError(
                f"transform needs theta_j in ({-t2!r}, {t1 - 1.0!r}), got {theta_j!r}"
            )
        if t1 <= 1.0:
            raise DivergenceError(
                f"transformed double-exponential law needs theta1 > 1, got {t1!r}"
            )
        ratio = dist.mgf(theta_j + 1.0) / dist.mgf(theta_j)
        right = t1 / (t1 - 1.0)
        left = t2 / (t2 + 1.0)
        p_new = (ratio - left) / (right - left)
        if not 0.0 <= p_new <= 1.0:
            raise InconsistencyError(
                f"transformed branch probability {p_new!r} falls outside [0, 1]"
            )
        return DoubleExponential(t1, t2, p_new)
    if isinstance(dist, Normal):
        return Normal(dist.mu_j + theta_j * dist.sigma_j**2, dist.sigma_j)
    lo, hi = dist.mgf_interval
    if not lo < theta_j < hi:
        raise DivergenceError(
            f"theta_j={theta_j!r} outside the finite-MGF interval ({lo!r}, {hi!r})"
        )
    norm = dist.mgf(theta_j)
    base_density = dist.density_at
    base_mgf = dist.mgf
    return Custom(
        density=lambda x: math.exp(theta_j * x) * base_density(x) / norm,
        mgf_interval=(lo - theta_j, hi - theta_j),
        mgf_fn=lambda s: base_mgf(theta_j + s) / norm,
        support=dist.support if isinstance(dist, Custom) else (-math.inf, math.inf),
    )


def mean_jump_size(dist_q: JumpDistribution) -> float:
    """Mean percentage jump size E[e^Z - 1] = M(1) - 1 under the given law."""
    lo, hi = dist_q.mgf_interval
    if not lo < 1.0 < hi:
        raise DivergenceError(
            f"E[e^Z] diverges: 1 outside the finite-MGF interval ({lo!r}, {hi!r})"
        )
    return dist_q.mgf(1.0) - 1.0


def build_risk_neutral_model(
    params: RegimeParameters, chain: MarkovRegimeModel, dist: JumpDistribution
) -> RiskNeutralModel:
    """Solve the tilt, transform the jump law, and assemble the pricing model.

    Raises ``InconsistencyError`` if the assembled model violates either
    ``k_q = 0`` (within 1e-9) or the per-state martingale residual bound
    (1e-10); both should be unreachable for valid inputs.
    """
    if params.n_states != chain.n_states:
        raise InvalidModelError(
            f"parameter vectors cover {params.n_states} states but the chain has {chain.n_states}"
        )
    theta_c = solve_theta_c(params)
    theta_j = solve_theta_j(dist)
    lambda_q = risk_neutral_intensity(params.lam, dist, theta_j)
    jump_q = transform_jump_law(dist, theta_j)
    k_q = mean_jump_size(jump_q)
    if abs(k_q) > RATIO_TOL:
        raise InconsistencyError(f"transformed law has mean jump size {k_q!r}, expected 0")
    residual = params.r_f - params.r_d + params.mu + theta_c * params.sigma**2 + lambda_q * k_q
    worst = np.abs(residual).max()
    if worst > MARTINGALE_TOL:
        raise InconsistencyError(f"martingale residual {worst:.3e} exceeds {MARTINGALE_TOL}")
    return RiskNeutralModel(
        base=params,
        chain=chain,
        esscher=EsscherParameters(theta_c=theta_c, theta_j=theta_j),
        lambda_q=lambda_q,
        jump_q=jump_q,
        jump_p=dist,
        k_q=k_q,
    )
