"""Local-differential-privacy perturbation of scalars in [-1, 1].

Four randomizers are provided, all unbiased estimators of their input:

* Laplace: input plus Laplace(0, 2/eps) noise (sensitivity of the [-1, 1]
  domain is 2), sampled by inverse CDF from a single unit draw.
* Duchi: two-point output +/-(e^eps + 1)/(e^eps - 1) with the positive
  branch probability affine in the input.
* Piecewise: continuous output on [-c, c], c = (e^(eps/2) + 1)/(e^(eps/2) - 1),
  concentrated on an input-centred subinterval of width c - 1.
* Hybrid: coin-flip mixture of Piecewise and Duchi; the Piecewise weight is
  1 - e^(-eps/2) above the budget threshold EPS_STAR and 0 below it.

Every sampler draws from an explicitly passed SplitMix64, consuming a fixed
number of unit draws per call (Laplace 1, Duchi 1, Piecewise 2, Hybrid
1 + draws of the chosen branch) so full sessions replay deterministically.
The *_batch variants produce n samples vectorized; for Laplace, Duchi and
Piecewise they consume the unit stream exactly like n scalar calls, while
hybrid_batch draws its n branch coins up front and is therefore equal in
distribution, not in stream, to n scalar calls.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .errors import BudgetError
from .rng import SplitMix64

# Budget threshold below which the hybrid mechanism degenerates to Duchi.
EPS_STAR = 0.61

# Gradient submissions carry 4 feature partials plus the bias partial.
GRADIENT_DIM = 5


class MechanismKind(str, enum.Enum):
    NONE = "none"
    LAPLACE = "laplace"
    DUCHI = "duchi"
    PIECEWISE = "piecewise"
    HYBRID = "hybrid"


def _check_budget(eps: float) -> None:
    if not math.isfinite(eps) or eps <= 0:
        raise BudgetError(f"privacy budget must be a positive finite real, got {eps!r}")


def laplace_perturb(t: float, eps: float, rng: SplitMix64) -> float:
    """Add Laplace(0, 2/eps) noise to t; output is unbounded."""
    _check_budget(eps)
    b = 2.0 / eps
    d = rng.next_unit() - 0.5
    sign = 1.0 if d > 0 else (-1.0 if d < 0 else 0.0)
    # np.log1p rather than math.log1p: libm disagrees with numpy by an ulp
    # on some inputs, and the batch variant must replay bit-identically
    return t - b * sign * float(np.log1p(-2.0 * abs(d)))


def laplace_perturb_batch(t: float, eps: float, rng: SplitMix64, n: int) -> np.ndarray:
    _check_budget(eps)
    b = 2.0 / eps
    d = rng.next_units(n) - 0.5
    return t - b * np.sign(d) * np.log1p(-2.0 * np.abs(d))


def duchi_output_probabilities(t: float, eps: float) -> tuple[float, float]:
    """Closed-form (Pr[+c], Pr[-c]) of the Duchi mechanism for input t."""
    _check_budget(eps)
    e = math.exp(eps)
    p_pos = t * (e - 1.0) / (2.0 * (e + 1.0)) + 0.5
    return p_pos, 1.0 - p_pos


def duchi_magnitude(eps: float) -> float:
    """The two-point output magnitude (e^eps + 1)/(e^eps - 1)."""
    _check_budget(eps)
    e = math.exp(eps)
    return (e + 1.0) / (e - 1.0)


def duchi_max_privacy_ratio(eps: float) -> float:
    """Worst-case Pr[out | t] / Pr[out | t'] over all inputs and both outputs.

    Pr[+c | t] is affine and increasing in t, so the ratio is maximized at
    the domain endpoints t = 1, t' = -1 (and symmetrically for -c).
    """
    p_hi, _ = duchi_output_probabilities(1.0, eps)
    p_lo, _ = duchi_output_probabilities(-1.0, eps)
    return p_hi / p_lo


def duchi_perturb(t: float, eps: float, rng: SplitMix64) -> float:
    """Two-point unbiased randomizer: +/-(e^eps + 1)/(e^eps - 1)."""
    c = duchi_magnitude(eps)
    p_pos, _ = duchi_output_probabilities(t, eps)
    return c if rng.next_unit() < p_pos else -c


def duchi_perturb_batch(t: float, eps: float, rng: SplitMix64, n: int) -> np.ndarray:
    c = duchi_magnitude(eps)
    p_pos, _ = duchi_output_probabilities(t, eps)
    return np.where(rng.next_units(n) < p_pos, c, -c)


def piecewise_bounds(t: float, eps: float) -> tuple[float, float, float]:
    """(c, lo, hi): output support is [-c, c]; [lo, hi] is the favoured band."""
    _check_budget(eps)
    e_half = math.exp(eps / 2.0)
    c = (e_half + 1.0) / (e_half - 1.0)
    lo = (c + 1.0) / 2.0 * t - (c - 1.0) / 2.0
    hi = lo + c - 1.0
    return c, lo, hi


def piecewise_perturb(t: float, eps: float, rng: SplitMix64) -> float:
    """Sample the piecewise mechanism: uniform on [lo, hi] with probability
    e^(eps/2)/(e^(eps/2) + 1), otherwise uniform on the rest of [-c, c]."""
    c, lo, hi = piecewise_bounds(t, eps)
    e_half = math.exp(eps / 2.0)
    u_branch = rng.next_unit()
    u_pos = rng.next_unit()
    if u_branch < e_half / (e_half + 1.0):
        return lo + u_pos * (hi - lo)
    # The two tail segments [-c, lo) and (hi, c] have total length c + 1;
    # map one uniform draw across both, skipping the favoured band.
    x = -c + u_pos * (c + 1.0)
    return x if x < lo else x + (hi - lo)


def piecewise_perturb_batch(t: float, eps: float, rng: SplitMix64, n: int) -> np.ndarray:
    c, lo, hi = piecewise_bounds(t, eps)
    e_half = math.exp(eps / 2.0)
    units = rng.next_units(2 * n)
    u_branch = units[0::2]
    u_pos = units[1::2]
    center = lo + u_pos * (hi - lo)
    x = -c + u_pos * (c + 1.0)
    tail = np.where(x < lo, x, x + (hi - lo))
    return np.where(u_branch < e_half / (e_half + 1.0), center, tail)


def hybrid_piecewise_weight(eps: float) -> float:
    """Probability of taking the Piecewise branch inside the hybrid."""
    _check_budget(eps)
    return 1.0 - math.exp(-eps / 2.0) if eps > EPS_STAR else 0.0


def hybrid_perturb(t: float, eps: float, rng: SplitMix64) -> float:
    """Mixture of Piecewise and Duchi; both branches share the full eps."""
    alpha = hybrid_piecewise_weight(eps)
    if rng.next_unit() < alpha:
        return piecewise_perturb(t, eps, rng)
    return duchi_perturb(t, eps, rng)


def hybrid_perturb_batch(t: float, eps: float, rng: SplitMix64, n: int) -> np.ndarray:
    alpha = hybrid_piecewise_weight(eps)
    take_pw = rng.next_units(n) < alpha
    n_pw = int(take_pw.sum())
    out = np.empty(n)
    out[take_pw] = piecewise_perturb_batch(t, eps, rng, n_pw)
    out[~take_pw] = duchi_perturb_batch(t, eps, rng, n - n_pw)
    return out


_SCALAR = {
    MechanismKind.LAPLACE: laplace_perturb,
    MechanismKind.DUCHI: duchi_perturb,
    MechanismKind.PIECEWISE: piecewise_perturb,
    MechanismKind.HYBRID: hybrid_perturb,
}

_BATCH = {
    MechanismKind.LAPLACE: laplace_perturb_batch,
    MechanismKind.DUCHI: duchi_perturb_batch,
    MechanismKind.PIECEWISE: piecewise_perturb_batch,
    MechanismKind.HYBRID: hybrid_perturb_batch,
}


def perturb_scalar(kind: MechanismKind, t: float, eps: float, rng: SplitMix64) -> float:
    """Dispatch one scalar perturbation; kind NONE passes t through."""
    if kind is MechanismKind.NONE:
        return t
    return _SCALAR[kind](t, eps, rng)


def perturb_batch(
    kind: MechanismKind, t: float, eps: float, rng: SplitMix64, n: int
) -> np.ndarray:
    """n independent perturbations of the same input, vectorized."""
    if kind is MechanismKind.NONE:
        return np.full(n, float(t))
    return _BATCH[kind](t, eps, rng, n)


def perturb_gradient(
    g: np.ndarray,
    eps: float | None,
    kind: MechanismKind,
    rng: SplitMix64,
) -> np.ndarray:
    """Perturb a gradient vector under a total budget of eps.

    With kind NONE the gradient passes through untouched (no clipping), which
    is what lets the aggregator invert it exactly.  Otherwise each component
    is clipped to [-1, 1] and perturbed independently with an equal budget
    share eps/len(g), i.e. eps/5 for the 5-component submissions used here;
    sequential composition prices the whole vector at eps.  Components are
    consumed in index order so the draw stream is reproducible.
    """
    g = np.asarray(g, dtype=float)
    if kind is MechanismKind.NONE:
        return g.copy()
    if eps is None:
        raise BudgetError(f"mechanism {kind.value!r} requires a privacy budget")
    _check_budget(eps)
    eps_each = eps / len(g)
    clipped = np.clip(g, -1.0, 1.0)
    mech = _SCALAR[kind]
    return np.array([mech(float(v), eps_each, rng) for v in clipped])
