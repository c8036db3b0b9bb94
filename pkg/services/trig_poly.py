import logging
from typing import Union

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import optimize

from config.settings import NUMERICS
from models.trig_models import TrigPoly

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


def constant(value: complex = 1.0) -> TrigPoly:
    return TrigPoly(np.array([value], dtype=complex))


def dirichlet(n: int) -> TrigPoly:
    """Normalized Dirichlet kernel D_n / n: peak value 1 at x = 0, L2 norm 1/sqrt(n)"""
    if n < 1:
        raise ValueError(f"Dirichlet kernel length must be positive, got {n}")
    return TrigPoly(np.full(n, 1.0 / n, dtype=complex))


def evaluate(f: TrigPoly, x: ArrayLike):
    """f(x) by Horner's rule in z = e^{2 pi i x}; accepts scalars or arrays"""
    z = np.exp(2j * np.pi * np.asarray(x, dtype=float))
    values = P.polyval(z, f.coeffs)
    return complex(values) if np.ndim(values) == 0 else values


def multiply(f: TrigPoly, g: TrigPoly) -> TrigPoly:
    return TrigPoly(np.convolve(f.coeffs, g.coeffs))


def modulate(f: TrigPoly, ell: int) -> TrigPoly:
    """e^{2 pi i ell x} f(x)"""
    if ell < 0:
        raise ValueError(f"Modulation index must be nonnegative, got {ell}")
    return TrigPoly(np.concatenate([np.zeros(ell, dtype=complex), f.coeffs]))


def shift(f: TrigPoly, t: float) -> TrigPoly:
    """x -> f(x - t)"""
    k = np.arange(f.coeffs.size)
    return TrigPoly(f.coeffs * np.exp(-2j * np.pi * k * t))


def l2_norm(f: TrigPoly) -> float:
    return float(np.linalg.norm(f.coeffs))


def l1_bound(f: TrigPoly) -> float:
    """l1 norm of the coefficients, a rigorous upper bound on the sup norm"""
    return float(np.abs(f.coeffs).sum())


def quadrature_l2(f: TrigPoly) -> float:
    """L2 norm on the torus from the trapezoid rule on 4(deg+1) points (exact for |f|^2)"""
    n = 4 * (f.deg + 1)
    values = evaluate(f, np.arange(n) / n)
    return float(np.sqrt(np.mean(np.abs(values) ** 2)))


def sup_norm(f: TrigPoly) -> float:
    """
    Estimate of max_x |f(x)| from below.

    Samples 32(deg+1) equispaced points and refines around the best sample with a
    golden-section search; the result never exceeds the true sup norm up to
    round-off, while l1_bound gives the rigorous envelope from above.
    """
    if f.deg == 0:
        return float(abs(f.coeffs[0]))
    n = NUMERICS.sup_oversample * (f.deg + 1)
    grid = np.arange(n) / n
    samples = np.abs(evaluate(f, grid))
    best = int(np.argmax(samples))
    sampled_max = float(samples[best])

    def negative_modulus(x: float) -> float:
        return -abs(evaluate(f, x))

    bracket = (grid[best] - 1.0 / n, grid[best], grid[best] + 1.0 / n)
    try:
        res = optimize.minimize_scalar(
            negative_modulus, bracket=bracket, method='golden',
            options={'xtol': NUMERICS.golden_xtol, 'maxiter': NUMERICS.golden_maxiter})
        refined = -float(res.fun)
    except (ValueError, RuntimeError) as e:
        # flat neighbourhoods do not form a strict bracket
        logger.debug(f"Golden refinement skipped: {e}")
        refined = sampled_max
    return max(sampled_max, refined)
