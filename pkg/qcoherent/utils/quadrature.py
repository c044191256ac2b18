"""
quadrature.py — Filon's rule for Fourier-type integrals, Richardson weights
and composite moment integration.

Filon integrates int f(y) exp(-i k y) dy exactly for f piecewise quadratic on
pairs of uniform intervals, so the error depends on the smoothness of f and
not on the oscillation frequency k.
"""
import numpy as np
from scipy.integrate import simpson

# below this |theta| the closed-form coefficients lose digits to cancellation
_SERIES_SWITCH = 0.05


def filon_coefficients(theta: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """alpha, beta, gamma of Filon's rule for theta = k * dy."""
    theta = np.asarray(theta, dtype=float)
    alpha = np.empty_like(theta)
    beta = np.empty_like(theta)
    gamma = np.empty_like(theta)

    small = np.abs(theta) < _SERIES_SWITCH
    t = theta[small]
    t2 = t * t
    alpha[small] = t * t2 * (2 / 45 - t2 * (2 / 315 - t2 * 2 / 4725))
    beta[small] = 2 / 3 + t2 * (2 / 15 - t2 * (4 / 105 - t2 * 2 / 567))
    gamma[small] = 4 / 3 - t2 * (2 / 15 - t2 * (1 / 210 - t2 / 11340))

    t = theta[~small]
    sin_t, cos_t = np.sin(t), np.cos(t)
    itheta3 = 1.0 / (t * t * t)
    alpha[~small] = itheta3 * (t * t + t * sin_t * cos_t - 2 * sin_t * sin_t)
    beta[~small] = 2 * itheta3 * (t * (1 + cos_t * cos_t) - 2 * sin_t * cos_t)
    gamma[~small] = 4 * itheta3 * (sin_t - t * cos_t)
    return alpha, beta, gamma


def filon_fourier(f: np.ndarray, y0: float, dy: float, k: np.ndarray) -> np.ndarray:
    """
    int_{y0}^{y0 + (len(f)-1) dy} f(y) exp(-i k y) dy for every k.
    f may be complex; its length must be odd and at least 3.
    """
    f = np.asarray(f, dtype=complex)
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if f.size < 3 or f.size % 2 == 0:
        raise ValueError(f"Filon's rule needs an odd number (>= 3) of samples, got {f.size}")

    y = y0 + dy * np.arange(f.size)
    alpha, beta, gamma = filon_coefficients(k * dy)
    phase = np.exp(-1j * np.outer(k, y))

    even = f[::2].copy()
    even[0] *= 0.5
    even[-1] *= 0.5
    ends = f[-1] * phase[:, -1] - f[0] * phase[:, 0]
    return dy * (
        1j * alpha * ends
        + beta * (phase[:, ::2] @ even)
        + gamma * (phase[:, 1::2] @ f[1::2])
    )


def richardson_weights(steps: list[float]) -> np.ndarray:
    """
    Weights w_i with sum_i w_i g(h_i) = g(0) for every polynomial g of degree
    < len(steps): the Lagrange basis evaluated at h = 0.
    """
    h = np.asarray(steps, dtype=float)
    if h.size < 1 or np.unique(h).size != h.size:
        raise ValueError(f"steps must be distinct, got {steps}")
    weights = np.ones(h.size)
    for i in range(h.size):
        for j in range(h.size):
            if j != i:
                weights[i] *= h[j] / (h[j] - h[i])
    return weights


def moment(grid: np.ndarray, values: np.ndarray, n: int) -> float:
    """Composite Simpson approximation of int x^n W(x) dx over the grid."""
    return float(simpson(values * grid ** n, x=grid))
