"""Independent reference implementations used to check the package.

Everything here is deliberately naive (loops, dense scans, finite
differences) and shares no code with the production paths it validates.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False


def inner_loop(a, b) -> complex:
    """Summation-loop inner product, conjugating the first argument."""
    total = 0.0 + 0.0j
    for ai, bi in zip(a, b):
        total += complex(ai).conjugate() * complex(bi)
    return total


def dft_matrix(n: int) -> np.ndarray:
    """Direct double-loop unnormalized DFT matrix."""
    out = np.empty((n, n), dtype=np.complex128)
    for k in range(n):
        for j in range(n):
            out[k, j] = np.exp(-2j * np.pi * k * j / n)
    return out


def measurements_loop(vectors, x) -> np.ndarray:
    """Per-entry loop evaluation of |<a_m, x>|^2."""
    m = len(vectors)
    out = np.empty(m)
    for i in range(m):
        out[i] = abs(inner_loop(vectors[i], x)) ** 2
    return out


def correction_objective(a_m, v, y_m, x, lam_a, lam_y) -> float:
    """f_m evaluated from scratch on a full vector."""
    diff = np.asarray(v) - np.asarray(a_m)
    misfit = y_m - abs(inner_loop(v, x)) ** 2
    return lam_a * float(np.real(np.sum(diff.conj() * diff))) + lam_y * misfit**2


if _HAVE_NUMBA:

    @njit(cache=True)
    def _grid_scan(nu_a_re, nu_a_im, y, lam_a, lam_y, norm_x_sq, radius, step):
        best = np.inf
        count = int(np.ceil(2.0 * radius / step)) + 1
        for i in range(count):
            re = -radius + i * step
            dre = re - nu_a_re
            re_sq = re * re
            for k in range(count):
                im = -radius + k * step
                dim = im - nu_a_im
                misfit = y - (re_sq + im * im)
                f = lam_a * (dre * dre + dim * dim) / norm_x_sq + lam_y * misfit * misfit
                if f < best:
                    best = f
        return best

    def grid_min(nu_a, y, lam_a, lam_y, norm_x_sq, radius, step) -> float:
        return float(
            _grid_scan(nu_a.real, nu_a.imag, float(y), lam_a, lam_y, norm_x_sq, radius, step)
        )

else:  # pragma: no cover - slower row-streamed fallback

    def grid_min(nu_a, y, lam_a, lam_y, norm_x_sq, radius, step) -> float:
        axis = np.arange(-radius, radius + step, step)
        best = np.inf
        im_sq = axis**2
        dim_sq = (axis - nu_a.imag) ** 2
        for re in axis:
            misfit = y - (re * re + im_sq)
            f = lam_a * ((re - nu_a.real) ** 2 + dim_sq) / norm_x_sq + lam_y * misfit**2
            best = min(best, float(f.min()))
        return best


def wirtinger_gradient_fd(func, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Central-difference Wirtinger gradient of a real scalar function.

    Uses d/d conj(z) = (d/d Re + 1j * d/d Im) / 2 per coordinate.
    """
    n = x.shape[0]
    grad = np.zeros(n, dtype=np.complex128)
    for i in range(n):
        e = np.zeros(n, dtype=np.complex128)
        e[i] = h
        d_re = (func(x + e) - func(x - e)) / (2.0 * h)
        d_im = (func(x + 1j * e) - func(x - 1j * e)) / (2.0 * h)
        grad[i] = 0.5 * (d_re + 1j * d_im)
    return grad


def min_over_phase_grid(x_sharp, x_hat, angles: int = 10_000) -> float:
    """Brute-force min over a phase grid of ||x_sharp - exp(j phi) x_hat||."""
    phis = np.linspace(0.0, 2.0 * np.pi, angles, endpoint=False)
    best = np.inf
    for phi in phis:
        best = min(best, float(np.linalg.norm(x_sharp - np.exp(1j * phi) * x_hat)))
    return best
