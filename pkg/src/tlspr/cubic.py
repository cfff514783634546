"""Closed-form cubic root finding.

For a*x^3 + b*x^2 + c*x + d = 0 (a != 0) the three roots are

    x_k = -(b + t^k * psi3 + psi0 / (t^k * psi3)) / (3a),   k = 0, 1, 2

with psi0 = b^2 - 3ac, psi1 = 2b^3 - 9abc + 27a^2 d,
psi3 = cbrt((psi1 + sqrt(psi1^2 - 4 psi0^3)) / 2) and t the primitive cube
root of unity.  Everything is computed in complex arithmetic so the
casus-irreducibilis branch (three real roots, negative discriminant) needs no
special casing; real roots are recovered with an imaginary-part threshold.
"""

from __future__ import annotations

import numpy as np

# Primitive cube root of unity.
_OMEGA = complex(-0.5, 0.5 * np.sqrt(3.0))

# Roots with |Im| <= REAL_TOL * max(1, |Re|) count as real.
REAL_TOL = 1e-9
# Positive roots must exceed this; smaller magnitudes are treated as zero.
POSITIVE_TOL = 1e-12
# Relative spacing under which two roots are merged as one.
MERGE_TOL = 1e-9


def all_roots(a: complex, b: complex, c: complex, d: complex) -> np.ndarray:
    """All three roots of a*x^3 + b*x^2 + c*x + d, as a complex array."""
    if a == 0:
        raise ValueError("leading coefficient must be nonzero")
    a = complex(a)
    b = complex(b)
    c = complex(c)
    d = complex(d)
    psi0 = b * b - 3.0 * a * c
    psi1 = 2.0 * b**3 - 9.0 * a * b * c + 27.0 * a * a * d
    scale = max(abs(psi0) ** 1.5, abs(psi1))
    disc_root = np.sqrt(complex(psi1 * psi1 - 4.0 * psi0**3))
    # The two branches multiply to psi0^3; the larger one avoids cancellation.
    plus = 0.5 * (psi1 + disc_root)
    minus = 0.5 * (psi1 - disc_root)
    half = plus if abs(plus) >= abs(minus) else minus
    if abs(half) <= 1e-14 * scale or scale == 0.0:
        # psi0 = psi1 = 0: triple root at -b/(3a).
        return np.full(3, -b / (3.0 * a), dtype=np.complex128)
    psi3 = half ** (1.0 / 3.0)
    ks = psi3 * np.array([1.0, _OMEGA, _OMEGA**2], dtype=np.complex128)
    coeffs = np.array([a, b, c, d], dtype=np.complex128)
    roots = _polish(coeffs, -(b + ks + psi0 / ks) / (3.0 * a))
    if not _residuals_ok(coeffs, roots):
        # Extreme coefficient ratios can collapse nearby roots through
        # discriminant cancellation; companion-matrix eigenvalues recover them.
        roots = _polish(coeffs, np.roots(coeffs).astype(np.complex128))
    return roots


def _residuals_ok(coeffs: np.ndarray, roots: np.ndarray) -> bool:
    a, b, c, d = coeffs
    scale = max(abs(a), abs(b), abs(c), abs(d))
    for z in roots:
        bound = 0.5e-8 * scale * max(1.0, abs(z)) ** 3
        if abs(((a * z + b) * z + c) * z + d) > bound:
            return False
    return True


def _polish(coeffs: np.ndarray, roots: np.ndarray, steps: int = 2) -> np.ndarray:
    """Guarded Newton refinement; wildly scaled coefficients otherwise lose
    several digits to cancellation in the closed form."""
    a, b, c, d = coeffs
    for _ in range(steps):
        p = ((a * roots + b) * roots + c) * roots + d
        dp = (3.0 * a * roots + 2.0 * b) * roots + c
        safe = np.abs(dp) > 0
        candidate = np.where(safe, roots - p / np.where(safe, dp, 1.0), roots)
        p_new = ((a * candidate + b) * candidate + c) * candidate + d
        roots = np.where(np.abs(p_new) < np.abs(p), candidate, roots)
    return roots


def residual_scale(a, b, c, d, root) -> float:
    """Bound scale used in tests: max coefficient times max(1, |x|)^3."""
    coeff = max(abs(a), abs(b), abs(c), abs(d))
    return coeff * max(1.0, abs(root)) ** 3


def positive_real_roots(alpha: float, beta: float, gamma_const: float) -> np.ndarray:
    """Positive real roots of the depressed cubic alpha*r^3 + beta*r + gamma_const.

    Roots below POSITIVE_TOL are discarded; near-coincident roots are merged.
    Requires alpha > 0.
    """
    if not (alpha > 0):
        raise ValueError("alpha must be > 0")
    roots = all_roots(alpha, 0.0, beta, gamma_const)
    out = []
    for z in roots:
        if abs(z.imag) <= REAL_TOL * max(1.0, abs(z.real)) and z.real > POSITIVE_TOL:
            out.append(z.real)
    out.sort()
    merged: list[float] = []
    for r in out:
        if merged and abs(r - merged[-1]) <= MERGE_TOL * max(abs(r), abs(merged[-1])):
            continue
        merged.append(r)
    return np.asarray(merged, dtype=np.float64)


def depressed_roots_batch(alpha: float, beta: np.ndarray, const: np.ndarray) -> np.ndarray:
    """Roots of alpha*r^3 + beta_i*r + const_i for a whole batch at once.

    Returns an (len(beta), 3) complex array; no realness filtering or
    de-duplication is applied (callers mask what they need).  alpha is a
    shared positive scalar.
    """
    if not (alpha > 0):
        raise ValueError("alpha must be > 0")
    beta = np.asarray(beta, dtype=np.float64)
    const = np.asarray(const, dtype=np.float64)
    psi0 = -3.0 * alpha * beta  # b = 0
    psi1 = 27.0 * alpha * alpha * const
    scale = np.maximum(np.abs(psi0) ** 1.5, np.abs(psi1))
    disc_root = np.sqrt((psi1 * psi1 - 4.0 * psi0**3).astype(np.complex128))
    plus = 0.5 * (psi1 + disc_root)
    minus = 0.5 * (psi1 - disc_root)
    half = np.where(np.abs(plus) >= np.abs(minus), plus, minus)
    degenerate = np.abs(half) <= 1e-14 * scale
    psi3 = np.where(degenerate, 1.0, half) ** (1.0 / 3.0)
    units = np.array([1.0, _OMEGA, _OMEGA**2], dtype=np.complex128)
    ks = psi3[:, None] * units[None, :]
    roots = -(ks + psi0[:, None] / ks) / (3.0 * alpha)
    if np.any(degenerate):
        roots[degenerate, :] = 0.0  # triple root at -b/(3a) = 0
    for _ in range(2):
        p = (alpha * roots * roots + beta[:, None]) * roots + const[:, None]
        dp = 3.0 * alpha * roots * roots + beta[:, None]
        safe = np.abs(dp) > 0
        candidate = np.where(safe, roots - p / np.where(safe, dp, 1.0), roots)
        p_new = (alpha * candidate * candidate + beta[:, None]) * candidate + const[:, None]
        roots = np.where(np.abs(p_new) < np.abs(p), candidate, roots)
    return roots
