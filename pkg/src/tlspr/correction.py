"""Closed-form per-measurement sensing-vector correction.

For a fixed signal estimate ``x`` each sensing vector ``a_m`` is replaced by
the global minimizer of

    f_m(v) = lambda_a * ||a_m - v||^2 + lambda_y * (y_m - |inner(v, x)|^2)^2 .

The minimizer differs from ``a_m`` only along ``x``, so it is fully described
by the scalar nu = inner(v, x).  Stationarity of f_m reduces to the pair of
depressed cubics

    alpha r^3 + beta r +/- |gamma| = 0,
    alpha = 2 lambda_y ||x||^2,
    beta  = lambda_a - 2 lambda_y y_m ||x||^2,
    gamma = -lambda_a inner(a_m, x),

whose positive real roots, rotated onto the phase of gamma (plus cubic) or
its antipode (minus cubic), enumerate every candidate nu.  Evaluating f_m on
the candidates and keeping the best one yields the global minimum.

When gamma = 0 (a_m orthogonal to x) the phase is arbitrary; candidates are
placed on phase zero and nu = 0 is added, since the stationarity equation
degenerates to alpha r^3 + beta r = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DimensionMismatchError, inner
from .cubic import POSITIVE_TOL, REAL_TOL, depressed_roots_batch, positive_real_roots

# Ties in the candidate objective within this relative margin are broken by
# the smaller perturbation ||v - a_m||.
TIE_REL_TOL = 1e-12


@dataclass(frozen=True)
class CorrectionParams:
    """Weights of the perturbation and data-misfit terms."""

    lambda_a: float
    lambda_y: float

    def __post_init__(self):
        for name in ("lambda_a", "lambda_y"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v!r}")


@dataclass(frozen=True)
class CorrectionResult:
    corrected: np.ndarray
    nu: complex
    objective_value: float
    candidates_evaluated: int


def reconstruct_from_nu(a_m: np.ndarray, x: np.ndarray, nu: complex) -> np.ndarray:
    """Vector v with inner(v, x) = nu that differs from a_m only along x."""
    a_m = np.asarray(a_m, dtype=np.complex128)
    x = np.asarray(x, dtype=np.complex128)
    if a_m.shape != x.shape:
        raise DimensionMismatchError(f"shape mismatch: {a_m.shape} vs {x.shape}")
    norm_sq = float(np.vdot(x, x).real)
    if norm_sq == 0.0:
        raise ValueError("x must be nonzero")
    shift = np.conj(nu - inner(a_m, x)) / norm_sq
    return a_m + shift * x


def objective_on_vector(a_m, v, y_m: float, x, params: CorrectionParams) -> float:
    """f_m evaluated on a full candidate vector v."""
    a_m = np.asarray(a_m, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    diff = v - a_m
    misfit = y_m - abs(inner(v, np.asarray(x, dtype=np.complex128))) ** 2
    return params.lambda_a * float(np.vdot(diff, diff).real) + params.lambda_y * misfit**2


def stationary_candidates(a_m, y_m: float, x, params: CorrectionParams) -> np.ndarray:
    """All stationary values of nu = inner(v, x), as a complex array."""
    a_m = np.asarray(a_m, dtype=np.complex128)
    x = np.asarray(x, dtype=np.complex128)
    norm_sq = float(np.vdot(x, x).real)
    if norm_sq == 0.0:
        raise ValueError("x must be nonzero")
    nu_a = inner(a_m, x)
    alpha = 2.0 * params.lambda_y * norm_sq
    beta = params.lambda_a - 2.0 * params.lambda_y * y_m * norm_sq
    gamma = -params.lambda_a * nu_a
    phase = np.exp(1j * np.angle(gamma))
    plus = positive_real_roots(alpha, beta, abs(gamma))
    minus = positive_real_roots(alpha, beta, -abs(gamma))
    cands = [phase * r for r in plus] + [-phase * r for r in minus]
    if gamma == 0 or not cands:
        # gamma = 0, or the only root fell below the positivity tolerance
        # (|gamma| vanishing relative to beta): nu = 0 is then optimal to
        # within that tolerance.
        cands.append(0.0 + 0.0j)
    return np.asarray(cands, dtype=np.complex128)


def correct_sensing_vector(a_m, y_m: float, x, params: CorrectionParams) -> CorrectionResult:
    """Globally minimize f_m over corrected vectors; see the module docstring.

    Every candidate nu is mapped to a full vector with
    :func:`reconstruct_from_nu` and f_m is evaluated on it; ties are broken
    toward the smaller perturbation.
    """
    a_m = np.asarray(a_m, dtype=np.complex128)
    x = np.asarray(x, dtype=np.complex128)
    if a_m.shape != x.shape:
        raise DimensionMismatchError(f"shape mismatch: {a_m.shape} vs {x.shape}")
    if not (np.all(np.isfinite(a_m)) and np.all(np.isfinite(x)) and np.isfinite(y_m)):
        raise ValueError("inputs must be finite")
    candidates = stationary_candidates(a_m, y_m, x, params)
    best = None
    for nu in candidates:
        v = reconstruct_from_nu(a_m, x, nu)
        fval = objective_on_vector(a_m, v, y_m, x, params)
        pert = float(np.linalg.norm(v - a_m))
        if (
            best is None
            or fval < best[0] * (1.0 - TIE_REL_TOL)
            or (fval <= best[0] * (1.0 + TIE_REL_TOL) and pert < best[2])
        ):
            best = (fval, nu, pert, v)
    fval, nu, _, v = best
    return CorrectionResult(
        corrected=v,
        nu=complex(nu),
        objective_value=float(fval),
        candidates_evaluated=len(candidates),
    )


def sweep_corrections(
    vectors: np.ndarray,
    y: np.ndarray,
    x: np.ndarray,
    lambda_a: float,
    lambda_y: float,
    nu_a: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Correct all M sensing vectors at once for a fixed x.

    Parameters
    ----------
    vectors : (M, N) complex array of sensing vectors (rows).
    y : (M,) measurements.
    x : (N,) current signal estimate, nonzero.
    nu_a : optional precomputed inner(a_m, x) per row.

    Returns ``(nu_star, f_star)``: the optimal nu per measurement and the
    attained f_m values.  The corrected vectors themselves are
    ``vectors + outer(conj(nu_star - nu_a) / ||x||^2, x)``
    (see :func:`apply_corrections`); callers that only need inner products
    with x can work with nu_star directly since inner(v_m, x) = nu_star_m.
    """
    vectors = np.asarray(vectors, dtype=np.complex128)
    y = np.asarray(y, dtype=np.float64)
    x = np.asarray(x, dtype=np.complex128)
    norm_sq = float(np.vdot(x, x).real)
    if norm_sq == 0.0:
        raise ValueError("x must be nonzero")
    if nu_a is None:
        nu_a = vectors.conj() @ x
    alpha = 2.0 * lambda_y * norm_sq
    beta = lambda_a - 2.0 * lambda_y * norm_sq * y
    gamma_abs = lambda_a * np.abs(nu_a)
    # Phase of gamma = -lambda_a * nu_a; zero maps to phase 0 like np.angle.
    safe = np.where(nu_a == 0, 1.0, -nu_a)
    phase = safe / np.abs(safe)

    roots_plus = depressed_roots_batch(alpha, beta, gamma_abs)
    roots_minus = depressed_roots_batch(alpha, beta, -gamma_abs)

    def _real_positive(roots):
        ok = (np.abs(roots.imag) <= REAL_TOL * np.maximum(1.0, np.abs(roots.real))) & (
            roots.real > POSITIVE_TOL
        )
        return np.where(ok, roots.real, np.nan)

    r_plus = _real_positive(roots_plus)
    r_minus = _real_positive(roots_minus)
    # Candidate nus, shape (M, 7): rotated roots plus the nu = 0 slot, valid
    # where gamma = 0 or as fallback when every root was filtered out.
    cands = np.concatenate(
        [
            phase[:, None] * r_plus,
            -phase[:, None] * r_minus,
            np.zeros((len(y), 1), dtype=np.complex128),
        ],
        axis=1,
    )
    valid = ~np.isnan(cands.real)
    valid[:, -1] = (gamma_abs == 0.0) | ~valid[:, :-1].any(axis=1)
    cands = np.where(valid, cands, 0.0)

    pert_sq = np.abs(cands - nu_a[:, None]) ** 2 / norm_sq
    fvals = lambda_a * pert_sq + lambda_y * (y[:, None] - np.abs(cands) ** 2) ** 2
    fvals = np.where(valid, fvals, np.inf)

    fmin = fvals.min(axis=1)
    tie = fvals <= fmin[:, None] * (1.0 + TIE_REL_TOL) + 1e-300
    pert_for_tie = np.where(tie, pert_sq, np.inf)
    pick = pert_for_tie.argmin(axis=1)
    rows = np.arange(len(y))
    nu_star = cands[rows, pick]
    f_star = fvals[rows, pick]
    return nu_star, f_star


def apply_corrections(vectors: np.ndarray, x: np.ndarray, nu_star: np.ndarray) -> np.ndarray:
    """Materialize the corrected ensemble for the sweep output."""
    norm_sq = float(np.vdot(x, x).real)
    nu_a = vectors.conj() @ x
    shift = np.conj(nu_star - nu_a) / norm_sq
    return vectors + np.outer(shift, x)
