"""First-order reconstruction-error predictors for the real-valued problem.

With clean sensing matrix A (M x N), clean measurements y_m = <a_m, x#>^2,
error blocks E_A (M x N) and E_Y (M diagonal entries), and the weight ratio
rho = lambda_y / lambda_a, define

    d_m = 1 / (1 + 4 * rho * ||x#||^2 * y_m)            (diagonal of D)
    w   = ((2Y)^{-1} E_Y A - E_A) x#

The first-order reconstruction errors of the two solvers are

    e_tls = || (A^T Y D A)^{-1} A^T Y D w ||
    e_ls  = || (A^T Y A)^{-1} A^T Y w ||

and under independent zero-mean Gaussian errors (variance sigma_delta^2 per
sensing entry, sigma_eta^2 per measurement) the expected squared errors are

    E[e^2] = sigma_delta^2 ||x#||^2 ||R||_F^2 + (sigma_eta^2 / 4) ||R Y^{-1/2}||_F^2

with R the corresponding solve matrix ((A^T Y D A)^{-1} A^T Y D for TLS, the
D-free analogue for LS).

Everything here is real-valued; complex inputs are rejected rather than
extrapolated.  All solves go through factorizations with an explicit
condition-number gate (no explicit inversion).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .solvers import SolveResult, SolverConfig, solve_ls, solve_tls

COND_LIMIT = 1e12


class IllConditionedError(RuntimeError):
    """Normal matrix condition number exceeds COND_LIMIT."""


def _require_real(arr, name: str) -> np.ndarray:
    a = np.asarray(arr)
    if np.iscomplexobj(a):
        if np.any(a.imag != 0):
            raise ValueError(f"{name} must be real-valued")
        a = a.real
    return np.asarray(a, dtype=np.float64)


@dataclass(frozen=True)
class ErrorAnalysisInputs:
    a_clean: np.ndarray  # (M, N) real sensing matrix
    y_clean: np.ndarray  # (M,) clean measurements, all > 0
    x_sharp: np.ndarray  # (N,) real ground truth
    e_a: np.ndarray  # (M, N) sensing errors
    e_y: np.ndarray  # (M,) measurement errors (diagonal)
    lambda_ratio: float  # lambda_y / lambda_a, >= 0

    def __post_init__(self):
        a = _require_real(self.a_clean, "a_clean")
        y = _require_real(self.y_clean, "y_clean")
        x = _require_real(self.x_sharp, "x_sharp")
        ea = _require_real(self.e_a, "e_a")
        ey = _require_real(self.e_y, "e_y")
        m, n = a.shape
        if y.shape != (m,) or x.shape != (n,) or ea.shape != (m, n) or ey.shape != (m,):
            raise ValueError("inconsistent dimensions")
        if np.any(y <= 0):
            raise ValueError("all clean measurements must be > 0")
        if not (self.lambda_ratio >= 0):
            raise ValueError("lambda_ratio must be >= 0")
        for name, val in (("a_clean", a), ("y_clean", y), ("x_sharp", x), ("e_a", ea), ("e_y", ey)):
            object.__setattr__(self, name, val)


@dataclass(frozen=True)
class ErrorPrediction:
    e_tls: float
    e_ls: float
    rel_e_tls: float
    rel_e_ls: float


def _gated_solve(gram: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise IllConditionedError(f"normal matrix condition number {cond:.3g} exceeds {COND_LIMIT:g}")
    return np.linalg.solve(gram, rhs)


def d_diagonal(y_clean: np.ndarray, x_norm_sq: float, lambda_ratio: float) -> np.ndarray:
    """Diagonal of D; entries lie in (0, 1] for nonnegative inputs."""
    return 1.0 / (1.0 + 4.0 * lambda_ratio * x_norm_sq * np.asarray(y_clean, dtype=np.float64))


def first_order_errors(inputs: ErrorAnalysisInputs) -> ErrorPrediction:
    """Evaluate the predictor formulas for one realized error pair."""
    a, y, x = inputs.a_clean, inputs.y_clean, inputs.x_sharp
    x_norm = float(np.linalg.norm(x))
    d = d_diagonal(y, x_norm**2, inputs.lambda_ratio)
    w = (inputs.e_y / (2.0 * y)) * (a @ x) - inputs.e_a @ x
    yd = y * d
    e_tls = float(np.linalg.norm(_gated_solve(a.T @ (yd[:, None] * a), a.T @ (yd * w))))
    e_ls = float(np.linalg.norm(_gated_solve(a.T @ (y[:, None] * a), a.T @ (y * w))))
    return ErrorPrediction(e_tls, e_ls, e_tls / x_norm, e_ls / x_norm)


def solve_matrices(
    a_clean: np.ndarray, y_clean: np.ndarray, x_sharp: np.ndarray, lambda_ratio: float
) -> tuple[np.ndarray, np.ndarray]:
    """The (N, M) maps R such that e = ||R w|| for TLS and LS."""
    a = _require_real(a_clean, "a_clean")
    y = _require_real(y_clean, "y_clean")
    x = _require_real(x_sharp, "x_sharp")
    if np.any(y <= 0):
        raise ValueError("all clean measurements must be > 0")
    d = d_diagonal(y, float(np.linalg.norm(x)) ** 2, lambda_ratio)
    yd = y * d
    r_tls = _gated_solve(a.T @ (yd[:, None] * a), a.T * yd[None, :])
    r_ls = _gated_solve(a.T @ (y[:, None] * a), a.T * y[None, :])
    return r_tls, r_ls


def expected_squared_errors(
    a_clean: np.ndarray,
    y_clean: np.ndarray,
    x_sharp: np.ndarray,
    lambda_ratio: float,
    sigma_delta_sq: float,
    sigma_eta_sq: float,
) -> tuple[float, float]:
    """Closed-form E[e_tls^2], E[e_ls^2] under iid Gaussian error draws."""
    if sigma_delta_sq < 0 or sigma_eta_sq < 0:
        raise ValueError("variances must be >= 0")
    y = _require_real(y_clean, "y_clean")
    x = _require_real(x_sharp, "x_sharp")
    r_tls, r_ls = solve_matrices(a_clean, y, x, lambda_ratio)
    x_norm_sq = float(np.linalg.norm(x)) ** 2

    def expectation(r: np.ndarray) -> float:
        sensing_term = sigma_delta_sq * x_norm_sq * float(np.sum(r * r))
        meas_term = 0.25 * sigma_eta_sq * float(np.sum((r * r) / y[None, :]))
        return sensing_term + meas_term

    return expectation(r_tls), expectation(r_ls)


def ml_parameters(sigma_delta_sq: float, sigma_eta_sq: float):
    """Maximum-likelihood weights: lambda_a = 1/sigma_delta^2, lambda_y = 1/sigma_eta^2."""
    from .correction import CorrectionParams

    if sigma_delta_sq <= 0 or sigma_eta_sq <= 0:
        raise ValueError("variances must be > 0")
    return CorrectionParams(lambda_a=1.0 / sigma_delta_sq, lambda_y=1.0 / sigma_eta_sq)


def _argmin_solve(
    method: str,
    a: np.ndarray,
    y: np.ndarray,
    x_start: np.ndarray,
    lambda_a: float,
    lambda_y: float,
    step_size: float,
    max_iters: int,
    threshold: float,
) -> SolveResult:
    n = a.shape[1]
    common = dict(
        step_size=step_size,
        threshold=threshold,
        max_iters=max_iters,
    )
    if method == "tls":
        cfg = SolverConfig(
            mode="tls",
            lambda_a_dag=lambda_a * n,
            lambda_y_dag=lambda_y * float(np.linalg.norm(x_start)) ** 4,
            **common,
        )
        return solve_tls(y, a.astype(np.complex128), cfg, x0=x_start)
    cfg = SolverConfig(mode="ls", **common)
    return solve_ls(y, a.astype(np.complex128), cfg, x0=x_start)


def finite_difference_jacobians(
    a_clean: np.ndarray,
    y_clean: np.ndarray,
    x_sharp: np.ndarray,
    lambda_a: float,
    lambda_y: float,
    h: float = 1e-4,
    method: str = "tls",
    step_size: float | None = None,
    max_iters: int = 20000,
    threshold: float = 1e-22,
) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference sensitivities of the solver output at the clean point.

    Returns ``(j_a, j_y)`` with ``j_a`` of shape (N, M*N) holding
    d x_hat / d a_{m,j} column-blocks per measurement and ``j_y`` of shape
    (N, M).  Intended as a validation oracle on tiny real instances: each
    perturbed problem is re-solved from the ground truth so the solver tracks
    the perturbed argmin branch.
    """
    a = _require_real(a_clean, "a_clean").copy()
    y = _require_real(y_clean, "y_clean").copy()
    x = _require_real(x_sharp, "x_sharp")
    m, n = a.shape
    if method not in ("tls", "ls"):
        raise ValueError("method must be 'tls' or 'ls'")
    if step_size is None:
        step_size = 0.5 / lambda_a if method == "tls" else 0.02
    x0 = x.astype(np.complex128)

    def solve_at(a_mat, y_vec) -> np.ndarray:
        res = _argmin_solve(method, a_mat, y_vec, x0, lambda_a, lambda_y, step_size, max_iters, threshold)
        return res.x_hat.real

    j_a = np.zeros((n, m * n))
    j_y = np.zeros((n, m))
    for k in range(m):
        for j in range(n):
            orig = a[k, j]
            a[k, j] = orig + h
            plus = solve_at(a, y)
            a[k, j] = orig - h
            minus = solve_at(a, y)
            a[k, j] = orig
            j_a[:, k * n + j] = (plus - minus) / (2.0 * h)
        orig = y[k]
        y[k] = orig + h
        plus = solve_at(a, y)
        y[k] = orig - h
        minus = solve_at(a, y)
        y[k] = orig
        j_y[:, k] = (plus - minus) / (2.0 * h)
    return j_a, j_y


def predicted_perturbation(j_a: np.ndarray, j_y: np.ndarray, e_a: np.ndarray, e_y: np.ndarray) -> np.ndarray:
    """Apply stacked Jacobian blocks to an error realization."""
    return j_a @ np.asarray(e_a, dtype=np.float64).ravel() + j_y @ np.asarray(e_y, dtype=np.float64)
