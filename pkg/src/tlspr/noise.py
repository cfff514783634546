"""Error injection for measurements and sensing vectors at exact SNR.

SNR is the Frobenius-norm ratio in dB: a target of S means the injected error
block E satisfies -20*log10(||E||_F / ||clean||_F) = S exactly -- errors are
drawn at unit scale and then rescaled, which removes the nuisance variance a
draw-to-target-in-expectation scheme would add.

Two models are provided:

* ``gaussian``: iid real Gaussian errors on measurements, iid complex (or
  real in real mode) Gaussian errors on sensing vector entries.
* ``handcrafted``: the same draws but with row m pre-amplified by
  1 + 4*||x#||^2*y_m before the SNR rescaling, which loads the error onto
  rows with large clean measurements.  This model needs the ground-truth
  signal norm and the error-free measurements, so it is simulation-only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MeasurementSet, SensingEnsemble

NOISE_MODELS = ("gaussian", "handcrafted")


@dataclass(frozen=True)
class NoiseSpec:
    """Target SNRs in dB; ``None`` leaves the corresponding block untouched."""

    measurement_snr_db: float | None = None
    sensing_snr_db: float | None = None
    model: str = "gaussian"
    real_mode: bool = False

    def __post_init__(self):
        if self.measurement_snr_db is None and self.sensing_snr_db is None:
            raise ValueError("at least one SNR target must be present")
        if self.model not in NOISE_MODELS:
            raise ValueError(f"unknown noise model {self.model!r}")


def snr_db(clean: np.ndarray, error: np.ndarray) -> float:
    """Achieved SNR: -20*log10(||error||_F / ||clean||_F)."""
    return -20.0 * np.log10(np.linalg.norm(error) / np.linalg.norm(clean))


def _rescale(error: np.ndarray, clean: np.ndarray, target_db: float) -> np.ndarray:
    clean_norm = np.linalg.norm(clean)
    if clean_norm == 0.0:
        raise ValueError("cannot hit a finite SNR target on zero-norm clean data")
    err_norm = np.linalg.norm(error)
    if err_norm == 0.0:
        raise ValueError("drawn error has zero norm")
    return error * (clean_norm * 10.0 ** (-target_db / 20.0) / err_norm)


def _draw_errors(rng: np.random.Generator, m: int, n: int, real_mode: bool):
    e_y = rng.normal(size=m)
    if real_mode:
        e_a = rng.normal(size=(m, n)).astype(np.complex128)
    else:
        e_a = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
    return e_y, e_a


def inject_gaussian(
    rng: np.random.Generator,
    clean_y: MeasurementSet,
    clean_a: SensingEnsemble,
    spec: NoiseSpec,
) -> tuple[MeasurementSet, SensingEnsemble]:
    """iid Gaussian errors rescaled to the exact target SNRs."""
    if spec.model != "gaussian":
        raise ValueError("spec.model must be 'gaussian'")
    e_y, e_a = _draw_errors(rng, clean_y.m, clean_a.n, spec.real_mode)
    return _apply(clean_y, clean_a, e_y, e_a, spec)


def handcrafted_row_scales(clean_y: np.ndarray, x_norm_sq: float) -> np.ndarray:
    """Per-row amplification 1 + 4*||x#||^2*y_m applied before rescaling."""
    return 1.0 + 4.0 * x_norm_sq * np.asarray(clean_y, dtype=np.float64)


def inject_handcrafted(
    rng: np.random.Generator,
    clean_y: MeasurementSet,
    clean_a: SensingEnsemble,
    x_sharp: np.ndarray,
    spec: NoiseSpec,
) -> tuple[MeasurementSet, SensingEnsemble]:
    """Row-amplified errors; requires the clean measurements and ground truth."""
    if spec.model != "handcrafted":
        raise ValueError("spec.model must be 'handcrafted'")
    x_norm_sq = float(np.vdot(x_sharp, x_sharp).real)
    scales = handcrafted_row_scales(clean_y.values, x_norm_sq)
    e_y, e_a = _draw_errors(rng, clean_y.m, clean_a.n, spec.real_mode)
    e_y = e_y * scales
    e_a = e_a * scales[:, None]
    return _apply(clean_y, clean_a, e_y, e_a, spec)


def _apply(clean_y, clean_a, e_y, e_a, spec):
    y_out = clean_y.values
    a_out = clean_a.vectors
    noisy = False
    if spec.measurement_snr_db is not None:
        y_out = y_out + _rescale(e_y, clean_y.values, spec.measurement_snr_db)
        noisy = True
    if spec.sensing_snr_db is not None:
        a_out = a_out + _rescale(e_a, clean_a.vectors, spec.sensing_snr_db)
        noisy = True
    tag = "noisy" if noisy else clean_a.noise_tag
    return (
        MeasurementSet(y_out, ensemble_ref=clean_y.ensemble_ref),
        SensingEnsemble(a_out, model_tag=clean_a.model_tag, noise_tag=tag),
    )


def inject(
    rng: np.random.Generator,
    clean_y: MeasurementSet,
    clean_a: SensingEnsemble,
    spec: NoiseSpec,
    x_sharp: np.ndarray | None = None,
) -> tuple[MeasurementSet, SensingEnsemble]:
    """Dispatch on ``spec.model``; handcrafted mode requires ``x_sharp``."""
    if spec.model == "gaussian":
        return inject_gaussian(rng, clean_y, clean_a, spec)
    if x_sharp is None:
        raise ValueError("handcrafted errors need the ground-truth signal")
    return inject_handcrafted(rng, clean_y, clean_a, x_sharp, spec)
