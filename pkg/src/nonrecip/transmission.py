"""Input-output conversion from fluctuation amplitudes to transmission.

The output probe fields follow Eout1 = sqrt(kappa1) da1 - Ep1/sqrt(kappa1)
and Eout2 = sqrt(kappa2) da2 - Ep2/sqrt(kappa2); the input amplitudes seen
by the transmission coefficients are Ep_j/sqrt(kappa_j). Driving port 1
alone therefore gives T12 = sqrt(kappa1 kappa2) |[A1^-1]_(2,1)| and driving
port 2 alone gives T21 = sqrt(kappa1 kappa2) |[A1^-1]_(1,2)|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .params import ModelParams, TransmissionPoint, ensure_valid
from .response import (
    SingularMatrix,
    batched_matrices,
    build_system_matrix,
    singularity_thresholds,
    solve_response,
)

# transmission ratios above this many dB are reported as the cap itself
ISOLATION_DB_CAP = 300.0


class Direction(str, Enum):
    FORWARD_1TO2 = "forward_1to2"
    FORWARD_2TO1 = "forward_2to1"
    RECIPROCAL = "reciprocal"


@dataclass(frozen=True)
class IsolationMetrics:
    """Derived isolator figures of merit for one transmission point."""

    T12: float
    T21: float
    isolation_db: float
    direction: Direction


def output_fields(p: ModelParams, y: float, Ep1: float, Ep2: float) -> tuple[complex, complex]:
    """Output probe-field amplitudes at both ports for given probe drives."""
    if p.kappa1 <= 0.0 or p.kappa2 <= 0.0:
        raise ValueError("output fields need strictly positive cavity decay rates")
    sol = solve_response(p, y, Ep1, Ep2)
    e1 = math.sqrt(p.kappa1) * sol.da1 - Ep1 / math.sqrt(p.kappa1)
    e2 = math.sqrt(p.kappa2) * sol.da2 - Ep2 / math.sqrt(p.kappa2)
    return e1, e2


def transmission_pair(p: ModelParams, y: float) -> TransmissionPoint:
    """Transmission amplitudes T12 (port 1 to 2) and T21 (port 2 to 1) at ``y``.

    Raises
    ------
    SingularMatrix
        At a response pole.
    """
    ensure_valid(p)
    if p.kappa1 <= 0.0 or p.kappa2 <= 0.0:
        raise ValueError("transmission needs strictly positive cavity decay rates")
    m = build_system_matrix(p, y).entries
    det = np.linalg.det(m)
    if abs(det) < singularity_thresholds(m[np.newaxis])[0]:
        raise SingularMatrix(f"response matrix is singular at y={y}")
    # unit drive on each port in turn; columns of the solution are the
    # relevant inverse-matrix columns
    b = np.zeros((4, 2), dtype=complex)
    b[0, 0] = 1.0
    b[1, 1] = 1.0
    x = np.linalg.solve(m, b)
    pref = math.sqrt(p.kappa1 * p.kappa2)
    return TransmissionPoint(y=float(y), T12=float(pref * abs(x[1, 0])),
                             T21=float(pref * abs(x[0, 1])))


def transmission_grid(p: ModelParams, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized transmission over a detuning grid.

    Returns
    -------
    (T12, T21, singular) : three arrays over the grid
        Transmission amplitudes, with NaN at grid points where the response
        matrix is singular, and a boolean mask marking those points.
    """
    ensure_valid(p)
    if p.kappa1 <= 0.0 or p.kappa2 <= 0.0:
        raise ValueError("transmission needs strictly positive cavity decay rates")
    ys = np.asarray(ys, dtype=float)
    mats = batched_matrices(p, ys)
    dets = np.linalg.det(mats)
    singular = np.abs(dets) < singularity_thresholds(mats)
    t12 = np.full(ys.shape, np.nan)
    t21 = np.full(ys.shape, np.nan)
    ok = ~singular
    if np.any(ok):
        inv = np.linalg.inv(mats[ok])
        pref = math.sqrt(p.kappa1 * p.kappa2)
        t12[ok] = pref * np.abs(inv[:, 1, 0])
        t21[ok] = pref * np.abs(inv[:, 0, 1])
    return t12, t21, singular


def isolation_metrics(tp: TransmissionPoint) -> IsolationMetrics:
    """Classify a transmission point and compute the isolation ratio in dB."""
    t12, t21 = tp.T12, tp.T21
    hi = max(t12, t21)
    lo = min(t12, t21)
    if abs(t12 - t21) <= 1e-9 * max(t12, t21, 1e-30):
        direction = Direction.RECIPROCAL
    elif t12 > t21:
        direction = Direction.FORWARD_1TO2
    else:
        direction = Direction.FORWARD_2TO1
    if direction is Direction.RECIPROCAL:
        db = 0.0
    elif lo == 0.0:
        db = ISOLATION_DB_CAP
    else:
        db = min(20.0 * math.log10(hi / lo), ISOLATION_DB_CAP)
    return IsolationMetrics(T12=t12, T21=t21, isolation_db=db, direction=direction)


__all__ = [
    "Direction", "ISOLATION_DB_CAP", "IsolationMetrics", "isolation_metrics",
    "output_fields", "transmission_grid", "transmission_pair",
]
