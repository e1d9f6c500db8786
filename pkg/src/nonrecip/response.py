"""Linearized probe response of the coupled cavity/mechanics/ensemble system.

The positive-frequency fluctuation amplitudes X = (da1, da2, dd, db) at probe
detuning y obey the 4x4 complex linear system A1(y) X = B with drive vector
B = (Ep1, Ep2, 0, 0). This module builds A1, solves the system by LU with
partial pivoting (the authoritative path), and independently evaluates the
closed-form amplitudes and determinant used for cross-validation.

Only the +y (e^{-i y t}) sideband is represented; the -y component vanishes
identically under the rotating-wave approximation used throughout.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .params import ModelParams, ensure_valid

# scale-invariant pole detection: |det| below this times the product of row
# norms is treated as singular
SINGULARITY_RTOL = 1e-12


class SingularMatrix(ArithmeticError):
    """The response matrix is singular at the requested detuning (a pole)."""


class SingularDeterminant(ArithmeticError):
    """The closed-form determinant vanishes at the requested detuning."""


@dataclass(frozen=True)
class ResponseMatrix:
    """The 4x4 system matrix at one detuning, row order (da1, da2, dd, db)."""

    entries: np.ndarray
    y: float


@dataclass(frozen=True)
class ResponseSolution:
    """Fluctuation amplitudes at one probe detuning.

    ``dd`` and ``db`` are None when produced by the closed form, which only
    expresses the two cavity components.
    """

    da1: complex
    da2: complex
    dd: complex | None
    db: complex | None
    y: float
    method: str


@dataclass(frozen=True)
class ClosedFormCoefficients:
    """The eight closed-form numerator coefficients and the determinant."""

    tau1: complex
    tau2: complex
    tau3: complex
    tau4: complex
    chi1: complex
    chi2: complex
    chi3: complex
    chi4: complex
    D: complex


def build_system_matrix(p: ModelParams, y: float) -> ResponseMatrix:
    """Fill the system matrix A1 at detuning ``y``.

    Parameters
    ----------
    p : ModelParams
        Validated model parameters.
    y : float
        Probe detuning from the mechanical frequency, in ``p.unit`` rates.

    Returns
    -------
    ResponseMatrix
        Dense complex 4x4 matrix. The diagonal carries (kappa1 - iy,
        kappa2 - iy, f - iy, gamma - iy); couplings enter as i J1,
        i J2 e^{+-i phi}, i G1, i G2 e^{+-i theta}, and i J3. The (2,3)
        and (3,2) entries are exactly zero: the ensemble couples to
        cavity 1 only.
    """
    ensure_valid(p)
    eth = cmath.exp(1j * p.theta)
    eph = cmath.exp(1j * p.phi)
    m = np.array([
        [p.kappa1 - 1j * y, 1j * p.J1, 1j * p.J2 * eph, 1j * p.G1],
        [1j * p.J1, p.kappa2 - 1j * y, 0.0, 1j * p.G2 * eth],
        [1j * p.J2 / eph, 0.0, p.f - 1j * y, 1j * p.J3],
        [1j * p.G1, 1j * p.G2 / eth, 1j * p.J3, p.gamma - 1j * y],
    ], dtype=complex)
    return ResponseMatrix(entries=m, y=float(y))


def batched_matrices(p: ModelParams, ys: np.ndarray) -> np.ndarray:
    """Stack A1(y) over a detuning grid, shape (len(ys), 4, 4)."""
    ensure_valid(p)
    ys = np.asarray(ys, dtype=float)
    n = ys.shape[0]
    eth = cmath.exp(1j * p.theta)
    eph = cmath.exp(1j * p.phi)
    m = np.zeros((n, 4, 4), dtype=complex)
    m[:, 0, 0] = p.kappa1 - 1j * ys
    m[:, 1, 1] = p.kappa2 - 1j * ys
    m[:, 2, 2] = p.f - 1j * ys
    m[:, 3, 3] = p.gamma - 1j * ys
    m[:, 0, 1] = m[:, 1, 0] = 1j * p.J1
    m[:, 0, 2] = 1j * p.J2 * eph
    m[:, 2, 0] = 1j * p.J2 / eph
    m[:, 0, 3] = m[:, 3, 0] = 1j * p.G1
    m[:, 1, 3] = 1j * p.G2 * eth
    m[:, 3, 1] = 1j * p.G2 / eth
    m[:, 2, 3] = m[:, 3, 2] = 1j * p.J3
    return m


def singularity_thresholds(mats: np.ndarray) -> np.ndarray:
    """Per-matrix singularity cutoff: SINGULARITY_RTOL times prod of row norms.

    Floored at the smallest positive normal float so that a matrix with an
    all-zero row (threshold product 0, determinant exactly 0) is still
    flagged instead of slipping through a strict comparison into the solver.
    """
    row_norms = np.linalg.norm(mats, axis=2)
    return np.maximum(SINGULARITY_RTOL * np.prod(row_norms, axis=1),
                      np.finfo(float).tiny)


def _check_nonsingular(m: np.ndarray, y: float) -> None:
    det = np.linalg.det(m)
    if abs(det) < singularity_thresholds(m[np.newaxis])[0]:
        raise SingularMatrix(f"response matrix is singular at y={y} (|det|={abs(det):.3e})")


def solve_response(p: ModelParams, y: float, Ep1: float, Ep2: float) -> ResponseSolution:
    """Solve A1 X = B for the fluctuation amplitudes at one detuning.

    This LU-based solve is the authoritative result; the closed form of
    :func:`response_closed_form` is a verification layer only.

    Raises
    ------
    SingularMatrix
        If |det A1| falls below the scale-invariant pole threshold.
    """
    m = build_system_matrix(p, y).entries
    _check_nonsingular(m, y)
    b = np.array([Ep1, Ep2, 0.0, 0.0], dtype=complex)
    x = np.linalg.solve(m, b)
    return ResponseSolution(da1=complex(x[0]), da2=complex(x[1]),
                            dd=complex(x[2]), db=complex(x[3]),
                            y=float(y), method="matrix_solve")


def response_residual(p: ModelParams, sol: ResponseSolution, Ep1: float, Ep2: float) -> float:
    """Relative residual ||A1 X - B|| / ||B|| of a full solution (on demand)."""
    if sol.dd is None or sol.db is None:
        raise ValueError("residual needs all four components (matrix_solve output)")
    m = build_system_matrix(p, sol.y).entries
    b = np.array([Ep1, Ep2, 0.0, 0.0], dtype=complex)
    x = np.array([sol.da1, sol.da2, sol.dd, sol.db], dtype=complex)
    nb = np.linalg.norm(b)
    if nb == 0.0:
        return float(np.linalg.norm(m @ x))
    return float(np.linalg.norm(m @ x - b) / nb)


def closed_form_coefficients(p: ModelParams, y: float,
                             as_printed: bool = False) -> ClosedFormCoefficients:
    """Evaluate the closed-form numerators tau1..4, chi1..4 and determinant D.

    The determinant is assembled from the compact expansion in the auxiliary
    coefficients D1..D9. An earlier transcription of that expansion omitted
    the J1 factor in the ``-2 J1 G1 G2 y cos(theta)`` cross term; the
    corrected term (default) restores exact agreement with the numeric
    determinant, and ``as_printed=True`` keeps the uncorrected variant for
    auditability. The two variants coincide at y = 0.
    """
    ensure_valid(p)
    k1, k2, g, f = p.kappa1, p.kappa2, p.gamma, p.f
    G1, G2, J1 = p.G1, p.G2, p.J1
    J2, J3 = p.J2, p.J3
    th, ph = p.theta, p.phi
    eth = cmath.exp(1j * th)
    eph = cmath.exp(1j * ph)

    tau1 = (J1 * y**2 - J1 * J3**2 - J1 * g * f
            + G1 * G2 * y / eth + G2 * J2 * J3 * eph / eth)
    tau2 = J1 * g * y + J1 * f * y + G1 * G2 * f / eth
    tau3 = -G2**2 * y + y**3 - J3**2 * y - g * f * y - g * y * k2 - f * y * k2
    tau4 = G2**2 * f - g * y**2 - f * y**2 - y**2 * k2 + J3**2 * k2 + g * f * k2
    chi1 = (J1 * y**2 - J1 * J3**2 - J1 * g * f
            + G1 * G2 * y * eth + G2 * J2 * J3 * eth / eph)
    chi2 = J1 * g * y + J1 * f * y + G1 * G2 * f * eth
    chi3 = (-G1**2 * y + y**3 - J2**2 * y - G1 * J2 * J3 * eph - J3**2 * y
            - g * f * y - J2 * G1 * J3 / eph - g * y * k1 - f * y * k1)
    chi4 = (-g * y**2 - f * y**2 - y**2 * k1 + J3**2 * k1 + g * f * k1
            + J2**2 * g + G1**2 * f)

    D1 = J2**2 - 1j * y * k1 - 1j * f * y + f * k1 - y**2
    D2 = -y**2 - 1j * f * y - 1j * y * k2 + f * k2
    D3 = -1j * g * y - 1j * y * k2 + g * k2 - y**2
    D4 = -y**2 + J3**2 - 1j * g * y - 1j * f * y + g * f
    D5 = -y**2 - 1j * y * k1 - 1j * y * k2 + k1 * k2
    D6 = 1j * (k1 + k2 + g + f)
    D7 = -g * f - g * k2 - f * k1 - k1 * k2 - f * k2 - g * k1
    D8 = g * f - 1j * f * y - 1j * g * y
    D9 = k1 + k2
    cross_gg = 1.0 if as_printed else J1
    D = (-2 * J1 * J2 * J3 * G2 * math.cos(th - ph)
         - 2j * J2 * J3 * k2 * G1 * math.cos(ph)
         - 2j * J1 * G1 * G2 * f * math.cos(th)
         - 2 * J2 * J3 * G1 * y * math.cos(ph)
         - 2 * cross_gg * G1 * G2 * y * math.cos(th)
         + G2**2 * D1 + G1**2 * D2 + J2**2 * D3 + J1**2 * D4 + J3**2 * D5
         + y**3 * D6 + y**2 * D7 + k1 * k2 * D8 - 1j * g * f * y * D9 + y**4)
    return ClosedFormCoefficients(tau1, tau2, tau3, tau4,
                                  chi1, chi2, chi3, chi4, complex(D))


def response_closed_form(p: ModelParams, y: float, Ep1: float, Ep2: float,
                         as_printed: bool = False) -> ResponseSolution:
    """Closed-form cavity amplitudes da1, da2 (verification path).

    da1 = ((i tau3 + tau4) Ep1 + (i tau1 - tau2) Ep2) / D and
    da2 = ((i chi1 - chi2) Ep1 + (i chi3 + chi4) Ep2) / D. The ensemble and
    mechanical components are not expressed by the closed form and are
    returned as None.
    """
    c = closed_form_coefficients(p, y, as_printed=as_printed)
    if c.D == 0:
        raise SingularDeterminant(f"closed-form determinant vanishes at y={y}")
    da1 = ((1j * c.tau3 + c.tau4) * Ep1 + (1j * c.tau1 - c.tau2) * Ep2) / c.D
    da2 = ((1j * c.chi1 - c.chi2) * Ep1 + (1j * c.chi3 + c.chi4) * Ep2) / c.D
    return ResponseSolution(da1=da1, da2=da2, dd=None, db=None,
                            y=float(y), method="closed_form")


__all__ = [
    "ClosedFormCoefficients", "ResponseMatrix", "ResponseSolution",
    "SINGULARITY_RTOL", "SingularDeterminant", "SingularMatrix",
    "batched_matrices", "build_system_matrix", "closed_form_coefficients",
    "response_closed_form", "response_residual", "singularity_thresholds",
    "solve_response",
]
