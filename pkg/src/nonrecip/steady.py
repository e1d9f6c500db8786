"""Nonlinear steady state of the driven two-cavity/ensemble/mechanics system.

The mean amplitudes (alpha1, alpha2, rho, beta) satisfy four coupled
complex equations in which the cavity detunings are shifted by the
mechanical displacement, Delta_j_eff = Delta_j + 2 g_j Re(beta), making the
system nonlinear through |alpha_j|^2 and Re(beta). A damped Newton
iteration on the eight real components solves it; the zero state is the
exact weak-drive limit and serves as the initial guess, with a drive-ramp
homotopy as the automatic retry and a damped fixed-point sweep as the
fallback when the Newton step is unsolvable. Under strong drive the system
can be multistable; the returned branch is the one continuously connected
to zero drive.

`effective_couplings` and `linearized_params` convert a converged state
into the parameter set consumed by the linear response machinery.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .params import (
    BareParams,
    Drives,
    InvalidParams,
    ModelParams,
    RateUnit,
    SteadyState,
    wrap_phase,
)


@dataclass(frozen=True)
class SolverConfig:
    """Newton solver knobs; defaults leave machine-precision headroom."""

    tol: float = 1e-12
    max_iter: int = 200
    damping: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.tol) and self.tol > 0.0):
            raise ValueError("tol must be a positive finite number")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not (0.0 < self.damping <= 1.0):
            raise ValueError("damping must lie in (0, 1]")


class NonConvergence(RuntimeError):
    """Iteration budget exhausted; ``best_residual`` is the closest approach."""

    def __init__(self, message: str, best_residual: float) -> None:
        self.best_residual = best_residual
        super().__init__(f"{message} (best residual {best_residual:.3e})")


class SingularJacobian(ArithmeticError):
    """The Newton step is unsolvable; the operating point is degenerate."""


class ZeroAmplitude(ValueError):
    """The phase reference g1*alpha1 vanishes, leaving theta undefined."""


class ResonanceMisaligned(InvalidParams):
    """The steady state violates the aligned-resonance condition."""


def _pack(a1: complex, a2: complex, rho: complex, beta: complex) -> np.ndarray:
    return np.array([a1.real, a1.imag, a2.real, a2.imag,
                     rho.real, rho.imag, beta.real, beta.imag])


def _unpack(x: np.ndarray) -> tuple[complex, complex, complex, complex]:
    return (complex(x[0], x[1]), complex(x[2], x[3]),
            complex(x[4], x[5]), complex(x[6], x[7]))


def _residual_vec(p: BareParams, d: Drives, x: np.ndarray) -> np.ndarray:
    a1, a2, rho, beta = _unpack(x)
    D1 = p.Delta1 + 2.0 * p.g1 * beta.real
    D2 = p.Delta2 + 2.0 * p.g2 * beta.real
    r1 = (1j * D1 + p.kappa1) * a1 + 1j * p.J1 * a2 + 1j * p.J2 * rho - d.E1
    r2 = (1j * D2 + p.kappa2) * a2 + 1j * p.J1 * a1 - d.E2
    r3 = ((1j * p.Delta_en + p.f) * rho + 1j * p.J2.conjugate() * a1
          + 2j * p.J3 * beta.real)
    r4 = ((1j * p.omega_m + p.gamma) * beta
          + 1j * p.g1 * (a1.real ** 2 + a1.imag ** 2)
          + 1j * p.g2 * (a2.real ** 2 + a2.imag ** 2)
          + 2j * p.J3 * rho.real)
    return np.array([r1.real, r1.imag, r2.real, r2.imag,
                     r3.real, r3.imag, r4.real, r4.imag])


def steady_residual(p: BareParams, d: Drives, s: SteadyState) -> np.ndarray:
    """Eight real residual components of the mean-field equations at ``s``.

    The effective detunings are recomputed from the candidate beta, so any
    (possibly unconverged) state can be scored.
    """
    return _residual_vec(p, d, _pack(s.alpha1, s.alpha2, s.rho, s.beta))


def _jacobian(p: BareParams, x: np.ndarray) -> np.ndarray:
    a1, a2, _, beta = _unpack(x)
    c1 = 1j * (p.Delta1 + 2.0 * p.g1 * beta.real) + p.kappa1
    c2 = 1j * (p.Delta2 + 2.0 * p.g2 * beta.real) + p.kappa2
    ce = 1j * p.Delta_en + p.f
    cm = 1j * p.omega_m + p.gamma
    j2c = p.J2.conjugate()
    jc = np.zeros((4, 8), dtype=complex)
    jc[0, 0] = c1
    jc[0, 1] = 1j * c1
    jc[0, 2] = 1j * p.J1
    jc[0, 3] = -p.J1
    jc[0, 4] = 1j * p.J2
    jc[0, 5] = -p.J2
    jc[0, 6] = 2j * p.g1 * a1  # detuning shift feeds back through Re(beta)
    jc[1, 0] = 1j * p.J1
    jc[1, 1] = -p.J1
    jc[1, 2] = c2
    jc[1, 3] = 1j * c2
    jc[1, 6] = 2j * p.g2 * a2
    jc[2, 0] = 1j * j2c
    jc[2, 1] = -j2c
    jc[2, 4] = ce
    jc[2, 5] = 1j * ce
    jc[2, 6] = 2j * p.J3
    jc[3, 0] = 2j * p.g1 * a1.real
    jc[3, 1] = 2j * p.g1 * a1.imag
    jc[3, 2] = 2j * p.g2 * a2.real
    jc[3, 3] = 2j * p.g2 * a2.imag
    jc[3, 4] = 2j * p.J3
    jc[3, 6] = cm
    jc[3, 7] = 1j * cm
    out = np.empty((8, 8))
    out[0::2] = jc.real
    out[1::2] = jc.imag
    return out


def _newton(p: BareParams, d: Drives, cfg: SolverConfig,
            x0: np.ndarray) -> tuple[np.ndarray, float, int]:
    x = np.array(x0, dtype=float)
    fx = _residual_vec(p, d, x)
    n = float(np.linalg.norm(fx))
    best = n
    for it in range(cfg.max_iter):
        if n < cfg.tol:
            return x, n, it
        jac = _jacobian(p, x)
        try:
            step = np.linalg.solve(jac, fx)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobian(f"Newton step unsolvable: {exc}") from exc
        if not np.all(np.isfinite(step)):
            raise SingularJacobian("Newton step is not finite")
        lam = cfg.damping
        improved = False
        for _ in range(60):
            xn = x - lam * step
            fn = _residual_vec(p, d, xn)
            nn = float(np.linalg.norm(fn))
            if nn < n or nn < cfg.tol:
                improved = True
                break
            lam *= 0.5
        if not improved:
            raise NonConvergence("line search stalled", best)
        x, fx, n = xn, fn, nn
        best = min(best, n)
    if n < cfg.tol:
        return x, n, cfg.max_iter
    raise NonConvergence("iteration budget exhausted", best)


def _fixed_point(p: BareParams, d: Drives, cfg: SolverConfig,
                 x0: np.ndarray, weight: float = 0.5,
                 max_sweeps: int = 20000) -> tuple[np.ndarray, float, int]:
    # Gauss-Seidel sweep: linear cavity block at frozen rho/beta, then the
    # ensemble and mechanical closures, under-relaxed for stability
    a1, a2, rho, beta = _unpack(np.asarray(x0, dtype=float))
    den_r = 1j * p.Delta_en + p.f
    den_b = 1j * p.omega_m + p.gamma
    if den_r == 0 or den_b == 0:
        raise SingularJacobian("ensemble or mechanical response diverges")
    n = math.inf
    for sweep in range(1, max_sweeps + 1):
        D1 = p.Delta1 + 2.0 * p.g1 * beta.real
        D2 = p.Delta2 + 2.0 * p.g2 * beta.real
        m = np.array([[1j * D1 + p.kappa1, 1j * p.J1],
                      [1j * p.J1, 1j * D2 + p.kappa2]], dtype=complex)
        rhs = np.array([d.E1 - 1j * p.J2 * rho, d.E2], dtype=complex)
        try:
            na = np.linalg.solve(m, rhs)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobian(f"cavity block unsolvable: {exc}") from exc
        na1, na2 = complex(na[0]), complex(na[1])
        nrho = -(1j * p.J2.conjugate() * na1 + 2j * p.J3 * beta.real) / den_r
        nbeta = -(1j * p.g1 * abs(na1) ** 2 + 1j * p.g2 * abs(na2) ** 2
                  + 2j * p.J3 * nrho.real) / den_b
        a1 = (1.0 - weight) * a1 + weight * na1
        a2 = (1.0 - weight) * a2 + weight * na2
        rho = (1.0 - weight) * rho + weight * nrho
        beta = (1.0 - weight) * beta + weight * nbeta
        x = _pack(a1, a2, rho, beta)
        n = float(np.linalg.norm(_residual_vec(p, d, x)))
        if n < cfg.tol:
            return x, n, sweep
    raise NonConvergence("fixed-point fallback exhausted", n)


def _solve_once(p: BareParams, d: Drives, cfg: SolverConfig,
                x0: np.ndarray) -> tuple[np.ndarray, float, int]:
    try:
        return _newton(p, d, cfg, x0)
    except SingularJacobian:
        return _fixed_point(p, d, cfg, x0)


def _state(p: BareParams, x: np.ndarray, n: float, its: int) -> SteadyState:
    a1, a2, rho, beta = _unpack(x)
    return SteadyState(
        alpha1=a1, alpha2=a2, rho=rho, beta=beta,
        Delta1_eff=p.Delta1 + 2.0 * p.g1 * beta.real,
        Delta2_eff=p.Delta2 + 2.0 * p.g2 * beta.real,
        residual_norm=n, iterations=its,
    )


def solve_steady_state(p: BareParams, d: Drives,
                       cfg: SolverConfig | None = None,
                       initial: SteadyState | None = None) -> SteadyState:
    """Solve the mean-field equations for the branch connected to zero drive.

    Newton iteration from the zero state (or from ``initial`` when a nearby
    converged state is available); on non-convergence the drives are ramped
    from zero in 10 homotopy steps, re-seeding each solve with the previous
    step's state.

    Raises
    ------
    NonConvergence
        Both the direct solve and the homotopy retry ran out of budget.
    SingularJacobian
        The Newton step was unsolvable and the fixed-point fallback failed.
    """
    if cfg is None:
        cfg = SolverConfig()
    zero = np.zeros(8)
    x0 = zero if initial is None else _pack(
        initial.alpha1, initial.alpha2, initial.rho, initial.beta)
    try:
        x, n, its = _solve_once(p, d, cfg, x0)
        return _state(p, x, n, its)
    except NonConvergence as err:
        best = err.best_residual
    x, total = zero, 0
    try:
        for k in range(1, 11):
            s = k / 10.0
            dk = replace(d, E1=d.E1 * s, E2=d.E2 * s)
            x, n, its = _solve_once(p, dk, cfg, x)
            total += its
    except NonConvergence as err:
        raise NonConvergence("drive-ramp homotopy failed",
                             min(best, err.best_residual)) from err
    return _state(p, x, n, total)


def effective_couplings(p: BareParams, s: SteadyState) -> tuple[float, float, float]:
    """Linearized coupling magnitudes and their relative phase.

    G1 = |g1 alpha1|, G2 = |g2 alpha2|, theta = arg(g2 alpha2) -
    arg(g1 alpha1) wrapped to [0, 2*pi); G1's own phase is gauged to zero.
    When either product vanishes the relative phase is immaterial (it can
    be absorbed into the decoupled mode) and is returned as 0.0.

    Raises
    ------
    ZeroAmplitude
        alpha1 = 0 while g1 and g2*alpha2 are nonzero: the phase reference
        is missing but theta would matter.
    """
    c1 = p.g1 * s.alpha1
    c2 = p.g2 * s.alpha2
    G1, G2 = abs(c1), abs(c2)
    if s.alpha1 == 0 and p.g1 != 0.0 and G2 != 0.0:
        raise ZeroAmplitude("alpha1 = 0 leaves the theta reference undefined")
    if G1 == 0.0 or G2 == 0.0:
        return G1, G2, 0.0
    return G1, G2, wrap_phase(cmath.phase(c2) - cmath.phase(c1))


ALIGNMENT_RTOL = 1e-6


def linearized_params(p: BareParams, s: SteadyState,
                      unit: RateUnit | None = None) -> ModelParams:
    """Linearized model parameters at a converged operating point.

    The linear response template drops the explicit detunings, which is
    exact only at the aligned operating point Delta1_eff = Delta2_eff =
    Delta_en = omega_m; states violating the alignment beyond 1e-6
    relative are rejected with a diagnostic listing each offender.
    """
    ref = p.omega_m
    bad = [
        f"{name} = {value:.12g}"
        for name, value in (("Delta1_eff", s.Delta1_eff),
                            ("Delta2_eff", s.Delta2_eff),
                            ("Delta_en", p.Delta_en))
        if abs(value - ref) > ALIGNMENT_RTOL * abs(ref)
    ]
    if bad:
        raise ResonanceMisaligned(
            "linearization requires Delta1_eff = Delta2_eff = Delta_en = "
            f"omega_m = {ref:.12g}; got " + ", ".join(bad))
    G1, G2, theta = effective_couplings(p, s)
    return ModelParams(
        kappa1=p.kappa1, kappa2=p.kappa2, gamma=p.gamma, f=p.f,
        G1=G1, G2=G2, theta=theta, J1=p.J1,
        J2=abs(p.J2), phi=wrap_phase(cmath.phase(p.J2)) if p.J2 != 0 else 0.0,
        J3=p.J3, unit=unit if unit is not None else RateUnit("absolute", 1.0),
    )


__all__ = [
    "ALIGNMENT_RTOL", "NonConvergence", "ResonanceMisaligned",
    "SingularJacobian", "SolverConfig", "ZeroAmplitude",
    "effective_couplings", "linearized_params", "solve_steady_state",
    "steady_residual",
]
