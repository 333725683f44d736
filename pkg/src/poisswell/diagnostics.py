"""
Every monitored functional: charge, the Schrödinger-Poisson energy, the
Sobolev energy functionals and their weighted variants, the pointwise
regularity monitor and its running sup, continuity and gauge residuals,
the a priori growth-envelope check, and the blow-up monitor.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InsufficientHistory
from .grid import Grid
from .operators import (
    divergence,
    gradient,
    l2_norm,
    pointwise_norms,
    sobolev_norm,
    spectral_tail_fraction,
)


@dataclass
class DiagnosticsRecord:
    """Per-sample values of all monitored quantities (None = not computed)."""

    t: float
    charge: float
    energy: Optional[float] = None
    xs: Optional[float] = None
    xs_eps: Optional[float] = None
    xs_eps_dtu: Optional[float] = None
    monitor: Optional[float] = None
    monitor_sup: Optional[float] = None
    blowup_sum: Optional[float] = None
    continuity_residual: Optional[float] = None
    gauge_residual: Optional[float] = None
    tail_fraction: Optional[float] = None

    def as_dict(self):
        return asdict(self)


class MonitorStatus(enum.Enum):
    OK = "ok"
    WARNING = "warning"
    TRIGGERED = "triggered"


@dataclass(frozen=True)
class MonitorThresholds:
    """Blow-up monitor knobs; the theory gives limits, not numbers."""

    ratio: float = 100.0
    tail: float = 0.10


@dataclass
class EnvelopeReport:
    """Result of fitting the smallest admissible envelope constant."""

    constant: float
    max_violation: float
    passed: bool


def charge(grid: Grid, a):
    """Total charge ||a||_2 by grid quadrature."""
    return l2_norm(grid, a)


def field_energy(grid: Grid, psi, V, epsilon):
    """||eps grad psi||_2^2 + ||grad V||_2^2 (conserved when A == 0)."""
    kin = sum(
        l2_norm(grid, gradient(grid, psi[j])) ** 2 for j in range(psi.shape[0])
    )
    return epsilon**2 * kin + l2_norm(grid, gradient(grid, V)) ** 2


def xs_norm(grid: Grid, a, u, s):
    """The mixed-regularity state norm  ||a||_{H^{s-1}} + ||u||_{H^s}."""
    return sobolev_norm(grid, a, s - 1.0) + sobolev_norm(grid, u, s)


def pointwise_monitor(grid: Grid, a, u, epsilon):
    """
    The regularity monitor
    1 + ||u||_{W^{1,inf}} + ||a||_{inf} + eps(||a||_{H^1} + ||a||_{W^{1,inf}} + ||a||_{W^{2,3}}).
    """
    pa = pointwise_norms(grid, a)
    pu = pointwise_norms(grid, u)
    return (
        1.0
        + pu.w1_inf
        + pa.l_inf
        + epsilon * (sobolev_norm(grid, a, 1.0) + pa.w1_inf + pa.w2_3)
    )


def blowup_sum(grid: Grid, a, u):
    """The unweighted norm sum whose divergence signals finite-time blow-up."""
    pa = pointwise_norms(grid, a)
    pu = pointwise_norms(grid, u)
    return sobolev_norm(grid, a, 1.0) + pa.w1_inf + pa.w2_3 + pu.w1_inf


@dataclass(frozen=True)
class Functionals:
    xs: float
    xs_eps: float
    xs_eps_dtu: Optional[float]
    monitor: float


def functionals(grid: Grid, state, s, mu=1.0, mu1=1.0, mu2=1.0, dt_u=None):
    """
    Evaluate the Sobolev energy ladder on a hydro state.

    ``dt_u`` is the velocity time-derivative from the evolution equation
    (not a finite difference); when omitted the doubly-weighted functional
    is skipped.  The theory needs s > 7/2; any s >= 1 is accepted with a
    warning for exploratory runs.
    """
    if s < 1.0:
        raise ValueError("regularity index must be >= 1")
    if s <= 3.5:
        warnings.warn(f"regularity s={s} below the 7/2 hypothesis", stacklevel=2)
    base = xs_norm(grid, state.a, state.u, s)
    eps_term = mu * state.epsilon * sobolev_norm(grid, state.a, s)
    weighted = base + eps_term
    doubly = None
    if dt_u is not None:
        doubly = base + mu1 * state.epsilon * sobolev_norm(grid, state.a, s) + mu2 * sobolev_norm(
            grid, dt_u, s - 1.0
        )
    monitor = pointwise_monitor(grid, state.a, state.u, state.epsilon)
    return Functionals(xs=base, xs_eps=weighted, xs_eps_dtu=doubly, monitor=monitor)


def continuity_residual(grid: Grid, window: Sequence):
    """
    L2 norm of ``d_t rho + div J`` at the middle of a 3-snapshot window;
    the time derivative is the centered difference of the densities.

    ``window`` holds (t, rho, J) triples at consecutive sample times.
    """
    if len(window) < 3:
        raise InsufficientHistory("continuity residual needs 3 snapshots")
    (t0, rho0, _), (_, _, J1), (t2, rho2, _) = window[-3:]
    dt_rho = (rho2 - rho0) / (t2 - t0)
    return l2_norm(grid, dt_rho + divergence(grid, J1))


def gauge_residual(grid: Grid, window: Sequence, epsilon):
    """
    L2 norm of the Lorenz-gauge defect ``div A + eps d_t V`` at the middle
    of a 3-snapshot window of (t, V, A); reported, never enforced.
    """
    if len(window) < 3:
        raise InsufficientHistory("gauge residual needs 3 snapshots")
    (t0, V0, _), (_, _, A1), (t2, V2, _) = window[-3:]
    dt_V = (V2 - V0) / (t2 - t0)
    return l2_norm(grid, divergence(grid, A1) + epsilon * dt_V)


def blowup_monitor(record: DiagnosticsRecord, thresholds: MonitorThresholds, initial_sum):
    """Classify one diagnostics record against the blow-up thresholds."""
    s = record.blowup_sum
    if s is not None and not np.isfinite(s):
        return MonitorStatus.TRIGGERED
    if s is not None and initial_sum > 0 and s > thresholds.ratio * initial_sum:
        return MonitorStatus.TRIGGERED
    if record.tail_fraction is not None and record.tail_fraction > thresholds.tail:
        return MonitorStatus.WARNING
    return MonitorStatus.OK


def envelope_check(records: Sequence[DiagnosticsRecord], s, c_max=1e3, tol=1e-4):
    """
    Fit the smallest C such that for all recorded t

        E(t) <= C N(t)^{2s+3} E(0) exp(C N(t)^{2s+3} t)

    with E the eps-weighted Sobolev energy and N the running monitor sup.
    The admissible set of C is an up-set, so bisection applies.
    """
    recs = [r for r in records if r.xs_eps is not None and r.monitor_sup is not None]
    if not recs:
        return EnvelopeReport(constant=0.0, max_violation=0.0, passed=True)
    e0 = recs[0].xs_eps
    power = 2.0 * s + 3.0

    def violation(c):
        worst = 0.0
        for r in recs:
            k = r.monitor_sup**power
            log_bound = np.log(c * k * e0) + c * k * r.t if c > 0 else -np.inf
            if log_bound == -np.inf:
                ratio = np.inf if r.xs_eps > 0 else 0.0
            elif log_bound > 700.0:
                ratio = 0.0
            else:
                ratio = r.xs_eps / np.exp(log_bound)
            worst = max(worst, ratio)
        return worst

    if e0 == 0.0:
        peak = max(r.xs_eps for r in recs)
        return EnvelopeReport(constant=0.0, max_violation=peak, passed=peak <= tol)
    if violation(c_max) > 1.0:
        return EnvelopeReport(constant=c_max, max_violation=violation(c_max), passed=False)
    lo, hi = 0.0, c_max
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if violation(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return EnvelopeReport(constant=hi, max_violation=violation(hi), passed=True)


def blowup_lower_bound_K(epsilon, C, T_star, s):
    """
    The nearly-singular lower bound exposed for exploration:
    K = (1/2)(|log(sqrt(eps)/(C T*))|^{1/(2s+3)} - 1).  The constant C is
    not computable from theory; no acceptance claim is attached.
    """
    return 0.5 * (
        abs(np.log(np.sqrt(epsilon) / (C * T_star))) ** (1.0 / (2.0 * s + 3.0)) - 1.0
    )


def tail_fraction(grid: Grid, field):
    return spectral_tail_fraction(grid, field)
