"""Per-mode scale-factor dynamics after a quench.

Each normal mode of the chain carries a scale factor b(t) obeying the
auxiliary nonlinear equation

    b'' + lam(t) * b = lam(0) / b**3,      b(0) = 1,  b'(0) = 0,

where lam(t) is the mode's coupling-matrix eigenvalue at time t and
lam(0) is its value just before the quench (the mode starts in the ground
state of that frequency).  All of the post-quench state's time dependence
enters through (b, b').

For a sudden jump lam_i -> lam_f the solution is closed form:

    lam_f > 0:   b(t) = sqrt(n * cos(2 sqrt(lam_f) t) + m),
                 n = (lam_f - lam_i) / (2 lam_f),  m = (lam_f + lam_i) / (2 lam_f)
    lam_f == 0:  b(t) = sqrt(1 + lam_i t**2)

so b**2 is periodic with period pi / sqrt(lam_f), and the combination
b'**2 + lam_f b**2 + lam_i / b**2 is conserved (= lam_i + lam_f).

General protocols are integrated with classical fixed-step RK4.  Step
halving is governed by drift of the Ermakov-Lewis invariant

    I(t) = ((b u' - b' u)**2 + lam(0) * (u / b)**2) / 2,

built from a co-integrated solution u of the linear equation
u'' + lam(t) u = 0 with u(0) = 0, u'(0) = 1; I(t) = 1/2 for the exact
flow.  This invariant-based acceptance is independent of the stepper's
own error estimate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.integrate import quad

from .errors import IntegrationError

Interpolation = Literal["linear", "previous"]


@dataclass(frozen=True)
class QuenchProtocol:
    """Time profile lam(t) of one mode's eigenvalue, for t >= 0.

    ``lam_initial`` is the eigenvalue just before t = 0; it fixes the
    initial ground state and the inverse-cube source term.  Sudden
    protocols jump to ``lam_final`` at t = 0.  General protocols sample
    lam at ``times`` (strictly increasing, starting at 0) and interpolate
    piecewise linearly (``"linear"``) or hold the previous sample
    (``"previous"``); past the last sample the final value is held.
    """

    kind: Literal["sudden", "general"]
    lam_initial: float
    lam_final: float | None = None
    times: np.ndarray | None = None
    values: np.ndarray | None = None
    interpolation: Interpolation = "linear"

    @classmethod
    def sudden(cls, lam_initial: float, lam_final: float) -> "QuenchProtocol":
        if lam_initial <= 0:
            raise ValueError("lam_initial must be positive (ground state before the quench)")
        if lam_final < 0:
            raise ValueError("lam_final must be non-negative")
        return cls(kind="sudden", lam_initial=float(lam_initial), lam_final=float(lam_final))

    @classmethod
    def general(
        cls,
        lam_initial: float,
        times,
        values,
        interpolation: Interpolation = "linear",
    ) -> "QuenchProtocol":
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        if lam_initial <= 0:
            raise ValueError("lam_initial must be positive (ground state before the quench)")
        if times.ndim != 1 or times.shape != values.shape or times.size == 0:
            raise ValueError("times and values must be matching 1-d arrays")
        if times[0] != 0.0:
            raise ValueError("protocol sample times must start at 0")
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise ValueError("protocol sample times must be strictly increasing")
        if interpolation not in ("linear", "previous"):
            raise ValueError(f"unknown interpolation {interpolation!r}")
        return cls(
            kind="general",
            lam_initial=float(lam_initial),
            times=times,
            values=values,
            interpolation=interpolation,
        )

    def value_at(self, t):
        """lam(t) for t >= 0 (vectorized)."""
        t = np.asarray(t, dtype=float)
        if self.kind == "sudden":
            out = np.full(t.shape, self.lam_final)
            return out if out.shape else float(out)
        if self.interpolation == "linear":
            return np.interp(t, self.times, self.values)
        idx = np.clip(np.searchsorted(self.times, t, side="right") - 1, 0, self.times.size - 1)
        out = self.values[idx]
        return out if out.shape else float(out)


@dataclass(frozen=True)
class QuenchSchedule:
    """Chain-parameter protocol (t, omega, k) shared by all modes.

    Projection onto a mode with bond-Laplacian eigenvalue mu gives the
    per-mode eigenvalue samples ``omega**2 + mu * k``, interpolated in
    eigenvalue space with the schedule's rule.
    """

    times: np.ndarray
    omegas: np.ndarray
    ks: np.ndarray
    interpolation: Interpolation = "linear"

    def __post_init__(self):
        object.__setattr__(self, "times", np.asarray(self.times, dtype=float))
        object.__setattr__(self, "omegas", np.asarray(self.omegas, dtype=float))
        object.__setattr__(self, "ks", np.asarray(self.ks, dtype=float))
        if self.times.ndim != 1 or self.times.size == 0:
            raise ValueError("schedule needs at least one sample time")
        if self.times[0] != 0.0:
            raise ValueError("schedule must start at t = 0")
        if self.times.size > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("schedule times must be strictly increasing")
        if self.omegas.shape != self.times.shape or self.ks.shape != self.times.shape:
            raise ValueError("omegas and ks must match the sample times in shape")
        if np.any(self.omegas < 0) or np.any(self.ks < 0):
            raise ValueError("schedule omega and k values must be non-negative")
        if self.interpolation not in ("linear", "previous"):
            raise ValueError(f"unknown interpolation {self.interpolation!r}")

    @property
    def final_params(self) -> tuple[float, float]:
        return float(self.omegas[-1]), float(self.ks[-1])

    def mode_protocol(self, mu: float, lam_initial: float) -> QuenchProtocol:
        values = self.omegas**2 + mu * self.ks
        return QuenchProtocol.general(lam_initial, self.times, values, self.interpolation)


@dataclass(frozen=True)
class ModeSolution:
    """One mode's scale factor.  ``evaluate`` returns (b, b') on demand.

    Closed-form solutions are exact for all t >= 0.  Numeric solutions
    store a dense RK4 grid and interpolate with cubic Hermite polynomials
    (node derivatives for b' come from the differential equation itself),
    valid on [0, t_max] only.
    """

    lam_initial: float
    closed: bool
    lam_final: float | None = None
    amp: float | None = None
    offset: float | None = None
    grid: np.ndarray | None = None
    b_grid: np.ndarray | None = None
    bdot_grid: np.ndarray | None = None
    protocol: QuenchProtocol | None = None

    def evaluate(self, t):
        """(b(t), b'(t)) for scalar or array t >= 0."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        if np.any(t < 0):
            raise ValueError("scale factor is defined for t >= 0 only")
        if self.closed:
            b, bdot = self._closed_eval(t)
        else:
            b, bdot = self._interp_eval(t)
        if scalar:
            return float(b[0]), float(bdot[0])
        return b, bdot

    def b(self, t):
        return self.evaluate(t)[0]

    def second_derivative(self, t):
        """Analytic b''(t); closed-form solutions only."""
        if not self.closed:
            raise ValueError("second derivative is available for closed-form solutions only")
        t = np.asarray(t, dtype=float)
        b, _ = self._closed_eval(np.atleast_1d(t))
        if self.lam_final == 0.0:
            out = self.lam_initial / b**3
        else:
            phase = 2.0 * np.sqrt(self.lam_final) * np.atleast_1d(t)
            out = (
                -2.0 * self.amp * self.lam_final * np.cos(phase) / b
                - self.amp**2 * self.lam_final * np.sin(phase) ** 2 / b**3
            )
        return float(out[0]) if t.ndim == 0 else out

    def _closed_eval(self, t):
        if self.lam_final == 0.0:
            bsq = 1.0 + self.lam_initial * t**2
            b = np.sqrt(bsq)
            return b, self.lam_initial * t / b
        root = np.sqrt(self.lam_final)
        # amp*cos(2 root t) + offset, written without the amp/offset
        # cancellation (amp + offset = 1 analytically) so that b(0) = 1
        # holds exactly and large coefficients cost no precision.
        half_sin = np.sin(root * t)
        bsq = 1.0 - 2.0 * self.amp * half_sin**2
        b = np.sqrt(bsq)
        bdot = -self.amp * root * np.sin(2.0 * root * t) / b
        return b, bdot

    def _interp_eval(self, t):
        grid = self.grid
        if np.any(t > grid[-1] * (1.0 + 1e-12) + 1e-300):
            raise ValueError(
                f"numeric solution covers [0, {grid[-1]:g}] but evaluation "
                f"was requested at t = {t.max():g}"
            )
        t = np.minimum(t, grid[-1])
        idx = np.clip(np.searchsorted(grid, t, side="right") - 1, 0, grid.size - 2)
        t0 = grid[idx]
        t1 = grid[idx + 1]
        h = t1 - t0
        s = (t - t0) / h
        b0, b1 = self.b_grid[idx], self.b_grid[idx + 1]
        d0, d1 = self.bdot_grid[idx], self.bdot_grid[idx + 1]
        # Node accelerations straight from the differential equation.  A
        # "previous"-interpolated eigenvalue is constant within each cell
        # (steps never straddle sample times), so query it mid-cell to get
        # the one-sided limit right at segment edges.
        if self.protocol.interpolation == "previous":
            lam0 = lam1 = self.protocol.value_at(0.5 * (t0 + t1))
        else:
            lam0, lam1 = self.protocol.value_at(t0), self.protocol.value_at(t1)
        a0 = self.lam_initial / b0**3 - lam0 * b0
        a1 = self.lam_initial / b1**3 - lam1 * b1
        s2, s3 = s * s, s * s * s
        h00, h10 = 2 * s3 - 3 * s2 + 1, s3 - 2 * s2 + s
        h01, h11 = -2 * s3 + 3 * s2, s3 - s2
        b = h00 * b0 + h10 * h * d0 + h01 * b1 + h11 * h * d1
        bdot = h00 * d0 + h10 * h * a0 + h01 * d1 + h11 * h * a1
        return b, bdot


def solve_sudden(lam_initial: float, lam_final: float) -> ModeSolution:
    """Closed-form scale factor for a sudden jump lam_initial -> lam_final."""
    if lam_initial <= 0:
        raise ValueError(f"lam_initial must be positive, got {lam_initial}")
    if lam_final < 0:
        raise ValueError(f"lam_final must be non-negative, got {lam_final}")
    if lam_final == 0.0:
        return ModeSolution(lam_initial=float(lam_initial), closed=True, lam_final=0.0)
    amp = (lam_final - lam_initial) / (2.0 * lam_final)
    offset = (lam_final + lam_initial) / (2.0 * lam_final)
    return ModeSolution(
        lam_initial=float(lam_initial),
        closed=True,
        lam_final=float(lam_final),
        amp=amp,
        offset=offset,
    )


def ode_residual(solution: ModeSolution, times) -> np.ndarray:
    """|b'' + lam(t) b - lam(0)/b**3| on a grid; closed-form solutions only."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    b, _ = solution.evaluate(times)
    bdd = solution.second_derivative(times)
    return np.abs(bdd + solution.lam_final * b - solution.lam_initial / b**3)


def sudden_invariant(solution: ModeSolution, times) -> np.ndarray:
    """b'**2 + lam_f b**2 + lam_i / b**2, conserved (= lam_i + lam_f) for
    sudden quenches."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    b, bdot = solution.evaluate(times)
    return bdot**2 + solution.lam_final * b**2 + solution.lam_initial / b**2


def integrate_general(
    protocol: QuenchProtocol,
    t_max: float,
    tolerance: float = 1e-10,
    max_refinements: int = 22,
) -> ModeSolution:
    """Integrate the scale-factor equation for an arbitrary protocol.

    Classical RK4 with uniform steps inside each protocol segment (steps
    never straddle a sample time, where lam(t) is allowed to kink or
    jump).  The step is halved globally until the Ermakov-Lewis invariant
    drifts by less than ``tolerance`` over the whole grid; exceeding
    ``max_refinements`` halvings raises :class:`IntegrationError` carrying
    the first failing time.
    """
    if protocol.kind == "sudden":
        protocol = QuenchProtocol.general(
            protocol.lam_initial,
            [0.0],
            [protocol.lam_final],
            interpolation="previous",
        )
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    lam0 = protocol.lam_initial
    interior = protocol.times[(protocol.times > 0.0) & (protocol.times < t_max)]
    bounds = np.concatenate(([0.0], interior, [t_max]))
    lam_scale = max(np.abs(protocol.values).max(), lam0)
    h_target = min(0.02, 0.2 / np.sqrt(lam_scale)) if lam_scale > 0 else 0.02

    first_bad = 0.0
    for level in range(max_refinements + 1):
        ts, bs, ds, us, vs = _rk4_run(protocol, bounds, h_target / 2**level)
        if np.all(bs > 0):
            drift = np.abs(0.5 * ((bs * vs - ds * us) ** 2 + lam0 * (us / bs) ** 2) - 0.5)
            if drift.max() < tolerance:
                return ModeSolution(
                    lam_initial=lam0,
                    closed=False,
                    grid=ts,
                    b_grid=bs,
                    bdot_grid=ds,
                    protocol=protocol,
                )
            first_bad = ts[int(np.argmax(drift >= tolerance))]
        else:
            first_bad = ts[int(np.argmax(bs <= 0))]
    raise IntegrationError(
        f"step refinement exhausted ({max_refinements} halvings) without "
        f"meeting invariant tolerance {tolerance:g}; first failure near t = {first_bad:g}",
        time=float(first_bad),
    )


def _rk4_run(protocol: QuenchProtocol, bounds: np.ndarray, h_target: float):
    """Fixed-step RK4 over all protocol segments.

    Integrates (b, b') together with the linear companion (u, u') used by
    the invariant check; returns the node arrays (t, b, b', u, u').
    """
    lam0 = protocol.lam_initial
    steps = [int(np.ceil((b1 - b0) / h_target)) for b0, b1 in zip(bounds[:-1], bounds[1:])]
    total = 1 + sum(steps)
    t_nodes = np.empty(total)
    b_nodes = np.empty(total)
    d_nodes = np.empty(total)
    u_nodes = np.empty(total)
    v_nodes = np.empty(total)
    t_nodes[0], b_nodes[0], d_nodes[0] = 0.0, 1.0, 0.0
    u_nodes[0], v_nodes[0] = 0.0, 1.0

    pos = 0
    b, d, u, v = 1.0, 0.0, 0.0, 1.0
    for (seg_start, seg_end), nsteps in zip(zip(bounds[:-1], bounds[1:]), steps):
        h = (seg_end - seg_start) / nsteps
        if protocol.interpolation == "previous":
            lam_half = [float(protocol.value_at(seg_start))] * (2 * nsteps + 1)
        else:
            # Eigenvalue samples on the half-step lattice, both ends included.
            lam_half = protocol.value_at(seg_start + 0.5 * h * np.arange(2 * nsteps + 1)).tolist()
        hh = 0.5 * h
        h6 = h / 6.0
        for i in range(nsteps):
            la, lm, lb = lam_half[2 * i], lam_half[2 * i + 1], lam_half[2 * i + 2]
            dd1 = lam0 / (b * b * b) - la * b
            dv1 = -la * u

            b2 = b + hh * d
            d2 = d + hh * dd1
            u2 = u + hh * v
            v2 = v + hh * dv1
            dd2 = lam0 / (b2 * b2 * b2) - lm * b2
            dv2 = -lm * u2

            b3 = b + hh * d2
            d3 = d + hh * dd2
            u3 = u + hh * v2
            v3 = v + hh * dv2
            dd3 = lam0 / (b3 * b3 * b3) - lm * b3
            dv3 = -lm * u3

            b4 = b + h * d3
            d4 = d + h * dd3
            u4 = u + h * v3
            v4 = v + h * dv3
            dd4 = lam0 / (b4 * b4 * b4) - lb * b4
            dv4 = -lb * u4

            b, d = b + h6 * (d + 2 * (d2 + d3) + d4), d + h6 * (dd1 + 2 * (dd2 + dd3) + dd4)
            u, v = u + h6 * (v + 2 * (v2 + v3) + v4), v + h6 * (dv1 + 2 * (dv2 + dv3) + dv4)
            pos += 1
            t_nodes[pos] = seg_start + (i + 1) * h
            b_nodes[pos] = b
            d_nodes[pos] = d
            u_nodes[pos] = u
            v_nodes[pos] = v
        t_nodes[pos] = seg_end  # exact edge, avoids accumulated roundoff
    return t_nodes, b_nodes, d_nodes, u_nodes, v_nodes


def compute_tau(solution: ModeSolution, t: float) -> float:
    """Phase integral tau(t) = integral_0^t ds / b(s)**2 (quadrature,
    absolute tolerance ~1e-12)."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0.0:
        return 0.0
    value, _ = quad(
        lambda s: 1.0 / solution.evaluate(s)[0] ** 2,
        0.0,
        t,
        epsabs=1e-12,
        epsrel=1e-12,
        limit=1000,
    )
    return value
