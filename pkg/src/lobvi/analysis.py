"""Error norms, convergence orders, energy-drift tracking, stability probing.

Conventions fixed here so every experiment reports the same quantities:
errors are infinity norms sampled at mesh nodes only, the energy reference
is the value at the first record entry, and the drift growth rate is the
slope of an ordinary least-squares fit through the running per-period
maxima (the fit choice is echoed in the CLI output metadata).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .harmonic import HarmonicParams, stability_limit, step_harmonic, transfer_matrix
from .mechanics import PhasePoint

_OBSERVABLES = ("p", "q", "H", "H_d")


@dataclass(frozen=True)
class TrajectoryRecord:
    """Node-sampled run: times, states, optional exact states and energies.

    discrete_energies is only meaningful for the linear closed-form scheme;
    leave it None elsewhere.
    """

    times: tuple
    points: tuple
    exact: Optional[tuple] = None
    energies: Optional[tuple] = None
    discrete_energies: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(self.times))
        object.__setattr__(self, "points", tuple(self.points))
        for name in ("exact", "energies", "discrete_energies"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, tuple(val))
        n = len(self.times)
        if n == 0:
            raise ValueError("empty record")
        if len(self.points) != n:
            raise ValueError("times and points lengths differ")
        for name in ("exact", "energies", "discrete_energies"):
            val = getattr(self, name)
            if val is not None and len(val) != n:
                raise ValueError(f"{name} length differs from times")
        for t0, t1 in zip(self.times, self.times[1:]):
            if not t1 > t0:
                raise ValueError("times must be strictly increasing")

    @property
    def span(self) -> float:
        return self.times[-1] - self.times[0]


def linf_error(record: TrajectoryRecord, observable: str) -> float:
    """Max node error of one observable.

    p and q are measured against the exact sequence; H and H_d against
    their own first entry (runs are seeded on the reference orbit, so the
    first entry is the conserved reference value).
    """
    if observable not in _OBSERVABLES:
        raise ValueError(f"unknown observable {observable!r}")
    if observable in ("p", "q"):
        if record.exact is None:
            raise ValueError(f"observable {observable!r} needs the exact sequence")
        pick = (lambda pt: pt.p) if observable == "p" else (lambda pt: pt.q)
        return max(
            abs(pick(a) - pick(b)) for a, b in zip(record.points, record.exact)
        )
    series = record.energies if observable == "H" else record.discrete_energies
    if series is None:
        raise ValueError(f"observable {observable!r} not present in the record")
    ref = series[0]
    return max(abs(v - ref) for v in series)


def estimate_order(err_coarse: float, err_fine: float) -> int:
    """Closest integer to log2 of the error ratio between meshes N and 2N."""
    for e in (err_coarse, err_fine):
        if not (isinstance(e, (int, float)) and math.isfinite(e) and e > 0.0):
            raise ValueError(f"degenerate error value {e!r}")
    return round(math.log2(err_coarse / err_fine))


@dataclass(frozen=True)
class ConvergenceTable:
    """Per-mesh infinity errors with integer orders between successive rows.

    Mesh counts must double row to row; order tuples have one entry per
    doubling (len(meshes) - 1 values).  err_Hd is None for the schemes
    without a conserved discrete energy.
    """

    meshes: tuple
    err_p: tuple
    err_q: tuple
    err_H: tuple
    err_Hd: Optional[tuple]
    order_p: tuple
    order_q: tuple
    order_H: tuple

    def __post_init__(self):
        n = len(self.meshes)
        if n < 2:
            raise ValueError("need at least two meshes")
        for a, b in zip(self.meshes, self.meshes[1:]):
            if b != 2 * a:
                raise ValueError(f"mesh counts must double: {a} then {b}")
        for name in ("err_p", "err_q", "err_H"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} length mismatch")
        if self.err_Hd is not None and len(self.err_Hd) != n:
            raise ValueError("err_Hd length mismatch")
        for name in ("order_p", "order_q", "order_H"):
            if len(getattr(self, name)) != n - 1:
                raise ValueError(f"{name} needs one entry per doubling")


def convergence_table(
    meshes: Sequence[int],
    err_p: Sequence[float],
    err_q: Sequence[float],
    err_H: Sequence[float],
    err_Hd: Optional[Sequence[float]] = None,
) -> ConvergenceTable:
    """Assemble a table from measured errors, estimating all orders."""
    orders = lambda errs: tuple(
        estimate_order(a, b) for a, b in zip(errs, errs[1:])
    )
    return ConvergenceTable(
        meshes=tuple(int(n) for n in meshes),
        err_p=tuple(err_p),
        err_q=tuple(err_q),
        err_H=tuple(err_H),
        err_Hd=None if err_Hd is None else tuple(err_Hd),
        order_p=orders(tuple(err_p)),
        order_q=orders(tuple(err_q)),
        order_H=orders(tuple(err_H)),
    )


def energy_drift_series(
    record: TrajectoryRecord,
    window: int,
    observable: Optional[str] = None,
) -> tuple:
    """Running energy-error maxima per period, plus a linear growth rate.

    The record is treated as spanning `window` equal periods.  Returns
    (series, rate) where series holds (period index, running max |E - E0|)
    pairs and rate is the OLS slope of the series.  observable defaults to
    H_d when the record has one, else H.
    """
    if window < 1:
        raise ValueError("window must cover at least one period")
    if observable is None:
        observable = "H_d" if record.discrete_energies is not None else "H"
    if observable == "H_d":
        series = record.discrete_energies
    elif observable == "H":
        series = record.energies
    else:
        raise ValueError(f"unknown energy observable {observable!r}")
    if series is None:
        raise ValueError(f"observable {observable!r} not present in the record")

    t0 = record.times[0]
    period = record.span / window
    ref = series[0]
    running = 0.0
    out = []
    j = 0
    n = len(record.times)
    for i in range(1, window + 1):
        # last bucket takes everything left so edge roundoff cannot drop it
        t_end = record.times[-1] if i == window else t0 + i * period
        while j < n and record.times[j] <= t_end + 1e-9 * period:
            running = max(running, abs(series[j] - ref))
            j += 1
        out.append((i, running))
    if window < 2:
        rate = 0.0
    else:
        idx = np.array([k for k, _ in out], dtype=float)
        val = np.array([v for _, v in out], dtype=float)
        rate = float(np.polyfit(idx, val, 1)[0])
    return out, rate


@dataclass(frozen=True)
class StabilityScan:
    """Boundedness verdict per grid value of (step x frequency)."""

    grid: tuple
    bounded: tuple
    transition: Optional[tuple]


def stability_scan(
    omega: float, m: float, hw_grid: Sequence[float], steps: int
) -> StabilityScan:
    """Probe boundedness of the closed-form update along an h*omega grid.

    A grid point is bounded when the scaled phase norm max(|p|/(m omega),
    |q|) never exceeds 10x its initial value over the run; geometric growth
    of an unstable mode makes any O(1) threshold equivalent.  The grid must
    stay inside (0, sqrt(10)), where the update map is defined.
    """
    if steps < 1:
        raise ValueError("need at least one step")
    grid = tuple(float(g) for g in hw_grid)
    top = math.sqrt(10.0)
    for g in grid:
        if not 0.0 < g < top:
            raise ValueError(f"grid value {g!r} outside (0, sqrt(10))")

    verdicts = []
    for g in grid:
        params = HarmonicParams(m=m, omega=omega, h=g / omega)
        tm = transfer_matrix(params)
        pt = PhasePoint(0.0, 1.0)
        norm0 = max(abs(pt.p) / (m * omega), abs(pt.q))
        worst = norm0
        for _ in range(steps):
            pt = step_harmonic(pt, tm)
            worst = max(worst, abs(pt.p) / (m * omega), abs(pt.q))
            if worst > 10.0 * norm0:
                break
        verdicts.append(worst <= 10.0 * norm0)

    transition = None
    for i, ok in enumerate(verdicts):
        if not ok:
            transition = (grid[i - 1], grid[i]) if i > 0 else (0.0, grid[i])
            break
    return StabilityScan(grid=grid, bounded=tuple(verdicts), transition=transition)


def map_jacobian_determinant(
    step: Callable[[PhasePoint], PhasePoint], point: PhasePoint, eps: float = 1e-6
) -> float:
    """Central-difference Jacobian determinant of a one-step phase map."""
    if not eps > 0.0:
        raise ValueError("eps must be positive")
    pp = step(PhasePoint(point.p + eps, point.q))
    pm = step(PhasePoint(point.p - eps, point.q))
    qp = step(PhasePoint(point.p, point.q + eps))
    qm = step(PhasePoint(point.p, point.q - eps))
    dp_dp = (pp.p - pm.p) / (2.0 * eps)
    dq_dp = (pp.q - pm.q) / (2.0 * eps)
    dp_dq = (qp.p - qm.p) / (2.0 * eps)
    dq_dq = (qp.q - qm.q) / (2.0 * eps)
    return dp_dp * dq_dq - dp_dq * dq_dp
