"""Adaptive Dormand-Prince 5(4) integration with events and dense output.

Deliberately hand-rolled rather than wrapping scipy.integrate.solve_ivp: the
analysis layer needs per-run acceptance/rejection statistics, event location
with guard predicates (to tell a genuine crossing from a grazing stall), and
an interpolant we control, all with byte-reproducible results independent of
how work is distributed across processes.  The tableau is the classic DOPRI5
embedded pair; dense evaluation uses the cubic Hermite interpolant of each
accepted step, whose error is far below the working tolerances here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

# ====================================================================
# Butcher tableau (Dormand-Prince 5(4))
# ====================================================================

_C = (0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0)
_A = (
    (),
    (1.0 / 5.0,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
     -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
     11.0 / 84.0),
)
#: 5th-order weights (row 7 of A: the method is FSAL)
_B = _A[6]
#: error weights b5 - b4
_E = (71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0,
      -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
SAFETY = 0.9

#: absolute time resolution of located events
EVENT_TIME_TOL = 1e-10


# ====================================================================
# Result containers
# ====================================================================

@dataclass
class StepStats:
    accepted: int = 0
    rejected: int = 0
    n_eval: int = 0


@dataclass(frozen=True)
class EventSpec:
    """Scalar event g(t, y) watched for sign changes at accepted steps.

    direction: +1 only rising crossings, -1 only falling, 0 both.
    guard: optional predicate evaluated at the located crossing; a hit is
        discarded when it returns False (used e.g. to demand a curvature
        condition at a stationary point).
    terminal: stop the run at the first accepted hit of this event.
    """

    fn: Callable[[float, np.ndarray], float]
    name: str = ""
    direction: int = 0
    terminal: bool = False
    guard: Callable[[float, np.ndarray], bool] | None = None


@dataclass(frozen=True)
class EventHit:
    name: str
    index: int          # position in the events sequence
    t: float
    y: np.ndarray


class Trajectory:
    """Piecewise cubic Hermite view of the accepted steps of one run."""

    def __init__(self, ts: np.ndarray, ys: np.ndarray, fs: np.ndarray):
        self.ts = ts            # (n+1,)
        self.ys = ys            # (n+1, dim)
        self.fs = fs            # (n+1, dim)

    @property
    def t_end(self) -> float:
        return float(self.ts[-1])

    def __call__(self, t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        k = np.clip(np.searchsorted(self.ts, t_arr, side="right") - 1,
                    0, len(self.ts) - 2)
        t0 = self.ts[k]
        h = self.ts[k + 1] - t0
        s = ((t_arr - t0) / h)[:, None]
        y0, y1 = self.ys[k], self.ys[k + 1]
        f0, f1 = self.fs[k], self.fs[k + 1]
        h00 = (1.0 + 2.0 * s) * (1.0 - s) ** 2
        h10 = s * (1.0 - s) ** 2
        h01 = s * s * (3.0 - 2.0 * s)
        h11 = s * s * (s - 1.0)
        out = h00 * y0 + h10 * h[:, None] * f0 + h01 * y1 + h11 * h[:, None] * f1
        if np.isscalar(t) or np.asarray(t).ndim == 0:
            return out[0]
        return out


@dataclass
class IvpResult:
    t: np.ndarray                       # accepted step times, t[0] = t0
    y: np.ndarray                       # states at those times, shape (len(t), dim)
    status: str                         # "completed" or "event"
    stats: StepStats
    events: list[EventHit] = field(default_factory=list)
    trajectory: Trajectory | None = None

    @property
    def t_final(self) -> float:
        return float(self.t[-1])

    @property
    def y_final(self) -> np.ndarray:
        return self.y[-1]

    def first_event(self, name: str) -> EventHit | None:
        for hit in self.events:
            if hit.name == name:
                return hit
        return None


# ====================================================================
# Core stepper
# ====================================================================

def _rk_step(f, t, y, fy, h):
    """One Dormand-Prince step.  Returns (y1, f1, err_vec), 6 fresh evals
    with the FSAL evaluation f1 reusable as the next step's fy."""
    k = [fy]
    for i in range(1, 7):
        ai = _A[i]
        yi = y + h * sum(aij * kj for aij, kj in zip(ai, k))
        k.append(f(t + _C[i] * h, yi))
    y1 = y + h * sum(bj * kj for bj, kj in zip(_B, k) if bj != 0.0)
    err = h * sum(ej * kj for ej, kj in zip(_E, k) if ej != 0.0)
    return y1, k[6], err


def _error_norm(err, y0, y1, atol, rtol):
    scale = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    return math.sqrt(float(np.mean((err / scale) ** 2)))


def _initial_step(f, t0, y0, f0, tf, atol, rtol):
    """Hairer-style starting step size guess (two cheap probes)."""
    scale = atol + rtol * np.abs(y0)
    d0 = math.sqrt(float(np.mean((y0 / scale) ** 2)))
    d1 = math.sqrt(float(np.mean((f0 / scale) ** 2)))
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, abs(tf - t0))
    y1 = y0 + h0 * f0
    f1 = f(t0 + h0, y1)
    d2 = math.sqrt(float(np.mean(((f1 - f0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100.0 * h0, h1, abs(tf - t0))


def _hermite(t, t0, h, y0, f0, y1, f1):
    s = (t - t0) / h
    h00 = (1.0 + 2.0 * s) * (1.0 - s) ** 2
    h10 = s * (1.0 - s) ** 2
    h01 = s * s * (3.0 - 2.0 * s)
    h11 = s * s * (s - 1.0)
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


def _locate_crossing(g, t0, t1, g0, g1):
    """Bisect a scalar sign change to EVENT_TIME_TOL.  g0, g1 straddle 0."""
    lo, hi, glo = t0, t1, g0
    while hi - lo > EVENT_TIME_TOL:
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if (glo <= 0.0) == (gm <= 0.0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def integrate(
    f: Callable[[float, np.ndarray], np.ndarray],
    t_span: tuple[float, float],
    y0: np.ndarray,
    *,
    rtol: float = 1e-10,
    atol: float = 1e-10,
    events: Sequence[EventSpec] = (),
    max_step: float = math.inf,
    dense: bool = False,
) -> IvpResult:
    """Integrate y' = f(t, y) forward over t_span.

    Accepted steps are recorded as-is (no resampling); use the trajectory
    (dense=True) to evaluate in between.  Events are searched on each
    accepted step via the Hermite interpolant and bisected to
    EVENT_TIME_TOL; a terminal hit ends the run with the state advanced to
    the located time by one clipped RK step.
    """
    t0, tf = float(t_span[0]), float(t_span[1])
    if tf <= t0:
        raise ValueError(f"need tf > t0, got span {t_span}")
    y = np.array(y0, dtype=float)
    stats = StepStats()
    fy = f(t0, y)
    stats.n_eval += 1
    h = _initial_step(f, t0, y, fy, tf, atol, rtol)
    stats.n_eval += 1
    h = min(h, max_step)

    ts = [t0]
    ys = [y.copy()]
    fs = [fy.copy()]
    hits: list[EventHit] = []
    g_prev = [ev.fn(t0, y) for ev in events]
    t = t0
    status = "completed"

    while t < tf:
        h = min(h, tf - t, max_step)
        if h < 1e-14 * max(1.0, abs(t)):
            raise RuntimeError(f"step size underflow at t = {t:.6g}")
        y1, f1, err = _rk_step(f, t, y, fy, h)
        stats.n_eval += 6
        enorm = _error_norm(err, y, y1, atol, rtol)
        if enorm > 1.0:
            stats.rejected += 1
            h *= max(MIN_FACTOR, SAFETY * enorm ** -0.2)
            continue
        stats.accepted += 1
        t1 = t + h

        # ---- event search on [t, t1] -------------------------------
        terminal_hit = None
        if events:
            step_hits = []
            for idx, ev in enumerate(events):
                g1v = ev.fn(t1, y1)
                g0v = g_prev[idx]
                crossed = (
                    (ev.direction >= 0 and g0v < 0.0 <= g1v)
                    or (ev.direction <= 0 and g0v > 0.0 >= g1v)
                )
                g_prev[idx] = g1v
                if not crossed:
                    continue

                def g_interp(tt, _ev=ev):
                    yy = _hermite(tt, t, h, y, fy, y1, f1)
                    return _ev.fn(tt, yy)

                t_star = _locate_crossing(g_interp, t, t1, g0v, g1v)
                y_star = _hermite(t_star, t, h, y, fy, y1, f1)
                if ev.guard is not None and not ev.guard(t_star, y_star):
                    continue
                step_hits.append(EventHit(ev.name, idx, t_star, y_star))
            step_hits.sort(key=lambda hit: hit.t)
            for hit in step_hits:
                if events[hit.index].terminal:
                    terminal_hit = hit
                    break
                hits.append(hit)

        if terminal_hit is not None:
            # advance to the event time with a fresh clipped step
            h_ev = terminal_hit.t - t
            if h_ev > 1e-13:
                y_ev, f_ev, _ = _rk_step(f, t, y, fy, h_ev)
                stats.n_eval += 6
            else:
                y_ev, f_ev = y.copy(), fy.copy()
            hits.append(EventHit(terminal_hit.name, terminal_hit.index,
                                 terminal_hit.t, y_ev))
            ts.append(terminal_hit.t)
            ys.append(y_ev)
            fs.append(f_ev)
            status = "event"
            break

        ts.append(t1)
        ys.append(y1.copy())
        fs.append(f1.copy())
        t, y, fy = t1, y1, f1
        if enorm == 0.0:
            h *= MAX_FACTOR
        else:
            h *= min(MAX_FACTOR, max(MIN_FACTOR, SAFETY * enorm ** -0.2))

    t_arr = np.array(ts)
    y_arr = np.array(ys)
    traj = Trajectory(t_arr, y_arr, np.array(fs)) if dense else None
    return IvpResult(t=t_arr, y=y_arr, status=status, stats=stats,
                     events=hits, trajectory=traj)
