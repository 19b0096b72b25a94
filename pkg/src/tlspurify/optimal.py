"""Time-optimal purification results and trajectory classification.

Everything here runs the locked control u == 0 (drive phase glued to the
coherence azimuth), which is the time-optimal policy for steering theta to
the north pole: theta advances at the full rate 2J on top of the drift.

Closed forms:
  * t_min_analytic: pole-arrival time from the uncorrelated thermal start,
    finite exactly when gamma < 4J (coupling beats the bath; "coherent"
    side of the boundary J_min = gamma/4).
  * s2_resonant_solution: the decoupled qubit-coherence block is a damped
    oscillator; its first zero coincides with t_min_analytic, so an extra
    qubit coherence mu costs nothing at the optimal arrival time.

Numerics:
  * t_min_numeric integrates the (r, c, theta) flow to the pole with
    guarded stall detection, on a scalar-specialized stepper (the 50x50
    classification maps must fit a tight wall-clock budget on one core).
  * classify_region labels an initial cross-coherence xi as
      "A": the stall condition already holds at t = 0 (no integration),
      "B": theta rate falls through zero en route (stalled short of the pole),
      "C": reaches the pole,
      "U": undecided within the integration horizon.
  * delta_p quantifies how much purity transiently overshoots the value at
    pole arrival when the initial state carries extra coherence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .drive import TableDrive
from .integrator import (EVENT_TIME_TOL, MAX_FACTOR, MIN_FACTOR, SAFETY,
                         EventSpec, StepStats, integrate)
from .model import (InitialStateSpec, ModelParams, build_initial_state,
                    xi_max)
from .reduced import (POLE_GUARD, make_rhs_rct, simulate_z, x_to_z, z_purity,
                      z_purity_many, z_to_spherical)

#: |gamma - 4J| below this counts as sitting on the divergence boundary
CRITICAL_TOL = 1e-12

#: curvature slack when deciding that a theta-rate zero is a genuine stall
STALL_CURVATURE_TOL = 1e-12

HALF_PI = 0.5 * math.pi


# ====================================================================
# Closed forms
# ====================================================================

def j_min(gamma: float) -> float:
    """Weakest coupling that still reaches the pole from the thermal start."""
    return 0.25 * gamma


def is_divergent(J: float, gamma: float) -> bool:
    """True when the uncorrelated pole time is infinite (gamma >= 4J)."""
    return gamma >= 4.0 * J - CRITICAL_TOL


def classify_regime(J: float, gamma: float) -> str:
    """Label the drive/damping balance of the uncorrelated problem.

    "Markovian" when damping dominates (gamma > 4J, pole unreachable),
    "nonMarkovian" when the coupling dominates (gamma < 4J), "critical"
    on the boundary within CRITICAL_TOL.
    """
    edge = 4.0 * J - gamma
    if abs(edge) <= CRITICAL_TOL:
        return "critical"
    return "nonMarkovian" if edge > 0.0 else "Markovian"


def t_min_from_rates(J: float, gamma: float) -> float:
    """Uncorrelated minimal pole time.

    8 * arctan(sqrt((4J + gamma)/(4J - gamma))) / sqrt((4J + gamma)(4J - gamma))
    for gamma < 4J; pi/(2J) in the lossless limit; infinite otherwise.
    """
    if J <= 0.0:
        return math.inf
    if gamma == 0.0:
        return math.pi / (2.0 * J)
    if is_divergent(J, gamma):
        return math.inf
    sp = 4.0 * J + gamma
    sm = 4.0 * J - gamma
    return 8.0 * math.atan(math.sqrt(sp / sm)) / math.sqrt(sp * sm)


def t_min_analytic(params: ModelParams) -> float:
    return t_min_from_rates(params.J, params.gamma)


def uncorrelated_pole_purity(params: ModelParams) -> float:
    """Qubit purity on pole arrival from the uncorrelated thermal start:
    the qubit inherits the full bath polarization scale eta."""
    eta = params.eta
    return 0.5 + 2.0 * eta * eta


def pole_purity_ceiling(params: ModelParams, xi: float = 0.0) -> float:
    """Largest S1 purity any drive can produce from the thermal-product
    start with cross coherence xi: the radius plus offset bound
    1/2 + 2 (r0 + c0)^2, met exactly when the state is steered straight
    to the pole with nothing lost.  At xi = 0 this is the eta ceiling."""
    r0, c0, _ = initial_spherical(params, xi)
    return 0.5 + 2.0 * (r0 + c0) ** 2


# ====================================================================
# Decoupled coherence block (resonant drive)
# ====================================================================

def s2_resonant_solution(params: ModelParams, mu: float, t) -> np.ndarray:
    """Qubit coherence z[4](t) under the resonant drive, initial value mu
    with zero initial rate.  (The other quadrature z[6] obeys the same
    damped oscillator; pass its initial value for mu.)

    z'' + (gamma/2) z' + J^2 z = 0, branches by the sign of J^2 - gamma^2/16.
    """
    t = np.asarray(t, dtype=float)
    gam = params.gamma
    J = params.J
    q = 0.25 * gam                      # decay rate of the envelope
    disc = J * J - q * q
    env = np.exp(-q * t)
    if J > 0.0 and abs(disc) <= 1e-12 * J * J:
        return mu * env * (1.0 + q * t)
    if disc > 0.0:
        w = math.sqrt(disc)
        return mu * env * (np.cos(w * t) + (q / w) * np.sin(w * t))
    w = math.sqrt(-disc)
    return mu * env * (np.cosh(w * t) + (q / w) * np.sinh(w * t))


def s2_first_zero(params: ModelParams) -> float:
    """First zero of the resonant coherence block; infinite in the
    overdamped and critical regimes.  Coincides with t_min_analytic."""
    gam = params.gamma
    J = params.J
    q = 0.25 * gam
    disc = J * J - q * q
    if J <= 0.0 or disc <= 1e-12 * J * J:
        return math.inf
    w = math.sqrt(disc)
    return (HALF_PI + math.atan(q / w)) / w


# ====================================================================
# Initial point and stall condition of the (r, c, theta) flow
# ====================================================================

def initial_spherical(params: ModelParams, xi: float = 0.0) -> tuple[float, float, float]:
    """(r0, c0, theta0) of the thermal-product start with cross coherence
    of magnitude xi >= 0.  theta0 = -arccos(xi / r0): the polarization gap
    puts the state in the southern hemisphere, the coherence lifts it."""
    if xi < 0.0:
        raise ValueError(f"xi is a magnitude, got {xi}")
    a_q, _ = params.qubit_populations
    a_t, _ = params.tls_populations
    d = 0.5 * (a_t - a_q)
    r0 = math.hypot(d, xi)
    c0 = params.eta - d
    theta0 = -math.acos(min(1.0, xi / r0)) if r0 > 0.0 else 0.0
    return r0, c0, theta0


def stall_cosine(params: ModelParams, r: float, c: float) -> float:
    """cos(theta) at which the theta rate vanishes: (4J / gamma) r/(eta - c).
    A stall point exists at the given (r, c) iff this lands in (0, 1]."""
    gam = params.gamma
    if gam <= 0.0:
        return math.inf
    d = params.eta - c
    if d <= 0.0:
        return math.inf
    return 4.0 * params.J * r / (gam * d)


def fixed_point_theta(params: ModelParams, r: float, c: float) -> float | None:
    """Principal stall angle arccos of the stall cosine at the given
    (r, c), or None when no stall point exists there.  The polar rate
    vanishes at both signs of this angle: the flow repels from +theta_f
    and attracts onto -theta_f, so any state below +theta_f when the pair
    exists is cut off from the pole."""
    arg = stall_cosine(params, r, c)
    if not 0.0 < arg <= 1.0:
        return None
    return math.acos(arg)


@dataclass(frozen=True)
class Threshold:
    """A located boundary value; saturated means none exists below the
    physical ceiling and the ceiling itself is returned."""

    value: float
    saturated: bool


def xi_fixed(params: ModelParams) -> Threshold:
    """Cross-coherence boundary of the instant-stall (region A) condition,
    located by bisection on stall_cosine(t=0) = 1 over xi in [0, xi_max].

    Below the returned value the stall condition holds from the start.
    Returns 0 (not saturated) when region A is empty (gamma < 4J) and the
    ceiling with saturated=True when A covers the whole range.
    """
    ceiling = xi_max(params)

    def blocked(xi: float) -> bool:
        r0, c0, _ = initial_spherical(params, xi)
        return stall_cosine(params, r0, c0) <= 1.0

    if not blocked(0.0):
        return Threshold(0.0, False)
    if blocked(ceiling):
        return Threshold(ceiling, True)
    lo, hi = 0.0, ceiling
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if blocked(mid):
            lo = mid
        else:
            hi = mid
    return Threshold(0.5 * (lo + hi), False)


def _stall_curvature(params: ModelParams, r: float, c: float, th: float) -> float:
    """d2(theta)/dt2 on the theta-rate zero set: negative curvature means
    the rate keeps falling (a genuine stall, not a graze)."""
    gam = params.gamma
    d = params.eta - c
    rr = r if r > 1e-300 else 1e-300
    return (0.25 * gam * gam * math.cos(th) * math.sin(th)
            * (r * r - d * d) / (rr * rr))


# ====================================================================
# Scalar (r, c, theta) engine
# ====================================================================

@dataclass
class RctRun:
    status: str                 # "reached" | "trapped" | "horizon"
    t_stop: float
    r: float
    c: float
    theta: float
    theta_rate: float
    stats: StepStats


def _run_rct_scalar(params: ModelParams, r0: float, c0: float, th0: float,
                    t_end: float, rtol: float, atol: float) -> RctRun:
    """Integrate the u == 0 flow from (r0, c0, th0) until the pole, a
    guarded stall, or t_end.  Same embedded pair and controller as
    integrator.integrate, unrolled on three floats: the classification
    maps call this thousands of times on a single core.
    """
    gam = params.rates.gamma
    eta = params.rates.eta
    half = 0.5 * gam
    twoJ = 2.0 * params.J
    sin, cos, sqrt = math.sin, math.cos, math.sqrt

    def rhs(r, c, th):
        s = sin(th)
        d = eta - c
        rr = r if r > 1e-300 else 1e-300
        return (-half * (r + d * s),
                half * (r * s + d),
                -half * (d / rr) * cos(th) + twoJ)

    stats = StepStats()
    t = 0.0
    r, c, th = r0, c0, th0
    fr, fc, ft = rhs(r, c, th)
    stats.n_eval += 1

    # starting step: crude scale estimate, the controller fixes it fast
    scale = max(abs(fr), abs(fc), abs(ft), 1e-12)
    h = min(0.01 * max(abs(r), abs(c), 1.0) / scale, 0.1, t_end)

    while t < t_end:
        if h > t_end - t:
            h = t_end - t
        if h < 1e-14 * max(1.0, abs(t)):
            raise RuntimeError(f"step size underflow at t = {t:.6g}")

        # ---- one Dormand-Prince step, unrolled -----------------------
        k1r, k1c, k1t = fr, fc, ft
        k2r, k2c, k2t = rhs(r + h * 0.2 * k1r,
                            c + h * 0.2 * k1c,
                            th + h * 0.2 * k1t)
        ar, ac, at_ = (3.0 / 40.0) * k1r + (9.0 / 40.0) * k2r, \
                      (3.0 / 40.0) * k1c + (9.0 / 40.0) * k2c, \
                      (3.0 / 40.0) * k1t + (9.0 / 40.0) * k2t
        k3r, k3c, k3t = rhs(r + h * ar, c + h * ac, th + h * at_)
        ar = (44.0 / 45.0) * k1r - (56.0 / 15.0) * k2r + (32.0 / 9.0) * k3r
        ac = (44.0 / 45.0) * k1c - (56.0 / 15.0) * k2c + (32.0 / 9.0) * k3c
        at_ = (44.0 / 45.0) * k1t - (56.0 / 15.0) * k2t + (32.0 / 9.0) * k3t
        k4r, k4c, k4t = rhs(r + h * ar, c + h * ac, th + h * at_)
        ar = ((19372.0 / 6561.0) * k1r - (25360.0 / 2187.0) * k2r
              + (64448.0 / 6561.0) * k3r - (212.0 / 729.0) * k4r)
        ac = ((19372.0 / 6561.0) * k1c - (25360.0 / 2187.0) * k2c
              + (64448.0 / 6561.0) * k3c - (212.0 / 729.0) * k4c)
        at_ = ((19372.0 / 6561.0) * k1t - (25360.0 / 2187.0) * k2t
               + (64448.0 / 6561.0) * k3t - (212.0 / 729.0) * k4t)
        k5r, k5c, k5t = rhs(r + h * ar, c + h * ac, th + h * at_)
        ar = ((9017.0 / 3168.0) * k1r - (355.0 / 33.0) * k2r
              + (46732.0 / 5247.0) * k3r + (49.0 / 176.0) * k4r
              - (5103.0 / 18656.0) * k5r)
        ac = ((9017.0 / 3168.0) * k1c - (355.0 / 33.0) * k2c
              + (46732.0 / 5247.0) * k3c + (49.0 / 176.0) * k4c
              - (5103.0 / 18656.0) * k5c)
        at_ = ((9017.0 / 3168.0) * k1t - (355.0 / 33.0) * k2t
               + (46732.0 / 5247.0) * k3t + (49.0 / 176.0) * k4t
               - (5103.0 / 18656.0) * k5t)
        k6r, k6c, k6t = rhs(r + h * ar, c + h * ac, th + h * at_)
        r1 = r + h * ((35.0 / 384.0) * k1r + (500.0 / 1113.0) * k3r
                      + (125.0 / 192.0) * k4r - (2187.0 / 6784.0) * k5r
                      + (11.0 / 84.0) * k6r)
        c1 = c + h * ((35.0 / 384.0) * k1c + (500.0 / 1113.0) * k3c
                      + (125.0 / 192.0) * k4c - (2187.0 / 6784.0) * k5c
                      + (11.0 / 84.0) * k6c)
        th1 = th + h * ((35.0 / 384.0) * k1t + (500.0 / 1113.0) * k3t
                        + (125.0 / 192.0) * k4t - (2187.0 / 6784.0) * k5t
                        + (11.0 / 84.0) * k6t)
        k7r, k7c, k7t = rhs(r1, c1, th1)
        stats.n_eval += 6
        er = h * ((71.0 / 57600.0) * k1r - (71.0 / 16695.0) * k3r
                  + (71.0 / 1920.0) * k4r - (17253.0 / 339200.0) * k5r
                  + (22.0 / 525.0) * k6r - (1.0 / 40.0) * k7r)
        ec = h * ((71.0 / 57600.0) * k1c - (71.0 / 16695.0) * k3c
                  + (71.0 / 1920.0) * k4c - (17253.0 / 339200.0) * k5c
                  + (22.0 / 525.0) * k6c - (1.0 / 40.0) * k7c)
        et = h * ((71.0 / 57600.0) * k1t - (71.0 / 16695.0) * k3t
                  + (71.0 / 1920.0) * k4t - (17253.0 / 339200.0) * k5t
                  + (22.0 / 525.0) * k6t - (1.0 / 40.0) * k7t)
        sr = atol + rtol * max(abs(r), abs(r1))
        sc = atol + rtol * max(abs(c), abs(c1))
        st = atol + rtol * max(abs(th), abs(th1))
        enorm = sqrt(((er / sr) ** 2 + (ec / sc) ** 2 + (et / st) ** 2) / 3.0)
        if enorm > 1.0:
            stats.rejected += 1
            fac = SAFETY * enorm ** -0.2
            h *= fac if fac > MIN_FACTOR else MIN_FACTOR
            continue
        stats.accepted += 1
        t1 = t + h

        # ---- pole crossing (terminal, rising) ------------------------
        if th < HALF_PI <= th1:
            t_star = _hermite_root_scalar(
                t, h, th, ft, th1, k7t, HALF_PI)
            w = (t_star - t) / h
            r_s = _hermite_scalar(w, h, r, fr, r1, k7r)
            c_s = _hermite_scalar(w, h, c, fc, c1, k7c)
            th_s = _hermite_scalar(w, h, th, ft, th1, k7t)
            _, _, ft_s = rhs(r_s, c_s, th_s)
            return RctRun("reached", t_star, r_s, c_s, th_s, ft_s, stats)

        # ---- stall: theta rate falls through zero --------------------
        if ft > 0.0 >= k7t:
            t_star = _hermite_root_rate(
                t, h, (r, c, th), (fr, fc, ft), (r1, c1, th1),
                (k7r, k7c, k7t), rhs)
            w = (t_star - t) / h
            r_s = _hermite_scalar(w, h, r, fr, r1, k7r)
            c_s = _hermite_scalar(w, h, c, fc, c1, k7c)
            th_s = _hermite_scalar(w, h, th, ft, th1, k7t)
            if _stall_curvature(params, r_s, c_s, th_s) <= STALL_CURVATURE_TOL:
                return RctRun("trapped", t_star, r_s, c_s, th_s, 0.0, stats)

        t, r, c, th = t1, r1, c1, th1
        fr, fc, ft = k7r, k7c, k7t
        if enorm == 0.0:
            fac = MAX_FACTOR
        else:
            fac = SAFETY * enorm ** -0.2
            if fac > MAX_FACTOR:
                fac = MAX_FACTOR
            elif fac < MIN_FACTOR:
                fac = MIN_FACTOR
        h *= fac

    return RctRun("horizon", t, r, c, th, ft, stats)


def _hermite_scalar(w: float, h: float, y0: float, f0: float,
                    y1: float, f1: float) -> float:
    h00 = (1.0 + 2.0 * w) * (1.0 - w) ** 2
    h10 = w * (1.0 - w) ** 2
    h01 = w * w * (3.0 - 2.0 * w)
    h11 = w * w * (w - 1.0)
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


def _hermite_root_scalar(t0: float, h: float, y0: float, f0: float,
                         y1: float, f1: float, target: float) -> float:
    """Bisect y(t) = target on the Hermite cubic of one component."""
    lo, hi = t0, t0 + h
    glo = y0 - target
    while hi - lo > EVENT_TIME_TOL:
        mid = 0.5 * (lo + hi)
        w = (mid - t0) / h
        gm = _hermite_scalar(w, h, y0, f0, y1, f1) - target
        if (glo <= 0.0) == (gm <= 0.0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _hermite_root_rate(t0, h, y0, f0, y1, f1, rhs):
    """Bisect the theta-rate zero using the full interpolated state."""
    lo, hi = t0, t0 + h
    glo = f0[2]
    while hi - lo > EVENT_TIME_TOL:
        mid = 0.5 * (lo + hi)
        w = (mid - t0) / h
        r_m = _hermite_scalar(w, h, y0[0], f0[0], y1[0], f1[0])
        c_m = _hermite_scalar(w, h, y0[1], f0[1], y1[1], f1[1])
        th_m = _hermite_scalar(w, h, y0[2], f0[2], y1[2], f1[2])
        gm = rhs(r_m, c_m, th_m)[2]
        if (glo <= 0.0) == (gm <= 0.0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _run_rct_reference(params: ModelParams, r0: float, c0: float, th0: float,
                       t_end: float, rtol: float, atol: float) -> RctRun:
    """Same run on the generic integrator (cross-validation path)."""
    rhs = make_rhs_rct(params)

    def theta_rate(t, y):
        return rhs(t, y)[2]

    def stall_guard(t, y):
        return (_stall_curvature(params, y[0], y[1], y[2])
                <= STALL_CURVATURE_TOL)

    events = (
        EventSpec(lambda t, y: y[2] - HALF_PI, name="pole", direction=1,
                  terminal=True),
        EventSpec(theta_rate, name="stall", direction=-1, terminal=True,
                  guard=stall_guard),
    )
    res = integrate(rhs, (0.0, t_end), np.array([r0, c0, th0]),
                    rtol=rtol, atol=atol, events=events)
    if res.status == "event":
        hit = res.events[-1]
        status = "reached" if hit.name == "pole" else "trapped"
        y = res.y_final
        return RctRun(status, hit.t, float(y[0]), float(y[1]), float(y[2]),
                      float(rhs(hit.t, y)[2]), res.stats)
    y = res.y_final
    return RctRun("horizon", res.t_final, float(y[0]), float(y[1]),
                  float(y[2]), float(rhs(res.t_final, y)[2]), res.stats)


# ====================================================================
# Pole-arrival time, classification, purity overshoot
# ====================================================================

@dataclass
class TminResult:
    time: float                 # pole-arrival time; inf if never reached
    status: str                 # "reached" | "trapped" | "horizon"
    t_stop: float               # where the integration actually ended
    r: float
    c: float
    theta: float
    theta_rate: float           # theta rate at the stop point
    stall_blocked: bool         # stall condition already held at t = 0
    stats: StepStats

    @property
    def purity(self) -> float:
        """Qubit purity at the stop point (S1 content only)."""
        z1 = self.c + self.r * math.sin(self.theta)
        return 0.5 + 2.0 * z1 * z1


def t_min_numeric(params: ModelParams, xi: float = 0.0, *,
                  horizon_mult: float = 20.0, rtol: float = 1e-10,
                  atol: float = 1e-10, method: str = "scalar") -> TminResult:
    """Pole-arrival time of the u == 0 flow from the thermal-product start
    with cross coherence xi, by direct integration.

    Runs until the pole, a guarded stall, or horizon_mult * pi/(2J),
    whichever first; the time is infinite in the last two cases.
    """
    if params.J <= 0.0:
        raise ValueError("t_min_numeric needs J > 0")
    r0, c0, th0 = initial_spherical(params, xi)
    blocked = stall_cosine(params, r0, c0) <= 1.0
    t_end = horizon_mult * params.t0
    if method == "scalar":
        run = _run_rct_scalar(params, r0, c0, th0, t_end, rtol, atol)
    elif method == "reference":
        run = _run_rct_reference(params, r0, c0, th0, t_end, rtol, atol)
    else:
        raise ValueError(f"method must be 'scalar' or 'reference', got {method!r}")
    time = run.t_stop if run.status == "reached" else math.inf
    return TminResult(time, run.status, run.t_stop, run.r, run.c, run.theta,
                      run.theta_rate, blocked, run.stats)


def classify_region(params: ModelParams, xi: float, *,
                    horizon_mult: float = 20.0, rtol: float = 1e-8,
                    atol: float = 1e-8) -> str:
    """Label the initial cross coherence: A (instant stall condition),
    B (stalls en route), C (reaches the pole), U (undecided at horizon).

    The A test is analytic; only non-A cells integrate.  The looser
    default tolerance is plenty for a label (map resolution is one cell).
    """
    if params.gamma == 0.0:
        return "C" if params.J > 0.0 else "U"
    r0, c0, th0 = initial_spherical(params, xi)
    if stall_cosine(params, r0, c0) <= 1.0:
        return "A"
    run = _run_rct_scalar(params, r0, c0, th0, horizon_mult * params.t0,
                          rtol, atol)
    return {"reached": "C", "trapped": "B", "horizon": "U"}[run.status]


@dataclass
class DeltaPResult:
    delta_p: float              # P(t_pole)/P_S1(t_pole) - 1; NaN if pole missed
    t_pole: float
    p_pole: float               # full purity at the pole event
    p_s1_pole: float            # purity from the S1 block alone at the event
    p_max: float                # largest purity anywhere on [0, t_pole]
    t_max: float                # where that largest value sits
    status: str                 # status of the underlying (r, c, theta) run


def delta_p(params: ModelParams, xi: float, mu: float, *,
            horizon_mult: float = 20.0, rtol: float = 1e-10,
            atol: float = 1e-10, n_samples: int = 2001,
            t_pole: float | None = None) -> DeltaPResult:
    """Relative purity gained from the coherence block at pole arrival:
    P(t_pole) / P_S1(t_pole) - 1.

    Exactly zero whenever the S2 content is gone at arrival - identically
    for mu = 0, and for xi = 0 because the coherence oscillator's first
    zero coincides with the uncorrelated pole time.  With correlations the
    pole comes earlier, the coherence has not died yet, and the gain is
    positive and grows with mu.

    The pole time comes from the (r, c, theta) run; the purity trace comes
    from the reduced 8-coordinate run under the resonant drive with the
    cross coherence laid on the in-phase axis (xi real), which realizes
    the same u == 0 geometry.  The overall maximum over [0, t_pole]
    (initial transient included) is reported alongside as p_max, refined
    by a parabolic fit through the best grid sample.
    """
    if t_pole is None:
        lead = t_min_numeric(params, xi, horizon_mult=horizon_mult,
                             rtol=rtol, atol=atol)
        if lead.status != "reached":
            return DeltaPResult(math.nan, math.inf, math.nan, math.nan,
                                math.nan, math.nan, lead.status)
        t_pole = lead.time
    state = build_initial_state(params, InitialStateSpec(mu_q=mu, xi_re=xi))
    z0 = x_to_z(state.x)
    res = simulate_z(params, z0, (0.0, t_pole), rtol=rtol, atol=atol,
                     dense=True)
    traj = res.trajectory
    ts = np.linspace(0.0, t_pole, n_samples)
    ps = z_purity_many(traj(ts))
    k = int(np.argmax(ps))
    t_max, p_max = float(ts[k]), float(ps[k])
    if 0 < k < n_samples - 1:
        # parabola through the three best samples
        tm, t0_, tp = ts[k - 1], ts[k], ts[k + 1]
        pm, p0_, pp = ps[k - 1], ps[k], ps[k + 1]
        denom = (pm - 2.0 * p0_ + pp)
        if denom < 0.0:
            t_v = t0_ + 0.5 * (tm - t0_) * (pm - pp) / denom
            t_v = min(max(t_v, tm), tp)
            p_v = float(z_purity(traj(float(t_v))))
            if p_v > p_max:
                t_max, p_max = float(t_v), p_v
    zf = res.y_final
    p_pole = float(z_purity(zf))
    p_s1 = float(0.5 + 2.0 * zf[0] ** 2)
    return DeltaPResult(p_pole / p_s1 - 1.0, t_pole, p_pole, p_s1,
                        p_max, t_max, "reached")


# ====================================================================
# Compiling a u-schedule into a detuning drive
# ====================================================================

def delta_from_u(params: ModelParams, u_value: float, u_rate: float,
                 theta: float) -> float:
    """Detuning that realizes a given azimuth-relative control locally:
    delta = du/dt - J tan(theta) sin(u) (accumulated-phase convention)."""
    cap = 0.5 * math.pi - POLE_GUARD
    th = math.copysign(cap, theta) if abs(theta) >= cap else theta
    return u_rate - params.J * math.tan(th) * math.sin(u_value)


def compile_u_control(params: ModelParams, u_times, u_values,
                      xi: float = 0.0, *, rtol: float = 1e-10,
                      atol: float = 1e-10, n_samples: int = 2001):
    """Turn a piecewise-linear u(t) table into a detuning drive.

    Propagates (r, c, theta) under the tabulated u from the thermal-product
    start with cross coherence xi, then samples
    delta(t) = du/dt - J tan(theta(t)) sin(u(t)) and wraps it in a
    TableDrive with the accumulated phase convention (the one u-control
    derives in).  Returns (drive, rct_result).
    """
    u_times = np.asarray(u_times, dtype=float)
    u_values = np.asarray(u_values, dtype=float)
    if u_times.ndim != 1 or u_times.shape != u_values.shape or len(u_times) < 2:
        raise ValueError("need matching 1-d u tables, length >= 2")
    if np.any(np.diff(u_times) <= 0.0):
        raise ValueError("u table times must be strictly increasing")

    def u_fn(t: float) -> float:
        return float(np.interp(t, u_times, u_values))

    def u_rate(t: float) -> float:
        k = int(np.clip(np.searchsorted(u_times, t, side="right") - 1,
                        0, len(u_times) - 2))
        return float((u_values[k + 1] - u_values[k])
                     / (u_times[k + 1] - u_times[k]))

    r0, c0, th0 = initial_spherical(params, xi)
    rhs = make_rhs_rct(params, u_fn)
    res = integrate(rhs, (float(u_times[0]), float(u_times[-1])),
                    np.array([r0, c0, th0]), rtol=rtol, atol=atol, dense=True)
    ts = np.linspace(float(u_times[0]), float(u_times[-1]), n_samples)
    thetas = res.trajectory(ts)[:, 2]
    deltas = np.array([
        delta_from_u(params, u_fn(t), u_rate(t), th)
        for t, th in zip(ts, thetas)
    ])
    return TableDrive(ts, deltas, mode="accumulated"), res
