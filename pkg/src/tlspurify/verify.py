"""Self-check suite: oracle equivalences, conserved quantities, closed forms.

Every check measures a residual and holds it to a stated tolerance; checks
that integrate also report accepted/rejected step counts.  ``run_suite``
accepts an override for the reduced-system right-hand side so a deliberately
broken generator can be shown to trip the equivalence check (negative
control for the suite itself).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .integrator import StepStats, integrate
from .liouville import rwa_generator, simulate
from .model import (InitialStateSpec, ModelParams, build_initial_state,
                    min_eigenvalue, mu_max, xi_max)
from .optimal import (delta_p, initial_spherical, s2_resonant_solution,
                      t_min_analytic, t_min_numeric, uncorrelated_pole_purity)
from .reduced import make_rhs_rct, make_rhs_z, x_to_z

__all__ = ["CheckResult", "run_suite", "suite_passed"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    tol: float
    detail: str = ""
    n_steps: int = 0
    n_rejected: int = 0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "residual": self.residual,
            "tol": self.tol,
            "detail": self.detail,
            "n_steps": self.n_steps,
            "n_rejected": self.n_rejected,
        }


def _check(name: str, residual: float, tol: float, detail: str,
           stats: StepStats | None = None) -> CheckResult:
    res = CheckResult(name, bool(residual < tol), float(residual), tol, detail)
    if stats is not None:
        res.n_steps = stats.accepted
        res.n_rejected = stats.rejected
    return res


def suite_passed(checks: list[CheckResult]) -> bool:
    return all(c.passed for c in checks)


def run_suite(params: ModelParams | None = None, *, rtol: float = 1e-10,
              atol: float = 1e-10, z_rhs_override=None) -> list[CheckResult]:
    """Run every self-check and return the results in a fixed order.

    ``z_rhs_override``, when given, replaces the reduced-system right-hand
    side inside the full-vs-reduced equivalence check only; a corrupted
    override must make that check fail.
    """
    if params is None:
        params = ModelParams().with_gamma_over_j(2.0)
    checks: list[CheckResult] = []

    # -- generator is trace-free for any drive coefficients ------------
    worst = 0.0
    for j1, j2, al in [(params.J, 0.0, 0.0), (0.02, -0.05, 0.3),
                       (0.0, 0.0, 0.0), (-0.1, 0.07, -1.2)]:
        m = rwa_generator(params, j1, j2, al)
        worst = max(worst, float(np.abs(m[:4].sum(axis=0)).max()))
    checks.append(_check("generator-trace-free", worst, 1e-12,
                         "max column sum of the four diagonal rows"))

    # -- full 16-dim run mapped to z matches the reduced run ----------
    xi = xi_max(params)
    mu = 0.5 * mu_max(params, 0.5 * xi)
    spec = InitialStateSpec(mu_q=mu, xi_re=0.5 * xi)
    state = build_initial_state(params, spec)
    t_span = (0.0, 2.0 * params.t0)
    full = simulate(params, state, t_span, rtol=rtol, atol=atol, dense=True)
    z0 = x_to_z(state.x)
    z_rhs = z_rhs_override if z_rhs_override is not None else make_rhs_z(params)
    red = integrate(z_rhs, t_span, z0, rtol=rtol, atol=atol, dense=True)
    ts = np.linspace(t_span[0], t_span[1], 400)
    z_from_full = np.array([x_to_z(x) for x in full.trajectory(ts)])
    resid = float(np.abs(z_from_full - red.trajectory(ts)).max())
    stats = StepStats(full.stats.accepted + red.stats.accepted,
                      full.stats.rejected + red.stats.rejected,
                      full.stats.n_eval + red.stats.n_eval)
    checks.append(_check("full-vs-reduced", resid, 1e-8,
                         "max-abs z gap on [0, 2 T0], correlated start", stats))

    # -- trace preserved along the full run ---------------------------
    xs = full.trajectory(ts)
    drift = float(np.abs(xs[:, :4].sum(axis=1) - 1.0).max())
    checks.append(_check("trace-preservation", drift, 1e-9,
                         "max |trace - 1| along the same run", full.stats))

    # -- state stays positive along the full run ----------------------
    dip = 0.0
    for k in range(0, ts.size, 8):
        dip = min(dip, min_eigenvalue(xs[k]))
    checks.append(_check("positivity", -dip, 1e-8,
                         "most negative density eigenvalue seen"))

    # -- eta-line conservation for the uncorrelated start -------------
    plain = build_initial_state(params, InitialStateSpec())
    res0 = simulate(params, plain, t_span, rtol=rtol, atol=atol)
    zz = np.array([x_to_z(x) for x in res0.y])
    cc = -0.5 * (zz[:, 3] + 1.0)
    rr = np.hypot(zz[:, 0] - cc, zz[:, 1])
    resid = float(np.abs(rr + cc - params.eta).max())
    checks.append(_check("z-conservation", resid, 1e-9,
                         "max |r + c - eta| at xi = 0", res0.stats))

    # -- radius never grows under the drift flow ----------------------
    r0, c0, th0 = initial_spherical(params, xi)
    rct = integrate(make_rhs_rct(params), (0.0, 1.5 * t_min_analytic(params)),
                    np.array([r0, c0, th0]), rtol=rtol, atol=atol, dense=True)
    growth = float(max(0.0, rct.trajectory.fs[:, 0].max()))
    checks.append(_check("radius-monotone", growth, 1e-10,
                         "largest dr/dt at an accepted step", rct.stats))

    # -- coherence block closed form ----------------------------------
    worst = 0.0
    tot = StepStats(0, 0, 0)
    for ratio in (0.0, 2.0, 5.0):
        p = params.with_gamma_over_j(ratio)
        st = build_initial_state(p, InitialStateSpec(mu_q=0.3))
        zr = integrate(make_rhs_z(p), (0.0, 3.0 * p.t0), x_to_z(st.x),
                       rtol=rtol, atol=atol, dense=True)
        tt = np.linspace(0.0, 3.0 * p.t0, 300)
        exact = s2_resonant_solution(p, 0.3, tt)
        worst = max(worst, float(np.abs(zr.trajectory(tt)[:, 4] - exact).max()))
        tot = StepStats(tot.accepted + zr.stats.accepted,
                        tot.rejected + zr.stats.rejected,
                        tot.n_eval + zr.stats.n_eval)
    checks.append(_check("s2-closed-form", worst, 1e-8,
                         "max gap to the damped-oscillator solution", tot))

    # -- pole time closed form vs direct integration ------------------
    worst = 0.0
    tot = StepStats(0, 0, 0)
    for ratio in (1.0, 2.0, 3.5):
        p = params.with_gamma_over_j(ratio)
        exact = t_min_analytic(p)
        run = t_min_numeric(p, 0.0, rtol=rtol, atol=atol)
        worst = max(worst, abs(run.time - exact) / exact)
        tot = StepStats(tot.accepted + run.stats.accepted,
                        tot.rejected + run.stats.rejected,
                        tot.n_eval + run.stats.n_eval)
    checks.append(_check("pole-time-closed-form", worst, 1e-6,
                         "worst relative gap at gamma/J = 1, 2, 3.5", tot))

    # -- purity on pole arrival ---------------------------------------
    run = t_min_numeric(params, 0.0, rtol=rtol, atol=atol)
    resid = abs(run.purity - uncorrelated_pole_purity(params))
    checks.append(_check("pole-purity", resid, 1e-5,
                         "gap to the bath-polarization value", run.stats))

    # -- no coherence gain without correlation ------------------------
    dp = delta_p(params, 0.0, mu_max(params, 0.0), rtol=rtol, atol=atol)
    checks.append(_check("coherence-gain-uncorrelated", abs(dp.delta_p), 1e-6,
                         "|delta_p| at xi = 0, mu at its ceiling"))

    return checks
