"""Closed 8-coordinate reduction of the flow, and its spherical picture.

The qubit purity only involves eight linear combinations of the sixteen
coordinates, and the flow closes on them (0-based slots, with x also
0-based as in model.py):

    z[0] = x[0] + x[1] - 1/2          qubit polarization
    z[1] = x[11]                      Re xi  (cross coherence)
    z[2] = x[10]                      -Im xi
    z[3] = -2 x[0] - x[1] - x[2]      population bookkeeping
    z[4] = x[6] + x[12]               Re qubit coherence
    z[5] = x[5] - x[15]
    z[6] = x[7] + x[13]               Im qubit coherence
    z[7] = x[4] - x[14]

Qubit purity = 1/2 + 2 (z[0]^2 + z[4]^2 + z[6]^2).  The first four
coordinates (block S1) and last four (block S2) evolve independently of
each other.

The spherical picture sits on S1: with  c = -(z[3]+1)/2  and

    z[0] - c = r sin(theta),   z[1] = r cos(theta) sin(phi),
    z[2] = r cos(theta) cos(phi),

the controlled dynamics read (u = drive phase minus azimuth phi)

    dr/dt     = -(gamma/2) (r + (eta - c) sin(theta))
    dc/dt     =  (gamma/2) (r sin(theta) + (eta - c))
    dtheta/dt = -(gamma/2) ((eta - c)/r) cos(theta) + 2 J cos(u)
    dphi/dt   =  2 alpha - J tan(theta) sin(u)

with theta in [-pi/2, pi/2] (cos(theta) >= 0 by construction) and phi set
to 0 within POLE_GUARD of the poles, where the azimuth degenerates.
Purity grows with z[0]^2 alone in S1, so driving theta to +pi/2 (all of r
into the polarization, "north pole") is the purification target.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .drive import ConstantDrive, Drive, resonant
from .integrator import EventSpec, IvpResult, integrate
from .model import ModelParams

#: angular distance from the poles below which phi is meaningless
POLE_GUARD = 1e-6


# ====================================================================
# x -> z projection and purity
# ====================================================================

def x_to_z(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.array([
        x[0] + x[1] - 0.5,
        x[11],
        x[10],
        -2.0 * x[0] - x[1] - x[2],
        x[6] + x[12],
        x[5] - x[15],
        x[7] + x[13],
        x[4] - x[14],
    ])


def z_purity(z: np.ndarray) -> float:
    return float(0.5 + 2.0 * (z[0] ** 2 + z[4] ** 2 + z[6] ** 2))


def z_purity_many(z: np.ndarray) -> np.ndarray:
    """Purity along a trajectory, z shaped (n, 8)."""
    return 0.5 + 2.0 * (z[:, 0] ** 2 + z[:, 4] ** 2 + z[:, 6] ** 2)


# ====================================================================
# Static fields of the reduced flow:  dz/dt = M z + b
# ====================================================================

def _mat8(entries: dict[tuple[int, int], float]) -> np.ndarray:
    m = np.zeros((8, 8))
    for (i, j), v in entries.items():
        m[i, j] = v
    return m


#: shared linear part of both dissipator halves
_Z_DISS = _mat8({
    (1, 1): -0.5, (2, 2): -0.5,
    (3, 0): -1.0, (3, 3): -1.0,
    (5, 5): -0.5, (7, 7): -0.5,
})
_Z_DISS_B1 = np.array([0.0, 0.0, 0.0, -1.5, 0.0, 0.0, 0.0, 0.0])  # emission
_Z_DISS_B2 = np.array([0.0, 0.0, 0.0, -0.5, 0.0, 0.0, 0.0, 0.0])  # absorption

_Z_J1 = _mat8({
    (0, 1): 2.0,
    (1, 0): -2.0, (1, 3): -1.0,
    (4, 5): 1.0, (5, 4): -1.0,
    (6, 7): -1.0, (7, 6): 1.0,
})
_Z_J1_B = np.array([0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])

_Z_J2 = _mat8({
    (0, 2): 2.0,
    (2, 0): -2.0, (2, 3): -1.0,
    (4, 7): -1.0, (5, 6): 1.0,
    (6, 5): -1.0, (7, 4): 1.0,
})
_Z_J2_B = np.array([0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0])

_Z_FRAME = _mat8({
    (1, 2): -2.0, (2, 1): 2.0,
    (4, 6): 2.0, (6, 4): -2.0,
})


def z_generator(params: ModelParams, j1: float, j2: float,
                alpha: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """(M, b) of the affine reduced flow at fixed coefficients."""
    r = params.rates
    m = (r.gamma * _Z_DISS + j1 * _Z_J1 + j2 * _Z_J2 + alpha * _Z_FRAME)
    b = (r.gamma1 * _Z_DISS_B1 + r.gamma2 * _Z_DISS_B2
         + j1 * _Z_J1_B + j2 * _Z_J2_B)
    return m, b


def make_rhs_z(params: ModelParams, drive: Drive | None = None):
    """Right-hand side of the reduced flow for the given drive."""
    if drive is None:
        drive = resonant()
    r = params.rates
    m_diss = r.gamma * _Z_DISS
    b_diss = r.gamma1 * _Z_DISS_B1 + r.gamma2 * _Z_DISS_B2
    J = params.J

    if isinstance(drive, ConstantDrive) and drive.detuning == 0.0:
        m_const = m_diss + J * _Z_J1
        b_const = b_diss + J * _Z_J1_B

        def rhs_const(t: float, z: np.ndarray) -> np.ndarray:
            return m_const @ z + b_const

        return rhs_const

    def rhs(t: float, z: np.ndarray) -> np.ndarray:
        ph = drive.phase(t)
        j1 = J * math.cos(ph)
        j2 = J * math.sin(ph)
        a = drive.alpha(t)
        m = m_diss + j1 * _Z_J1 + j2 * _Z_J2 + a * _Z_FRAME
        b = b_diss + j1 * _Z_J1_B + j2 * _Z_J2_B
        return m @ z + b

    return rhs


def simulate_z(
    params: ModelParams,
    z0: np.ndarray,
    t_span: tuple[float, float],
    drive: Drive | None = None,
    *,
    rtol: float = 1e-10,
    atol: float = 1e-10,
    events: tuple[EventSpec, ...] = (),
    dense: bool = False,
) -> IvpResult:
    rhs = make_rhs_z(params, drive)
    return integrate(rhs, t_span, z0, rtol=rtol, atol=atol,
                     events=events, dense=dense)


# ====================================================================
# Spherical picture on S1
# ====================================================================

def z_to_spherical(z: np.ndarray) -> tuple[float, float, float, float]:
    """(r, c, theta, phi) of the S1 block; phi = 0 at (or too near) a pole."""
    c = -0.5 * (z[3] + 1.0)
    w = z[0] - c
    r = math.sqrt(w * w + z[1] ** 2 + z[2] ** 2)
    if r == 0.0:
        return 0.0, float(c), 0.0, 0.0
    theta = math.asin(max(-1.0, min(1.0, w / r)))
    if abs(theta) >= 0.5 * math.pi - POLE_GUARD:
        phi = 0.0
    else:
        phi = math.atan2(z[1], z[2])
    return float(r), float(c), float(theta), float(phi)


def spherical_to_z_s1(r: float, c: float, theta: float,
                      phi: float = 0.0) -> np.ndarray:
    """S1 block (z[0..3]) from the spherical coordinates."""
    return np.array([
        c + r * math.sin(theta),
        r * math.cos(theta) * math.sin(phi),
        r * math.cos(theta) * math.cos(phi),
        -2.0 * c - 1.0,
    ])


def make_rhs_rct(params: ModelParams,
                 u: Callable[[float], float] | None = None):
    """(r, c, theta) dynamics under an azimuth-relative control u(t).

    u = None means u == 0 (drive phase locked to the azimuth), the policy
    used by every time-optimal result here.  phi is not propagated: the
    S1 observables r, c, theta are independent of it.
    """
    gam = params.rates.gamma
    eta = params.rates.eta
    J = params.J
    half = 0.5 * gam

    if u is None:
        def rhs0(t: float, y: np.ndarray) -> np.ndarray:
            r, c, th = y
            s, co = math.sin(th), math.cos(th)
            d = eta - c
            rr = r if r > 1e-300 else 1e-300
            return np.array([
                -half * (r + d * s),
                half * (r * s + d),
                -half * (d / rr) * co + 2.0 * J,
            ])

        return rhs0

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        r, c, th = y
        s, co = math.sin(th), math.cos(th)
        d = eta - c
        rr = r if r > 1e-300 else 1e-300
        return np.array([
            -half * (r + d * s),
            half * (r * s + d),
            -half * (d / rr) * co + 2.0 * J * math.cos(u(t)),
        ])

    return rhs


def make_rhs_rct_phi(params: ModelParams,
                     u: Callable[[float], float]):
    """(r, c, theta, phi) dynamics including the azimuth equation.

    Used with u(t) prescribed directly, which pairs with the accumulated
    phase convention (frame term alpha == 0).  The tan(theta) factor is
    clamped at the POLE_GUARD ring where the azimuth loses meaning.
    """
    rct = make_rhs_rct(params, u)
    J = params.J
    tan_cap = math.tan(0.5 * math.pi - POLE_GUARD)

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        drct = rct(t, y[:3])
        th = y[2]
        tt = math.tan(th) if abs(th) < 0.5 * math.pi - POLE_GUARD else \
            math.copysign(tan_cap, th)
        dphi = -J * tt * math.sin(u(t))
        return np.append(drct, dphi)

    return rhs
