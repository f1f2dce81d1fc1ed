"""Conventional topological indices used to validate the geometric criterion.

Winding number (1D chain)
    The Bloch matrix is off-diagonal with entries
        q+ = h_x + i h_y = (t + delta) + tp e^{ ik}
        q- = h_x - i h_y = (t - delta) + tp e^{-ik}
    (these amplitudes reproduce the band dispersion E^2 = q+ q-).  The
    winding number is w = (w1 - w2)/2 with w1, w2 the integer windings of
    arg q+ and arg q-; it takes the values 0, 1/2, 1 across the four
    transition lines t = +-delta +- tp and reduces to the usual Hermitian
    winding at delta = 0.

Vorticity
    nu = (1/2pi) x (total change of arg E_+ along a closed k loop), which
    equals half the winding of arg(E^2) = arg(epsilon + i omega).  Working
    with epsilon + i omega avoids square-root branch bookkeeping.

Chern number (2D lattice)
    C_pm = -+ (1/4pi) int h^ . (d_kx h^ x d_ky h^) d^2k with the complex
    unit vector h^ = h / sqrt(h . h).  The square root is continued over
    the BZ grid (row-wise unwrap of arg(epsilon + i omega)); a branch that
    cannot be continued consistently signals a gapless spectrum or an
    insufficient grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ExceptionalPointError, GaplessError
from .models import (ChernParams, SshParams, chern_epsilon_omega, chern_h,
                     get_model, ssh_epsilon_omega)


@dataclass
class WindingResult:
    value: float
    phase_trace: np.ndarray
    residual: float


@dataclass
class VorticityResult:
    value: float
    loop: np.ndarray


@dataclass
class ChernResult:
    value: complex
    plaquette_sum_residual: float


def _half_integer_residual(x: float) -> float:
    return abs(x - round(2.0 * x) / 2.0)


def _check_no_ep(eps, om, where):
    r2 = eps * eps + om * om
    scale = max(float(np.max(r2)), 1e-300)
    idx = int(np.argmin(r2))
    if r2.flat[idx] < 1e-20 * scale:
        k_bad = where.flat[idx] if hasattr(where, "flat") else where[idx]
        raise ExceptionalPointError(
            f"exceptional point on the sampled grid near k = {k_bad}", k=k_bad)


# ---------------------------------------------------------------------------
# 1D chain
# ---------------------------------------------------------------------------

def winding_number(p: SshParams, n: int = 4096) -> WindingResult:
    """Winding number of the chain from the chiral amplitudes q+-."""
    k = np.linspace(-np.pi, np.pi, n)
    eps, om = ssh_epsilon_omega(k, p)
    _check_no_ep(eps, om, k)
    qp = (p.t + p.delta) + p.tp * np.exp(1j * k)
    qm = (p.t - p.delta) + p.tp * np.exp(-1j * k)
    a1 = np.unwrap(np.angle(qp))
    a2 = np.unwrap(np.angle(qm))
    w1 = (a1[-1] - a1[0]) / (2.0 * np.pi)
    w2 = (a2[-1] - a2[0]) / (2.0 * np.pi)
    value = 0.5 * (w1 - w2)
    return WindingResult(value=value, phase_trace=0.5 * (a1 - a2),
                         residual=_half_integer_residual(value))


def vorticity_1d(p: SshParams, n: int = 4096) -> VorticityResult:
    """Vorticity of the + band over the BZ loop."""
    k = np.linspace(-np.pi, np.pi, n)
    eps, om = ssh_epsilon_omega(k, p)
    _check_no_ep(eps, om, k)
    a = np.unwrap(np.arctan2(om, eps))
    return VorticityResult(value=(a[-1] - a[0]) / (4.0 * np.pi), loop=k)


# ---------------------------------------------------------------------------
# 2D lattice
# ---------------------------------------------------------------------------

def vorticity_2d(p: ChernParams, loop) -> VorticityResult:
    """Winding of arg(E_+ - E_-) around a closed k-space loop / 2 pi.

    loop is an (N, 2) array of (kx, ky) points; it is closed automatically
    if the first and last points differ.  Loops passing through (or
    sampled too coarsely around) an exceptional point raise.
    """
    pts = np.asarray(loop, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 4:
        raise ValueError("loop must be an (N, 2) array with N >= 4")
    if not np.allclose(pts[0], pts[-1]):
        pts = np.vstack([pts, pts[0]])
    eps, om = chern_epsilon_omega(pts[:, 0], pts[:, 1], p)
    _check_no_ep(eps, om, pts)
    raw = np.arctan2(om, eps)
    a = np.unwrap(raw)
    steps = np.abs(np.diff(a))
    if steps.size and float(np.max(steps)) > 0.5 * np.pi:
        raise ExceptionalPointError(
            "loop sampling too coarse near a gap closing: "
            "refine the loop or move it away from exceptional points")
    return VorticityResult(value=(a[-1] - a[0]) / (4.0 * np.pi), loop=pts)


def _continued_sqrt(eps, om):
    """sqrt(epsilon + i omega) continued smoothly over a periodic grid.

    Rows are unwrapped along kx after unwrapping the first column along
    ky.  Returns the complex field; raises GaplessError if the branch has
    an obstruction (odd winding over a BZ cycle) and ExceptionalPointError
    if any neighbor step is too large to trust the continuation.
    """
    a = np.arctan2(om, eps)
    a = np.unwrap(a, axis=0)
    a = np.unwrap(a, axis=1)
    # torus consistency: the lift must return to itself (mod 4pi would
    # flip the band) across both periodic directions
    for axis in (0, 1):
        delta = np.take(a, 0, axis=axis) - np.take(a, -1, axis=axis)
        wrap_err = np.abs(np.mod(delta + np.pi, 2.0 * np.pi) - np.pi)
        winding = np.round(delta / (2.0 * np.pi))
        if np.any(np.abs(winding) > 0.5) or np.any(wrap_err > 0.5 * np.pi):
            raise GaplessError(
                "square-root branch cannot be continued over the BZ: "
                "the spectrum is gapless or the grid is too coarse")
    return np.power(eps * eps + om * om, 0.25) * np.exp(0.5j * a)


def chern_number(p: ChernParams, n: int = 256, band: str = "+") -> ChernResult:
    """Chern number of one band via the normalized-h triple product.

    Central differences of h^ on an n x n periodic grid, node sum over
    the BZ.  Requires gapped parameters; raises GaplessError otherwise.
    """
    if band not in ("+", "-"):
        raise ValueError(f"band must be '+' or '-', got {band!r}")
    if reference_phase(p, "chern") != "gapped":
        raise GaplessError(
            f"chern_number requires gapped parameters; {p} is not gapped")
    k = np.linspace(-np.pi, np.pi, n, endpoint=False)
    kx, ky = np.meshgrid(k, k, indexing="ij")
    eps, om = chern_epsilon_omega(kx, ky, p)
    _check_no_ep(eps, om, kx + 1j * ky)
    root = _continued_sqrt(eps, om)
    hx, hy, hz = chern_h(kx, ky, p)
    h = np.stack([hx + 0j, hy, hz + 0j], axis=-1) / root[..., None]

    dk = 2.0 * np.pi / n
    dx = (np.roll(h, -1, axis=0) - np.roll(h, 1, axis=0)) / (2.0 * dk)
    dy = (np.roll(h, -1, axis=1) - np.roll(h, 1, axis=1)) / (2.0 * dk)
    triple = np.einsum("...i,...i->...", h, np.cross(dx, dy))
    sign = -1.0 if band == "+" else 1.0
    c = sign * 0.5 * triple.sum() * dk * dk / (2.0 * np.pi)
    return ChernResult(value=complex(c),
                       plaquette_sum_residual=abs(c.real - round(c.real)))


# ---------------------------------------------------------------------------
# analytic reference phases
# ---------------------------------------------------------------------------

def _between(x, a, b, tol):
    lo, hi = (a, b) if a <= b else (b, a)
    return lo - tol <= x <= hi + tol


def reference_phase(p, model_id: str) -> str:
    """Analytic phase label for a parameter point.

    ssh   -> one of {"winding-1", "winding-1/2", "winding-0", "boundary"},
             decided by which side of the four lines t = +-delta +- tp the
             point falls.
    chern -> one of {"gapped", "gapless-kx0", "gapless-kxpi",
             "gapless-both", "boundary"}; the two gapless families are the
             exceptional-point windows gamma^2 in [m^2, (m + 2t)^2] and
             gamma^2 in [m^2, (m - 2t)^2].
    """
    model = get_model(model_id)
    tol = 1e-12
    if model.dim == 1:
        gaps = [p.t - p.delta - p.tp, p.t + p.delta - p.tp,
                p.t - p.delta + p.tp, p.t + p.delta + p.tp]
        if min(abs(g) for g in gaps) < tol:
            return "boundary"
        inside = int(abs(p.t + p.delta) < abs(p.tp)) \
            + int(abs(p.t - p.delta) < abs(p.tp))
        return {2: "winding-1", 1: "winding-1/2", 0: "winding-0"}[inside]

    g2 = p.gamma**2
    ends = [p.m**2, (p.m + 2.0 * p.t) ** 2, (p.m - 2.0 * p.t) ** 2]
    if min(abs(g2 - e) for e in ends) < tol:
        return "boundary"
    fam0 = _between(g2, p.m**2, (p.m + 2.0 * p.t) ** 2, tol)
    fampi = _between(g2, p.m**2, (p.m - 2.0 * p.t) ** 2, tol)
    if fam0 and fampi:
        return "gapless-both"
    if fam0:
        return "gapless-kx0"
    if fampi:
        return "gapless-kxpi"
    return "gapped"
