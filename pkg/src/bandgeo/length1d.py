"""Length of the 1D band curve in the complex energy plane.

The + band traces a curve k -> E_R(k) + i sigma(k) E_I(k) over the BZ.
Its arc length is computed three ways, all of which must agree:

    direct       sqrt((dE_R/dk)^2 + (dE_I/dk)^2) with the derivatives
                 obtained by solving the 2x2 linear system that follows
                 from d/dk of E_R^2 - E_I^2 = epsilon and E_R E_I = omega/2
    closed form  |tp| * sqrt(t^2 sin^2 k + delta^2 cos^2 k) / E,
                 E = (epsilon^2 + omega^2)^(1/4)
    polar        sqrt((d|E|/dk)^2 + |E|^2 (dphi/dk)^2) with |E| and the
                 continuous phase phi = arg(E) differentiated analytically

The integrand has an integrable 1/sqrt singularity wherever the complex
gap closes; panels adjacent to such a point are refined dyadically toward
it and integrated with open Gauss-Legendre rules.  Panel sums use
math.fsum, so results do not depend on summation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .models import SshParams, band_arrays, ssh_ep_momenta, ssh_epsilon_omega

_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)
_DYADIC_LEVELS = 48


@dataclass
class CurveLengthResult:
    """Converged curve length with an a-posteriori error estimate."""

    length: float
    n_panels: int
    est_error: float
    ep_crossings: list = field(default_factory=list)


@dataclass
class PolarTrace:
    """|E|(k) and the continuous phase of the + band on a uniform grid."""

    k: np.ndarray
    magnitude: np.ndarray
    phase: np.ndarray
    ep_indices: list = field(default_factory=list)


@dataclass
class LengthDerivative:
    """Finite-difference d(length)/d(parameter).

    value is NaN and at_boundary is True when [param-h, param+h] straddles
    a phase boundary, where the derivative diverges rather than converges.
    """

    value: float
    which: str
    h: float
    at_boundary: bool = False


@dataclass
class WindingLengthEstimate:
    """Diagnostic comparison of the length against its polar/winding
    approximation 2 pi w <|E| + (d|E|/dphi)^2 / (2|E|)>.

    No tolerance contract: the approximation assumes the magnitude factor
    is weakly k-dependent and dphi/dk != 0, both of which fail in simple
    limits (see the tests for recorded caveats).
    """

    estimate: float
    actual: float
    ratio: float
    applicable: bool
    note: str = ""


# ---------------------------------------------------------------------------
# quadrature engine
# ---------------------------------------------------------------------------

def _gl_fixed(f, a, b, n):
    """Composite n-panel 10-point Gauss-Legendre on [a, b]."""
    edges = np.linspace(a, b, n + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (b - a) / n
    x = mid[:, None] + half * _GL_X[None, :]
    v = f(x.ravel()).reshape(n, _GL_X.size)
    return float(math.fsum((v @ _GL_W) * half))


def _adaptive(f, a, b, n0, tol):
    """Refine panel count until successive estimates agree to tol."""
    n = max(4, n0)
    prev = _gl_fixed(f, a, b, n)
    cur, err = prev, math.inf
    for _ in range(14):
        n *= 2
        cur = _gl_fixed(f, a, b, n)
        err = abs(cur - prev)
        if err <= tol * (1.0 + abs(cur)):
            break
        prev = cur
    return cur, err, n


def _dyadic(f, a, b, sing_at, panels=2):
    """Integrate [a, b] with an integrable singularity at one endpoint.

    Pieces shrink geometrically toward the singular end; every piece is
    integrated with open Gauss-Legendre nodes, so f is never evaluated at
    the singularity itself.
    """
    w = b - a
    parts = []
    far = 1.0
    for j in range(_DYADIC_LEVELS):
        near = 0.5 ** (j + 1)
        if sing_at == a:
            parts.append(_gl_fixed(f, a + near * w, a + far * w, panels))
        else:
            parts.append(_gl_fixed(f, b - far * w, b - near * w, panels))
        far = near
    if sing_at == a:
        parts.append(_gl_fixed(f, a, a + far * w, 1))
    else:
        parts.append(_gl_fixed(f, b - far * w, b, 1))
    return math.fsum(parts)


def _integrate_bz(f, p: SshParams, n: int, tol: float):
    """Integrate f over [-pi, pi], splitting at non-smooth points.

    The sqrt factor of the integrand has corners at k in {0, +-pi} (when
    delta = 0) and {+-pi/2} (when t = 0); gap closings from the model's
    analytic EP scan get dedicated singular treatment.
    """
    eps = ssh_ep_momenta(p)
    splits = sorted({-np.pi, -np.pi / 2, 0.0, np.pi / 2, np.pi}
                    | {float(k) for k in eps})
    ep_set = {round(k, 12) for k in eps}

    total_parts, err_parts, panels = [], [], 0
    n_sub = max(8, n // max(len(splits) - 1, 1))
    for a, b in zip(splits[:-1], splits[1:]):
        a_ep = round(a, 12) in ep_set
        b_ep = round(b, 12) in ep_set
        if a_ep and b_ep:
            m = 0.5 * (a + b)
            lo = _dyadic(f, a, m, sing_at=a)
            hi = _dyadic(f, m, b, sing_at=b)
            ref = _dyadic(f, a, m, sing_at=a, panels=4) \
                + _dyadic(f, m, b, sing_at=b, panels=4)
            total_parts.append(ref)
            err_parts.append(abs(ref - lo - hi))
            panels += 4 * (_DYADIC_LEVELS + 1)
        elif a_ep or b_ep:
            sing = a if a_ep else b
            val = _dyadic(f, a, b, sing_at=sing)
            ref = _dyadic(f, a, b, sing_at=sing, panels=4)
            total_parts.append(ref)
            err_parts.append(abs(ref - val))
            panels += 2 * (_DYADIC_LEVELS + 1)
        else:
            val, err, used = _adaptive(f, a, b, n_sub, tol)
            total_parts.append(val)
            err_parts.append(err)
            panels += used
    return math.fsum(total_parts), math.fsum(err_parts), panels, sorted(eps)


# ---------------------------------------------------------------------------
# integrands
# ---------------------------------------------------------------------------

def _closed_integrand(p: SshParams):
    def f(k):
        eps, om = ssh_epsilon_omega(k, p)
        r2 = eps * eps + om * om
        g = abs(p.tp) * np.hypot(p.t * np.sin(k), p.delta * np.cos(k))
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(r2 > 0, g / np.power(r2, 0.25), 0.0)
        return out
    return f


def _direct_integrand(p: SshParams):
    def f(k):
        eps, om = ssh_epsilon_omega(k, p)
        eR, eI, sig = band_arrays(eps, om)
        eIs = sig * eI
        ok = (eR + eI) > 0
        A = np.zeros(k.shape + (2, 2))
        A[..., 0, 0] = np.where(ok, eR, 1.0)
        A[..., 0, 1] = -eIs
        A[..., 1, 0] = eIs
        A[..., 1, 1] = np.where(ok, eR, 1.0)
        rhs = np.stack([np.where(ok, -p.t * p.tp * np.sin(k), 0.0),
                        np.where(ok, p.tp * p.delta * np.cos(k), 0.0)], axis=-1)
        d = np.linalg.solve(A, rhs[..., None])[..., 0]
        return np.hypot(d[..., 0], d[..., 1])
    return f


def _polar_integrand(p: SshParams):
    def f(k):
        eps, om = ssh_epsilon_omega(k, p)
        deps = -2.0 * p.tp * p.t * np.sin(k)
        dom = 2.0 * p.tp * p.delta * np.cos(k)
        r2 = eps * eps + om * om
        with np.errstate(divide="ignore", invalid="ignore"):
            mag = np.power(r2, 0.25)
            dmag = (eps * deps + om * dom) / (2.0 * np.power(r2, 0.75))
            dphi = (eps * dom - om * deps) / (2.0 * r2)
            out = np.hypot(dmag, mag * dphi)
        return np.where(r2 > 0, out, 0.0)
    return f


def _length(p, n, tol, integrand) -> CurveLengthResult:
    if n < 64:
        raise ValueError(f"panel count must be >= 64, got {n}")
    if p.tp == 0.0:
        # image is a single point: zero-length curve
        return CurveLengthResult(0.0, 0, 0.0, ssh_ep_momenta(p))
    val, err, panels, eps = _integrate_bz(integrand(p), p, n, tol)
    return CurveLengthResult(val, panels, err, eps)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def length_direct(p: SshParams, n: int = 512, tol: float = 1e-10) -> CurveLengthResult:
    """Arc length via numerically solved band-derivative systems."""
    return _length(p, n, tol, _direct_integrand)


def length_closed_form(p: SshParams, n: int = 512, tol: float = 1e-10) -> CurveLengthResult:
    """Arc length via the closed-form integrand |tp| sqrt(t^2 sin^2 k
    + delta^2 cos^2 k) / E."""
    return _length(p, n, tol, _closed_integrand)


def length_polar(p: SshParams, n: int = 512, tol: float = 1e-10) -> CurveLengthResult:
    """Arc length in polar form, from analytic d|E|/dk and dphi/dk."""
    return _length(p, n, tol, _polar_integrand)


def polar_trace(p: SshParams, n: int = 512) -> PolarTrace:
    """|E|(k) and unwrapped phase on an n-point grid over [-pi, pi].

    The phase is the continuous lift of arg(E) = arg(epsilon + i omega)/2,
    so its total change over the BZ equals 2 pi times the band vorticity.
    Nodes sitting on a closed gap are flagged and their phase is bridged
    linearly from the neighbors.
    """
    if n < 256:
        raise ValueError(f"grid size must be >= 256, got {n}")
    k = np.linspace(-np.pi, np.pi, n)
    eps, om = ssh_epsilon_omega(k, p)
    r2 = eps * eps + om * om
    mag = np.power(r2, 0.25)
    scale = max(float(np.max(r2)), 1e-300)
    bad = r2 < 1e-24 * scale
    phase = 0.5 * np.unwrap(np.arctan2(om, eps))
    if bad.any() and not bad.all():
        good = ~bad
        phase = phase.copy()
        phase[bad] = np.interp(k[bad], k[good], phase[good])
    return PolarTrace(k=k, magnitude=mag, phase=phase,
                      ep_indices=list(np.nonzero(bad)[0]))


def _boundary_line_values(t: float, delta: float, tp: float):
    """Signed distances to the four transition lines t = +-delta +- tp."""
    return np.array([t - delta - tp, t + delta - tp,
                     t - delta + tp, t + delta + tp])


def length_param_derivative(p: SshParams, which: str, h: float = 1e-4) -> LengthDerivative:
    """Richardson-extrapolated central difference of the closed-form length.

    The printed closed-form derivative integrands in the source material
    are dimensionally inconsistent; the finite difference of the length is
    the reference derivative here.
    """
    if which not in ("t", "delta"):
        raise ValueError(f"which must be 't' or 'delta', got {which!r}")
    if not 0 < h <= 1e-2:
        raise ValueError(f"step must be in (0, 1e-2], got {h!r}")

    def shifted(dh):
        if which == "t":
            return SshParams(p.t + dh, p.tp, p.delta)
        return SshParams(p.t, p.tp, p.delta + dh)

    lo, hi = shifted(-h), shifted(h)
    g_lo = _boundary_line_values(lo.t, lo.delta, p.tp)
    g_hi = _boundary_line_values(hi.t, hi.delta, p.tp)
    if np.any(g_lo * g_hi <= 0):
        return LengthDerivative(value=math.nan, which=which, h=h, at_boundary=True)

    def central(step):
        a = length_closed_form(shifted(-step), tol=1e-12).length
        b = length_closed_form(shifted(step), tol=1e-12).length
        return (b - a) / (2.0 * step)

    d1 = central(h)
    d2 = central(h / 2.0)
    return LengthDerivative(value=(4.0 * d2 - d1) / 3.0, which=which, h=h)


def winding_length_estimate(p: SshParams, n: int = 4096) -> WindingLengthEstimate:
    """Report 2 pi w <|E| + (d|E|/dphi)^2 / (2|E|)> next to the true length.

    Returns applicable=False (estimate 0) in zero-winding regions.  Where
    dphi/dk vanishes (e.g. the Hermitian limit) the magnitude-derivative
    term is undefined and is dropped, which is noted in the result.
    """
    from .invariants import winding_number

    w = winding_number(p, n).value
    actual = length_closed_form(p).length
    if abs(w) < 0.25:
        return WindingLengthEstimate(0.0, actual, 0.0, applicable=False,
                                     note="zero winding: estimate not applicable")

    k = np.linspace(-np.pi, np.pi, n, endpoint=False)
    eps, om = ssh_epsilon_omega(k, p)
    deps = -2.0 * p.tp * p.t * np.sin(k)
    dom = 2.0 * p.tp * p.delta * np.cos(k)
    r2 = eps * eps + om * om
    mag = np.power(r2, 0.25)
    dmag = (eps * deps + om * dom) / (2.0 * np.power(r2, 0.75))
    dphi = (eps * dom - om * deps) / (2.0 * r2)
    note = ""
    flat = np.abs(dphi) < 1e-12
    with np.errstate(divide="ignore", invalid="ignore"):
        de_dphi = np.where(flat, 0.0, dmag / np.where(flat, 1.0, dphi))
    if flat.any() and np.max(np.abs(dmag)) > 1e-12:
        note = "dphi/dk ~ 0 on part of the grid: magnitude term dropped there"
    estimate = float(2.0 * np.pi * abs(w)
                     * np.mean(mag + de_dphi**2 / (2.0 * mag)))
    ratio = estimate / actual if actual > 0 else math.inf
    return WindingLengthEstimate(estimate, actual, ratio, applicable=True, note=note)
