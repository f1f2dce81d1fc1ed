"""BZ -> complex-energy-plane transformation matrix and its determinant.

The + band maps (kx, ky) to (E_R, sigma E_I).  Differentiating
E_R^2 - (sigma E_I)^2 = epsilon and 2 E_R (sigma E_I) = omega gives 2x2
linear systems whose closed-form solution yields the transformation
matrix J = d(E_R, sigma E_I)/d(kx, ky) and, at t = 1,

    det J = gamma (m + cos ky) sin kx cos ky / E^2,   E^2 = sqrt(eps^2+om^2).

Note on sign: with omega = -2 t gamma sin ky and the sigma-signed
imaginary part used throughout this package, the prefactor is +gamma.
Conventions that sign the imaginary part the opposite way flip the
overall sign; the zero locus and |det| are convention-independent.

Zero-determinant momenta mark folds of the map; their images trace the
boundary of the bulk-band region in the complex energy plane, which
boundary_correspondence quantifies against the extracted boundary loops.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary2d import boundary_length
from .errors import ExceptionalPointError
from .models import ChernParams, band_arrays, chern_epsilon_omega

_EP_GUARD = 1e-10


@dataclass
class JacobianSample:
    """2x2 matrix d(E_R, sigma E_I)/d(kx, ky) at one k-point."""

    matrix: np.ndarray
    det: float
    k: tuple


@dataclass
class ZeroLocus:
    """Grid momenta with |det J| below tolerance and their band images."""

    points: np.ndarray      # (N, 2) kx, ky
    tolerance: float
    images: np.ndarray      # (N, 2) E_R, sigma E_I of the + band
    dets: np.ndarray


@dataclass
class CorrespondenceResult:
    """Fraction of zero-locus images lying within r of a boundary loop."""

    fraction: float
    n_locus: int
    r: float
    applicable: bool = True


def _derivative_fields(p: ChernParams, kx, ky):
    """d(E_R)/dk and d(sigma E_I)/dk from the solved linear systems."""
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    eps, om = chern_epsilon_omega(kx, ky, p)
    e2 = np.hypot(eps, om)          # = E_R^2 + E_I^2
    eR, eI, sig = band_arrays(eps, om)
    eIs = sig * eI
    # half-derivatives of (epsilon, omega)
    ex = -p.t * np.sin(kx) * (p.t * np.cos(ky) + p.m)
    ey = -p.t * np.sin(ky) * (p.t * np.cos(kx) + p.m)
    wy = -p.t * p.gamma * np.cos(ky)
    with np.errstate(divide="ignore", invalid="ignore"):
        drx = (eR * ex) / e2
        dix = (-eIs * ex) / e2
        dry = (eR * ey + eIs * wy) / e2
        diy = (-eIs * ey + eR * wy) / e2
    return (drx, dry, dix, diy), e2, (eR, eIs)


def jacobian_at(p: ChernParams, kx: float, ky: float) -> JacobianSample:
    """Transformation matrix at one momentum; raises at exceptional points."""
    (drx, dry, dix, diy), e2, _ = _derivative_fields(p, kx, ky)
    if float(e2) < _EP_GUARD:
        raise ExceptionalPointError(
            f"jacobian is singular at the exceptional point k = ({kx}, {ky})",
            k=(kx, ky))
    m = np.array([[float(drx), float(dry)], [float(dix), float(diy)]])
    return JacobianSample(matrix=m, det=float(np.linalg.det(m)), k=(kx, ky))


def jacobian_det_closed(p: ChernParams, kx, ky):
    """Closed-form det J at t = 1 (vectorized over kx, ky).

    The closed form is derived only for t = 1; other hoppings must use
    the numeric determinant of jacobian_at.
    """
    if p.t != 1.0:
        raise ValueError(
            "closed-form determinant is only available at t = 1; "
            "use jacobian_at for general hopping")
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    eps, om = chern_epsilon_omega(kx, ky, p)
    e2 = np.hypot(eps, om)
    if np.any(e2 < _EP_GUARD):
        raise ExceptionalPointError("closed-form determinant hit an exceptional point")
    return p.gamma * (p.m + np.cos(ky)) * np.sin(kx) * np.cos(ky) / e2


def zero_locus(p: ChernParams, n: int = 256, tol: float | None = None) -> ZeroLocus:
    """Scan the n x n BZ grid for |det J| below tolerance.

    Default tolerance is 1e-3 x median |det| over the grid, which makes
    the locus resolution-independent.
    """
    if n < 128:
        raise ValueError(f"grid size must be >= 128, got {n}")
    k = np.linspace(-np.pi, np.pi, n, endpoint=False)
    kx, ky = np.meshgrid(k, k, indexing="ij")
    (drx, dry, dix, diy), e2, (eR, eIs) = _derivative_fields(p, kx, ky)
    det = drx * diy - dry * dix
    ok = np.isfinite(det) & (e2 >= _EP_GUARD)
    if tol is None:
        tol = 1e-3 * float(np.median(np.abs(det[ok])))
    mask = ok & (np.abs(det) < tol)
    pts = np.column_stack([kx[mask], ky[mask]])
    images = np.column_stack([eR[mask], eIs[mask]])
    return ZeroLocus(points=pts, tolerance=tol, images=images, dets=det[mask])


def _min_dist_to_loops(queries: np.ndarray, loops) -> np.ndarray:
    """Distance from each query point to the nearest loop segment."""
    best = np.full(queries.shape[0], np.inf)
    for loop in loops:
        v = np.asarray(loop.vertices)
        a, b = v[:-1], v[1:]
        ab = b - a
        denom = np.maximum((ab * ab).sum(axis=1), 1e-300)
        for i in range(0, queries.shape[0], 1024):
            q = queries[i:i + 1024]
            t = ((q[:, None, :] - a[None, :, :]) * ab[None, :, :]).sum(-1) / denom
            t = np.clip(t, 0.0, 1.0)
            closest = a[None, :, :] + t[..., None] * ab[None, :, :]
            d = np.linalg.norm(q[:, None, :] - closest, axis=-1).min(axis=1)
            best[i:i + 1024] = np.minimum(best[i:i + 1024], d)
    return best


def boundary_correspondence(p: ChernParams, n: int = 256,
                            r: float | None = None) -> CorrespondenceResult:
    """Fraction of zero-locus images within one pivot radius of the
    extracted bulk-band boundary.

    Not applicable for degenerate (1D-collapsed) clouds.
    """
    result = boundary_length(p, n=n, r=r)
    if result.degenerate_1d:
        return CorrespondenceResult(fraction=float("nan"), n_locus=0,
                                    r=result.r_used, applicable=False)
    locus = zero_locus(p, n=n)
    if locus.points.shape[0] == 0:
        return CorrespondenceResult(fraction=float("nan"), n_locus=0,
                                    r=result.r_used, applicable=False)
    d = _min_dist_to_loops(locus.images, result.loops)
    frac = float(np.mean(d <= result.r_used))
    return CorrespondenceResult(fraction=frac, n_locus=locus.points.shape[0],
                                r=result.r_used)
