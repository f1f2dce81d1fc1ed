"""Bloch h-vectors and complex band energies for the two lattice models.

Both models are two-band Dirac Hamiltonians H = h . sigma with a complex
h-vector.  Their squared band energy is a complex scalar

    E^2 = epsilon + i * omega,

and the bands are E_pm = pm (E_R + i sigma E_I) with

    E_R = sqrt((epsilon + sqrt(epsilon^2 + omega^2)) / 2)
    E_I = sqrt((-epsilon + sqrt(epsilon^2 + omega^2)) / 2)

where sigma = +1 for omega >= 0 and -1 for omega < 0.  epsilon and omega
are evaluated from closed forms, never by numerically squaring E, so that
points near a closing gap do not suffer cancellation.

Models
------
ssh    1D chain with intracell hopping t, intercell hopping tp and
       gain/loss delta:
           epsilon = tp^2 + t^2 - delta^2 + 2 tp t cos k
           omega   = 2 tp delta sin k
chern  2D lattice with hopping t > 0, mass m and non-Hermitian strength
       gamma (the literature uses gamma and delta interchangeably for
       this parameter; here they are the same number):
           epsilon = 2 t^2 + m^2 - gamma^2 + 2 t^2 cos kx cos ky
                     + 2 m t (cos kx + cos ky)
           omega   = -2 t gamma sin ky
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnknownModelError

EP_TOL = 1e-12  # |E|^4-scale tolerance used to flag exceptional points


# ---------------------------------------------------------------------------
# parameter containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SshParams:
    """Parameters of the 1D chain: intracell t, intercell tp, gain/loss delta."""

    t: float
    tp: float = 1.0
    delta: float = 0.0

    def __post_init__(self):
        for name in ("t", "tp", "delta"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"ssh parameter {name!r} must be finite, got {v!r}")


@dataclass(frozen=True)
class ChernParams:
    """Parameters of the 2D lattice: hopping t > 0, mass m, strength gamma."""

    t: float
    m: float
    gamma: float

    def __post_init__(self):
        for name in ("t", "m", "gamma"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"chern parameter {name!r} must be finite, got {v!r}")
        if self.t <= 0:
            raise ValueError(f"chern hopping t must be positive, got {self.t!r}")


@dataclass(frozen=True)
class HVector:
    """Complex h-vector of a Dirac Bloch Hamiltonian h . sigma."""

    hx: complex
    hy: complex
    hz: complex


@dataclass(frozen=True)
class BandSample:
    """One band evaluated at one BZ point.

    The complex band value is branch * (eR + 1j * sigma * eI); eR and eI
    are nonnegative, sigma is the sign of omega and branch labels the
    +/- band.  is_ep marks a closed complex gap (eR = eI = 0).
    """

    eR: float
    eI: float
    sigma: int
    branch: int
    is_ep: bool = False

    @property
    def value(self) -> complex:
        return self.branch * (self.eR + 1j * self.sigma * self.eI)


# ---------------------------------------------------------------------------
# h-vectors
# ---------------------------------------------------------------------------

def ssh_h(k: float, p: SshParams) -> HVector:
    """h-vector of the 1D chain at momentum k."""
    return HVector(
        hx=complex(p.t - p.delta + p.tp * np.cos(k)),
        hy=p.t + p.delta + 1j * p.tp * np.sin(k),
        hz=0j,
    )


def chern_h(kx, ky, p: ChernParams):
    """h-vector of the 2D lattice; accepts scalars or broadcastable arrays.

    Returns an HVector for scalar input, else a tuple of arrays (hx, hy, hz).
    """
    hx = p.t * np.sin(kx)
    hy = p.t * np.sin(ky) - 1j * p.gamma
    hz = p.m + p.t * np.cos(kx) + p.t * np.cos(ky)
    if np.isscalar(kx) and np.isscalar(ky):
        return HVector(hx=complex(hx), hy=complex(hy), hz=complex(hz))
    return hx, hy + np.zeros_like(hx) * 1j, hz


# ---------------------------------------------------------------------------
# epsilon / omega closed forms
# ---------------------------------------------------------------------------

def ssh_epsilon_omega(k, p: SshParams):
    """(epsilon, omega) of the chain; k may be a scalar or array."""
    k = np.asarray(k, dtype=float)
    eps = p.tp**2 + p.t**2 - p.delta**2 + 2.0 * p.tp * p.t * np.cos(k)
    om = 2.0 * p.tp * p.delta * np.sin(k)
    return eps, om


def chern_epsilon_omega(kx, ky, p: ChernParams):
    """(epsilon, omega) of the 2D lattice; kx, ky broadcastable arrays."""
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    eps = (2.0 * p.t**2 + p.m**2 - p.gamma**2
           + 2.0 * p.t**2 * np.cos(kx) * np.cos(ky)
           + 2.0 * p.m * p.t * (np.cos(kx) + np.cos(ky)))
    om = -2.0 * p.t * p.gamma * np.sin(ky)
    return eps, om


def epsilon_omega(model_id: str, k, params):
    """Dispatch (epsilon, omega) by model id.

    k is a momentum scalar/array for "ssh", or a (kx, ky) pair for "chern".
    """
    model = get_model(model_id)
    if model.dim == 1:
        return ssh_epsilon_omega(k, params)
    kx, ky = k
    return chern_epsilon_omega(kx, ky, params)


# ---------------------------------------------------------------------------
# band decomposition
# ---------------------------------------------------------------------------

def band_arrays(eps, om):
    """Vectorized (eR, eI, sigma) of the + band from (epsilon, omega).

    Uses the relation 2 eR eI = |omega| on the side where the direct
    square root would cancel, so both components stay accurate to full
    precision near either axis.
    """
    eps = np.asarray(eps, dtype=float)
    om = np.asarray(om, dtype=float)
    hyp = np.hypot(eps, om)
    eR = np.sqrt(np.maximum(eps + hyp, 0.0) / 2.0)
    eI = np.sqrt(np.maximum(hyp - eps, 0.0) / 2.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        eI = np.where(eps > 0, np.abs(om) / np.maximum(2.0 * eR, 1e-300), eI)
        eR = np.where(eps < 0, np.abs(om) / np.maximum(2.0 * eI, 1e-300), eR)
    sigma = np.where(om >= 0, 1, -1)
    return eR, eI, sigma


def band_sample(eps: float, om: float, branch: int = 1) -> BandSample:
    """Decompose one (epsilon, omega) point into a BandSample."""
    if branch not in (1, -1):
        raise ValueError(f"branch must be +1 or -1, got {branch!r}")
    eR, eI, sigma = band_arrays(eps, om)
    is_ep = float(np.hypot(eps, om)) < EP_TOL
    if is_ep:
        return BandSample(eR=0.0, eI=0.0, sigma=1, branch=branch, is_ep=True)
    return BandSample(eR=float(eR), eI=float(eI), sigma=int(sigma),
                      branch=branch, is_ep=False)


# ---------------------------------------------------------------------------
# exceptional points
# ---------------------------------------------------------------------------

def ssh_ep_momenta(p: SshParams, tol: float = 1e-9):
    """Momenta in [-pi, pi] where the chain's complex gap closes.

    omega vanishes only at sin k = 0 (or identically at delta = 0, where
    epsilon = |tp + t e^{ik}|^2 can still only vanish at k = 0 or pi), so
    it suffices to test epsilon at the two high-symmetry momenta.
    """
    if p.tp == 0.0 and p.t == 0.0 and p.delta == 0.0:
        return []
    out = []
    scale = max(p.t**2, p.tp**2, p.delta**2, 1e-30)
    eps0, _ = ssh_epsilon_omega(0.0, p)
    epspi, _ = ssh_epsilon_omega(np.pi, p)
    if abs(float(eps0)) <= tol * scale:
        out.append(0.0)
    if abs(float(epspi)) <= tol * scale:
        out.extend([-np.pi, np.pi])
    return sorted(out)


def chern_ep_momenta(p: ChernParams, tol: float = 1e-9):
    """Exceptional points (kx, ky) of the 2D lattice.

    omega = -2 t gamma sin ky pins ky to {0, pi} (for gamma != 0); the
    remaining condition epsilon = 0 fixes cos kx per family:

        ky = 0 :  cos kx = (gamma^2 - m^2) / (2 t (m + t)) - 1
        ky = pi:  cos kx = 1 - (gamma^2 - m^2) / (2 t (t - m))

    At gamma = 0 the spectrum is real and the band touchings sit at the
    same momenta, so the same scan applies.
    """
    out = []
    scale = max(p.t**2, p.m**2, p.gamma**2, 1e-30)
    for ky, coef in ((0.0, 2.0 * p.t * (p.m + p.t)),
                     (np.pi, 2.0 * p.t * (p.t - p.m))):
        base = p.m**2 - p.gamma**2
        if abs(coef) < 1e-14 * scale:
            # whole ky line is at constant epsilon; degenerate only if it is 0
            if abs(base) <= tol * scale:
                out.extend((kx, ky) for kx in np.linspace(-np.pi, np.pi, 9))
            continue
        # epsilon = base + coef * (1 -+ cos kx) with the sign fixed by ky
        u = -base / coef  # value of (1 - cos kx) at ky=pi, (1 + cos kx) at ky=0
        if -tol <= u <= 2.0 + tol:
            u = min(max(u, 0.0), 2.0)
            c = u - 1.0 if ky == 0.0 else 1.0 - u
            kx = float(np.arccos(min(max(c, -1.0), 1.0)))
            out.append((kx, ky))
            if kx not in (0.0, float(np.pi)):
                out.append((-kx, ky))
    return out


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelInfo:
    """Registry entry: enough metadata for scans and the CLI to stay
    model-agnostic."""

    model_id: str
    dim: int
    param_cls: type
    param_names: tuple


_MODELS = {
    "ssh": ModelInfo("ssh", 1, SshParams, ("t", "tp", "delta")),
    "chern": ModelInfo("chern", 2, ChernParams, ("t", "m", "gamma")),
}


def get_model(model_id: str) -> ModelInfo:
    """Look up a model by id; raises UnknownModelError for anything else."""
    try:
        return _MODELS[model_id]
    except KeyError:
        known = ", ".join(sorted(_MODELS))
        raise UnknownModelError(
            f"unsupported model {model_id!r}; known models: {known}") from None


def make_params(model_id: str, values: dict):
    """Build the parameter dataclass for a model from a name->value dict."""
    model = get_model(model_id)
    unknown = set(values) - set(model.param_names)
    if unknown:
        raise ValueError(
            f"invalid parameter(s) {sorted(unknown)} for model {model_id!r}; "
            f"valid names: {list(model.param_names)}")
    return model.param_cls(**values)
