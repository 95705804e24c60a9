"""Brute-force quadrature checks for every series result in the package.

Everything here integrates the actual boundary kernels with the
periodic trapezoid rule and knows nothing about Faber polynomials or
Grunsky coefficients, so agreement with the series evaluators is a
genuine two-route certification.  The rule is spectrally accurate for
smooth periodic integrands, which is why a standoff distance from the
boundary is enforced: closer targets would need specialized quadrature
that the certification role does not require.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .conformal import ExteriorMap
from .errors import ProximityError
from .faber import FaberTable
from .fields import single_layer_interior
from .loading import FarFieldLoading, Material, eval_u0
from .solver import DensitySolution, density_on_boundary

STANDOFF = 0.05


@dataclass(frozen=True)
class QuadratureRule:
    """Periodic trapezoid rule on the boundary angle."""

    q: int
    theta: np.ndarray = field(init=False, repr=False, compare=False)
    weight: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.q < 64 or self.q & (self.q - 1):
            raise ValueError("node count must be a power of two, at least 64")
        object.__setattr__(
            self, "theta", 2.0 * np.pi * np.arange(self.q) / self.q
        )
        object.__setattr__(self, "weight", 2.0 * np.pi / self.q)


def boundary_nodes(mapping: ExteriorMap, rule: QuadratureRule) -> tuple:
    """Boundary points and arclength densities at the rule nodes."""
    zeta = mapping.boundary_point(rule.theta)
    h = mapping.scale_factor(np.zeros_like(rule.theta), rule.theta)
    return zeta, h


def density_mode(mapping: ExteriorMap, m: int, rule: QuadratureRule) -> np.ndarray:
    """Samples of the boundary basis function e^{i m theta}/h."""
    _, h = boundary_nodes(mapping, rule)
    return np.exp(1j * m * rule.theta) / h


def _check_standoff(x: complex, zeta: np.ndarray):
    d = np.abs(x - zeta).min()
    if d < STANDOFF:
        raise ProximityError(
            f"target at distance {d:.3g} from the boundary; need {STANDOFF}"
        )


def kelvin_single_layer(
    phi_samples: np.ndarray,
    mapping: ExteriorMap,
    mat: Material,
    x: complex,
    rule: QuadratureRule,
) -> complex:
    """Single-layer potential of a sampled density, fundamental-matrix form.

    The kernel is the plane elastic fundamental matrix
    G_ij(d) = alpha1/(2 pi) delta_ij ln|d| - alpha2/(2 pi) d_i d_j/|d|^2
    applied to the density as a 2-vector; the result is returned in the
    complex identification S_1 + i S_2.
    """
    zeta, h = boundary_nodes(mapping, rule)
    x = complex(x)
    _check_standoff(x, zeta)
    d = x - zeta
    r2 = np.abs(d) ** 2
    log_part = (mat.alpha1 / (2.0 * np.pi)) * np.log(np.abs(d)) * phi_samples
    dyad_part = (
        (mat.alpha2 / (2.0 * np.pi))
        * np.real(np.conj(d) * phi_samples)
        * d
        / r2
    )
    integrand = (log_part - dyad_part) * h
    return complex(np.sum(integrand) * rule.weight)


def cauchy_operator(
    psi_samples: np.ndarray,
    mapping: ExteriorMap,
    z: complex,
    rule: QuadratureRule,
) -> complex:
    """(1/2 pi) integral of psi(zeta) / (z - zeta) over the boundary."""
    zeta, h = boundary_nodes(mapping, rule)
    z = complex(z)
    _check_standoff(z, zeta)
    return complex(
        np.sum(psi_samples / (z - zeta) * h) * rule.weight / (2.0 * np.pi)
    )


def log_operator(
    phi_samples: np.ndarray,
    mapping: ExteriorMap,
    z: complex,
    rule: QuadratureRule,
) -> complex:
    """(1/2 pi) integral of ln|z - zeta| phi(zeta) over the boundary."""
    zeta, h = boundary_nodes(mapping, rule)
    z = complex(z)
    _check_standoff(z, zeta)
    return complex(
        np.sum(np.log(np.abs(z - zeta)) * phi_samples * h)
        * rule.weight
        / (2.0 * np.pi)
    )


def transmission_residual(
    sol: DensitySolution,
    mapping: ExteriorMap,
    table: FaberTable,
    loading: FarFieldLoading,
    mat: Material,
    q: int = 256,
) -> float:
    """Max boundary mismatch of S + u0 against the rigid motion."""
    theta = 2.0 * np.pi * np.arange(q) / q
    zb = mapping.boundary_point(theta)
    S = single_layer_interior(sol, table, mapping, mat, zb)
    u0 = eval_u0(loading, table, mat, zb)
    return float(np.abs(S + u0 - sol.rigid_motion(zb)).max())


def equilibrium_residual(
    sol: DensitySolution, mapping: ExteriorMap, q: int = 2048
) -> np.ndarray:
    """Moments of the density against the three rigid modes, by quadrature.

    Returns |integral phi_1|, |integral phi_2|, and the rotation moment
    |Im integral phi conj(z)| over the boundary.
    """
    rule = QuadratureRule(q)
    zeta, h = boundary_nodes(mapping, rule)
    phi = density_on_boundary(sol, mapping, rule.theta)
    total = np.sum(phi * h) * rule.weight
    moment = np.sum(phi * np.conj(zeta) * h) * rule.weight
    return np.array([abs(total.real), abs(total.imag), abs(moment.imag)])
