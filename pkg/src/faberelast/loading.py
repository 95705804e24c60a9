"""Material constants and far-field loadings in the Faber basis.

A loading is the pair of analytic potentials (h, l) of the background
displacement, stored through their Faber coefficient vectors (A_m) and
(B_m):

    2*u0(z) = kappa * sum_m A_m F_m(z)
              - z * sum_m conj(A_m) conj(F_m'(z))
              - sum_m conj(B_m) conj(F_m(z)).

Keeping the loading as finite coefficient vectors keeps the downstream
solve exact; the contour-sampling helper below converts a function-
defined loading into coefficients with spectral accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conformal import ExteriorMap
from .errors import ConvexityError
from .faber import FaberTable, faber_values


@dataclass(frozen=True)
class Material:
    """Isotropic material data.

    Either built from a Lame pair (lam, mu), which fixes
    alpha1 = (1/mu + 1/(2 mu + lam))/2, alpha2 = (1/mu - 1/(2 mu + lam))/2
    and kappa = (lam + 3 mu)/(lam + mu), or synthetically from (alpha1,
    kappa) directly with alpha2 = alpha1/kappa and no Lame pair.  The
    synthetic route accepts kappa outside the physical range (1, 3];
    some published field plots use such values and they are needed to
    reproduce them.
    """

    alpha1: float
    alpha2: float
    kappa: float
    lam: float | None = None
    mu: float | None = None

    @property
    def synthetic(self) -> bool:
        return self.lam is None

    @classmethod
    def from_lame(cls, lam: float, mu: float) -> "Material":
        if not (mu > 0 and lam + mu > 0):
            raise ConvexityError(
                f"need mu > 0 and lam + mu > 0, got lam={lam}, mu={mu}"
            )
        alpha1 = 0.5 * (1.0 / mu + 1.0 / (2.0 * mu + lam))
        alpha2 = 0.5 * (1.0 / mu - 1.0 / (2.0 * mu + lam))
        kappa = (lam + 3.0 * mu) / (lam + mu)
        return cls(alpha1=alpha1, alpha2=alpha2, kappa=kappa, lam=lam, mu=mu)

    @classmethod
    def from_figure_params(cls, alpha1: float, kappa: float) -> "Material":
        if alpha1 <= 0:
            raise ValueError("alpha1 must be positive")
        if kappa == 0:
            raise ValueError("kappa must be nonzero")
        return cls(alpha1=alpha1, alpha2=alpha1 / kappa, kappa=kappa)


def material_from_lame(lam: float, mu: float) -> Material:
    return Material.from_lame(lam, mu)


def material_from_figure_params(alpha1: float, kappa: float) -> Material:
    return Material.from_figure_params(alpha1, kappa)


@dataclass(frozen=True)
class FarFieldLoading:
    """Faber coefficients (A_m) of h and (B_m) of l, padded to equal length."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = np.atleast_1d(np.asarray(self.A, dtype=complex))
        B = np.atleast_1d(np.asarray(self.B, dtype=complex))
        n = max(len(A), len(B))
        A = np.pad(A, (0, n - len(A)))
        B = np.pad(B, (0, n - len(B)))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    def coefficient_A(self, m: int) -> complex:
        return complex(self.A[m]) if 0 <= m < len(self.A) else 0.0 + 0.0j

    def coefficient_B(self, m: int) -> complex:
        return complex(self.B[m]) if 0 <= m < len(self.B) else 0.0 + 0.0j

    @property
    def degree(self) -> int:
        """Highest index carrying a nonzero coefficient in either vector."""
        nz = np.nonzero((self.A != 0) | (self.B != 0))[0]
        return int(nz[-1]) if len(nz) else 0

    def scaled(self, factor: complex) -> "FarFieldLoading":
        return FarFieldLoading(self.A * factor, self.B * factor)

    def __add__(self, other: "FarFieldLoading") -> "FarFieldLoading":
        n = max(len(self.A), len(other.A))
        return FarFieldLoading(
            np.pad(self.A, (0, n - len(self.A))) + np.pad(other.A, (0, n - len(other.A))),
            np.pad(self.B, (0, n - len(self.B))) + np.pad(other.B, (0, n - len(other.B))),
        )


def eval_u0(loading: FarFieldLoading, table: FaberTable, mat: Material, z):
    """Background displacement u0(z); valid in the whole plane."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    za = np.atleast_1d(z)
    p = loading.degree
    if p > table.order:
        raise IndexError("loading degree exceeds the Faber table order")
    F, Fp = faber_values(table.mapping, p, za)
    A = loading.A[: p + 1]
    B = loading.B[: p + 1]
    total = mat.kappa * np.tensordot(A, F, axes=(0, 0))
    total -= za * np.conj(np.tensordot(A, Fp, axes=(0, 0)))
    total -= np.conj(np.tensordot(B, F, axes=(0, 0)))
    out = 0.5 * total
    return complex(out[0]) if scalar else out.reshape(z.shape)


def faber_coefficients_from_samples(samples, m: int, r: float) -> complex:
    """Coefficient d_m of v = sum d_m F_m from samples of v(Psi(w)) on |w| = r.

    ``samples`` must be taken on the uniform angular grid theta_q =
    2 pi q / Q.  The Cauchy-integral coefficient

        d_m = (1 / 2 pi i) * integral_{|w|=r} v(Psi(w)) w^{-m-1} dw

    reduces under the periodic trapezoid rule to a plain discrete
    Fourier mode, spectrally accurate for v analytic past |w| = r.
    """
    if r <= 1.0:
        raise ValueError("sampling radius must exceed 1")
    samples = np.asarray(samples, dtype=complex)
    q = len(samples)
    theta = 2.0 * np.pi * np.arange(q) / q
    return complex(np.mean(samples * (r * np.exp(1j * theta)) ** (-m)))


def faber_coefficients(
    v, mapping: ExteriorMap, count: int, r: float = 2.0, q: int = 512
) -> np.ndarray:
    """First ``count + 1`` Faber coefficients of a callable loading v(z)."""
    theta = 2.0 * np.pi * np.arange(q) / q
    w = r * np.exp(1j * theta)
    samples = np.asarray(v(mapping.eval(w)), dtype=complex)
    return np.array(
        [faber_coefficients_from_samples(samples, m, r) for m in range(count + 1)]
    )
