"""Faber polynomials, Grunsky coefficients, and the derivative basis.

For an exterior map Psi the Faber polynomial F_m is the unique monic
degree-m polynomial whose composition with Psi has a single positive
Laurent mode:

    F_m(Psi(w)) = w**m + sum_{k>=1} c_{m,k} w**(-k),

and the c_{m,k} are the Grunsky coefficients.  Because the maps handled
here have a finite Laurent tail of order M, the composition is a finite
Laurent polynomial (k runs to m*M only) and every coefficient below is
computed exactly by series arithmetic, no quadrature involved.

The table also stores the change of basis for derivatives,

    F_m' = sum_{j=1}^{m-1} gamma_{m,j} F_j + gamma_{m,0},

obtained by triangular back-substitution against the monic monomial
table.  These coefficients drive the re-expansion of conjugated series
in the transmission solve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conformal import ExteriorMap
from .errors import NumericError


@dataclass(frozen=True)
class FaberTable:
    """Monomial, Grunsky, and derivative data for F_0 ... F_N."""

    mapping: ExteriorMap
    monomial: np.ndarray  # (N+1, N+1); row m = coefficients of F_m, constant first
    grunsky: np.ndarray  # (N, N); [m-1, k-1] = c_{m,k}
    gamma: np.ndarray  # (N, N); [m-1, j-1] = gamma_{m,j}, strictly lower
    gamma0: np.ndarray  # (N,);  [m-1] = gamma_{m,0}
    order: int
    _grunsky_wide: np.ndarray  # (N+1, width+1); [m, k] = c_{m,k}, exact full rows

    def grunsky_row(self, m: int) -> np.ndarray:
        """All nonzero Grunsky coefficients of row m: c_{m,1} ... c_{m,mM}."""
        top = max(m * max(self.mapping.order, 1), 0)
        return self._grunsky_wide[m, 1 : top + 1]


def _monomial_table(mapping: ExteriorMap, n: int) -> np.ndarray:
    a = np.array([mapping.coefficient(k) for k in range(n + 1)], dtype=complex)
    M = mapping.order
    mono = np.zeros((n + 1, n + 1), dtype=complex)
    mono[0, 0] = 1.0
    for m in range(n):
        row = np.zeros(n + 1, dtype=complex)
        row[1 : m + 2] = mono[m, : m + 1]  # z * F_m
        for s in range(min(m, M) + 1):
            row -= a[s] * mono[m - s]
        row[0] -= m * a[m] if m <= M else 0.0
        mono[m + 1] = row
    return mono


def _grunsky_wide(mapping: ExteriorMap, n: int) -> np.ndarray:
    """Laurent coefficients of F_m(Psi(w)) for m = 0..n, by the recursion."""
    M = mapping.order
    Mq = max(M, 1)
    width = n * Mq  # most negative exponent kept on the canvas
    L = width + n + 1  # canvas exponents -width .. n; index(e) = e + width
    a = np.array([mapping.coefficient(k) for k in range(M + 1)], dtype=complex)

    psi = np.zeros(M + 2, dtype=complex)  # exponents -M .. 1; index(e) = e + M
    psi[M + 1] = 1.0
    for k in range(M + 1):
        psi[M - k] = a[k]

    comp = np.zeros((n + 1, L), dtype=complex)
    comp[0, width] = 1.0
    for m in range(n):
        conv = np.convolve(comp[m], psi)
        new = conv[M : M + L].copy()
        for s in range(min(m, M) + 1):
            new -= a[s] * comp[m - s]
        if m <= M:
            new[width] -= m * a[m]
        comp[m + 1] = new

    wide = np.zeros((n + 1, width + 1), dtype=complex)
    for m in range(1, n + 1):
        top = m * Mq
        # coefficient of w^{-k} sits at canvas index width - k
        wide[m, 1 : top + 1] = comp[m, width - top : width][::-1]
    return wide


def _derivative_basis(monomial: np.ndarray) -> tuple:
    n = monomial.shape[0] - 1
    gamma = np.zeros((n, n), dtype=complex)
    gamma0 = np.zeros(n, dtype=complex)
    for m in range(1, n + 1):
        p = monomial[m, 1 : m + 1] * np.arange(1, m + 1)  # coefficients of F_m'
        d = np.zeros(m, dtype=complex)
        for j in range(m - 1, -1, -1):
            acc = p[j]
            for l in range(j + 1, m):
                acc -= d[l] * monomial[l, j]
            d[j] = acc  # monomial[j, j] == 1
        gamma0[m - 1] = d[0]
        if m > 1:
            gamma[m - 1, : m - 1] = d[1:m]
    return gamma, gamma0


def build_faber(mapping: ExteriorMap, n: int) -> FaberTable:
    """Build the Faber table to order n >= 1."""
    if n < 1:
        raise ValueError("table order must be at least 1")
    mono = _monomial_table(mapping, n)
    wide = _grunsky_wide(mapping, n)
    grunsky = np.zeros((n, n), dtype=complex)
    kmax = min(n, wide.shape[1] - 1)
    grunsky[:, :kmax] = wide[1:, 1 : kmax + 1]
    gamma, gamma0 = _derivative_basis(mono)
    return FaberTable(
        mapping=mapping,
        monomial=mono,
        grunsky=grunsky,
        gamma=gamma,
        gamma0=gamma0,
        order=n,
        _grunsky_wide=wide,
    )


def grunsky_matrix(mapping: ExteriorMap, table: FaberTable) -> np.ndarray:
    """Grunsky matrix c_{m,k}, m,k = 1..N, by exact series composition."""
    if table.mapping is not mapping and table.mapping != mapping:
        raise ValueError("table was built for a different map")
    return table.grunsky.copy()


def derivative_basis(table: FaberTable) -> tuple:
    """(Gamma, gamma0) expressing each F_m' in the Faber basis."""
    return table.gamma.copy(), table.gamma0.copy()


def eval_faber(table: FaberTable, m: int, z):
    """F_m(z) by Horner's scheme on the stored monomial coefficients."""
    if not 0 <= m <= table.order:
        raise IndexError(f"Faber index {m} outside table order {table.order}")
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    coeffs = table.monomial[m, : m + 1]
    acc = np.full(z.shape, coeffs[-1], dtype=complex)
    for c in coeffs[-2::-1]:
        acc = acc * z + c
    return complex(acc) if scalar else acc


def eval_ftilde(table: FaberTable, k: int, z):
    """F_k'(z)/k for k >= 1, and 0 for k <= 0."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    if k <= 0:
        out = np.zeros(z.shape, dtype=complex)
        return complex(out) if scalar else out
    if k > table.order:
        raise IndexError(f"Faber index {k} outside table order {table.order}")
    coeffs = table.monomial[k, 1 : k + 1] * np.arange(1, k + 1) / k
    acc = np.full(z.shape, coeffs[-1], dtype=complex)
    for c in coeffs[-2::-1]:
        acc = acc * z + c
    return complex(acc) if scalar else acc


def eval_G(mapping: ExteriorMap, k: int, w):
    """G_k(w) = w^{k-1} / Psi'(w), the large-|w| limit shape of F_k'/k."""
    w = np.asarray(w, dtype=complex)
    scalar = w.ndim == 0
    dpsi = mapping.derivative(w)
    if np.any(np.abs(dpsi) < 1e-12):
        raise NumericError("Psi' vanishes to working precision")
    out = w ** (k - 1) / dpsi
    return complex(out) if scalar else out


def faber_values(mapping: ExteriorMap, n: int, z):
    """Values of F_0..F_n and their derivatives at z, by the recursion.

    Returns a pair of arrays of shape (n+1,) + shape(z).  This is the
    workhorse used by the field evaluators; it costs O(n * M) vector
    operations instead of O(n^2) for row-wise Horner evaluation.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    M = mapping.order
    a = np.array([mapping.coefficient(k) for k in range(M + 1)], dtype=complex)
    F = np.zeros((n + 1,) + z.shape, dtype=complex)
    Fp = np.zeros_like(F)
    F[0] = 1.0
    for m in range(n):
        new = z * F[m]
        newp = F[m] + z * Fp[m]
        for s in range(min(m, M) + 1):
            new -= a[s] * F[m - s]
            newp -= a[s] * Fp[m - s]
        if m <= M:
            new -= m * a[m]
        F[m + 1] = new
        Fp[m + 1] = newp
    return F, Fp
