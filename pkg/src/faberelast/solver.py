"""Density determination for the rigid-inclusion transmission problem.

The boundary density is expanded in the conformal angular modes
e^{±i m theta}/h with complex coefficient vectors s (negative modes)
and t (positive modes).  Matching the single-layer expansion against
the far-field loading on the boundary splits into:

  * t, which is fixed mode-by-mode by the loading (the m = 1 entry also
    carries the rotation constant c3);
  * s, which solves  kappa s^T D + conj(s)^T A D conj(Gamma) = y^T
    where A is the Hankel matrix of map coefficients a_{m+k}, D =
    diag(1/m), and y collects the loading data re-expanded over the
    conjugated Faber basis;
  * the rigid-motion constants c1, c2, c3 from the equilibrium of the
    density and the constant part of the matching.

The order-M structure of the map makes the coupled part of the s-system
at most (M-2) x (M-2); every entry beyond that block is a closed-form
diagonal scaling, so truncation at order N only limits the loading
degree, never the solve itself.

Rotation-channel constants
--------------------------
Decomposing the rigid motion c1 + i c2 - i c3 z in the same two-
potential form as the fields, 2 mu u = kappa phi - z conj(phi') -
conj(psi), forces the linear potential part phi = -2i c3 z / (kappa+1):
the linear term feeds both kappa*phi and -z conj(phi'), and the two
contributions sum to -2i c3 z only with the 1/(kappa+1) weight.  The
factor kappa+1 therefore appears wherever c3 enters the matching (the
t_1 relation, the rotation forcing term, the constant bookkeeping, and
the closed-form c3 below).  A quick check: a pure far-field rotation
u0 = i w (kappa+1) z / 2 must yield zero density and a co-rotating
inclusion, c3 = -w (kappa+1)/2, which these constants reproduce exactly
and the quadrature oracle certifies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conformal import ExteriorMap
from .errors import DegenerateRotationError, SingularBlockError, TruncationError
from .faber import FaberTable, build_faber
from .loading import FarFieldLoading, Material

#: condition-number ceiling for the coupled block
_COND_LIMIT = 1e10
#: threshold on the rotation-constant denominator
_ROTATION_DEN_TOL = 1e-10


@dataclass(frozen=True)
class DensitySolution:
    """Density coefficients and rigid-motion constants.

    ``s[m-1]`` and ``t[m-1]`` multiply the boundary modes
    e^{-i m theta}/h and e^{+i m theta}/h respectively; the four real
    coefficient families are exposed as the views s1..s4.
    """

    s: np.ndarray
    t: np.ndarray
    c1: float
    c2: float
    c3: float
    order: int

    @property
    def s1(self) -> np.ndarray:
        return self.s.real

    @property
    def s2(self) -> np.ndarray:
        return self.s.imag

    @property
    def s3(self) -> np.ndarray:
        return self.t.real

    @property
    def s4(self) -> np.ndarray:
        return self.t.imag

    def rigid_motion(self, z):
        """The boundary displacement c1 + i c2 - i c3 z of the inclusion."""
        return self.c1 + 1j * self.c2 - 1j * self.c3 * np.asarray(z, dtype=complex)


def required_table_order(mapping: ExteriorMap, n: int) -> int:
    """Faber-table order needed to run the solve at truncation n."""
    return n + mapping.order + 1


def solve_t(
    loading: FarFieldLoading, mat: Material, c3: float, n: int
) -> np.ndarray:
    """Positive-mode coefficients t_m, m = 1..n.

    All entries beyond m = 1 follow directly from the loading;
    t_1 = A_1/alpha2 + 2i c3 / ((kappa+1) alpha2) also carries the
    rotation constant.
    """
    t = np.zeros(n, dtype=complex)
    for m in range(1, n + 1):
        t[m - 1] = m * loading.coefficient_A(m) / mat.alpha2
    t[0] = loading.coefficient_A(1) / mat.alpha2 + 2j * c3 / (
        (mat.kappa + 1.0) * mat.alpha2
    )
    return t


def build_AD(mapping: ExteriorMap, n: int) -> tuple:
    """Hankel matrix A[m,k] = a_{m+k} and the diagonal D = diag(1/m)."""
    A = np.zeros((n, n), dtype=complex)
    for m in range(1, n + 1):
        for k in range(1, n + 1):
            A[m - 1, k - 1] = mapping.coefficient(m + k)
    D = np.diag(1.0 / np.arange(1, n + 1))
    return A, D


def _accumulate_ftilde(table: FaberTable, j: int, weight: complex, coeffs, const):
    """Add weight * conj(Ftilde_j) re-expanded over conj(F_l) + constant."""
    if j <= 0:
        return const
    scale = weight / j
    if j > 1:
        coeffs[: j - 1] += scale * np.conj(table.gamma[j - 1, : j - 1])
    return const + scale * np.conj(table.gamma0[j - 1])


def build_y(
    mapping: ExteriorMap,
    table: FaberTable,
    loading: FarFieldLoading,
    mat: Material,
    n: int,
) -> tuple:
    """Right-hand sides of the s-system, split by dependence on c3.

    Returns (y1, y2, j01, j02) such that the rotation forcing term and
    the loading term expand over the conjugated Faber basis as

        J1 = -alpha2 * (y1 . conj(F) + j01),
        J2 = -alpha2 * (y2 . conj(F) + j02),

    with J1 = -2i/(kappa+1) * sum_{k>=0} a_k conj(Ftilde_{k+1}) and
    J2 = sum_m conj(B_m) conj(F_m)
         + sum_m m conj(A_m) sum_{k>=-1} a_k conj(Ftilde_{k+m}).
    The full right-hand side is y = c3*y1 + y2.  Constant bookkeeping:
    j01/j02 hold only the constants born inside J1/J2; the loading
    constants (-kappa A_0 + conj(B_0)) and the map-shift rotation
    constant -2i kappa c3 a0/(kappa+1) stay with solve_c12, which also
    recovers c1 + i c2 last.
    """
    M = mapping.order
    p = loading.degree
    ntab = table.order
    if p + M > ntab:
        raise TruncationError(
            f"loading degree {p} with map order {M} needs a Faber table of "
            f"order {p + M}, have {ntab}"
        )
    width = ntab
    kap = mat.kappa

    c1v = np.zeros(width, dtype=complex)  # J1 coefficients over conj(F_l)
    c2v = np.zeros(width, dtype=complex)  # J2 coefficients
    j1const = 0.0 + 0.0j
    j2const = 0.0 + 0.0j

    pref = -2j / (kap + 1.0)
    for k in range(0, M + 1):
        ak = mapping.coefficient(k)
        if ak != 0:
            j1const = _accumulate_ftilde(table, k + 1, pref * ak, c1v, j1const)

    for m in range(1, min(p, width) + 1):
        bm = loading.coefficient_B(m)
        if bm != 0:
            c2v[m - 1] += np.conj(bm)
        am = loading.coefficient_A(m)
        if am != 0:
            wgt = m * np.conj(am)
            for k in range(-1, M + 1):
                ak = mapping.coefficient(k)
                if ak != 0:
                    j2const = _accumulate_ftilde(
                        table, k + m, wgt * ak, c2v, j2const
                    )

    y1full = -c1v / mat.alpha2
    y2full = -c2v / mat.alpha2
    tail_scale = max(1.0, np.abs(y1full).max(initial=0.0), np.abs(y2full).max(initial=0.0))
    if n < width and (
        np.abs(y1full[n:]).max(initial=0.0) > 1e-13 * tail_scale
        or np.abs(y2full[n:]).max(initial=0.0) > 1e-13 * tail_scale
    ):
        raise TruncationError(
            f"loading excites Faber modes beyond the truncation order {n}; "
            "raise it to at least degree + map order - 1"
        )
    return y1full[:n], y2full[:n], -j1const / mat.alpha2, -j2const / mat.alpha2


def coupling_block(mapping: ExteriorMap, table: FaberTable, n: int) -> np.ndarray:
    """The matrix conj(Gamma)^T D A; entry (i, j) vanishes for i+j >= M."""
    M = mapping.order
    E = np.zeros((n, n), dtype=complex)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i + j >= M:
                continue
            acc = 0.0 + 0.0j
            for k in range(i + 1, M - j + 1):
                acc += np.conj(table.gamma[k - 1, i - 1]) * mapping.coefficient(k + j) / k
            E[i - 1, j - 1] = acc
    return E


def _solve_one(E: np.ndarray, kappa: float, y: np.ndarray) -> np.ndarray:
    """Solve kappa D s + E conj(s) = y exploiting the finite coupling."""
    n = len(y)
    h = E.shape[0]
    s = np.zeros(n, dtype=complex)
    m_idx = np.arange(1, n + 1)
    # rows past the coupled head are a pure diagonal scaling
    s[h:] = m_idx[h:] * y[h:] / kappa
    if h > 0:
        D_h = np.diag(1.0 / m_idx[:h])
        # real form of kappa D x + E conj(x) = y_head
        top = np.hstack([kappa * D_h + E.real, E.imag])
        bot = np.hstack([E.imag, kappa * D_h - E.real])
        mat2 = np.vstack([top, bot])
        cond = np.linalg.cond(mat2)
        if not np.isfinite(cond) or cond > _COND_LIMIT:
            raise SingularBlockError(
                f"coupled block condition number {cond:.3e} exceeds {_COND_LIMIT:.0e}"
            )
        rhs = np.concatenate([y[:h].real, y[:h].imag])
        xy = np.linalg.solve(mat2, rhs)
        s[:h] = xy[:h] + 1j * xy[h:]
    return s


def solve_block(
    mapping: ExteriorMap,
    table: FaberTable,
    y1: np.ndarray,
    y2: np.ndarray,
    mat: Material,
    n: int,
) -> tuple:
    """Solve the s-system for the two right-hand sides y1 and y2.

    Returns (u1, u2) with the final density s = c3*u1 + u2.
    """
    h = max(0, min(mapping.order - 2, n))
    E = coupling_block(mapping, table, h) if h else np.zeros((0, 0), dtype=complex)
    u1 = _solve_one(E, mat.kappa, np.asarray(y1, dtype=complex))
    u2 = _solve_one(E, mat.kappa, np.asarray(y2, dtype=complex))
    return u1, u2


def _pair_with_map(u: np.ndarray, mapping: ExteriorMap) -> complex:
    """sum_m u_m conj(a_m) over the map coefficients a_1..a_M."""
    acc = 0.0 + 0.0j
    for m in range(1, min(len(u), mapping.order) + 1):
        acc += u[m - 1] * np.conj(mapping.coefficient(m))
    return acc


def solve_c3(
    u1: np.ndarray,
    u2: np.ndarray,
    mapping: ExteriorMap,
    loading: FarFieldLoading,
    mat: Material,
) -> float:
    """Rotation constant from the moment equilibrium of the density.

    Equilibrium against the rotation mode ties Im(t_1) to
    -Im(s . conj(a)); with s = c3 u1 + u2 and the t_1 relation this is
    a single linear equation for c3:

        c3 = (kappa+1) * (-Im A_1 - alpha2 Im(u2 . conj(a)))
             / (2 + (kappa+1) alpha2 Im(u1 . conj(a))).
    """
    kap1 = mat.kappa + 1.0
    num = -np.imag(loading.coefficient_A(1)) - mat.alpha2 * np.imag(
        _pair_with_map(u2, mapping)
    )
    den = 2.0 + kap1 * mat.alpha2 * np.imag(_pair_with_map(u1, mapping))
    if abs(den) < _ROTATION_DEN_TOL:
        raise DegenerateRotationError(
            f"rotation denominator {den:.3e} below {_ROTATION_DEN_TOL:.0e}"
        )
    return float(kap1 * num / den)


def solve_c12(
    s: np.ndarray,
    c3: float,
    j01: complex,
    j02: complex,
    mapping: ExteriorMap,
    table: FaberTable,
    loading: FarFieldLoading,
    mat: Material,
) -> tuple:
    """Translation constants from the constant part of the matching.

    The constant channel reads conj(s)^T A D conj(gamma0) = j0 where j0
    collects, besides c3*j01 + j02 from build_y, the terms handled here:
    -(1/alpha2) * (-kappa A_0 + conj(B_0) + 2 c1 + 2i c2
                   - 2i kappa c3 a0/(kappa+1)).
    Solving for c1 + i c2 gives the expression below.
    """
    M = mapping.order
    lhs = 0.0 + 0.0j
    for m in range(1, len(s) + 1):
        for j in range(1, M - m + 1):
            lhs += (
                np.conj(s[m - 1])
                * mapping.coefficient(m + j)
                * np.conj(table.gamma0[j - 1])
                / j
            )
    a0 = mapping.coefficient(0)
    kap = mat.kappa
    c12 = (
        -0.5 * mat.alpha2 * (lhs - c3 * j01 - j02)
        + 0.5 * (kap * loading.coefficient_A(0) - np.conj(loading.coefficient_B(0)))
        + 1j * kap * c3 * a0 / (kap + 1.0)
    )
    return float(c12.real), float(c12.imag)


def solve_full(
    mapping: ExteriorMap,
    loading: FarFieldLoading,
    mat: Material,
    n: int,
    table: FaberTable | None = None,
) -> DensitySolution:
    """Run the whole determination pipeline at truncation order n."""
    if n < 1:
        raise ValueError("truncation order must be at least 1")
    if loading.degree > n:
        raise TruncationError(
            f"loading has degree {loading.degree}, above the truncation order {n}"
        )
    if table is None or table.order < required_table_order(mapping, n) - 1:
        table = build_faber(mapping, required_table_order(mapping, n))
    y1, y2, j01, j02 = build_y(mapping, table, loading, mat, n)
    u1, u2 = solve_block(mapping, table, y1, y2, mat, n)
    c3 = solve_c3(u1, u2, mapping, loading, mat)
    s = c3 * u1 + u2
    t = solve_t(loading, mat, c3, n)
    c1, c2 = solve_c12(s, c3, j01, j02, mapping, table, loading, mat)
    return DensitySolution(s=s, t=t, c1=c1, c2=c2, c3=c3, order=n)


def density_on_boundary(sol: DensitySolution, mapping: ExteriorMap, theta):
    """Boundary density sum_m (s_m e^{-im t} + t_m e^{im t}) / h(0, t)."""
    theta = np.asarray(theta, dtype=float)
    scalar = theta.ndim == 0
    th = np.atleast_1d(theta)
    e = np.exp(1j * th)
    acc = np.zeros_like(e)
    neg = np.conj(e)
    pos_pow = e.copy()
    neg_pow = neg.copy()
    for m in range(1, sol.order + 1):
        acc += sol.s[m - 1] * neg_pow + sol.t[m - 1] * pos_pow
        pos_pow *= e
        neg_pow *= neg
    h = mapping.scale_factor(np.zeros_like(th), th)
    out = acc / h
    return complex(out[0]) if scalar else out.reshape(theta.shape)


def system_residual(
    sol: DensitySolution,
    mapping: ExteriorMap,
    table: FaberTable,
    loading: FarFieldLoading,
    mat: Material,
) -> float:
    """Residual of kappa s^T D + conj(s)^T A D conj(Gamma) = y^T."""
    n = sol.order
    A, D = build_AD(mapping, n)
    y1, y2, _, _ = build_y(mapping, table, loading, mat, n)
    y = sol.c3 * y1 + y2
    lhs = mat.kappa * sol.s @ D + np.conj(sol.s) @ A @ D @ np.conj(table.gamma[:n, :n])
    return float(np.abs(lhs - y).max())
