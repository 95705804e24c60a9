"""Exterior conformal maps with a finite Laurent tail.

The inclusion geometry is described by a conformal map of the disk
exterior {|w| >= 1} onto the complement of the inclusion,

    Psi(w) = w + a0 + a1/w + ... + aM/w**M,

normalized so that the leading coefficient is one (conformal radius 1).
Writing w = exp(rho + i*theta) gives an orthogonal curvilinear system
(rho, theta) outside the inclusion; theta alone parametrizes the
boundary curve theta -> Psi(e^{i*theta}).

Maps of radius other than 1 are not accepted: rescale the geometry by
z -> z/gamma first, which rescales every coefficient by a_k ->
a_k/gamma**(k+1), and undo the scaling on output fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np

from .errors import DomainError

#: tolerance below which |w| < 1 is treated as a domain violation
_INSIDE_TOL = 1e-12


def _as_complex_array(values) -> np.ndarray:
    return np.asarray(values, dtype=complex)


@dataclass(frozen=True)
class UnivalenceReport:
    """Result of the sampled univalence check.

    ``derivative_winding`` is the winding number of Psi' along |w| = 1;
    by the argument principle it equals the number of derivative zeros
    outside the unit circle, so a nonzero value certifies failure even
    when no sample lands near a zero.
    """

    ok: bool
    min_abs_derivative: float
    derivative_zeros: tuple
    derivative_winding: int
    crossing_segments: tuple

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class ExteriorMap:
    """Finite Laurent-series exterior map with conformal radius 1.

    Parameters
    ----------
    coefficients : sequence of complex
        The coefficients a0, a1, ..., aM.  Trailing zeros are trimmed so
        the stored order is tight; the all-zero sequence is the disk.
    conformal_radius : float
        Must be exactly 1.0; anything else is rejected.
    """

    coefficients: tuple = ()
    conformal_radius: float = 1.0
    _coeff_array: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.conformal_radius != 1.0:
            raise ValueError(
                "conformal radius must be exactly 1; rescale the geometry "
                "by z -> z/gamma instead"
            )
        coeffs = _as_complex_array(self.coefficients)
        if coeffs.ndim != 1:
            raise ValueError("coefficients must be a flat sequence")
        # trim trailing zeros so `order` is tight (a_M != 0 when M >= 1)
        n = len(coeffs)
        while n > 0 and coeffs[n - 1] == 0:
            n -= 1
        coeffs = coeffs[:n].copy()
        object.__setattr__(self, "coefficients", tuple(coeffs.tolist()))
        object.__setattr__(self, "_coeff_array", coeffs)

    @property
    def order(self) -> int:
        """Tight Laurent order M (0 for a plain or shifted disk)."""
        return max(len(self._coeff_array) - 1, 0)

    def coefficient(self, k: int) -> complex:
        """a_k with the convention a_{-1} = 1 and a_k = 0 beyond the order."""
        if k == -1:
            return 1.0 + 0.0j
        if 0 <= k < len(self._coeff_array):
            return complex(self._coeff_array[k])
        return 0.0 + 0.0j

    # -- evaluation ---------------------------------------------------

    def _eval_raw(self, w):
        """Psi(w) without the |w| >= 1 domain check (used by inversion)."""
        w = np.asarray(w, dtype=complex)
        shape = w.shape
        wa = np.atleast_1d(w)
        a = self._coeff_array
        if len(a) == 0:
            return (wa + 0.0j).reshape(shape)
        u = np.zeros_like(wa)
        nonzero = wa != 0
        u[nonzero] = 1.0 / wa[nonzero]
        acc = np.zeros_like(wa)
        for ak in a[::-1]:
            acc = acc * u + ak
        out = wa + acc
        out[~nonzero] = np.inf
        return out.reshape(shape)

    def _derivative_raw(self, w):
        w = np.asarray(w, dtype=complex)
        shape = w.shape
        wa = np.atleast_1d(w)
        a = self._coeff_array
        if len(a) <= 1:
            return np.ones_like(wa).reshape(shape)
        u = np.zeros_like(wa)
        nonzero = wa != 0
        u[nonzero] = 1.0 / wa[nonzero]
        acc = np.zeros_like(wa)
        for k in range(len(a) - 1, 0, -1):
            acc = acc * u + k * a[k]
        out = 1.0 - acc * u * u
        out[~nonzero] = np.inf
        return out.reshape(shape)

    def _check_domain(self, w):
        w = np.asarray(w, dtype=complex)
        if np.any(np.abs(w) < 1.0 - _INSIDE_TOL):
            raise DomainError("evaluation point inside the unit disk")
        return w

    def eval(self, w):
        """Psi(w) for |w| >= 1, by Horner's scheme in 1/w."""
        scalar = np.isscalar(w) or np.ndim(w) == 0
        out = self._eval_raw(self._check_domain(w))
        return complex(out) if scalar else out

    def derivative(self, w):
        """Psi'(w) = 1 - sum_k k a_k w^{-k-1} for |w| >= 1."""
        scalar = np.isscalar(w) or np.ndim(w) == 0
        out = self._derivative_raw(self._check_domain(w))
        return complex(out) if scalar else out

    def boundary_point(self, theta):
        """Boundary point Psi(e^{i*theta}); periodic in theta."""
        theta = np.asarray(theta, dtype=float)
        scalar = theta.ndim == 0
        out = self._eval_raw(np.exp(1j * theta))
        return complex(out) if scalar else out

    def scale_factor(self, rho, theta):
        """Curvilinear scale factor h = |w Psi'(w)| at w = e^{rho+i*theta}.

        On the boundary (rho = 0) this is the arclength density:
        d(sigma) = h(0, theta) d(theta).
        """
        rho = np.asarray(rho, dtype=float)
        theta = np.asarray(theta, dtype=float)
        scalar = rho.ndim == 0 and theta.ndim == 0
        w = np.exp(rho + 1j * theta)
        out = np.abs(w * self.derivative(w))
        return float(out) if scalar else out

    # -- inversion ----------------------------------------------------

    def invert(self, z, tol: float = 1e-12, max_iter: int = 80):
        """Solve Psi(w) = z by damped Newton iteration.

        Returns
        -------
        w : ndarray of complex
            The final iterates (meaningful where ``converged``).
        converged : ndarray of bool
            Residual |Psi(w) - z| below ``tol * max(1, |z|)``.
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        a0 = self.coefficient(0)
        w = z - a0
        # keep starting points away from the pole at w = 0
        small = np.abs(w) < 0.3
        w[small] = 0.3 * np.exp(1j * np.angle(z[small] - a0 + 1e-30))
        target = tol * np.maximum(1.0, np.abs(z))
        res = np.abs(self._eval_raw(w) - z)
        active = res > target
        for _ in range(max_iter):
            if not np.any(active):
                break
            wa = w[active]
            dpsi = self._derivative_raw(wa)
            dpsi = np.where(np.abs(dpsi) < 1e-14, 1e-14, dpsi)
            step = (self._eval_raw(wa) - z[active]) / dpsi
            # damp steps that would overshoot past the pole
            new = wa - step
            new_res = np.abs(self._eval_raw(new) - z[active])
            for _ in range(20):
                worse = new_res > res[active]
                if not np.any(worse):
                    break
                step = np.where(worse, 0.5 * step, step)
                new = wa - step
                new_res = np.abs(self._eval_raw(new) - z[active])
            w[active] = new
            res[active] = new_res
            active = res > target
        return w, res <= target

    # -- validation ---------------------------------------------------

    def validate_univalence(
        self,
        n_radial: int = 64,
        n_angular: int = 512,
        n_boundary: int = 2048,
        derivative_tol: float = 1e-8,
    ) -> UnivalenceReport:
        """Sampled univalence check; failures are reported, never raised.

        Two tests: Psi' must not vanish on a radial/angular sample grid
        covering |w| in [1, 4], and the boundary polyline at
        ``n_boundary`` samples must be free of self-intersections.
        """
        radii = np.linspace(1.0, 4.0, n_radial)
        angles = np.linspace(0.0, 2.0 * np.pi, n_angular, endpoint=False)
        wgrid = radii[:, None] * np.exp(1j * angles)[None, :]
        dvals = np.abs(self._derivative_raw(wgrid))
        min_abs = float(dvals.min())
        zero_idx = np.argwhere(dvals < derivative_tol)
        zeros = tuple(complex(wgrid[i, j]) for i, j in zero_idx[:16])

        theta_b = np.linspace(0.0, 2.0 * np.pi, n_boundary, endpoint=False)
        dpsi_b = self._derivative_raw(np.exp(1j * theta_b))
        winding = 0
        if np.all(np.abs(dpsi_b) > derivative_tol):
            phases = np.unwrap(np.angle(dpsi_b))
            closing = float(np.angle(dpsi_b[0] / dpsi_b[-1]))
            # Psi' is analytic and pole-free on |w| > 1 with Psi'(inf) = 1,
            # so its zero count there is minus the counterclockwise winding
            winding = -int(round((phases[-1] - phases[0] + closing) / (2.0 * np.pi)))

        pts = self.boundary_point(theta_b)
        crossings = _polyline_self_intersections(pts)

        ok = len(zeros) == 0 and winding == 0 and len(crossings) == 0
        return UnivalenceReport(
            ok=ok,
            min_abs_derivative=min_abs,
            derivative_zeros=zeros,
            derivative_winding=winding,
            crossing_segments=tuple(crossings[:16]),
        )


def _polyline_self_intersections(points: np.ndarray) -> list:
    """Indices (i, j) of properly crossing segments of a closed polyline."""
    n = len(points)
    px, py = points.real, points.imag
    qx, qy = np.roll(px, -1), np.roll(py, -1)
    dx, dy = qx - px, qy - py
    hits = []
    for i in range(n - 2):
        lo = i + 2
        hi = n - 1 if i == 0 else n  # wrap-adjacent pair (0, n-1) shares a point
        if lo >= hi:
            continue
        sl = slice(lo, hi)
        # orientation of both endpoints of segment j wrt segment i, and vice versa
        d1 = dx[i] * (py[sl] - py[i]) - dy[i] * (px[sl] - px[i])
        d2 = dx[i] * (qy[sl] - py[i]) - dy[i] * (qx[sl] - px[i])
        d3 = dx[sl] * (py[i] - py[sl]) - dy[sl] * (px[i] - px[sl])
        d4 = dx[sl] * (qy[i] - py[sl]) - dy[sl] * (qx[i] - px[sl])
        cross = (d1 * d2 < 0) & (d3 * d4 < 0)
        for j in np.nonzero(cross)[0]:
            hits.append((i, lo + int(j)))
    return hits


def boundary_perimeter(mapping: ExteriorMap, n: int = 4096) -> float:
    """Perimeter of the boundary curve by polyline approximation."""
    pts = mapping.boundary_point(np.linspace(0.0, 2.0 * np.pi, n + 1))
    return float(np.sum(np.abs(np.diff(pts))))


def random_univalent_map(
    rng: np.random.Generator,
    order: int,
    margin: float = 0.8,
    shift_scale: float = 0.2,
) -> ExteriorMap:
    """Draw a random map satisfying sum_k k |a_k| <= margin < 1.

    That coefficient bound is a standard sufficient condition for
    univalence of w + sum a_k w^{-k} on the disk exterior, so the sample
    is guaranteed admissible.  The last coefficient is kept away from
    zero so the drawn order is tight.
    """
    raw = rng.normal(size=order) + 1j * rng.normal(size=order)
    raw[-1] += (0.3 + 0.3j) * np.sign(raw[-1].real + 1e-9)
    weights = np.arange(1, order + 1)
    total = float(np.sum(weights * np.abs(raw)))
    scale = margin * rng.uniform(0.5, 1.0) / total
    a0 = shift_scale * (rng.normal() + 1j * rng.normal())
    return ExteriorMap((a0, *tuple(raw * scale)))
