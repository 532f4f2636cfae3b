"""Reference geometries sampled on the grid.

``minkowski_tetrad`` is the identity coframe.  ``SchwarzschildIsotropic``
is the static spherically symmetric vacuum exterior in isotropic
coordinates,

    e^0 = A(rho) dt,   e^i = B(rho) dx^i,
    A = (1 - M/2rho)/(1 + M/2rho),   B = (1 + M/2rho)^2,

which is singular on the spatial axis rho -> 0.  Since grid stencils read
every node, the log-profiles ln A, ln B are continued inside a core radius
rho_c by even polynomials in rho (degree 8), matched to 4th order at the
junction.  The continued fields are smooth on the whole box, positive
(hence nondegenerate), still static and exactly spherically symmetric, and
*identical* to Schwarzschild for rho >= rho_c; the closed-form Levi-Civita
connection below is the connection of the continued tetrad everywhere, so
its covariant torsion vanishes identically in the continuum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .conventions import PAIR_INDEX
from .fields import FormField, MetricField, tetrad_field
from .grid import Grid4

_ORDER = 5  # truncated series length (value + 4 derivatives)


def _series_mul(a, b):
    out = [0.0] * _ORDER
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            if i + j < _ORDER:
                out[i + j] += ai * bj
    return out


def _series_recip(u):
    v = [0.0] * _ORDER
    v[0] = 1.0 / u[0]
    for n in range(1, _ORDER):
        v[n] = -sum(u[k] * v[n - k] for k in range(1, n + 1)) * v[0]
    return v


def _series_log(u):
    """log of a series with u[0] > 0 (via l' = u'/u, then integrate)."""
    du = [(k + 1) * u[k + 1] for k in range(_ORDER - 1)] + [0.0]
    dl = _series_mul(du, _series_recip(u))
    out = [math.log(u[0])]
    out += [dl[n - 1] / n for n in range(1, _ORDER)]
    return out


def minkowski_tetrad(grid: Grid4) -> FormField:
    data = np.zeros((4, 4) + grid.shape)
    for mu in range(4):
        data[mu, mu] = 1.0
    return tetrad_field(grid, data)


def minkowski_metric(grid: Grid4) -> MetricField:
    data = np.zeros((4, 4) + grid.shape)
    data[0, 0] = -1.0
    for i in range(1, 4):
        data[i, i] = 1.0
    return MetricField(grid, data)


@lru_cache(maxsize=16)
def _core_coefficients(mass: float, core_radius: float):
    """Even-polynomial continuations of (ln A, ln B) inside the core.

    Returns two length-5 arrays a with  ln P(rho) = sum_k a[k] rho^{2k},
    matched to the exact log-profiles at rho_c through 4 derivatives.
    """
    rc = core_radius
    mc = mass / (2.0 * rc)
    # series of m(rc + t) = mc * sum (-t/rc)^k
    m = [mc * (-1.0 / rc) ** k for k in range(_ORDER)]
    one_minus = [1.0 - m[0]] + [-x for x in m[1:]]
    one_plus = [1.0 + m[0]] + list(m[1:])
    log_a = [x - y for x, y in zip(_series_log(one_minus),
                                   _series_log(one_plus))]
    log_b = [2.0 * x for x in _series_log(one_plus)]

    rows = np.zeros((_ORDER, _ORDER))
    for j in range(_ORDER):           # derivative order
        for k in range(_ORDER):       # coefficient of rho^(2k)
            p = 2 * k
            if p >= j:
                fall = 1.0
                for step in range(j):
                    fall *= p - step
                rows[j, k] = fall * rc ** (p - j)
    rhs_a = np.array([math.factorial(j) * log_a[j] for j in range(_ORDER)])
    rhs_b = np.array([math.factorial(j) * log_b[j] for j in range(_ORDER)])
    coeff_a = np.linalg.solve(rows, rhs_a)
    coeff_b = np.linalg.solve(rows, rhs_b)
    return coeff_a, coeff_b


@dataclass(frozen=True)
class SchwarzschildIsotropic:
    """Blended isotropic chart; exact Schwarzschild for rho >= core_radius."""

    mass: float
    core_radius: float = None

    def __post_init__(self):
        if self.core_radius is None:
            object.__setattr__(self, "core_radius",
                               2.0 * self.mass if self.mass > 0 else 1.0)
        if self.core_radius <= 0.55 * self.mass:
            raise ValueError("core radius must clear the coordinate horizon")

    def profiles(self, rho: np.ndarray):
        """A, B and the smooth radial ratios dA/rho, dB/rho.

        The returned derivatives are (dA/drho)/rho and (dB/drho)/rho, which
        stay finite on the axis (the connection only needs these ratios).
        """
        rho = np.asarray(rho, dtype=float)
        rc = self.core_radius
        outside = rho >= rc
        rho_safe = np.where(outside, rho, rc)
        m = self.mass / (2.0 * rho_safe)
        a_out = (1.0 - m) / (1.0 + m)
        b_out = (1.0 + m) ** 2
        da_out = self.mass / (rho_safe ** 2 * (1.0 + m) ** 2)
        db_out = -self.mass * (1.0 + m) / rho_safe ** 2

        ca, cb = _core_coefficients(self.mass, rc)
        r2 = np.where(outside, 0.0, rho) ** 2
        pa = sum(c * r2 ** k for k, c in enumerate(ca))
        pb = sum(c * r2 ** k for k, c in enumerate(cb))
        # d/drho of sum c_k rho^(2k), divided by rho: even polynomial again
        dpa = sum(2 * k * c * r2 ** (k - 1) for k, c in enumerate(ca) if k)
        dpb = sum(2 * k * c * r2 ** (k - 1) for k, c in enumerate(cb) if k)
        a_in = np.exp(pa)
        b_in = np.exp(pb)

        a = np.where(outside, a_out, a_in)
        b = np.where(outside, b_out, b_in)
        da_over_rho = np.where(outside, da_out / rho_safe, a_in * dpa)
        db_over_rho = np.where(outside, db_out / rho_safe, b_in * dpb)
        return a, b, da_over_rho, db_over_rho

    def _grid_profiles(self, grid: Grid4):
        rho = grid.radius("spatial")
        return (rho,) + self.profiles(rho)

    def tetrad(self, grid: Grid4) -> FormField:
        rho, a, b, _, _ = self._grid_profiles(grid)
        data = np.zeros((4, 4) + grid.shape)
        data[0, 0] = a
        for i in range(1, 4):
            data[i, i] = b
        return tetrad_field(grid, data)

    def connection(self, grid: Grid4) -> FormField:
        """Closed-form Levi-Civita spin connection of the (blended) tetrad.

        omega^{0i} = (A'/B) n_i dt,  omega^{ij} = (B'/B)(n_j dx^i - n_i dx^j).
        """
        rho, a, b, da_r, db_r = self._grid_profiles(grid)
        data = np.zeros((4, 6) + grid.shape)
        for i in range(1, 4):
            xi = grid.coordinate(i)
            data[0, PAIR_INDEX[(0, i)]] = (da_r / b) * xi
        ratio = db_r / b
        for i in range(1, 4):
            for j in range(i + 1, 4):
                xi, xj = grid.coordinate(i), grid.coordinate(j)
                p = PAIR_INDEX[(i, j)]
                data[i, p] += ratio * xj   # omega^{ij}_i = (B'/B) n_j
                data[j, p] -= ratio * xi   # omega^{ij}_j = -(B'/B) n_i
        return FormField(grid, 1, 2, data)

    def metric(self, grid: Grid4) -> MetricField:
        rho, a, b, _, _ = self._grid_profiles(grid)
        data = np.zeros((4, 4) + grid.shape)
        data[0, 0] = -a ** 2
        for i in range(1, 4):
            data[i, i] = b ** 2
        return MetricField(grid, data)

    def areal_radius(self, rho):
        return rho * (1.0 + self.mass / (2.0 * np.asarray(rho, float))) ** 2

    def kretschmann(self, rho):
        """Curvature-squared invariant profile, valid for rho >= core_radius."""
        return 48.0 * self.mass ** 2 / self.areal_radius(rho) ** 6

    def adm_integrand_energy(self, rho):
        """Exact value of the large-sphere energy integral at finite radius."""
        return self.mass * (1.0 + self.mass / (2.0 * np.asarray(rho, float))) ** 3
