"""ADM energy and Komar mass as large-sphere surface integrals.

Both take the metric on the central t = const slice of the 4D grid.
Spatial derivatives use the grid stencils; values are interpolated to the
quadrature spheres with separable Lagrange interpolation (cubic by
default); sums are fixed-order and exactly rounded, so results are
bit-reproducible.

Conventions (documented in docs/conventions.md):

    E(rho_s)  = (1/16 pi) oint (d_j g_ij - d_i g_jj) nhat_i  rho_s^2 dOmega
    M_K(rho_s) = (1/4 pi) oint N^i d_i alpha  sqrt(sigma) dc dphi

with nhat the flat unit normal for ADM; for Komar, alpha = sqrt(-g_tt) is
the static lapse, N the unit normal of the coordinate sphere in the slice
metric, and sigma the induced area element.  The Komar normalization is
pinned so a static spherically symmetric vacuum exterior reports its mass
parameter exactly in the continuum, at every radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import MetricField
from .grid import Grid4, diff_axis
from .symmetry import PoincareElement, killing_residual


class MassDomainError(ValueError):
    """Input metric outside the operator's domain (not flat enough/static)."""


# ---------------------------------------------------------------------------
# Sphere quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SphereQuadrature:
    """Gauss-Legendre x uniform-azimuth product rule on a coordinate sphere.

    Exact for spherical harmonics up to degree min(2 n_theta - 1,
    n_phi - 1); unit weights sum to 4 pi, area weights to 4 pi rho^2.
    """

    radius: float
    n_theta: int = 8
    n_phi: int = 16

    def nodes_and_weights(self):
        c, w = np.polynomial.legendre.leggauss(self.n_theta)
        phi = 2.0 * np.pi * np.arange(self.n_phi) / self.n_phi
        cc, pp = np.meshgrid(c, phi, indexing="ij")
        ww = np.repeat(w[:, None], self.n_phi, axis=1) * (2.0 * np.pi / self.n_phi)
        s = np.sqrt(1.0 - cc ** 2)
        direction = np.stack([s * np.cos(pp), s * np.sin(pp), cc], axis=-1)
        return direction.reshape(-1, 3), cc.reshape(-1), pp.reshape(-1), ww.reshape(-1)

    @property
    def weights(self) -> np.ndarray:
        """Area weights on the sphere of this radius (sum 4 pi rho^2)."""
        return self.nodes_and_weights()[3] * self.radius ** 2

    def points(self) -> np.ndarray:
        return self.radius * self.nodes_and_weights()[0]


def _fsum(values: np.ndarray) -> float:
    return math.fsum(values.ravel().tolist())


# ---------------------------------------------------------------------------
# Slice extraction and interpolation
# ---------------------------------------------------------------------------

def central_slice(g: MetricField) -> np.ndarray:
    """Metric components on the t = 0 slice, shape (4, 4, N, N, N)."""
    return g.data[:, :, (g.grid.points - 1) // 2]


def _lagrange_coefficients(frac: float, order: int):
    """Weights of the points i0..i0+order for unit-spaced samples."""
    nodes = np.arange(order + 1, dtype=float)
    weights = np.ones(order + 1)
    for k in range(order + 1):
        for m in range(order + 1):
            if m != k:
                weights[k] *= (frac - nodes[m]) / (nodes[k] - nodes[m])
    return weights


def interpolate_slice(values: np.ndarray, grid: Grid4, points: np.ndarray,
                      order: int = 3) -> np.ndarray:
    """Separable Lagrange interpolation of slice samples at spatial points.

    ``values`` has shape (..., N, N, N) with components leading; ``points``
    is (n, 3) in box coordinates.  Returns (n, ...).
    """
    n = grid.points
    h = grid.spacing
    coords = (np.asarray(points) + grid.half_width) / h
    base = np.floor(coords).astype(int) - (order - 1) // 2
    base = np.clip(base, 0, n - order - 1)
    frac = coords - base
    out = np.empty((len(points),) + values.shape[:-3])
    for p in range(len(points)):
        wx = _lagrange_coefficients(frac[p, 0], order)
        wy = _lagrange_coefficients(frac[p, 1], order)
        wz = _lagrange_coefficients(frac[p, 2], order)
        block = values[..., base[p, 0]:base[p, 0] + order + 1,
                       base[p, 1]:base[p, 1] + order + 1,
                       base[p, 2]:base[p, 2] + order + 1]
        out[p] = np.einsum("i,j,k,...ijk->...", wx, wy, wz, block)
    return out


def _slice_gradient(values: np.ndarray, h: float) -> np.ndarray:
    """d_i of slice samples, stacked on a new leading axis."""
    return np.stack([diff_axis(values, axis, h) for axis in (-3, -2, -1)])


# ---------------------------------------------------------------------------
# Richardson extrapolation in inverse radius
# ---------------------------------------------------------------------------

def extrapolate_in_radius(radii, values):
    """Least-squares fit a0 + a1/rho + a2/rho^2; returns (a0, slope).

    ``slope`` is the log-log rate of |value - a0| against 1/rho, or None
    when the values are already flat to round-off.
    """
    radii = np.asarray(radii, float)
    values = np.asarray(values, float)
    if len(radii) < 2:
        return float(values[-1]), None
    u = 1.0 / radii
    ncoef = min(3, len(radii))
    vand = np.vander(u, ncoef, increasing=True)
    coef, *_ = np.linalg.lstsq(vand, values, rcond=None)
    a0 = float(coef[0])
    resid = np.abs(values - a0)
    scale = max(1.0, np.abs(values).max())
    if np.all(resid <= 1e-12 * scale):
        return a0, None
    good = resid > 1e-14 * scale
    if good.sum() < 2:
        return a0, None
    slope = np.polyfit(np.log(u[good]), np.log(resid[good]), 1)[0]
    return a0, float(slope)


# ---------------------------------------------------------------------------
# ADM energy
# ---------------------------------------------------------------------------

def adm_energy(g: MetricField, radii, quadrature_order: int = 8,
               interpolation_order: int = 3):
    """Per-radius surface energies and their 1/rho extrapolation.

    The slice must be asymptotically flat in the chart: |g_ij - delta| < 1
    at the largest requested radius.
    """
    grid = g.grid
    radii = sorted(float(r) for r in radii)
    if not radii:
        raise ValueError("need at least one radius")
    if radii[-1] >= grid.half_width - grid.spacing:
        raise ValueError("largest radius too close to the box boundary")
    spatial = central_slice(g)[1:, 1:]
    h = grid.spacing

    quad = SphereQuadrature(radii[-1], quadrature_order, 2 * quadrature_order)
    directions = quad.nodes_and_weights()[0]
    unit_w = quad.nodes_and_weights()[3]

    # flatness check at the largest radius
    probe = interpolate_slice(spatial, grid, radii[-1] * directions,
                              order=interpolation_order)
    deviation = np.abs(probe - np.eye(3)).max()
    if deviation >= 1.0:
        raise MassDomainError(
            f"slice is not asymptotically flat: |g - delta| = {deviation:.3f} "
            f"at rho = {radii[-1]}")

    # V_i = d_j g_ij - d_i g_jj, from grid stencils on the slice
    grads = _slice_gradient(spatial, h)            # [k, i, j] = d_k g_ij
    v = np.einsum("jij...->i...", grads) - np.einsum("ijj...->i...", grads)

    values = []
    for rho in radii:
        samples = interpolate_slice(v, grid, rho * directions,
                                    order=interpolation_order)
        integrand = np.einsum("ni,ni->n", samples, directions)
        values.append(_fsum(integrand * unit_w * rho ** 2) / (16.0 * np.pi))
    extrapolated, slope = extrapolate_in_radius(radii, values)
    return {"radii": radii, "values": values,
            "extrapolated": extrapolated, "slope": slope}


# ---------------------------------------------------------------------------
# Komar mass
# ---------------------------------------------------------------------------

def komar_mass(g: MetricField, radii, stationarity_tol: float = 1e-8,
               quadrature_order: int = 8, interpolation_order: int = 3,
               killing: PoincareElement = None):
    """Komar surface integrals of the static lapse, per radius.

    Precondition: the metric is stationary for the given Killing field
    (default: time translation), checked through the Killing residual.
    """
    grid = g.grid
    radii = sorted(float(r) for r in radii)
    if radii[-1] >= grid.half_width - grid.spacing:
        raise ValueError("largest radius too close to the box boundary")
    killing = killing or PoincareElement.from_name("P0")
    _, kr_norm = killing_residual(g, killing, r=min(radii), mode="spatial")
    scale = float(np.abs(g.data).max())
    if kr_norm > stationarity_tol * max(1.0, scale):
        raise MassDomainError(
            f"metric is not stationary: Killing residual {kr_norm:.3e}")

    full = central_slice(g)
    g_tt = full[0, 0]
    if np.any(g_tt >= 0.0):
        raise MassDomainError("slice has non-timelike Killing direction")
    lapse = np.sqrt(-g_tt)
    spatial = full[1:, 1:]
    h = grid.spacing
    dlapse = _slice_gradient(lapse, h)

    quad = SphereQuadrature(radii[-1], quadrature_order, 2 * quadrature_order)
    directions, cosines, phis, unit_w = quad.nodes_and_weights()

    values = []
    for rho in radii:
        pts = rho * directions
        gamma = interpolate_slice(spatial, grid, pts,
                                  order=interpolation_order)
        grad_a = interpolate_slice(dlapse, grid, pts,
                                   order=interpolation_order)
        gamma_inv = np.linalg.inv(gamma)
        raised = np.einsum("nij,nj->ni", gamma_inv, directions)
        length = np.sqrt(np.einsum("ni,ni->n", raised, directions))
        normal = raised / length[:, None]
        # embedding tangents in (c, phi); d/dc of (s cosp, s sinp, c) uses
        # ds/dc = -c/s (Gauss nodes are interior, s > 0)
        s = np.sqrt(1.0 - cosines ** 2)
        t_c = np.stack([-cosines / s * np.cos(phis),
                        -cosines / s * np.sin(phis),
                        np.ones_like(s)], axis=-1) * rho
        t_p = np.stack([-np.sin(phis) * s, np.cos(phis) * s,
                        np.zeros_like(s)], axis=-1) * rho
        e_cc = np.einsum("nij,ni,nj->n", gamma, t_c, t_c)
        e_cp = np.einsum("nij,ni,nj->n", gamma, t_c, t_p)
        e_pp = np.einsum("nij,ni,nj->n", gamma, t_p, t_p)
        area = np.sqrt(np.clip(e_cc * e_pp - e_cp ** 2, 0.0, None))
        integrand = np.einsum("ni,ni->n", normal, grad_a) * area
        values.append(_fsum(integrand * unit_w) / (4.0 * np.pi))
    extrapolated, slope = extrapolate_in_radius(radii, values)
    return {"radii": radii, "values": values,
            "extrapolated": extrapolated, "slope": slope}


# ---------------------------------------------------------------------------
# Positivity
# ---------------------------------------------------------------------------

def positivity_check(energy: float, momentum) -> dict:
    """E >= |P| verdict with the rest mass sqrt(E^2 - |P|^2)."""
    p = float(np.linalg.norm(np.asarray(momentum, dtype=float)))
    ok = energy >= p
    result = {"energy": float(energy), "momentum_norm": p, "passed": bool(ok)}
    if ok:
        result["mass"] = math.sqrt(max(energy ** 2 - p ** 2, 0.0))
        if result["mass"] == 0.0:
            result["note"] = ("mass is zero: consistent only with flat space "
                              "(rigidity case; reported, not proven)")
    else:
        result["message"] = ("E >= |P| fails; the positive-energy bound "
                             "assumes the dominant energy condition, which "
                             "this data cannot satisfy")
    return result
