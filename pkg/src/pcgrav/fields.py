"""Vector-valued differential forms on a 4D grid.

A :class:`FormField` is a spacetime p-form (p = 0..4) taking values in an
internal antisymmetric power Lambda^k V of the 4-dim reference space V
(k = 0 is a scalar, k = 1 is V itself, k = 2 carries the so(3,1) bracket).
Components are stored component-major, on strictly increasing multi-indices
for both the spacetime and the internal slots:

    data[S, I, t, x, y, z]   S over LAMBDA_BASES[p], I over LAMBDA_BASES[k]

so each component is a contiguous node array and the bilinear products
below are fixed-order contiguous multiply-adds (deterministic output,
independent of threading).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .conventions import (ETA_DIAG, LAMBDA_BASES, RHO_ON_LAMBDA,
                          SO31_STRUCTURE, perm_sign)
from .grid import Grid4, diff_axis, integrate_samples, region_max

INTERNAL_DIMS = {0: 1, 1: 4, 2: 6, 3: 4, 4: 1}
INTERNAL_TAGS = {0: "scalar", 1: "V", 2: "Lambda2V", 3: "Lambda3V", 4: "Lambda4V"}
_INDEX = {k: {mi: n for n, mi in enumerate(LAMBDA_BASES[k])} for k in LAMBDA_BASES}


class FormFieldError(ValueError):
    pass


class DegenerateTetradError(FormFieldError):
    pass


@dataclass(frozen=True)
class FormField:
    grid: Grid4
    degree: int
    internal: int
    data: np.ndarray

    def __post_init__(self):
        expected = (len(LAMBDA_BASES[self.degree]),
                    INTERNAL_DIMS[self.internal]) + self.grid.shape
        if self.data.shape != expected:
            raise FormFieldError(
                f"component array has shape {self.data.shape}, "
                f"expected {expected}")
        self.data.setflags(write=False)

    @property
    def internal_tag(self) -> str:
        return INTERNAL_TAGS[self.internal]

    def component(self, st_index=(), internal_index=()) -> np.ndarray:
        """Named component on the grid, e.g. component((0, 1), (2, 3))."""
        s = _INDEX[self.degree][tuple(st_index)]
        i = _INDEX[self.internal][tuple(internal_index)]
        return self.data[s, i]

    def _like(self, data) -> "FormField":
        return FormField(self.grid, self.degree, self.internal, data)

    def __add__(self, other):
        self._check_like(other)
        return self._like(self.data + other.data)

    def __sub__(self, other):
        self._check_like(other)
        return self._like(self.data - other.data)

    def __mul__(self, scalar):
        return self._like(self.data * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return self._like(-self.data)

    def _check_like(self, other):
        if (self.grid != other.grid or self.degree != other.degree
                or self.internal != other.internal):
            raise FormFieldError("fields live in different spaces")

    def max_abs(self) -> float:
        return float(np.abs(self.data).max())

    def region_norm(self, r=None, mode="4d", layers=2) -> float:
        """Max |component| outside the excluded ball, away from box faces."""
        return region_max(self.data, self.grid, r, mode, layers)


def zeros(grid: Grid4, degree: int, internal: int) -> FormField:
    shape = (len(LAMBDA_BASES[degree]), INTERNAL_DIMS[internal]) + grid.shape
    return FormField(grid, degree, internal, np.zeros(shape))


def scalar_form(grid: Grid4, degree: int, components: dict) -> FormField:
    """Scalar-valued p-form from {increasing multi-index: node samples}."""
    out = np.zeros((len(LAMBDA_BASES[degree]), 1) + grid.shape)
    for mi, samples in components.items():
        out[_INDEX[degree][tuple(mi)], 0] = samples
    return FormField(grid, degree, 0, out)


# ---------------------------------------------------------------------------
# Merge tables and the product planner
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def merge_table(p: int, q: int):
    """Sparse wedge table [(i, j, k, sign)] on increasing multi-indices."""
    entries = []
    for i, left in enumerate(LAMBDA_BASES[p]):
        for j, right in enumerate(LAMBDA_BASES[q]):
            sign = perm_sign(left + right)
            if sign == 0:
                continue
            k = _INDEX[p + q][tuple(sorted(left + right))]
            entries.append((i, j, k, sign))
    return tuple(entries)


@lru_cache(maxsize=None)
def _internal_entries(ka: int, kb: int, rule: str):
    """Sparse entries [(u, v, m, coeff)] of the internal pairing."""
    if rule == "wedge":
        if ka + kb > 4:
            raise FormFieldError(
                f"internal wedge Lambda^{ka} x Lambda^{kb} overflows Lambda^4")
        return merge_table(ka, kb), ka + kb
    if rule == "bracket":
        if ka != 2 or kb != 2:
            raise FormFieldError("bracket rule needs Lambda^2 on both sides")
        entries = [(u, v, m, int(c))
                   for (u, v, m), c in np.ndenumerate(SO31_STRUCTURE)
                   if c != 0]
        return tuple(entries), 2
    if rule == "action":
        if ka != 2 or kb not in (1, 2, 3, 4):
            raise FormFieldError("action rule needs Lambda^2 acting on Lambda^k")
        rho = RHO_ON_LAMBDA[kb]
        entries = [(u, v, m, int(c))
                   for (u, v, m), c in np.ndenumerate(rho)
                   if c != 0]
        return tuple(entries), kb
    raise FormFieldError(f"unknown internal rule {rule!r}")


@lru_cache(maxsize=None)
def _wedge_plan(pa: int, ka: int, pb: int, kb: int, rule: str):
    """Scalar terms grouped by input component pair.

    Each entry reads one product a[ia, ua] * b[ib, ub] and scatters it into
    the listed output components with fixed coefficients.
    """
    internal, k_out = _internal_entries(ka, kb, rule)
    groups = {}
    for i, j, k, s in merge_table(pa, pb):
        for u, v, m, c in internal:
            groups.setdefault((i, u, j, v), []).append((k, m, float(s * c)))
    plan = tuple((i, u, j, v, tuple(outs))
                 for (i, u, j, v), outs in groups.items())
    return k_out, plan


def wedge(a: FormField, b: FormField, rule: str = "wedge") -> FormField:
    """Graded wedge on spacetime indices with the named internal pairing.

    rule="wedge": internal exterior product (scalars multiply through);
    rule="bracket": so(3,1) commutator, both internals Lambda^2;
    rule="action": so(3,1) representation of the first factor's Lambda^2
    values on the second factor's internal space.
    """
    if a.grid != b.grid:
        raise FormFieldError("fields on different grids")
    if a.degree + b.degree > 4:
        raise FormFieldError("spacetime degree overflow")
    k_out, plan = _wedge_plan(a.degree, a.internal, b.degree, b.internal, rule)
    p_out = a.degree + b.degree
    nodes = a.grid.points ** 4
    at = a.data.reshape(a.data.shape[:2] + (nodes,))
    bt = b.data.reshape(b.data.shape[:2] + (nodes,))
    # all-zero components contribute exact zeros: skip their products
    a_live = np.any(at != 0.0, axis=-1)
    b_live = np.any(bt != 0.0, axis=-1)
    out = np.zeros((len(LAMBDA_BASES[p_out]), INTERNAL_DIMS[k_out], nodes))
    prod = np.empty(nodes)
    for i, u, j, v, outs in plan:
        if not (a_live[i, u] and b_live[j, v]):
            continue
        np.multiply(at[i, u], bt[j, v], out=prod)
        for k, m, c in outs:
            if c == 1.0:
                out[k, m] += prod
            elif c == -1.0:
                out[k, m] -= prod
            else:
                out[k, m] += c * prod
    return FormField(a.grid, p_out, k_out,
                     out.reshape(out.shape[:2] + a.grid.shape))


def form_dgla_bracket(a: FormField, b: FormField) -> FormField:
    """Forms-dgla bracket: spacetime wedge with the so(3,1) commutator."""
    if a.internal != 2 or b.internal != 2:
        raise FormFieldError("forms-dgla bracket needs Lambda^2 values")
    return wedge(a, b, rule="bracket")


def ext_d(a: FormField) -> FormField:
    """Finite-difference exterior derivative (4th order interior stencils)."""
    if a.degree >= 4:
        raise FormFieldError("cannot raise degree above 4")
    p, h = a.degree, a.grid.spacing
    targets = LAMBDA_BASES[p + 1]
    out = np.zeros((len(targets), INTERNAL_DIMS[a.internal]) + a.grid.shape)
    for t, target in enumerate(targets):
        acc = out[t]
        for m, mu in enumerate(target):
            source = target[:m] + target[m + 1:]
            term = diff_axis(a.data[_INDEX[p][source]], 1 + mu, h)
            if m % 2:
                acc -= term
            else:
                acc += term
    return FormField(a.grid, p + 1, a.internal, out)


def cov_d(omega: FormField, a: FormField) -> FormField:
    """Covariant differential d a + rho(omega) ^ a for V or Lambda^2 values."""
    if omega.degree != 1 or omega.internal != 2:
        raise FormFieldError("connection must be a Lambda^2-valued 1-form")
    if a.internal not in (1, 2):
        raise FormFieldError(
            f"covariant differential not defined on {a.internal_tag}")
    return ext_d(a) + wedge(omega, a, rule="action")


def curvature(omega: FormField) -> FormField:
    """F = d omega + (1/2)[omega, omega]."""
    return ext_d(omega) + 0.5 * form_dgla_bracket(omega, omega)


def trace4(a: FormField) -> FormField:
    """Contract Lambda^4 values with eps (eps_0123 = +1, no raising)."""
    if a.degree != 4 or a.internal != 4:
        raise FormFieldError("trace needs a Lambda^4-valued 4-form")
    return FormField(a.grid, 4, 0, a.data)


def integrate(a: FormField, region: np.ndarray = None) -> float:
    """Quadrature of a scalar 4-form's single component over the box."""
    if a.degree != 4 or a.internal != 0:
        raise FormFieldError("integrate needs a scalar-valued 4-form")
    return integrate_samples(a.data[0, 0], a.grid, region)


# ---------------------------------------------------------------------------
# Tetrads, metrics, connections
# ---------------------------------------------------------------------------

DEGENERACY_THRESHOLD = 1e-8


@dataclass(frozen=True)
class MetricField:
    grid: Grid4
    data: np.ndarray  # (4, 4) + grid.shape, symmetric in the leading axes

    def __post_init__(self):
        if self.data.shape != (4, 4) + self.grid.shape:
            raise FormFieldError("metric components must be (4, 4, grid)")
        self.data.setflags(write=False)


def tetrad_field(grid: Grid4, data: np.ndarray) -> FormField:
    """V-valued 1-form e^a_mu = data[mu, a], checked nondegenerate."""
    e = FormField(grid, 1, 1, data)
    check_nondegenerate(e)
    return e


def tetrad_determinants(e: FormField) -> np.ndarray:
    return np.linalg.det(np.moveaxis(e.data, (0, 1), (-2, -1)))


def check_nondegenerate(e: FormField) -> None:
    dets = np.abs(tetrad_determinants(e))
    bad = dets <= DEGENERACY_THRESHOLD
    if bad.any():
        node = np.unravel_index(np.argmax(bad), e.grid.shape)
        coords = [float(e.grid.axis_coordinates()[i]) for i in node]
        raise DegenerateTetradError(
            f"tetrad degenerate at node {tuple(int(i) for i in node)} "
            f"(x = {coords}, |det| = {dets[node]:.3e})")


def inverse_tetrad(e: FormField) -> np.ndarray:
    """einv[a, mu] on the grid, with e^a_mu einv[a, nu] = delta^nu_mu."""
    check_nondegenerate(e)
    inv = np.linalg.inv(np.moveaxis(e.data, (0, 1), (-2, -1)))
    return np.moveaxis(inv, (-2, -1), (0, 1))


def metric_from_tetrad(e: FormField) -> MetricField:
    """g_mn = eta_ab e^a_m e^b_n."""
    check_nondegenerate(e)
    eta = np.asarray(ETA_DIAG, dtype=float)[None, :, None, None, None, None]
    g = np.einsum("ma...,na...->mn...", e.data * eta, e.data)
    return MetricField(e.grid, g)


def lorentzian_signature_ok(g: MetricField) -> bool:
    """Exactly one negative eigenvalue at every node."""
    eigs = np.linalg.eigvalsh(np.moveaxis(g.data, (0, 1), (-2, -1)))
    return bool(((eigs < 0).sum(axis=-1) == 1).all())


def levi_civita_connection(e: FormField) -> FormField:
    """The unique metric connection with vanishing covariant torsion.

    Built from the anholonomy of the (finite-difference) exterior derivative
    of e, so cov_d(omega, e) vanishes to round-off by construction when the
    same stencils are used.
    """
    grid = e.grid
    einv = inverse_tetrad(e)          # einv[a, mu] = E^mu_a
    de = ext_d(e)                     # A^h_(mu nu) on increasing pairs

    # frame-index anholonomy on pairs: A^h_ab = E^mu_a E^nu_b (de)^h_mu_nu,
    # with the internal index lowered on the fly: A_{h,(ab)}
    pairs = LAMBDA_BASES[2]
    lowered = np.zeros((6, 4) + grid.shape)
    for t, (aa, bb) in enumerate(pairs):
        for s, (mu, nu) in enumerate(pairs):
            pp = (einv[aa, mu] * einv[bb, nu] - einv[bb, mu] * einv[aa, nu])
            for hh in range(4):
                lowered[t, hh] += ETA_DIAG[hh] * pp * de.data[s, hh]
    del de, einv

    def a_term(internal, j, k):
        if j == k:
            return 0.0
        if j < k:
            return lowered[_INDEX[2][(j, k)], internal]
        return -lowered[_INDEX[2][(k, j)], internal]

    # W_afb = (A_abf - A_fab - A_bfa)/2, then
    # omega^{fb}_mu = e^a_mu eta^f eta^b W_afb
    omega = np.zeros((4, 6) + grid.shape)
    for t, (f, b) in enumerate(pairs):
        sign = ETA_DIAG[f] * ETA_DIAG[b]
        for a in range(4):
            w = 0.5 * (a_term(a, b, f) - a_term(f, a, b) - a_term(b, f, a))
            for mu in range(4):
                omega[mu, t] += sign * e.data[mu, a] * w
    return FormField(grid, 1, 2, omega)


# ---------------------------------------------------------------------------
# Snapshot io (flat binary with header, documented in docs/conventions.md)
# ---------------------------------------------------------------------------

def save_field(path, a: FormField) -> None:
    np.savez(path, data=a.data, half_width=a.grid.half_width,
             points=a.grid.points, inner_radius=a.grid.inner_radius,
             degree=a.degree, internal=a.internal,
             component_order="C: (spacetime multi-index, internal, t, x, y, z)")


def load_field(path) -> FormField:
    with np.load(path) as f:
        grid = Grid4(float(f["half_width"]), int(f["points"]),
                     float(f["inner_radius"]))
        return FormField(grid, int(f["degree"]), int(f["internal"]),
                         f["data"].copy())
