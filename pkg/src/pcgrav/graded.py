"""Differential graded Lie algebras over exact rationals.

Algebras are presented by a graded basis and structure constants, so every
axiom (grading, antisymmetry, Jacobi, d^2 = 0, Leibniz) is checkable by a
finite exact loop -- no tolerances anywhere in this module.

Brackets are stored sparsely: ``brackets[(i, j)] = {k: c}`` means
``[b_i, b_j] = sum_k c b_k``.  Linear maps (differentials, morphisms,
action endomorphisms) use the row convention ``f(b_i) = sum_k M[i][k] b_k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import exact
from .exact import ZERO


class StructureError(ValueError):
    """A constructed object violates its structural contract."""


# ---------------------------------------------------------------------------
# Core types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GradedBasis:
    labels: tuple
    degrees: tuple

    def __post_init__(self):
        if len(self.labels) != len(self.degrees):
            raise StructureError("labels and degrees must have equal length")
        if len(set(self.labels)) != len(self.labels):
            raise StructureError("basis labels must be unique")

    def __len__(self):
        return len(self.labels)

    def index(self, label) -> int:
        return self.labels.index(label)


def _normalize_sparse(table):
    """Drop explicit zeros; coerce values to Fraction."""
    out = {}
    for key, row in table.items():
        row = {k: Fraction(v) for k, v in row.items() if Fraction(v) != 0}
        if row:
            out[key] = row
    return out


@dataclass(frozen=True)
class GradedLieAlgebra:
    """Graded Lie algebra given by structure constants (not yet verified)."""

    basis: GradedBasis
    brackets: dict = field(default_factory=dict)  # (i, j) -> {k: Fraction}

    def __post_init__(self):
        object.__setattr__(self, "brackets", _normalize_sparse(self.brackets))

    @property
    def dim(self):
        return len(self.basis)

    def degree(self, i: int) -> int:
        return self.basis.degrees[i]

    def bracket_basis(self, i: int, j: int) -> dict:
        return self.brackets.get((i, j), {})

    def structure_constant(self, i: int, j: int, k: int) -> Fraction:
        return self.bracket_basis(i, j).get(k, ZERO)

    def bracket_eval(self, x, y) -> list:
        """[x, y] for coefficient vectors x, y in this basis (exact)."""
        if len(x) != self.dim or len(y) != self.dim:
            raise ValueError(
                f"coefficient vectors must have length {self.dim}, "
                f"got {len(x)} and {len(y)}"
            )
        x = [Fraction(v) for v in x]
        y = [Fraction(v) for v in y]
        out = [ZERO] * self.dim
        for (i, j), row in self.brackets.items():
            c = x[i] * y[j]
            if c == 0:
                continue
            for k, v in row.items():
                out[k] += c * v
        return out


@dataclass(frozen=True)
class Differential:
    """Degree +1 linear map, rows over the algebra basis."""

    rows: dict = field(default_factory=dict)  # i -> {k: Fraction}

    def __post_init__(self):
        object.__setattr__(self, "rows", _normalize_sparse(self.rows))

    def of_basis(self, i: int) -> dict:
        return self.rows.get(i, {})

    def apply(self, vec) -> list:
        out = [ZERO] * len(vec)
        for i, c in enumerate(vec):
            c = Fraction(c)
            if c == 0:
                continue
            for k, v in self.of_basis(i).items():
                out[k] += c * v
        return out


@dataclass(frozen=True)
class Dgla:
    algebra: GradedLieAlgebra
    differential: Differential = field(default_factory=Differential)

    @property
    def basis(self):
        return self.algebra.basis

    @property
    def dim(self):
        return self.algebra.dim


@dataclass(frozen=True)
class DglaMorphism:
    """Strict map of dglas: degree 0, commutes with d, preserves brackets."""

    source: Dgla
    target: Dgla
    matrix: list  # dense rows: source basis -> target coefficients

    def apply(self, vec) -> list:
        out = [ZERO] * self.target.dim
        for i, c in enumerate(vec):
            c = Fraction(c)
            if c == 0:
                continue
            for k, v in enumerate(self.matrix[i]):
                if v != 0:
                    out[k] += c * v
        return out


# ---------------------------------------------------------------------------
# Axiom checking
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple
    detail: str

    def __str__(self):
        return f"{self.axiom} at {self.witness}: {self.detail}"


@dataclass(frozen=True)
class AxiomReport:
    subject: str
    violations: tuple

    @property
    def passed(self) -> bool:
        return not self.violations

    def __str__(self):
        if self.passed:
            return f"{self.subject}: pass"
        lines = [f"{self.subject}: {len(self.violations)} violation(s)"]
        lines += [f"  - {v}" for v in self.violations]
        return "\n".join(lines)


def _sign(n: int) -> int:
    return -1 if n % 2 else 1


def _vec_sub(a: list, b: list) -> list:
    return [x - y for x, y in zip(a, b)]


def _basis_vec(dim: int, i: int, coeff=Fraction(1)) -> list:
    v = [ZERO] * dim
    v[i] = Fraction(coeff)
    return v


def check_graded_lie(a: GradedLieAlgebra, out: Optional[list] = None) -> list:
    """Violations of bracket degree, graded antisymmetry, graded Jacobi."""
    violations = out if out is not None else []
    labels = a.basis.labels
    deg = a.basis.degrees
    dim = a.dim

    for (i, j), row in sorted(a.brackets.items()):
        for k, c in sorted(row.items()):
            if deg[k] != deg[i] + deg[j]:
                violations.append(Violation(
                    "bracket-degree", (labels[i], labels[j]),
                    f"coefficient {exact.format_rational(c)} on {labels[k]} "
                    f"(degree {deg[k]} != {deg[i]} + {deg[j]})"))

    antisym_ok = True
    for i in range(dim):
        for j in range(i, dim):
            lhs = a.bracket_basis(i, j)
            rhs = a.bracket_basis(j, i)
            s = _sign(deg[i] * deg[j])
            keys = set(lhs) | set(rhs)
            bad = [k for k in keys
                   if rhs.get(k, ZERO) != -s * lhs.get(k, ZERO)]
            if bad:
                antisym_ok = False
                k = min(bad)
                violations.append(Violation(
                    "antisymmetry", (labels[i], labels[j]),
                    f"[{labels[j]},{labels[i]}] != "
                    f"{'-' if s > 0 else '+'}[{labels[i]},{labels[j]}] "
                    f"on {labels[k]}"))

    # With antisymmetry verified, Jacobi over ordered triples covers all
    # orderings; without it, scan everything so a witness is still found.
    if antisym_ok:
        triples = ((i, j, k) for i in range(dim)
                   for j in range(i, dim) for k in range(j, dim))
    else:
        triples = ((i, j, k) for i in range(dim)
                   for j in range(dim) for k in range(dim))
    for i, j, k in triples:
        # [b_i,[b_j,b_k]] - [[b_i,b_j],b_k] - (-1)^{|i||j|} [b_j,[b_i,b_k]]
        acc = [ZERO] * dim
        for m, c in a.bracket_basis(j, k).items():
            for n, v in a.bracket_basis(i, m).items():
                acc[n] += c * v
        for m, c in a.bracket_basis(i, j).items():
            for n, v in a.bracket_basis(m, k).items():
                acc[n] -= c * v
        s = _sign(deg[i] * deg[j])
        for m, c in a.bracket_basis(i, k).items():
            for n, v in a.bracket_basis(j, m).items():
                acc[n] -= s * c * v
        if any(x != 0 for x in acc):
            violations.append(Violation(
                "jacobi", (labels[i], labels[j], labels[k]),
                "graded Jacobi identity fails"))
    return violations


def check_dgla(d: Dgla) -> AxiomReport:
    """Exact axiom report: degree, antisymmetry, Jacobi, d-degree, d^2, Leibniz."""
    violations = []
    a = d.algebra
    labels = a.basis.labels
    deg = a.basis.degrees
    dim = a.dim
    check_graded_lie(a, violations)

    for i, row in sorted(d.differential.rows.items()):
        for k, c in sorted(row.items()):
            if deg[k] != deg[i] + 1:
                violations.append(Violation(
                    "differential-degree", (labels[i],),
                    f"coefficient {exact.format_rational(c)} on {labels[k]} "
                    f"(degree {deg[k]} != {deg[i]} + 1)"))

    for i in range(dim):
        dd = d.differential.apply(d.differential.apply(_basis_vec(dim, i)))
        if any(x != 0 for x in dd):
            violations.append(Violation(
                "d-squared", (labels[i],), "d(d(b)) != 0"))

    for i in range(dim):
        for j in range(dim):
            lhs = d.differential.apply(
                a.bracket_eval(_basis_vec(dim, i), _basis_vec(dim, j)))
            rhs = a.bracket_eval(d.differential.apply(_basis_vec(dim, i)),
                                 _basis_vec(dim, j))
            term = a.bracket_eval(_basis_vec(dim, i),
                                  d.differential.apply(_basis_vec(dim, j)))
            s = _sign(deg[i])
            rhs = [x + s * y for x, y in zip(rhs, term)]
            if lhs != rhs:
                violations.append(Violation(
                    "leibniz", (labels[i], labels[j]),
                    "d[x,y] != [dx,y] + (-1)^|x| [x,dy]"))
    return AxiomReport("dgla axioms", tuple(violations))


def check_morphism(phi: DglaMorphism) -> list:
    """Violations of the strict-morphism conditions for ``phi``."""
    violations = []
    src, tgt = phi.source, phi.target
    slab = src.basis.labels

    for i in range(src.dim):
        for k, c in enumerate(phi.matrix[i]):
            if c != 0 and tgt.basis.degrees[k] != src.basis.degrees[i]:
                violations.append(Violation(
                    "morphism-degree", (slab[i],),
                    f"image hits {tgt.basis.labels[k]} of different degree"))

    for i in range(src.dim):
        via_src = phi.apply(src.differential.apply(_basis_vec(src.dim, i)))
        via_tgt = tgt.differential.apply(phi.apply(_basis_vec(src.dim, i)))
        if via_src != via_tgt:
            violations.append(Violation(
                "morphism-differential", (slab[i],),
                "phi(d x) != d phi(x)"))

    for i in range(src.dim):
        for j in range(src.dim):
            lhs = phi.apply(src.algebra.bracket_eval(
                _basis_vec(src.dim, i), _basis_vec(src.dim, j)))
            rhs = tgt.algebra.bracket_eval(
                phi.apply(_basis_vec(src.dim, i)),
                phi.apply(_basis_vec(src.dim, j)))
            if lhs != rhs:
                violations.append(Violation(
                    "morphism-bracket", (slab[i], slab[j]),
                    "phi[x,y] != [phi x, phi y]"))
    return violations


# ---------------------------------------------------------------------------
# Actions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ActionMap:
    """alpha: g -> End(h), one endomorphism matrix per g basis element.

    ``matrices[i]`` is the row-convention matrix of alpha(b_i) on h, of
    degree deg(b_i).  Validity (Lie map into the endomorphism dgla, acting
    by graded derivations, compatible with both differentials) is checked
    by :func:`check_action_map`.
    """

    actor: Dgla
    module: Dgla
    matrices: tuple  # one dense matrix per actor basis element

    def matrix(self, i: int) -> list:
        return self.matrices[i]

    def apply(self, i: int, vec) -> list:
        out = [ZERO] * self.module.dim
        for j, c in enumerate(vec):
            c = Fraction(c)
            if c == 0:
                continue
            for k, v in enumerate(self.matrices[i][j]):
                if v != 0:
                    out[k] += c * v
        return out

    def __eq__(self, other):
        return (isinstance(other, ActionMap)
                and self.actor.basis == other.actor.basis
                and self.module.basis == other.module.basis
                and all(exact.mat_eq(a, b)
                        for a, b in zip(self.matrices, other.matrices)))


def zero_action(actor: Dgla, module: Dgla) -> ActionMap:
    return ActionMap(actor, module, tuple(
        exact.zeros(module.dim, module.dim) for _ in range(actor.dim)))


def check_action_map(alpha: ActionMap) -> AxiomReport:
    violations = []
    g, h = alpha.actor, alpha.module
    glab = g.basis.labels

    for i in range(g.dim):
        di = g.basis.degrees[i]
        for j in range(h.dim):
            for k, c in enumerate(alpha.matrices[i][j]):
                if c != 0 and h.basis.degrees[k] != h.basis.degrees[j] + di:
                    violations.append(Violation(
                        "action-degree", (glab[i],),
                        f"alpha({glab[i]}) is not homogeneous of degree {di}"))
                    break

    def compose(i_then, i_first, vec):
        return alpha.apply(i_then, alpha.apply(i_first, vec))

    for i in range(g.dim):
        for j in range(g.dim):
            s = _sign(g.basis.degrees[i] * g.basis.degrees[j])
            for m in range(h.dim):
                v = _basis_vec(h.dim, m)
                lhs = [ZERO] * h.dim
                for k, c in g.algebra.bracket_basis(i, j).items():
                    for n, x in enumerate(alpha.apply(k, v)):
                        lhs[n] += c * x
                rhs = _vec_sub(compose(i, j, v),
                               [s * x for x in compose(j, i, v)])
                if lhs != rhs:
                    violations.append(Violation(
                        "action-bracket", (glab[i], glab[j]),
                        "alpha[x,y] != alpha(x)alpha(y) "
                        "- (-1)^{|x||y|} alpha(y)alpha(x)"))
                    break

    for i in range(g.dim):
        s = _sign(g.basis.degrees[i])
        for m in range(h.dim):
            v = _basis_vec(h.dim, m)
            lhs = [ZERO] * h.dim
            for k, c in g.differential.of_basis(i).items():
                for n, x in enumerate(alpha.apply(k, v)):
                    lhs[n] += c * x
            rhs = _vec_sub(h.differential.apply(alpha.apply(i, v)),
                           [s * x for x in
                            alpha.apply(i, h.differential.apply(v))])
            if lhs != rhs:
                violations.append(Violation(
                    "action-differential", (glab[i],),
                    "alpha(dx) != [d_h, alpha(x)]"))
                break

    for i in range(g.dim):
        for m in range(h.dim):
            for n in range(h.dim):
                vm, vn = _basis_vec(h.dim, m), _basis_vec(h.dim, n)
                lhs = alpha.apply(i, h.algebra.bracket_eval(vm, vn))
                s = _sign(g.basis.degrees[i] * h.basis.degrees[m])
                rhs = h.algebra.bracket_eval(alpha.apply(i, vm), vn)
                term = h.algebra.bracket_eval(vm, alpha.apply(i, vn))
                rhs = [x + s * y for x, y in zip(rhs, term)]
                if lhs != rhs:
                    violations.append(Violation(
                        "action-derivation",
                        (glab[i], h.basis.labels[m], h.basis.labels[n]),
                        "alpha(x) is not a graded derivation of [-,-]_h"))
    return AxiomReport("action map", tuple(violations))


@dataclass(frozen=True)
class ActionStructure:
    """Dgla on g (+) h with the inject/project short exact sequence."""

    actor: Dgla
    module: Dgla
    total: Dgla
    inject: DglaMorphism   # h -> total
    project: DglaMorphism  # total -> g


def _sum_basis(g: Dgla, h: Dgla) -> GradedBasis:
    labels = tuple(f"g.{x}" for x in g.basis.labels) + \
        tuple(f"h.{x}" for x in h.basis.labels)
    return GradedBasis(labels, g.basis.degrees + h.basis.degrees)


def _sum_structure(g: Dgla, h: Dgla, cross) -> ActionStructure:
    """Assemble g (+) h with cross terms from ``cross(i, j) -> {k_h: c}``.

    ``cross(i, j)`` gives the h-part of [[g_i, h_j]]; the (h, g) orientation
    is filled in by graded antisymmetry unless the caller overrides it.
    """
    ng, nh = g.dim, h.dim
    basis = _sum_basis(g, h)
    brackets = {}
    for (i, j), row in g.algebra.brackets.items():
        brackets[(i, j)] = dict(row)
    for (i, j), row in h.algebra.brackets.items():
        brackets[(ng + i, ng + j)] = {ng + k: c for k, c in row.items()}
    for i in range(ng):
        for j in range(nh):
            row = cross(i, j)
            if row:
                brackets[(i, ng + j)] = {ng + k: c for k, c in row.items()}
                s = _sign(g.basis.degrees[i] * h.basis.degrees[j])
                brackets[(ng + j, i)] = {
                    ng + k: -s * c for k, c in row.items()}
    rows = {i: dict(r) for i, r in g.differential.rows.items()}
    for i, r in h.differential.rows.items():
        rows[ng + i] = {ng + k: c for k, c in r.items()}
    total = Dgla(GradedLieAlgebra(basis, brackets), Differential(rows))

    inj = exact.zeros(nh, ng + nh)
    for i in range(nh):
        inj[i][ng + i] = exact.ONE
    proj = exact.zeros(ng + nh, ng)
    for i in range(ng):
        proj[i][i] = exact.ONE
    return ActionStructure(
        actor=g, module=h, total=total,
        inject=DglaMorphism(h, total, inj),
        project=DglaMorphism(total, g, proj))


def build_action_dgla(alpha: ActionMap, plus_variant: bool = False,
                      validate: bool = True) -> ActionStructure:
    """Semidirect-sum dgla on g (+) h from an action map.

    Cross bracket: [[(X,0),(0,w)]] = (0, alpha(X) w), extended to the other
    orientation by graded antisymmetry, i.e. the v-term in
    [[(X,v),(Y,w)]] carries -(-1)^{|X||Y|} alpha(Y)(v).

    ``plus_variant=True`` instead uses +alpha(Y)(v) in both orientations
    (a symmetric cross term).  The result is *not* a Lie bracket whenever
    alpha != 0; it is kept only so the axiom checker can exhibit the
    antisymmetry witness.  No self-check is run for the variant.
    """
    if validate:
        report = check_action_map(alpha)
        if not report.passed:
            raise StructureError(
                f"invalid action map: {report.violations[0]}")
    g, h = alpha.actor, alpha.module
    ng = g.dim

    def cross(i, j):
        return {k: c for k, c in enumerate(alpha.apply(i, _basis_vec(h.dim, j)))
                if c != 0}

    structure = _sum_structure(g, h, cross)
    if plus_variant:
        brackets = dict(structure.total.algebra.brackets)
        for i in range(ng):
            for j in range(h.dim):
                row = cross(i, j)
                if row:
                    brackets[(ng + j, i)] = {ng + k: c for k, c in row.items()}
        total = Dgla(GradedLieAlgebra(structure.total.algebra.basis, brackets),
                     structure.total.differential)
        return ActionStructure(g, h, total, structure.inject, structure.project)

    if validate:
        report = check_dgla(structure.total)
        if not report.passed:
            raise StructureError(
                f"constructed sum fails dgla axioms: {report.violations[0]}")
    return structure


def adjoint_action(g: Dgla) -> ActionStructure:
    """g acting on itself: [[(X,X'),(Y,Y')]] = ([X,Y], [X',Y'] + [X,Y'] + [X',Y])."""

    def cross(i, j):
        return g.algebra.bracket_basis(i, j)

    return _sum_structure(g, g, cross)


def check_exactness(s: ActionStructure) -> AxiomReport:
    """Verify 0 -> h -> total -> g -> 0 with dgla maps, exactly."""
    violations = []
    violations += [Violation(f"inject-{v.axiom}", v.witness, v.detail)
                   for v in check_morphism(s.inject)]
    violations += [Violation(f"project-{v.axiom}", v.witness, v.detail)
                   for v in check_morphism(s.project)]

    if exact.rank(s.inject.matrix) != s.module.dim:
        violations.append(Violation(
            "injectivity", ("inject",), "inject has nontrivial kernel"))
    if exact.rank(s.project.matrix) != s.actor.dim:
        violations.append(Violation(
            "surjectivity", ("project",), "project is not onto"))

    comp = exact.matmul(s.inject.matrix, s.project.matrix)
    if any(any(x != 0 for x in row) for row in comp):
        violations.append(Violation(
            "exactness", ("project . inject",),
            "image(inject) not contained in kernel(project)"))
    elif (exact.rank(s.inject.matrix)
          != s.total.dim - exact.rank(s.project.matrix)):
        violations.append(Violation(
            "exactness", ("dimensions",),
            "image(inject) is a proper subspace of kernel(project)"))
    return AxiomReport("exact sequence", tuple(violations))


def extract_action_map(s: ActionStructure) -> ActionMap:
    """Recover alpha(X)(w) as the h-part of [[(X,0),(0,w)]].

    Requires the canonical section g -> total (the leading g-block) to be a
    subalgebra embedding and the cross brackets to land in image(inject);
    otherwise the structure does not come from an action and a
    StructureError names the witness.
    """
    report = check_exactness(s)
    if not report.passed:
        raise StructureError(f"not an exact action structure: "
                             f"{report.violations[0]}")
    g, h, total = s.actor, s.module, s.total
    ng, nh = g.dim, h.dim

    for i in range(ng):
        for j in range(ng):
            row = total.algebra.bracket_basis(i, j)
            expected = g.algebra.bracket_basis(i, j)
            if {k: c for k, c in row.items() if k < ng} != expected or \
                    any(k >= ng and c != 0 for k, c in row.items()):
                raise StructureError(
                    "section of g is not a subalgebra: bracket "
                    f"({g.basis.labels[i]}, {g.basis.labels[j]}) "
                    "leaves the g block")

    matrices = []
    for i in range(ng):
        m = exact.zeros(nh, nh)
        for j in range(nh):
            row = total.algebra.bracket_basis(i, ng + j)
            if any(k < ng and c != 0 for k, c in row.items()):
                raise StructureError(
                    "cross bracket has a g component; "
                    "structure is not an action")
            for k, c in row.items():
                m[j][k - ng] = c
        matrices.append(m)
    return ActionMap(g, h, tuple(matrices))
