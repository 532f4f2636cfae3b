"""Concrete Lie algebras, subalgebra utilities, and the JSON wire format.

Basis order and sign conventions come from :mod:`pcgrav.conventions`:
Poincare basis is ``P0..P3, J01, J02, J03, J12, J13, J23`` (all degree 0),
with ``[J_ab, P_c] = eta_bc P_a - eta_ac P_b`` and the J-J bracket listed
there.  Rotations ``L1 = -J23, L2 = +J13, L3 = -J12`` satisfy
``[L_i, L_j] = eps_ijk L_k``.
"""

from __future__ import annotations

from fractions import Fraction

from . import exact
from .conventions import (ETA_DIAG, GENERATOR_ALIASES, LAMBDA2,
                          POINCARE_NAMES, perm_sign)
from .graded import (ActionMap, Dgla, Differential, GradedBasis,
                     GradedLieAlgebra, StructureError)


class AlgebraFormatError(ValueError):
    """Malformed algebra/action JSON document."""


def _degree0_basis(labels) -> GradedBasis:
    return GradedBasis(tuple(labels), (0,) * len(labels))


def abelian(labels, degrees=None) -> Dgla:
    basis = (_degree0_basis(labels) if degrees is None
             else GradedBasis(tuple(labels), tuple(degrees)))
    return Dgla(GradedLieAlgebra(basis, {}), Differential({}))


def so3() -> Dgla:
    """Rotation algebra, [L_i, L_j] = eps_ijk L_k, zero differential."""
    brackets = {}
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            k = 3 - i - j
            brackets[(i, j)] = {k: Fraction(perm_sign((i, j, k)))}
    return Dgla(GradedLieAlgebra(_degree0_basis(("L1", "L2", "L3")), brackets))


def poincare_algebra() -> GradedLieAlgebra:
    """The 10-dim Poincare algebra in the P/J basis, exact integer constants."""
    labels = POINCARE_NAMES
    idx = {name: n for n, name in enumerate(labels)}
    brackets = {}

    def add(i, j, k, c):
        if c == 0:
            return
        row = brackets.setdefault((i, j), {})
        row[k] = row.get(k, Fraction(0)) + Fraction(c)

    for p, (a, b) in enumerate(LAMBDA2):
        jp = idx["J%d%d" % (a, b)]
        for c in range(4):
            pc = idx["P%d" % c]
            # [J_ab, P_c] = eta_bc P_a - eta_ac P_b
            if b == c:
                add(jp, pc, idx["P%d" % a], ETA_DIAG[b])
                add(pc, jp, idx["P%d" % a], -ETA_DIAG[b])
            if a == c:
                add(jp, pc, idx["P%d" % b], -ETA_DIAG[a])
                add(pc, jp, idx["P%d" % b], ETA_DIAG[a])
        for q, (c, d) in enumerate(LAMBDA2):
            jq = idx["J%d%d" % (c, d)]
            for coeff, (x, y) in (
                (ETA_DIAG[b] if b == c else 0, (a, d)),
                (-ETA_DIAG[b] if b == d else 0, (a, c)),
                (-ETA_DIAG[a] if a == c else 0, (b, d)),
                (ETA_DIAG[a] if a == d else 0, (b, c)),
            ):
                if coeff == 0 or x == y:
                    continue
                if x < y:
                    add(jp, jq, idx["J%d%d" % (x, y)], coeff)
                else:
                    add(jp, jq, idx["J%d%d" % (y, x)], -coeff)
    return GradedLieAlgebra(_degree0_basis(labels), brackets)


def poincare_dgla() -> Dgla:
    return Dgla(poincare_algebra(), Differential({}))


def poincare_coefficients(name: str) -> list:
    """Coefficient vector (exact) of a named generator, aliases included."""
    vec = [Fraction(0)] * 10
    if name in POINCARE_NAMES:
        vec[POINCARE_NAMES.index(name)] = Fraction(1)
        return vec
    try:
        combo = GENERATOR_ALIASES[name]
    except KeyError:
        raise KeyError(f"unknown Poincare generator {name!r}") from None
    for base, c in combo.items():
        vec[POINCARE_NAMES.index(base)] = Fraction(c)
    return vec


def so3_subalgebra() -> GradedLieAlgebra:
    """Time translation plus the three rotations: the static spherical algebra."""
    brackets = {}
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            k = 3 - i - j
            brackets[(1 + i, 1 + j)] = {1 + k: Fraction(perm_sign((i, j, k)))}
    return GradedLieAlgebra(
        _degree0_basis(("dt", "L1", "L2", "L3")), brackets)


def closure_check(generators) -> bool:
    """True if the span of Poincare coefficient vectors closes under brackets."""
    p = poincare_algebra()
    rows = [[Fraction(v) for v in g] for g in generators]
    for g in rows:
        if len(g) != p.dim:
            raise ValueError("generators must be Poincare coefficient vectors")
    for a in rows:
        for b in rows:
            if not exact.in_row_span(rows, p.bracket_eval(a, b)):
                return False
    return True


def vector_representation_so3() -> ActionMap:
    """so(3) acting on abelian R^3 by cross products."""
    g = so3()
    h = abelian(("e1", "e2", "e3"))
    mats = []
    for i in range(3):
        m = exact.zeros(3, 3)
        for j in range(3):
            for k in range(3):
                s = perm_sign((i, j, k))
                if s:
                    m[j][k] = Fraction(s)
        mats.append(m)
    return ActionMap(g, h, tuple(mats))


def so31_dgla() -> Dgla:
    """Lorentz algebra so(3,1) in the J-pair basis, zero differential."""
    p = poincare_algebra()
    labels = POINCARE_NAMES[4:]
    brackets = {}
    for (i, j), row in p.brackets.items():
        if i >= 4 and j >= 4:
            brackets[(i - 4, j - 4)] = {k - 4: c for k, c in row.items()}
    return Dgla(GradedLieAlgebra(_degree0_basis(labels), brackets))


# ---------------------------------------------------------------------------
# JSON wire format
# ---------------------------------------------------------------------------
#
# Algebra document:
#   { "basis": [{"label": str, "degree": int}],
#     "brackets": [{"i": label, "j": label,
#                   "out": [{"k": label, "c": "p/q"}]}],
#     "differential": [{"i": label, "out": [{"k": label, "c": "p/q"}]}] }
# Rationals are strings "p/q" (plain integers also accepted).  Brackets are
# literal: any (i, j) pair not listed is zero, so a well-formed file lists
# both orientations of each nonzero bracket.
#
# Action document (for `algebra action`):
#   { "action": [{"x": g_label,
#                 "rows": [{"i": h_label, "out": [{"k": h_label, "c": "p/q"}]}]}] }

def _parse_out(entries, index, where):
    row = {}
    for entry in entries:
        try:
            k = index[entry["k"]]
        except KeyError:
            raise AlgebraFormatError(
                f"{where}: unknown basis label {entry.get('k')!r}") from None
        try:
            row[k] = exact.parse_rational(entry["c"])
        except (KeyError, TypeError, ValueError) as e:
            raise AlgebraFormatError(f"{where}: bad coefficient: {e}") from None
    return row


def dgla_from_json(doc) -> Dgla:
    if not isinstance(doc, dict) or "basis" not in doc:
        raise AlgebraFormatError("document must be an object with a 'basis' key")
    try:
        labels = tuple(b["label"] for b in doc["basis"])
        degrees = tuple(int(b["degree"]) for b in doc["basis"])
    except (TypeError, KeyError, ValueError) as e:
        raise AlgebraFormatError(f"bad basis: {e}") from None
    try:
        basis = GradedBasis(labels, degrees)
    except StructureError as e:
        raise AlgebraFormatError(str(e)) from None
    index = {lab: n for n, lab in enumerate(labels)}

    brackets = {}
    for item in doc.get("brackets", ()):
        try:
            i, j = index[item["i"]], index[item["j"]]
        except KeyError:
            raise AlgebraFormatError(
                f"bracket references unknown label: {item}") from None
        brackets[(i, j)] = _parse_out(item.get("out", ()), index,
                                      f"bracket ({item['i']},{item['j']})")
    rows = {}
    for item in doc.get("differential", ()):
        try:
            i = index[item["i"]]
        except KeyError:
            raise AlgebraFormatError(
                f"differential references unknown label: {item}") from None
        rows[i] = _parse_out(item.get("out", ()), index,
                             f"differential ({item['i']})")
    return Dgla(GradedLieAlgebra(basis, brackets), Differential(rows))


def dgla_to_json(d: Dgla) -> dict:
    labels = d.basis.labels
    doc = {
        "basis": [{"label": lab, "degree": deg}
                  for lab, deg in zip(labels, d.basis.degrees)],
        "brackets": [
            {"i": labels[i], "j": labels[j],
             "out": [{"k": labels[k], "c": exact.format_rational(c)}
                     for k, c in sorted(row.items())]}
            for (i, j), row in sorted(d.algebra.brackets.items())],
    }
    if d.differential.rows:
        doc["differential"] = [
            {"i": labels[i],
             "out": [{"k": labels[k], "c": exact.format_rational(c)}
                     for k, c in sorted(row.items())]}
            for i, row in sorted(d.differential.rows.items())]
    return doc


def action_from_json(doc, actor: Dgla, module: Dgla) -> ActionMap:
    if not isinstance(doc, dict) or "action" not in doc:
        raise AlgebraFormatError("document must be an object with an 'action' key")
    gidx = {lab: n for n, lab in enumerate(actor.basis.labels)}
    hidx = {lab: n for n, lab in enumerate(module.basis.labels)}
    mats = [exact.zeros(module.dim, module.dim) for _ in range(actor.dim)]
    for item in doc["action"]:
        try:
            x = gidx[item["x"]]
        except KeyError:
            raise AlgebraFormatError(
                f"action references unknown actor label: {item}") from None
        for rowspec in item.get("rows", ()):
            try:
                i = hidx[rowspec["i"]]
            except KeyError:
                raise AlgebraFormatError(
                    f"action row references unknown module label: {rowspec}"
                ) from None
            row = _parse_out(rowspec.get("out", ()), hidx,
                             f"action ({item['x']}, {rowspec['i']})")
            for k, c in row.items():
                mats[x][i][k] = c
    return ActionMap(actor, module, tuple(mats))
