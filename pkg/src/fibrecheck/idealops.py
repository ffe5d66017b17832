"""Derived ideal and module operations: elimination, quotient, saturation,
radical membership, contraction to the base, and dimension diagnostics.

Saturation and radical membership use the tag-variable constructions
(single elimination basis and the Rabinowitsch trick); Krull dimension is
computed combinatorially from independent sets of the leading-term ideal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .groebner import (
    ComputeBudget,
    Ideal,
    ModuleOrder,
    ModulePresentation,
    buchberger,
    module_buchberger,
    normal_form,
    vec_is_zero,
)
from .poly import (
    Polynomial,
    default_order,
    elimination_order,
    mono_div,
    mono_divides,
    substitute_base_point,
    transport,
)


@dataclass(frozen=True)
class DimensionReport:
    """Krull dimension together with a witness independent variable set.
    dim = -1 encodes the empty variety (unit ideal)."""

    dim: int
    independent_vars: tuple


# ---------------------------------------------------------------------------
# elimination


def eliminate(I: Ideal, keep, within: str = "grevlex", budget: ComputeBudget | None = None) -> Ideal:
    """Generators of I intersected with k[keep]; ``keep`` is a collection of
    variable names.  The result stays in I's layout."""
    layout = I.layout
    names = layout.var_names()
    keep_idx = {layout.index_of(n) for n in keep}
    drop_idx = [i for i in range(layout.nvars) if i not in keep_idx]
    order = elimination_order(layout, drop_idx, within)
    gb = buchberger(I.gens, order, budget)
    drop_set = set(drop_idx)
    kept = [g for g in gb if not (g.support_indices() & drop_set)]
    return Ideal(layout, I.field, tuple(kept))


def contract_to_base(I: Ideal, within: str = "grevlex", budget: ComputeBudget | None = None) -> Ideal:
    """I intersected with the base polynomial ring k[y]; the result lives in
    the base-only layout.  Reuses the default (fibre >> base) basis."""
    layout = I.layout
    gb = I.groebner_basis(default_order(layout, within), budget)
    non_base = set(range(len(layout.base_vars), layout.nvars))
    base_layout = layout.base_only()
    kept = [
        transport(g, base_layout)
        for g in gb
        if not (g.support_indices() & non_base)
    ]
    return Ideal(base_layout, I.field, tuple(kept))


# ---------------------------------------------------------------------------
# quotient and saturation


def _exact_divide(g: Polynomial, f: Polynomial) -> Polynomial:
    order = default_order(g.layout)
    r, quots = normal_form(g, [f], order, with_quotients=True)
    if not r.is_zero:
        raise ArithmeticError("inexact division")
    return quots[0]


def quotient(I: Ideal, f: Polynomial, within: str = "grevlex", budget=None) -> Ideal:
    """The ideal quotient I : f = {g : g*f in I}, via (I intersect (f)) / f."""
    if f.is_zero:
        raise ValueError("quotient by the zero polynomial")
    layout = I.layout
    fld = I.field
    ext = layout.with_tag()
    t = Polynomial.variable(ext, fld, ext.tag_var)
    one = Polynomial.constant(ext, fld, 1)
    gens = [t * transport(g, ext) for g in I.gens]
    gens.append((one - t) * transport(f, ext))
    inter = eliminate(
        Ideal(ext, fld, tuple(gens)),
        [n for n in ext.var_names() if n != ext.tag_var],
        within,
        budget,
    )
    out = []
    f_here = f
    for g in inter.gens:
        g_back = transport(g, layout)
        out.append(_exact_divide(g_back, f_here))
    return Ideal(layout, fld, tuple(out))


def saturate(I: Ideal, f: Polynomial, within: str = "grevlex", budget=None) -> Ideal:
    """I : f^infinity, via the tag construction (I + (1 - t*f)) ∩ k[vars]."""
    if f.is_zero:
        raise ValueError("saturation by the zero polynomial")
    layout = I.layout
    fld = I.field
    if f.is_constant:
        return Ideal(layout, fld, I.gens)
    ext = layout.with_tag()
    t = Polynomial.variable(ext, fld, ext.tag_var)
    one = Polynomial.constant(ext, fld, 1)
    gens = [transport(g, ext) for g in I.gens]
    gens.append(one - t * transport(f, ext))
    ext_ideal = Ideal(ext, fld, tuple(gens))
    gb = ext_ideal.groebner_basis(default_order(ext, within), budget)
    tag_idx = ext.tag_index
    kept = [
        transport(g, layout)
        for g in gb
        if tag_idx not in g.support_indices()
    ]
    return Ideal(layout, fld, tuple(kept))


def module_saturate(
    pres: ModulePresentation, f: Polynomial, within: str = "grevlex", budget=None
) -> ModulePresentation:
    """N : f^infinity inside the ambient free module, via the componentwise
    tag construction with relations (1 - t*f)*e_i."""
    if f.is_zero:
        raise ValueError("saturation by the zero polynomial")
    layout = pres.layout
    fld = pres.field
    if f.is_constant:
        return ModulePresentation(layout, fld, pres.rank, pres.relations)
    ext = layout.with_tag()
    t = Polynomial.variable(ext, fld, ext.tag_var)
    one = Polynomial.constant(ext, fld, 1)
    zero = Polynomial.zero(ext, fld)
    gens = [tuple(transport(c, ext) for c in v) for v in pres.relations]
    unit = one - t * transport(f, ext)
    for i in range(pres.rank):
        gens.append(tuple(unit if j == i else zero for j in range(pres.rank)))
    morder = ModuleOrder(default_order(ext, within))
    gb = module_buchberger(gens, morder, budget)
    tag_idx = ext.tag_index
    kept = []
    for v in gb:
        if any(tag_idx in c.support_indices() for c in v):
            continue
        kept.append(tuple(transport(c, layout) for c in v))
    return ModulePresentation(layout, fld, pres.rank, tuple(kept))


# ---------------------------------------------------------------------------
# radical membership (Rabinowitsch trick)


def radical_member(f: Polynomial, I: Ideal, within: str = "grevlex", budget=None) -> bool:
    """True iff f lies in the radical of I: 1 in I + (1 - t*f)."""
    if f.is_zero:
        return True
    layout = I.layout
    fld = I.field
    ext = layout.with_tag()
    t = Polynomial.variable(ext, fld, ext.tag_var)
    one = Polynomial.constant(ext, fld, 1)
    gens = [transport(g, ext) for g in I.gens]
    gens.append(one - t * transport(f, ext))
    gb = buchberger(tuple(gens), default_order(ext, within), budget)
    return bool(gb) and gb[0].is_constant


# ---------------------------------------------------------------------------
# dimension


def krull_dim(I: Ideal, within: str = "grevlex", budget=None) -> DimensionReport:
    """Krull dimension of k[vars]/I: the maximum cardinality of a variable
    subset S such that no leading monomial of GB(I) is supported in S."""
    layout = I.layout
    order = default_order(layout, within)
    gb = I.groebner_basis(order, budget)
    names = layout.var_names()
    nv = layout.nvars
    supports = []
    for g in gb:
        lm = g.leading_monomial(order)
        supports.append(frozenset(i for i, e in enumerate(lm) if e))
    for size in range(nv, -1, -1):
        for combo in itertools.combinations(range(nv), size):
            s = set(combo)
            if not any(sup <= s for sup in supports):
                return DimensionReport(size, tuple(names[i] for i in combo))
    return DimensionReport(-1, ())


def fibre_dim(I: Ideal, point, within: str = "grevlex", budget=None) -> DimensionReport:
    """Dimension of the scheme-theoretic fibre over a closed base point:
    substitute the point into every generator and take krull_dim in the
    fibre-only layout."""
    subbed = [substitute_base_point(g, point) for g in I.gens]
    fibre_layout = I.layout.fibre_only()
    J = Ideal(fibre_layout, I.field, tuple(subbed))
    return krull_dim(J, within, budget)
