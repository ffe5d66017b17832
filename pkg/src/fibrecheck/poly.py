"""Variable layouts, monomial orders, and sparse multivariate polynomials.

A :class:`RingLayout` names the variables of the ambient polynomial ring:
a block of base variables y_1..y_n, ``copies`` relabelled blocks of fibre
variables, and an optional auxiliary tag variable used by saturation and
radical-membership constructions.  Monomials are exponent tuples indexed by
the layout; polynomials are immutable sorted term sequences over an exact
coefficient field.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .fields import QQ, RationalField

Exponents = tuple


class LayoutMismatchError(ValueError):
    """Operands live in different ring layouts or over different fields."""


# ---------------------------------------------------------------------------
# layouts


@dataclass(frozen=True)
class RingLayout:
    """Named variable blocks: base y-block, ``copies`` fibre x-blocks, tag.

    Variable index order is base variables, then fibre copies 1..k, then the
    tag variable when present.  With copies > 1 the fibre variable ``x`` of
    copy i displays as ``x(i)``.
    """

    base_vars: tuple = ()
    fibre_vars: tuple = ()
    copies: int = 1
    tag_var: str | None = None

    def __post_init__(self):
        if self.copies < 1:
            raise ValueError("copies must be >= 1")
        names = self.var_names()
        if len(set(names)) != len(names):
            raise ValueError(f"variable names collide in layout {names}")

    def var_names(self) -> tuple:
        names = list(self.base_vars)
        for i in range(1, self.copies + 1):
            for v in self.fibre_vars:
                names.append(v if self.copies == 1 else f"{v}({i})")
        if self.tag_var is not None:
            names.append(self.tag_var)
        return tuple(names)

    @property
    def nvars(self) -> int:
        return len(self.base_vars) + self.copies * len(self.fibre_vars) + (
            1 if self.tag_var is not None else 0
        )

    @property
    def base_indices(self) -> tuple:
        return tuple(range(len(self.base_vars)))

    def copy_indices(self, i: int) -> tuple:
        if not 1 <= i <= self.copies:
            raise ValueError(f"copy index {i} out of range 1..{self.copies}")
        m = len(self.fibre_vars)
        start = len(self.base_vars) + (i - 1) * m
        return tuple(range(start, start + m))

    @property
    def fibre_indices(self) -> tuple:
        m = len(self.fibre_vars)
        nb = len(self.base_vars)
        return tuple(range(nb, nb + self.copies * m))

    @property
    def tag_index(self) -> int | None:
        return None if self.tag_var is None else self.nvars - 1

    def index_of(self, name: str) -> int:
        try:
            return self.var_names().index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None

    # derived layouts ------------------------------------------------------

    def powered(self, k: int) -> "RingLayout":
        return RingLayout(self.base_vars, self.fibre_vars, k, self.tag_var)

    def with_tag(self) -> "RingLayout":
        if self.tag_var is not None:
            raise ValueError("layout already carries a tag variable")
        tag = "_t"
        taken = set(self.var_names())
        while tag in taken:
            tag += "_"
        return RingLayout(self.base_vars, self.fibre_vars, self.copies, tag)

    def without_tag(self) -> "RingLayout":
        return RingLayout(self.base_vars, self.fibre_vars, self.copies, None)

    def base_only(self) -> "RingLayout":
        return RingLayout(self.base_vars, (), 1, None)

    def fibre_only(self) -> "RingLayout":
        return RingLayout((), self.fibre_vars, self.copies, None)


# ---------------------------------------------------------------------------
# monomial orders


@dataclass(frozen=True)
class MonomialOrder:
    """Block (product) order: blocks in decreasing significance, lex or
    grevlex within each block.  Grevlex blocks are degree-graded, so a block
    order with the fibre block ahead of the base block has the elimination
    property for the base."""

    blocks: tuple  # tuple of tuples of variable indices
    within: str = "grevlex"

    def __post_init__(self):
        if self.within not in ("lex", "grevlex"):
            raise ValueError(f"unknown within-block order {self.within!r}")

    def key(self, exps: Exponents):
        parts = []
        for blk in self.blocks:
            if self.within == "grevlex":
                parts.append(
                    (sum(exps[i] for i in blk), tuple(-exps[i] for i in reversed(blk)))
                )
            else:
                parts.append(tuple(exps[i] for i in blk))
        return tuple(parts)

    def greater(self, a: Exponents, b: Exponents) -> bool:
        return self.key(a) > self.key(b)

    def covers(self, layout: RingLayout) -> bool:
        seen = sorted(i for blk in self.blocks for i in blk)
        return seen == list(range(layout.nvars))

    def base_is_last(self, layout: RingLayout) -> bool:
        """True when every non-base variable outranks every base variable."""
        base = set(layout.base_indices)
        seen_base = False
        for blk in self.blocks:
            if any(i in base for i in blk):
                if not all(i in base for i in blk):
                    return False
                seen_base = True
            elif seen_base and blk:
                return False
        return True


@functools.lru_cache(maxsize=None)
def default_order(layout: RingLayout, within: str = "grevlex") -> MonomialOrder:
    """Tag >> all fibre blocks jointly >> base block."""
    blocks = []
    if layout.tag_index is not None:
        blocks.append((layout.tag_index,))
    if layout.fibre_indices:
        blocks.append(layout.fibre_indices)
    if layout.base_indices:
        blocks.append(layout.base_indices)
    if not blocks:
        blocks.append(())
    return MonomialOrder(tuple(blocks), within)


def elimination_order(layout: RingLayout, drop, within: str = "grevlex") -> MonomialOrder:
    """Order placing the dropped variables ahead of the kept ones."""
    drop = tuple(sorted(drop))
    keep = tuple(i for i in range(layout.nvars) if i not in set(drop))
    blocks = tuple(blk for blk in (drop, keep) if blk)
    return MonomialOrder(blocks or ((),), within)


# ---------------------------------------------------------------------------
# monomial helpers


def mono_mul(a: Exponents, b: Exponents) -> Exponents:
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a: Exponents, b: Exponents) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_div(a: Exponents, b: Exponents) -> Exponents:
    return tuple(x - y for x, y in zip(a, b))


def mono_lcm(a: Exponents, b: Exponents) -> Exponents:
    return tuple(max(x, y) for x, y in zip(a, b))


# ---------------------------------------------------------------------------
# polynomials


@dataclass(frozen=True)
class Polynomial:
    """Sparse polynomial: nonzero coefficients on distinct monomials, stored
    descending under the layout's default grevlex order."""

    layout: RingLayout
    field: object
    terms: tuple  # tuple of (coefficient, exponent tuple)

    # construction ---------------------------------------------------------

    @staticmethod
    def from_dict(layout: RingLayout, field, mapping) -> "Polynomial":
        order = default_order(layout)
        items = [
            (c, e) for e, c in mapping.items() if not field.is_zero(c)
        ]
        items.sort(key=lambda t: order.key(t[1]), reverse=True)
        return Polynomial(layout, field, tuple(items))

    @staticmethod
    def zero(layout: RingLayout, field) -> "Polynomial":
        return Polynomial(layout, field, ())

    @staticmethod
    def constant(layout: RingLayout, field, value) -> "Polynomial":
        c = field.coerce(value)
        if field.is_zero(c):
            return Polynomial.zero(layout, field)
        return Polynomial(layout, field, ((c, (0,) * layout.nvars),))

    @staticmethod
    def variable(layout: RingLayout, field, name: str) -> "Polynomial":
        i = layout.index_of(name)
        exps = tuple(1 if j == i else 0 for j in range(layout.nvars))
        return Polynomial(layout, field, ((field.one, exps),))

    # predicates -----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(self.terms[0][1]))

    def total_degree(self) -> int:
        if self.is_zero:
            return -1
        return max(sum(e) for _, e in self.terms)

    def support_indices(self) -> set:
        used = set()
        for _, e in self.terms:
            for i, x in enumerate(e):
                if x:
                    used.add(i)
        return used

    # arithmetic -----------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.layout != other.layout or self.field != other.field:
            raise LayoutMismatchError("operands live in different rings")

    def __add__(self, other):
        other = self._coerce_operand(other)
        self._check(other)
        acc = {e: c for c, e in self.terms}
        f = self.field
        for c, e in other.terms:
            s = f.add(acc.get(e, f.zero), c)
            if f.is_zero(s):
                acc.pop(e, None)
            else:
                acc[e] = s
        return Polynomial.from_dict(self.layout, f, acc)

    def __sub__(self, other):
        other = self._coerce_operand(other)
        return self + (-other)

    def __neg__(self):
        f = self.field
        return Polynomial(self.layout, f, tuple((f.neg(c), e) for c, e in self.terms))

    def __mul__(self, other):
        other = self._coerce_operand(other)
        self._check(other)
        f = self.field
        acc = {}
        for c1, e1 in self.terms:
            for c2, e2 in other.terms:
                e = mono_mul(e1, e2)
                s = f.add(acc.get(e, f.zero), f.mul(c1, c2))
                if f.is_zero(s):
                    acc.pop(e, None)
                else:
                    acc[e] = s
        return Polynomial.from_dict(self.layout, f, acc)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        result = Polynomial.constant(self.layout, self.field, 1)
        for _ in range(n):
            result = result * self
        return result

    def _coerce_operand(self, other):
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.layout, self.field, other)
        return NotImplemented

    def mul_term(self, coeff, exps: Exponents) -> "Polynomial":
        f = self.field
        if f.is_zero(coeff):
            return Polynomial.zero(self.layout, f)
        acc = {mono_mul(e, exps): f.mul(c, coeff) for c, e in self.terms}
        return Polynomial.from_dict(self.layout, f, acc)

    def scale(self, coeff) -> "Polynomial":
        return self.mul_term(self.field.coerce(coeff), (0,) * self.layout.nvars)

    # leading data ---------------------------------------------------------

    def leading_term(self, order: MonomialOrder | None = None):
        """(coefficient, monomial) maximal under the order."""
        if self.is_zero:
            raise ValueError("zero polynomial has no leading term")
        order = order or default_order(self.layout)
        return max(self.terms, key=lambda t: order.key(t[1]))

    def leading_monomial(self, order: MonomialOrder | None = None) -> Exponents:
        return self.leading_term(order)[1]

    def leading_coefficient(self, order: MonomialOrder | None = None):
        return self.leading_term(order)[0]

    def monic(self, order: MonomialOrder | None = None) -> "Polynomial":
        if self.is_zero:
            return self
        return self.scale(self.field.inv(self.leading_coefficient(order)))

    def coefficient_of(self, exps: Exponents):
        for c, e in self.terms:
            if e == exps:
                return c
        return self.field.zero

    # rendering ------------------------------------------------------------

    def __str__(self):
        return render_poly(self)

    def __repr__(self):
        return f"Polynomial({render_poly(self)!r})"


def render_poly(f: Polynomial) -> str:
    if f.is_zero:
        return "0"
    names = f.layout.var_names()
    parts = []
    for k, (c, e) in enumerate(f.terms):
        factors = []
        for i, x in enumerate(e):
            if x == 1:
                factors.append(names[i])
            elif x > 1:
                factors.append(f"{names[i]}^{x}")
        cs = f.field.to_str(c)
        neg = cs.startswith("-")
        mag = cs[1:] if neg else cs
        if factors and mag == "1":
            body = "*".join(factors)
        elif factors:
            body = mag + "*" + "*".join(factors)
        else:
            body = mag
        if k == 0:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts)


def integer_normalized(f: Polynomial) -> Polynomial:
    """Scale so integer coefficients are coprime and the leading one positive
    (rationals); monic over F_p.  Used for reproducible witness rendering."""
    if f.is_zero:
        return f
    if isinstance(f.field, RationalField):
        den = 1
        for c, _ in f.terms:
            den = den * c.denominator // gcd(den, c.denominator)
        num = 0
        for c, _ in f.terms:
            num = gcd(num, abs(c.numerator * den // c.denominator))
        scale = Fraction(den, num)
        g = f.scale(scale)
        if g.leading_coefficient() < 0:
            g = -g
        return g
    return f.monic()


# ---------------------------------------------------------------------------
# layout-changing operations


def transport(f: Polynomial, new_layout: RingLayout, field=None) -> Polynomial:
    """Re-express f in another layout, matching variables by display name."""
    field = field or f.field
    names = f.layout.var_names()
    new_names = new_layout.var_names()
    idx = {}
    for i in f.support_indices():
        name = names[i]
        if name not in new_names:
            raise LayoutMismatchError(f"variable {name!r} absent from target layout")
        idx[i] = new_names.index(name)
    acc = {}
    for c, e in f.terms:
        new_e = [0] * new_layout.nvars
        for i, x in enumerate(e):
            if x:
                new_e[idx[i]] = x
        acc[tuple(new_e)] = field.coerce(c)
    return Polynomial.from_dict(new_layout, field, acc)


def relabel(f: Polynomial, target_layout: RingLayout, copy_index: int) -> Polynomial:
    """Send the (single) fibre block of f to copy ``copy_index`` of the target
    layout, keeping base variables fixed."""
    src = f.layout
    if src.copies != 1 or src.tag_var is not None:
        raise ValueError("relabel expects a single-copy, tag-free source layout")
    if src.base_vars != target_layout.base_vars or src.fibre_vars != target_layout.fibre_vars:
        raise LayoutMismatchError("source and target layouts disagree on variable names")
    if not 1 <= copy_index <= target_layout.copies:
        raise ValueError(f"copy index {copy_index} out of range 1..{target_layout.copies}")
    nb = len(src.base_vars)
    dest = target_layout.copy_indices(copy_index)
    acc = {}
    for c, e in f.terms:
        new_e = [0] * target_layout.nvars
        for i in range(nb):
            new_e[i] = e[i]
        for j, x in enumerate(e[nb:]):
            if x:
                new_e[dest[j]] = x
        acc[tuple(new_e)] = c
    return Polynomial.from_dict(target_layout, f.field, acc)


def substitute_base_point(f: Polynomial, point) -> Polynomial:
    """Evaluate the base variables at a rational point; the result lives in
    the fibre-only layout."""
    layout = f.layout
    if layout.tag_var is not None:
        raise ValueError("cannot substitute into a tag-extended layout")
    nb = len(layout.base_vars)
    if len(point) != nb:
        raise ValueError(f"expected {nb} coordinates, got {len(point)}")
    field = f.field
    coords = [field.coerce(p) for p in point]
    new_layout = layout.fibre_only()
    acc = {}
    for c, e in f.terms:
        val = c
        for i in range(nb):
            for _ in range(e[i]):
                val = field.mul(val, coords[i])
        new_e = e[nb:]
        s = field.add(acc.get(new_e, field.zero), val)
        acc[new_e] = s
    return Polynomial.from_dict(new_layout, field, acc)


def base_leading_coefficient(f: Polynomial, order: MonomialOrder | None = None) -> Polynomial:
    """The pure-base coefficient of the leading fibre monomial of f, under an
    order that places the fibre blocks jointly above the base block."""
    if f.is_zero:
        raise ValueError("zero polynomial")
    layout = f.layout
    order = order or default_order(layout)
    if not order.base_is_last(layout):
        raise ValueError("order must place fibre blocks above the base block")
    nb = len(layout.base_vars)
    _, lm = f.leading_term(order)
    lead_fibre = lm[nb:]
    acc = {}
    for c, e in f.terms:
        if e[nb:] == lead_fibre:
            acc[e[:nb] + (0,) * (layout.nvars - nb)] = c
    return Polynomial.from_dict(layout, f.field, acc)
