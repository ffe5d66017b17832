"""Decision procedures for openness and flatness.

Openness of Spec A -> Spec R fails iff some fibred power J_k (k <= n = number
of base variables) acquires a vertical irreducible component; flatness fails
iff some tensor power acquires R-torsion.  Vertical parts are separated from
dominant ones by saturating at the generic denominator h (the product of the
base-variable leading coefficients of a fibre-over-base Groebner basis);
witnesses are re-verified independently before a verdict is emitted.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dc_field

from .fields import RationalField
from .groebner import (
    ComputeBudget,
    Ideal,
    ModulePresentation,
    ResourceLimitError,
    vector_leading,
)
from .idealops import contract_to_base, module_saturate, quotient, radical_member, saturate
from .poly import (
    Polynomial,
    base_leading_coefficient,
    default_order,
    integer_normalized,
    transport,
)
from .power import Problem, fibred_power_ideal, tensor_power_presentation

TORSION_POWER_BOUND = 64


class CharacteristicGuardError(ValueError):
    """Flatness over F_p requested without the explicit acknowledgment."""


class WitnessSoundnessError(RuntimeError):
    """An emitted witness failed its independent re-check (internal bug)."""


@dataclass
class CheckConfig:
    within: str = "grevlex"
    max_power: int | None = None
    pair_limit: int = 100_000
    timeout_seconds: float | None = None
    allow_char_p_flatness: bool = False

    def budget(self) -> ComputeBudget:
        deadline = (
            None
            if self.timeout_seconds is None
            else time.monotonic() + self.timeout_seconds
        )
        return ComputeBudget(pair_limit=self.pair_limit, deadline=deadline)


@dataclass
class PowerStats:
    k: int
    basis_size: int
    pairs: int
    millis: int


@dataclass
class Verdict:
    kind: str  # "open" | "flat"
    outcome: str  # "pass" | "fail" | "aborted"
    failing_power: int | None = None
    witness_g: Polynomial | None = None
    witness_r: Polynomial | None = None
    certificate_r: Polynomial | None = None
    certificate_v: object | None = None  # polynomial or vector of polynomials
    conclusive: bool = True
    max_power_tested: int | None = None
    powers: list = dc_field(default_factory=list)
    abort_reason: str | None = None


# ---------------------------------------------------------------------------
# generic denominator and dominant part


def _univariate_squarefree(f: Polynomial, var_index: int) -> Polynomial:
    """Squarefree part of a polynomial supported in one variable, by gcd with
    its derivative.  Falls back to f itself when the derivative vanishes
    (inseparable case over F_p)."""
    fld = f.field
    nv = f.layout.nvars
    deg = max(e[var_index] for _, e in f.terms)
    coeffs = [fld.zero] * (deg + 1)
    for c, e in f.terms:
        coeffs[e[var_index]] = c
    deriv = [fld.mul(coeffs[i], fld.coerce(i)) for i in range(1, deg + 1)]
    if all(fld.is_zero(c) for c in deriv):
        return f

    def trim(p):
        while p and fld.is_zero(p[-1]):
            p.pop()
        return p

    def mod(a, b):
        a = list(a)
        while len(a) >= len(b) and a:
            q = fld.div(a[-1], b[-1])
            shift = len(a) - len(b)
            for i, bc in enumerate(b):
                a[shift + i] = fld.sub(a[shift + i], fld.mul(q, bc))
            trim(a)
        return a

    a, b = trim(list(coeffs)), trim(list(deriv))
    while b:
        a, b = b, mod(a, b)
    g = a  # gcd(f, f')
    if len(g) <= 1:
        return f
    # exact univariate division f / g
    quo = [fld.zero] * (len(coeffs) - len(g) + 1)
    rem = list(coeffs)
    while len(rem) >= len(g) and rem:
        q = fld.div(rem[-1], g[-1])
        quo[len(rem) - len(g)] = q
        shift = len(rem) - len(g)
        for i, gc in enumerate(g):
            rem[shift + i] = fld.sub(rem[shift + i], fld.mul(q, gc))
        trim(rem)
    acc = {}
    for i, c in enumerate(quo):
        if not fld.is_zero(c):
            e = [0] * nv
            e[var_index] = i
            acc[tuple(e)] = c
    return Polynomial.from_dict(f.layout, fld, acc)


def squarefree_part(f: Polynomial) -> Polynomial:
    """Best-effort squarefree reduction: exponent truncation for monomials,
    derivative gcd for univariate factors, identity otherwise.  Saturation is
    insensitive to multiplicities, so this only limits degree growth."""
    if f.is_zero or f.is_constant:
        return f
    if len(f.terms) == 1:
        c, e = f.terms[0]
        return Polynomial.from_dict(
            f.layout, f.field, {tuple(min(x, 1) for x in e): f.field.one}
        )
    support = f.support_indices()
    if len(support) == 1:
        return _univariate_squarefree(f, next(iter(support)))
    return f


def generic_denominator(basis, layout, fld, order=None) -> Polynomial:
    """Squarefree-reduced product of the distinct base leading coefficients of
    the basis elements; saturation by it contracts from K(R)[x] back to R[x]."""
    order = order or default_order(layout)
    h = Polynomial.constant(layout, fld, 1)
    seen = set()
    for g in basis:
        c = base_leading_coefficient(g, order)
        if c.is_constant:
            continue
        c = integer_normalized(squarefree_part(c))
        if c.terms in seen:
            continue
        seen.add(c.terms)
        h = h * c
    return h


def module_generic_denominator(gb, layout, fld, morder) -> Polynomial:
    h = Polynomial.constant(layout, fld, 1)
    seen = set()
    for v in gb:
        pos, _, _ = vector_leading(v, morder)
        c = base_leading_coefficient(v[pos], morder.ring_order)
        if c.is_constant:
            continue
        c = integer_normalized(squarefree_part(c))
        if c.terms in seen:
            continue
        seen.add(c.terms)
        h = h * c
    return h


def dominant_part(J: Ideal, within: str = "grevlex", budget=None) -> Ideal:
    """J : h^infinity; its minimal primes are exactly the dominant minimal
    primes of J."""
    order = default_order(J.layout, within)
    gb = J.groebner_basis(order, budget)
    h = generic_denominator(gb, J.layout, J.field, order)
    return saturate(J, h, within, budget)


def has_vertical_component(J: Ideal, within: str = "grevlex", budget=None):
    """Whether V(J) strictly contains V(dominant_part(J)): some generator of
    the dominant part escapes the radical of J."""
    D = dominant_part(J, within, budget)
    for g in D.gens:
        if not radical_member(g, J, within, budget):
            return True, g
    return False, None


def vertical_witness(J: Ideal, g: Polynomial, within: str = "grevlex", budget=None) -> Polynomial:
    """A nonzero pure-base r with r*g in sqrt(J) while g is not: the first
    generator of the contraction of J : g^infinity to the base ring."""
    S = saturate(J, g, within, budget)
    contraction = contract_to_base(S, within, budget)
    if not contraction.gens:
        raise WitnessSoundnessError("vertical witness contraction is zero")
    return integer_normalized(transport(contraction.gens[0], J.layout))


# ---------------------------------------------------------------------------
# torsion


def has_torsion_ideal(J: Ideal, within: str = "grevlex", budget=None):
    """R-torsion in the cyclic module k[y, x]/J: the h-saturation grows."""
    layout, fld = J.layout, J.field
    order = default_order(layout, within)
    gb = J.groebner_basis(order, budget)
    h = generic_denominator(gb, layout, fld, order)
    S = saturate(J, h, within, budget)
    for v in S.gens:
        if J.contains(v, order, budget):
            continue
        r = _annihilator_witness(J, v, within, budget)
        return True, (r, v)
    return False, None


def _annihilator_witness(J: Ideal, v: Polynomial, within, budget) -> Polynomial:
    """Nonzero pure-base r with r*v in J, from contract_to_base(J : v)."""
    Q = quotient(J, v, within, budget)
    contraction = contract_to_base(Q, within, budget)
    if not contraction.gens:
        raise WitnessSoundnessError("torsion annihilator contraction is zero")
    return integer_normalized(transport(contraction.gens[0], J.layout))


def has_torsion_module(pres: ModulePresentation, within: str = "grevlex", budget=None):
    """R-torsion in the cokernel of the presentation: a saturation generator v
    outside N, with r = h^k the smallest power pushing it back in."""
    layout, fld = pres.layout, pres.field
    morder = pres.morder
    gb = pres.groebner_basis(morder, budget)
    h = module_generic_denominator(gb, layout, fld, morder)
    S = module_saturate(pres, h, within, budget)
    for v in S.relations:
        if pres.contains(v, morder, budget):
            continue
        power = Polynomial.constant(layout, fld, 1)
        for _ in range(TORSION_POWER_BOUND):
            power = power * h
            scaled = tuple(power * c for c in v)
            if pres.contains(scaled, morder, budget):
                return True, (integer_normalized(power), v)
        raise WitnessSoundnessError("saturation element resists every tested power")
    return False, None


# ---------------------------------------------------------------------------
# the power loop


def _run_power_loop(problem: Problem, config: CheckConfig, kind: str) -> Verdict:
    n = problem.n
    kmax = config.max_power if config.max_power is not None else n
    budget = config.budget()
    verdict = Verdict(kind=kind, outcome="pass", max_power_tested=kmax)
    for k in range(1, kmax + 1):
        t0 = time.perf_counter()
        pairs_before = budget.pairs
        try:
            found, payload = _probe_power(problem, config, kind, k, budget)
        except ResourceLimitError as exc:
            verdict.outcome = "aborted"
            verdict.abort_reason = f"{exc} at power {k}"
            verdict.conclusive = False
            verdict.powers.append(
                PowerStats(
                    k,
                    budget.max_basis,
                    budget.pairs - pairs_before,
                    int((time.perf_counter() - t0) * 1000),
                )
            )
            return verdict
        verdict.powers.append(
            PowerStats(
                k,
                budget.max_basis,
                budget.pairs - pairs_before,
                int((time.perf_counter() - t0) * 1000),
            )
        )
        if found:
            verdict.outcome = "fail"
            verdict.failing_power = k
            if kind == "open":
                verdict.witness_g, verdict.witness_r = payload
            else:
                verdict.certificate_r, verdict.certificate_v = payload
            return verdict
    verdict.conclusive = kmax >= n
    return verdict


def _probe_power(problem: Problem, config: CheckConfig, kind: str, k: int, budget):
    within = config.within
    if kind == "open":
        Jk = fibred_power_ideal(problem.ideal, k)
        found, g = has_vertical_component(Jk, within, budget)
        if not found:
            return False, None
        r = vertical_witness(Jk, g, within, budget)
        g = integer_normalized(g)
        _verify_open_witness(Jk, g, r, within, budget)
        return True, (g, r)

    # flatness: torsion in the tensor power of F (F = A when none declared)
    if problem.module is None or problem.module.rank == 1:
        if problem.module is None:
            Jk = fibred_power_ideal(problem.ideal, k)
        else:
            pres = tensor_power_presentation(problem, k)
            comps = tuple(v[0] for v in pres.relations)
            Jk = Ideal(pres.layout, pres.field, comps)
        found, cert = has_torsion_ideal(Jk, within, budget)
        if not found:
            return False, None
        r, v = cert
        v = integer_normalized(v)
        _verify_flat_ideal_certificate(Jk, r, v, within, budget)
        return True, (r, v)

    pres = tensor_power_presentation(problem, k)
    found, cert = has_torsion_module(pres, within, budget)
    if not found:
        return False, None
    r, v = cert
    _verify_flat_module_certificate(pres, r, v, budget)
    return True, (r, v)


def _is_pure_base(f: Polynomial) -> bool:
    nb = len(f.layout.base_vars)
    return not f.is_zero and all(i < nb for i in f.support_indices())


def _verify_open_witness(Jk, g, r, within, budget):
    ok = (
        not r.is_zero
        and _is_pure_base(r)
        and radical_member(r * g, Jk, within, budget)
        and not radical_member(g, Jk, within, budget)
    )
    if not ok:
        raise WitnessSoundnessError("openness witness failed its re-check")


def _verify_flat_ideal_certificate(Jk, r, v, within, budget):
    ok = (
        not r.is_zero
        and _is_pure_base(r)
        and Jk.contains(r * v, default_order(Jk.layout, within), budget)
        and not Jk.contains(v, default_order(Jk.layout, within), budget)
    )
    if not ok:
        raise WitnessSoundnessError("flatness certificate failed its re-check")


def _verify_flat_module_certificate(pres, r, v, budget):
    scaled = tuple(r * c for c in v)
    ok = (
        not r.is_zero
        and _is_pure_base(r)
        and pres.contains(scaled, pres.morder, budget)
        and not pres.contains(v, pres.morder, budget)
    )
    if not ok:
        raise WitnessSoundnessError("flatness certificate failed its re-check")


# ---------------------------------------------------------------------------
# public checks


def check_openness(problem: Problem, config: CheckConfig | None = None) -> Verdict:
    """Openness of Spec A -> Spec R: vertical irreducible components are
    sought in the fibred powers k = 1..n (n = number of base variables)."""
    config = config or CheckConfig()
    return _run_power_loop(problem, config, "open")


def check_flatness(problem: Problem, config: CheckConfig | None = None) -> Verdict:
    """R-flatness of F (F = A when no module is declared): R-torsion is sought
    in the tensor powers k = 1..n.  Over F_p the check requires an explicit
    acknowledgment flag."""
    config = config or CheckConfig()
    if not isinstance(problem.field, RationalField) and not config.allow_char_p_flatness:
        raise CharacteristicGuardError(
            "flatness over a prime field requires --allow-char-p-flatness"
        )
    return _run_power_loop(problem, config, "flat")
