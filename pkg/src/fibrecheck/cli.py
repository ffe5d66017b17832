"""Input language, report rendering, and the command-line driver.

The input is line-oriented ('#' starts a comment):

    field Q | field F <p>          (default Q)
    base y1 y2 ...                 (required)
    vars x1 x2 ...                 (may be empty / omitted)
    ideal: <poly>, <poly>, ...
    module <rank>: (<poly>; ...), ...
    check open | flat | both       (default both)
    power <k>                      (optional max-power override)

Polynomials are +/- sums of products of rational coefficients ("3", "3/2"),
declared variables, "^" integer powers and parentheses.

Exit codes: 0 verdicts computed, 1 parse/semantic error, 2 unsupported input,
3 resource limit or timeout.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import __version__
from .fields import QQ, PrimeField
from .poly import Polynomial, RingLayout, integer_normalized, render_poly
from .power import ModuleSpec, Problem
from .verticality import (
    CharacteristicGuardError,
    CheckConfig,
    Verdict,
    check_flatness,
    check_openness,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int, expected: str | None = None):
        loc = f"line {line}, col {col}"
        full = f"{loc}: {message}"
        if expected:
            full += f" (expected {expected})"
        super().__init__(full)
        self.line = line
        self.col = col
        self.expected = expected


# ---------------------------------------------------------------------------
# polynomial expressions


class _Tokens:
    def __init__(self, text: str, line: int, col_offset: int):
        self.text = text
        self.line = line
        self.offset = col_offset
        self.pos = 0
        self.toks = []
        self._lex()
        self.i = 0

    def _lex(self):
        s, n = self.text, len(self.text)
        i = 0
        while i < n:
            ch = s[i]
            if ch.isspace():
                i += 1
                continue
            start = i
            if ch.isdigit():
                while i < n and s[i].isdigit():
                    i += 1
                self.toks.append(("INT", s[start:i], start))
            elif ch.isalpha() or ch == "_":
                while i < n and (s[i].isalnum() or s[i] == "_"):
                    i += 1
                self.toks.append(("IDENT", s[start:i], start))
            elif ch in "+-*^()/":
                self.toks.append((ch, ch, start))
                i += 1
            else:
                raise ParseError(
                    f"unexpected character {ch!r}",
                    self.line,
                    self.offset + start + 1,
                )
        self.toks.append(("EOF", "", n))

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, message, expected=None):
        _, _, start = self.peek()
        raise ParseError(message, self.line, self.offset + start + 1, expected)


def _parse_polyexpr(tokens: _Tokens, layout: RingLayout, fld) -> Polynomial:
    expr = _parse_sum(tokens, layout, fld)
    if tokens.peek()[0] != "EOF":
        tokens.error(f"trailing input {tokens.peek()[1]!r}", "end of expression")
    return expr


def _parse_sum(tokens, layout, fld):
    sign = 1
    if tokens.peek()[0] in ("+", "-"):
        sign = -1 if tokens.next()[0] == "-" else 1
    acc = _parse_product(tokens, layout, fld)
    if sign < 0:
        acc = -acc
    while tokens.peek()[0] in ("+", "-"):
        op = tokens.next()[0]
        term = _parse_product(tokens, layout, fld)
        acc = acc + term if op == "+" else acc - term
    return acc


def _parse_product(tokens, layout, fld):
    acc = _parse_power(tokens, layout, fld)
    while tokens.peek()[0] == "*":
        tokens.next()
        acc = acc * _parse_power(tokens, layout, fld)
    return acc


def _parse_power(tokens, layout, fld):
    base = _parse_atom(tokens, layout, fld)
    if tokens.peek()[0] == "^":
        tokens.next()
        kind, text, _ = tokens.peek()
        if kind != "INT":
            tokens.error("exponent must be an integer", "integer")
        tokens.next()
        base = base ** int(text)
    return base


def _parse_atom(tokens, layout, fld):
    kind, text, _ = tokens.peek()
    if kind == "INT":
        tokens.next()
        num = int(text)
        if tokens.peek()[0] == "/":
            tokens.next()
            k2, t2, _ = tokens.peek()
            if k2 != "INT":
                tokens.error("denominator must be an integer", "integer")
            tokens.next()
            if int(t2) == 0:
                tokens.error("zero denominator")
            return Polynomial.constant(layout, fld, Fraction(num, int(t2)))
        return Polynomial.constant(layout, fld, num)
    if kind == "IDENT":
        tokens.next()
        try:
            return Polynomial.variable(layout, fld, text)
        except KeyError:
            raise ParseError(
                f"undeclared variable {text!r}",
                tokens.line,
                tokens.offset + tokens.toks[tokens.i - 1][2] + 1,
            ) from None
    if kind == "(":
        tokens.next()
        inner = _parse_sum(tokens, layout, fld)
        if tokens.peek()[0] != ")":
            tokens.error("unbalanced parenthesis", "')'")
        tokens.next()
        return inner
    tokens.error(f"unexpected token {text!r}", "number, variable or '('")


# ---------------------------------------------------------------------------
# problem parsing


def _split_top_level(text: str, sep: str):
    """Split on sep outside parentheses; yields (chunk, start_offset)."""
    depth = 0
    start = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth = max(0, depth - 1)
        elif ch == sep and depth == 0:
            yield text[start:i], start
            start = i + 1
    yield text[start:], start


def parse_problem(text: str) -> Problem:
    field = QQ
    base: list = []
    fibre: list = []
    ideal_lines: list = []   # (payload, line_no, col_offset)
    module_rank: int | None = None
    module_lines: list = []
    checks: tuple | None = None
    max_power: int | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.lstrip()
        indent = len(line) - len(stripped)
        words = stripped.split()
        head = words[0]
        if head == "field":
            if len(words) == 2 and words[1] == "Q":
                field = QQ
            elif len(words) == 3 and words[1] == "F":
                try:
                    p = int(words[2])
                except ValueError:
                    raise ParseError("modulus must be an integer", lineno, indent + 1)
                try:
                    field = PrimeField(p)
                except ValueError:
                    raise ParseError("non-prime modulus", lineno, indent + 1)
            else:
                raise ParseError("malformed field statement", lineno, indent + 1, "'Q' or 'F <p>'")
        elif head == "base":
            for name in words[1:]:
                if not (name[0].isalpha() or name[0] == "_") or not all(
                    c.isalnum() or c == "_" for c in name
                ):
                    raise ParseError(f"bad variable name {name!r}", lineno, indent + 1)
                if name in base or name in fibre:
                    raise ParseError(f"duplicate variable {name!r}", lineno, indent + 1)
                base.append(name)
        elif head == "vars":
            for name in words[1:]:
                if not (name[0].isalpha() or name[0] == "_") or not all(
                    c.isalnum() or c == "_" for c in name
                ):
                    raise ParseError(f"bad variable name {name!r}", lineno, indent + 1)
                if name in base or name in fibre:
                    raise ParseError(f"duplicate variable {name!r}", lineno, indent + 1)
                fibre.append(name)
        elif head.startswith("ideal"):
            body = stripped[len("ideal"):].lstrip()
            if not body.startswith(":"):
                raise ParseError("missing ':' after 'ideal'", lineno, indent + 1, "':'")
            payload = body[1:]
            offset = len(raw) - len(payload)
            ideal_lines.append((payload, lineno, offset, tuple(base), tuple(fibre), field))
        elif head == "module":
            rest = stripped[len("module"):].lstrip()
            head_part, _, payload = rest.partition(":")
            if not _:
                raise ParseError("missing ':' after module rank", lineno, indent + 1, "':'")
            try:
                rank = int(head_part.strip())
            except ValueError:
                raise ParseError("module rank must be an integer", lineno, indent + 1)
            if rank < 1:
                raise ParseError("module rank must be >= 1", lineno, indent + 1)
            if module_rank is not None and module_rank != rank:
                raise ParseError("conflicting module ranks", lineno, indent + 1)
            module_rank = rank
            offset = len(raw) - len(payload)
            module_lines.append((payload, lineno, offset, tuple(base), tuple(fibre), field))
        elif head == "check":
            if len(words) != 2 or words[1] not in ("open", "flat", "both"):
                raise ParseError("malformed check statement", lineno, indent + 1, "'open', 'flat' or 'both'")
            checks = ("open", "flat") if words[1] == "both" else (words[1],)
        elif head == "power":
            if len(words) != 2:
                raise ParseError("malformed power statement", lineno, indent + 1, "'power <k>'")
            try:
                max_power = int(words[1])
            except ValueError:
                raise ParseError("power must be an integer", lineno, indent + 1)
            if max_power < 1:
                raise ParseError("power must be >= 1", lineno, indent + 1)
        else:
            raise ParseError(f"unknown statement {head!r}", lineno, indent + 1)

    if not base:
        raise ParseError("no base variables declared", 1, 1)

    layout = RingLayout(tuple(base), tuple(fibre), 1, None)

    gens = []
    for payload, lineno, offset, base_then, fibre_then, fld_then in ideal_lines:
        scope = RingLayout(base_then, fibre_then, 1, None)
        for chunk, chunk_off in _split_top_level(payload, ","):
            tokens = _Tokens(chunk, lineno, offset + chunk_off)
            g = _parse_polyexpr(tokens, scope, fld_then)
            if g.is_zero:
                raise ParseError("zero generator", lineno, offset + chunk_off + 1)
            gens.append(_lift(g, layout, field))

    module = None
    if module_rank is not None:
        vectors = []
        for payload, lineno, offset, base_then, fibre_then, fld_then in module_lines:
            scope = RingLayout(base_then, fibre_then, 1, None)
            for chunk, chunk_off in _split_top_level(payload, ","):
                s = chunk.strip()
                if not s:
                    raise ParseError("empty module vector", lineno, offset + chunk_off + 1)
                if not (s.startswith("(") and s.endswith(")")):
                    raise ParseError("module vector must be parenthesized", lineno, offset + chunk_off + 1, "'(' ... ')'")
                inner = s[1:-1]
                inner_off = offset + chunk_off + chunk.index("(") + 1
                comps = []
                for comp_text, comp_off in _split_components(inner):
                    tokens = _Tokens(comp_text, lineno, inner_off + comp_off)
                    comps.append(_lift(_parse_polyexpr(tokens, scope, fld_then), layout, field))
                if len(comps) != module_rank:
                    raise ParseError(
                        f"module vector has {len(comps)} components, rank is {module_rank}",
                        lineno,
                        offset + chunk_off + 1,
                    )
                vectors.append(tuple(comps))
        module = ModuleSpec(module_rank, tuple(vectors))

    return Problem(
        field=field,
        base_vars=tuple(base),
        fibre_vars=tuple(fibre),
        ideal_gens=tuple(gens),
        module=module,
        checks=checks or ("open", "flat"),
        max_power=max_power,
    )


def _split_components(text: str):
    depth = 0
    start = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth = max(0, depth - 1)
        elif ch == ";" and depth == 0:
            yield text[start:i], start
            start = i + 1
    yield text[start:], start


def _lift(g: Polynomial, layout: RingLayout, field) -> Polynomial:
    """Re-embed a polynomial parsed in a prefix scope into the full layout."""
    from .poly import transport

    return transport(g, layout, field)


def render_problem(problem: Problem) -> str:
    """Inverse of parse_problem up to formatting (round-trip tested)."""
    lines = [f"field {'Q' if problem.field == QQ else 'F ' + str(problem.field.p)}"]
    lines.append("base " + " ".join(problem.base_vars))
    if problem.fibre_vars:
        lines.append("vars " + " ".join(problem.fibre_vars))
    if problem.ideal_gens:
        lines.append("ideal: " + ", ".join(render_poly(g) for g in problem.ideal_gens))
    if problem.module is not None:
        vecs = ", ".join(
            "(" + "; ".join(render_poly(c) for c in v) + ")"
            for v in problem.module.relations
        )
        lines.append(f"module {problem.module.rank}: {vecs}" if vecs else f"module {problem.module.rank}:")
    if problem.checks == ("open", "flat"):
        lines.append("check both")
    else:
        lines.append("check " + problem.checks[0])
    if problem.max_power is not None:
        lines.append(f"power {problem.max_power}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# reports


@dataclass
class Report:
    problem: Problem
    verdicts: list
    trace: bool = False


def _render_witness(p) -> str:
    if isinstance(p, Polynomial):
        return render_poly(integer_normalized(p))
    # module vector
    return "(" + "; ".join(render_poly(integer_normalized(c)) for c in p) + ")"


def _verdict_json(v: Verdict, trace: bool) -> dict:
    d: dict = {"kind": v.kind, "outcome": v.outcome}
    if v.failing_power is not None:
        d["failing_power"] = v.failing_power
    if v.witness_g is not None:
        d["witness_g"] = _render_witness(v.witness_g)
    if v.witness_r is not None:
        d["witness_r"] = _render_witness(v.witness_r)
    if v.certificate_r is not None:
        d["certificate_r"] = _render_witness(v.certificate_r)
    if v.certificate_v is not None:
        d["certificate_v"] = _render_witness(v.certificate_v)
    if not v.conclusive and v.outcome == "pass":
        d["conclusive"] = False
    if v.abort_reason is not None:
        d["abort_reason"] = v.abort_reason
    powers = []
    for ps in v.powers:
        entry = {"k": ps.k, "basis_size": ps.basis_size, "pairs": ps.pairs}
        if trace:
            entry["millis"] = ps.millis
        powers.append(entry)
    d["powers"] = powers
    return d


def render_report(report: Report, fmt: str = "text") -> str:
    problem = report.problem
    if fmt == "json":
        doc = {
            "version": __version__,
            "field": problem.field.name,
            "n": problem.n,
            "m": problem.m,
            "checks": [_verdict_json(v, report.trace) for v in report.verdicts],
        }
        return json.dumps(doc, indent=2) + "\n"

    lines = [f"fibrecheck {__version__}"]
    lines.append(f"field: {problem.field.name}")
    lines.append(f"base: {' '.join(problem.base_vars)}  (n = {problem.n})")
    if problem.fibre_vars:
        lines.append(f"fibre: {' '.join(problem.fibre_vars)}  (m = {problem.m})")
    if problem.ideal_gens:
        lines.append("ideal: " + ", ".join(render_poly(g) for g in problem.ideal_gens))
    else:
        lines.append("ideal: (0)")
    lines.append("")
    for v in report.verdicts:
        lines.extend(_render_verdict_text(v))
    return "\n".join(lines) + "\n"


def _render_verdict_text(v: Verdict):
    out = []
    if v.kind == "open":
        if v.outcome == "fail":
            out.append(
                f"check open: NOT OPEN (vertical component at fibred power {v.failing_power})"
            )
            out.append(f"  witness g = {_render_witness(v.witness_g)}")
            out.append(f"  witness r = {_render_witness(v.witness_r)}")
            out.append(
                f"  the image of the component cut out by g at power {v.failing_power}"
                f" lies inside the zero set of r"
            )
        elif v.outcome == "pass" and v.conclusive:
            out.append(
                f"check open: OPEN (no vertical components through fibred power {v.max_power_tested})"
            )
        elif v.outcome == "pass":
            out.append(
                f"check open: INCONCLUSIVE-PASS (no vertical component up to fibred power"
                f" {v.max_power_tested}, below the base dimension)"
            )
        else:
            out.append(f"check open: ABORTED ({v.abort_reason})")
    else:
        if v.outcome == "fail":
            out.append(
                f"check flat: NOT FLAT (torsion at tensor power {v.failing_power})"
            )
            out.append(f"  certificate r = {_render_witness(v.certificate_r)}")
            out.append(f"  certificate v = {_render_witness(v.certificate_v)}")
            out.append(
                f"  r annihilates the class of v in the tensor power {v.failing_power}"
                f" while v is nonzero there"
            )
        elif v.outcome == "pass" and v.conclusive:
            out.append(
                f"check flat: FLAT (torsion-free through tensor power {v.max_power_tested})"
            )
        elif v.outcome == "pass":
            out.append(
                f"check flat: INCONCLUSIVE-PASS (torsion-free up to tensor power"
                f" {v.max_power_tested}, below the base dimension)"
            )
        else:
            out.append(f"check flat: ABORTED ({v.abort_reason})")
    for ps in v.powers:
        out.append(f"  power {ps.k}: basis size {ps.basis_size}, pairs {ps.pairs}")
    out.append("")
    return out


# ---------------------------------------------------------------------------
# driver


def _build_config(args, problem: Problem) -> CheckConfig:
    return CheckConfig(
        within=args.order,
        max_power=args.max_power if args.max_power is not None else problem.max_power,
        pair_limit=args.pair_limit,
        timeout_seconds=args.timeout_seconds,
        allow_char_p_flatness=args.allow_char_p_flatness,
    )


def run(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fibrecheck",
        description="Decide openness and flatness of Spec A -> Spec R by "
        "detecting vertical components / torsion in fibred powers.",
    )
    parser.add_argument("--input", default="-", help="input file (default: stdin)")
    parser.add_argument("--json", action="store_true", help="emit a JSON report")
    parser.add_argument("--max-power", type=int, default=None, help="override the tested power")
    parser.add_argument("--order", choices=("lex", "grevlex"), default="grevlex")
    parser.add_argument("--allow-char-p-flatness", action="store_true")
    parser.add_argument("--pair-limit", type=int, default=100_000)
    parser.add_argument("--timeout-seconds", type=float, default=None)
    parser.add_argument("--trace", action="store_true", help="per-power statistics incl. timing")
    args = parser.parse_args(argv)

    try:
        if args.input == "-":
            text = sys.stdin.read()
        else:
            with open(args.input, "r", encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        print(f"fibrecheck: cannot read input: {exc}", file=sys.stderr)
        return 1

    try:
        problem = parse_problem(text)
    except ParseError as exc:
        print(f"fibrecheck: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"fibrecheck: {exc}", file=sys.stderr)
        return 1

    config = _build_config(args, problem)
    verdicts = []
    try:
        for kind in problem.checks:
            if kind == "open":
                verdicts.append(check_openness(problem, config))
            else:
                verdicts.append(check_flatness(problem, config))
    except CharacteristicGuardError as exc:
        print(f"fibrecheck: unsupported: {exc}", file=sys.stderr)
        return 2

    report = Report(problem=problem, verdicts=verdicts, trace=args.trace)
    sys.stdout.write(render_report(report, "json" if args.json else "text"))
    if args.trace:
        for v in verdicts:
            for ps in v.powers:
                print(
                    f"trace: {v.kind} power {ps.k}: basis {ps.basis_size},"
                    f" pairs {ps.pairs}, {ps.millis} ms",
                    file=sys.stderr,
                )
    if any(v.outcome == "aborted" for v in verdicts):
        return 3
    return 0


def main() -> None:
    sys.exit(run())
