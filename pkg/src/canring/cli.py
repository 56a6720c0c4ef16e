"""Command line front end.

Exit codes: 0 success or PASS, 1 FAIL, 2 usage or parse error,
3 INCONCLUSIVE (including a cap being hit).
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from .bounds import BoundsError, applicable_bounds, sharpest
from .cones import ConeError, build_sigma, box_points, extremal_rays_hirz, extremal_rays_proj, is_extremal
from .convergents import lower_convergents
from .divisor_file import digest, divisor_to_dict, parse_divisor_spec
from .exact import PolynomialSyntaxError, format_polynomial, format_rational
from .geometry import (
    DivisorError,
    QDivisor,
    basis_element_numerator,
    basis_hirz,
    basis_proj,
    degree_of,
    ghost_completion,
    graded_dimension,
    short_circuit,
)
from .oracle import Caps, CapExceeded, ENGINES, verify_bounds
from .presentation import PresentationError, effective_presentation

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class Report:
    command: list[str]
    input_digest: str | None
    result: dict
    warnings: list[str] = field(default_factory=list)
    exit_code: int = EXIT_OK
    text: str = ""

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "input_digest": self.input_digest,
            "result": self.result,
            "warnings": self.warnings,
        }


def _degree_json(deg):
    if isinstance(deg, tuple):
        return [format_rational(x) for x in deg]
    return format_rational(deg)


def _with_ghosts(D: QDivisor, warnings: list[str]) -> QDivisor:
    completed, added = ghost_completion(D)
    if added:
        warnings.append("added ghost divisors with coefficient 0: " + ", ".join(format_polynomial(p) for p in added))
    return completed


def _effective_warning(D: QDivisor, warnings: list[str]) -> None:
    positive = [c for c in D.components if c.coeff > 0]
    if D.variety.is_projective and D.is_effective() and len(positive) > 1:
        warnings.append(
            "the effective bound max k_i can fail when several coefficients are positive"
        )


def _short(D: QDivisor, result: dict) -> bool:
    info = short_circuit(D)
    if info is None:
        return False
    result["short_circuit"] = info
    return True


def cmd_bounds(D: QDivisor, args, warnings: list[str]) -> tuple[dict, int, str]:
    result = {"divisor": divisor_to_dict(D), "degree": _degree_json(degree_of(D))}
    if _short(D, result):
        return result, EXIT_OK, f"no bounds: {result['short_circuit']['reason']}, ring {result['short_circuit']['ring']}"
    Dg = _with_ghosts(D, warnings)
    reports = applicable_bounds(Dg)
    _effective_warning(Dg, warnings)
    gen, rel = sharpest(reports)
    best = min(reports, key=lambda r: (r.generator_bound, r.relation_bound))
    result.update(best.to_json())
    result["generator_bound"] = gen
    result["relation_bound"] = format_rational(rel)
    result["relation_bound_floor"] = int(rel // 1)
    result["all_bounds"] = [r.to_json() for r in reports]
    lines = [f"{r.source}: generators <= {r.generator_bound}, relations <= {format_rational(r.relation_bound)}" for r in reports]
    return result, EXIT_OK, "\n".join(lines)


def cmd_present(D: QDivisor, args, warnings: list[str]) -> tuple[dict, int, str]:
    if not D.variety.is_projective or not D.is_effective():
        raise UsageError("present needs an effective divisor on projective space")
    if not any(c.coeff > 0 for c in D.components):
        raise UsageError("present needs a positive coefficient")
    Dg = _with_ghosts(D, warnings)
    _effective_warning(Dg, warnings)
    pres = effective_presentation(Dg, caps=args.caps)
    result = {"divisor": divisor_to_dict(D), **pres.to_json()}
    text = [f"{len(pres.generators)} generators, {len(pres.relations)} relations"]
    text.append("generator degrees: " + " ".join(f"{d}:{n}" for d, n in pres.generator_multiset().items()))
    text.append("relation degrees: " + " ".join(f"{d}:{n}" for d, n in pres.relation_multiset().items()))
    return result, EXIT_OK, "\n".join(text)


def cmd_basis(D: QDivisor, args, warnings: list[str]) -> tuple[dict, int, str]:
    if args.degree < 0:
        raise UsageError("--degree must be non-negative")
    Dg = _with_ghosts(D, warnings)
    basis = (basis_proj if Dg.variety.is_projective else basis_hirz)(Dg, args.degree)
    elements = []
    for exp in basis.elements:
        elements.append({"exponents": list(exp), "numerator": format_polynomial(basis_element_numerator(Dg, args.degree, exp))})
    result = {
        "divisor": divisor_to_dict(Dg),
        "degree": args.degree,
        "dimension": graded_dimension(Dg, args.degree),
        "elements": elements,
    }
    text = [f"dim = {len(elements)}"] + [f"{e['exponents']}  {e['numerator']}" for e in elements]
    return result, EXIT_OK, "\n".join(text)


def cmd_cone(D: QDivisor, args, warnings: list[str]) -> tuple[dict, int, str]:
    result = {"divisor": divisor_to_dict(D), "degree": _degree_json(degree_of(D))}
    if _short(D, result):
        return result, EXIT_OK, f"no cone: {result['short_circuit']['reason']}"
    Dg = _with_ghosts(D, warnings)
    if Dg.variety.is_projective:
        rays = extremal_rays_proj(Dg)
    else:
        checks: list = []
        rays = extremal_rays_hirz(Dg, checks)
        result["ray_checks"] = [
            {"label": c.label, "closed_form": list(c.closed_form), "direct": list(c.direct), "agree": c.agree}
            for c in checks
        ]
        for c in checks:
            if not c.agree:
                warnings.append(f"ray {c.label}: closed form {c.closed_form} differs from direct {c.direct}")
    result["rays"] = [
        {"label": r.label, "point": list(r.point), "degree": r.degree, "extremal": is_extremal(rays, t)}
        for t, r in enumerate(rays)
    ]
    result["degree_sum"] = sum(r.degree for r in rays)
    text = [f"{r.label}: {r.point} (degree {r.degree})" for r in rays]
    if args.box:
        pts = box_points(rays, build_sigma(Dg))
        result["box_points"] = [list(p) for p in pts]
        text.append(f"{len(pts)} box points")
    return result, EXIT_OK, "\n".join(text)


def cmd_verify(D: QDivisor, args, warnings: list[str]) -> tuple[dict, int, str]:
    if args.max_degree < 1:
        raise UsageError("--max-degree must be at least 1")
    result = {"divisor": divisor_to_dict(D), "degree": _degree_json(degree_of(D))}
    if _short(D, result):
        result["status"] = "PASS"
        return result, EXIT_OK, f"PASS (trivial: {result['short_circuit']['reason']})"
    Dg = _with_ghosts(D, warnings)
    reports = applicable_bounds(Dg)
    _effective_warning(Dg, warnings)
    gen, rel = sharpest(reports)
    verdict = verify_bounds(
        Dg, gen, rel if args.relations else None, d_max=args.max_degree,
        relations=args.relations, engine=args.engine, caps=args.caps,
    )
    if verdict.report.capped:
        warnings.append(f"cap hit: {verdict.report.cap_reason}")
    result["bound_sources"] = [r.source for r in reports]
    result.update(verdict.to_json())
    text = verdict.status
    if verdict.witness:
        w = verdict.witness
        text += f": {w['count']} minimal {w['kind']}(s) in degree {w['degree']}"
    elif verdict.reason:
        text += f": {verdict.reason}"
    return result, verdict.exit_code, text


def cmd_convergents(args) -> tuple[dict, int, str]:
    try:
        alpha = Fraction(args.alpha)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"malformed rational {args.alpha!r}") from None
    seq = lower_convergents(alpha)
    result = {
        "alpha": format_rational(alpha),
        "convergents": [f"{c.c}/{c.d}" for c in seq],
    }
    return result, EXIT_OK, str(seq)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="canring", description="Section rings of Q-divisors on P^m and F_m.")
    parser.add_argument("--json", action="store_true", help="emit a JSON report")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_file(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="divisor spec (JSON), or - for stdin")
        p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="emit a JSON report")
        return p

    with_file("bounds", "generator and relation degree bounds")
    with_file("present", "explicit presentation of an effective divisor on P^m")
    p = with_file("basis", "monomial basis of one graded piece")
    p.add_argument("--degree", type=int, required=True)
    p = with_file("cone", "extremal rays of the cone of sections")
    p.add_argument("--box", action="store_true", help="also list the box points")
    p = with_file("verify", "check the bounds against the brute-force oracle")
    p.add_argument("--max-degree", type=int, required=True)
    p.add_argument("--relations", action="store_true", help="also check relation degrees")
    p.add_argument("--engine", choices=ENGINES, default="auto")
    p = sub.add_parser("convergents", help="lower convergents of p/q")
    p.add_argument("alpha")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="emit a JSON report")
    return parser


COMMANDS = {
    "bounds": cmd_bounds,
    "present": cmd_present,
    "basis": cmd_basis,
    "cone": cmd_cone,
    "verify": cmd_verify,
}


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> tuple[int, Report | None]:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (exc.code if isinstance(exc.code, int) else EXIT_USAGE), None
    warnings: list[str] = []
    source_digest = None
    try:
        args.caps = Caps.from_env()
        if args.command == "convergents":
            result, code, text = cmd_convergents(args)
        else:
            if args.file == "-":
                source = sys.stdin.read()
            else:
                with open(args.file, encoding="utf-8") as fh:
                    source = fh.read()
            source_digest = digest(source)
            D = parse_divisor_spec(source)
            result, code, text = COMMANDS[args.command](D, args, warnings)
    except (UsageError, DivisorError, PolynomialSyntaxError, BoundsError, PresentationError, OSError) as exc:
        print(f"canring: error: {exc}", file=stderr)
        return EXIT_USAGE, None
    except ValueError as exc:
        print(f"canring: error: {exc}", file=stderr)
        return EXIT_USAGE, None
    except (CapExceeded, ConeError) as exc:
        print(f"canring: inconclusive: {exc}", file=stderr)
        return EXIT_INCONCLUSIVE, None
    report = Report(argv, source_digest, result, warnings, code, text)
    for w in warnings:
        print(f"canring: warning: {w}", file=stderr)
    if args.json:
        stdout.write(json.dumps(report.to_json(), indent=2) + "\n")
    else:
        stdout.write(text + "\n")
    return code, report


def main(argv: list[str] | None = None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
