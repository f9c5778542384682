"""Command-line front end.

    uniformchaos analyze SYSTEM.json [--scale N] [--ball M] [--period-bound P] [--json] [--expect-chaotic]
    uniformchaos certify SYSTEM.json --route main|mixing [--x1 SPEC --x2 SPEC] [--out PATH]
    uniformchaos certify CERT.json --revalidate
    uniformchaos axioms BASE.json

Exit codes: 0 success, 1 input error, 2 hypothesis or verdict failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Any

from . import __version__
from .chaos_verdicts import (
    HypothesisError,
    SensitivityCertificate,
    ShiftSystem,
    construct_sensitivity_main,
    construct_sensitivity_mixing,
    devaney_verdict,
    revalidate_certificate,
    system_from_json,
    verify_sensitivity,
)
from .group_actions import Integers
from .relation_algebra import InvalidBase, base_from_json, check_base_axioms, is_hausdorff_base
from .shift_spaces import configuration_from_json, periodic_word

EXIT_OK, EXIT_INPUT, EXIT_FAIL = 0, 1, 2


class InputError(Exception):
    pass


def _load(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top level must be a JSON object")
    return doc


def _dump(doc: Any) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False)


def _build_system(doc: dict, args=None):
    kw = {}
    if args is not None:
        kw = {"scale": args.scale, "ball": args.ball, "period_bound": args.period_bound}
    try:
        return system_from_json(doc, **kw)
    except KeyError as exc:
        raise InputError(f"missing key {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def _report(command: str, doc: dict, params: dict, body: dict, started: float) -> dict:
    return {
        "tool": {"name": "uniformchaos", "version": __version__},
        "command": command,
        "input": doc,
        "parameters": params,
        **body,
        "timing": {"seconds": round(time.perf_counter() - started, 6)},
    }


def _emit(text: str, out: str | None = None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_analyze(args) -> int:
    started = time.perf_counter()
    doc = _load(args.file)
    system = _build_system(doc, args)
    try:
        verdict = devaney_verdict(system)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    body = {"verdict": verdict.to_json()}
    if verdict.certificate is not None:
        body["certificate"] = verdict.certificate.to_json()
    report = _report("analyze", doc, system.parameters(), body, started)
    if args.json:
        _emit(_dump(report))
    else:
        v = verdict.to_json()
        p = system.parameters()
        print(f"scale {p['scale']}, ball {p['ball']}, period bound {p['period_bound']}, "
              f"{len(system.points)} sample points")
        for key in ("perfect", "transitive", "mixing", "periodic_dense", "sensitive", "devaney_chaotic"):
            print(f"  {key:<16}{'yes' if v[key] else 'no'}")
        print(f"  sensitivity via {v['sensitivity_route']}")
        for note in v["notes"]:
            print(f"  note: {note}")
        for name, check in v["checks"].items():
            print(f"  check {name}: {json.dumps(check, sort_keys=True)}")
    if args.expect_chaotic and not (verdict.devaney_chaotic and verdict.sensitive.passed):
        print("expected a chaotic, sensitive system", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _parse_point(system, spec: str, flag: str):
    spec = spec.strip()
    try:
        if spec.startswith("{"):
            doc = json.loads(spec)
            if isinstance(system, ShiftSystem):
                return configuration_from_json(system.group, doc)
            raise InputError(f"{flag}: finite systems take a carrier point, not a configuration")
        if isinstance(system, ShiftSystem):
            if not isinstance(system.group, Integers):
                raise InputError(f"{flag}: word shorthand only applies to shifts over Z")
            return periodic_word(tuple(spec), system.group)
        if spec in system.points:
            return spec
        as_json = json.loads(spec)
        if as_json in system.points:
            return as_json
        raise InputError(f"{flag}: {spec!r} is not a carrier point")
    except (json.JSONDecodeError, KeyError, ValueError) as exc:
        raise InputError(f"{flag}: cannot parse point {spec!r}: {exc}") from exc


def cmd_certify(args) -> int:
    started = time.perf_counter()
    doc = _load(args.file)
    if args.revalidate:
        try:
            cert = SensitivityCertificate.from_json(doc.get("certificate", doc))
        except KeyError as exc:
            raise InputError(f"missing key {exc.args[0]!r}") from exc
        except (TypeError, ValueError) as exc:
            raise InputError(str(exc)) from exc
        result = revalidate_certificate(cert)
        _emit(_dump(result))
        return EXIT_OK if result["passed"] else EXIT_FAIL
    if args.route is None:
        raise InputError("--route is required unless --revalidate is given")
    system = _build_system(doc, args)
    try:
        if args.route == "main":
            cert = construct_sensitivity_main(system)
        else:
            if (args.x1 is None) != (args.x2 is None):
                raise InputError("--x1 and --x2 must be given together")
            if args.x1 is None:
                if len(system.points) < 2:
                    raise HypothesisError("the system has fewer than two sample points")
                x1, x2 = system.points[0], system.points[1]
            else:
                x1, x2 = _parse_point(system, args.x1, "--x1"), _parse_point(system, args.x2, "--x2")
            if x1 == x2:
                raise InputError("--x1 and --x2 must be distinct points")
            cert = construct_sensitivity_mixing(system, x1, x2)
    except HypothesisError as exc:
        print(f"hypothesis not met: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    sens = verify_sensitivity(system, cert.u)
    check = revalidate_certificate(cert)
    body = {"certificate": cert.to_json(), "sensitivity": sens.to_json(), "revalidation": check}
    report = _report("certify", doc, system.parameters(), body, started)
    _emit(_dump(report), args.out)
    if args.out:
        print(f"certificate written to {args.out}; sensitive: {'yes' if sens.passed else 'no'}")
    return EXIT_OK if sens.passed and check["passed"] else EXIT_FAIL


def cmd_axioms(args) -> int:
    doc = _load(args.file)
    source = doc
    if "finite_system" in doc:
        source = doc["finite_system"]
    try:
        base = base_from_json({"carrier": source["carrier"], "base": source["base"]})
    except KeyError as exc:
        raise InputError(f"missing key {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    report = check_base_axioms(base)
    out = report.to_json()
    try:
        out["hausdorff"] = is_hausdorff_base(base)
    except InvalidBase:
        out["hausdorff"] = None
    _emit(_dump(out))
    return EXIT_OK if report.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uniformchaos", description="Desk-scale chaos verdicts for group actions.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def scale_flags(p):
        p.add_argument("--scale", type=int, help="basis depth (default 4)")
        p.add_argument("--ball", type=int, help="group ball radius (default 8)")
        p.add_argument("--period-bound", type=int, help="largest orbit counted as periodic (default 12)")

    p = sub.add_parser("analyze", help="run every verifier and report the verdicts")
    p.add_argument("file")
    scale_flags(p)
    p.add_argument("--json", action="store_true", help="print the full JSON report")
    p.add_argument("--expect-chaotic", action="store_true", help="exit 2 unless chaotic and sensitive")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("certify", help="build a sensitivity certificate")
    p.add_argument("file")
    p.add_argument("--route", choices=("main", "mixing"))
    p.add_argument("--x1", help="first point: a word over Z or a configuration as JSON")
    p.add_argument("--x2", help="second point, same format as --x1")
    p.add_argument("--out", help="write the certificate report here instead of stdout")
    p.add_argument("--revalidate", action="store_true", help="treat FILE as a certificate and re-check it")
    scale_flags(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("axioms", help="check a finite base against UN-1..UN-5")
    p.add_argument("file")
    p.set_defaults(func=cmd_axioms)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
