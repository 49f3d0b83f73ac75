"""Command-line front end: ``qmem <subcommand> [code] [options]``.

Data goes to stdout (or ``--output``); diagnostics go to stderr.  Exit
codes: 0 success, 2 bad input, 3 size limit, 4 a proven inequality or
numerical invariant failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .codespec import CodeSpec, parse_builtin, parse_code, validate
from .davies import (
    coupling_paulis,
    davies_model,
    gapped_bound_check,
    norm_bounds,
    storage_report,
)
from .eclayer import build_decoder, classify_syndromes, single_qubit_errors
from .errors import (
    AmbiguousGroundError,
    BoundViolation,
    InputError,
    NumericalError,
    PreconditionError,
    SizeLimitError,
)
from .pauli import pauli_from_string
from .thermal import (
    bogoliubov_check,
    fragility_expectation,
    gt_bound,
    partition_functions,
    relaxation_rate,
    sector_spectra,
)

SCHEMA_VERSION = 1
EXIT_INPUT = 2
EXIT_SIZE = 3
EXIT_BOUND = 4

FRAGILITY_HEADER = ("h", "beta", "expectation", "bound")
EVOLVE_HEADER = ("t", "drift", "bound", "decoded_distance")


@dataclass
class RunConfig:
    command: str
    code: CodeSpec
    args: argparse.Namespace


def _num(x):
    """Round floats to 12 significant digits for output."""
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return None
        return float(f"{x:.12g}")
    if isinstance(x, dict):
        return {k: _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    if isinstance(x, np.integer):
        return int(x)
    return x


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _dump_json(payload: dict, command: str) -> str:
    body = {"schema_version": SCHEMA_VERSION, "command": command}
    body.update(payload)
    return json.dumps(_num(body), indent=2, sort_keys=False) + "\n"


def _dump_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _floats(text: str, what: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"{what}: cannot parse {text!r} as comma-separated numbers") from exc
    if not values or not all(math.isfinite(v) for v in values):
        raise InputError(f"{what}: expected finite numbers, got {text!r}")
    return values


def _read_text(path: str, what: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {what} {path}: {exc.strerror}") from exc


def _load_code(args) -> CodeSpec:
    if args.builtin and args.code:
        raise InputError("give either a code file or --builtin, not both")
    if args.builtin:
        return parse_builtin(args.builtin)
    if not args.code:
        raise InputError("no code given: pass a code file or --builtin family:param")
    text = _read_text(args.code, "code file")
    try:
        return parse_code(text)
    except InputError as exc:
        raise type(exc)(f"{args.code}: {exc}") from exc


def _error_set(code: CodeSpec, args):
    if getattr(args, "errors_file", None):
        text = _read_text(args.errors_file, "error file")
        return [P for _, P in coupling_paulis(code, "file", text)]
    letters = {"single-xyz": "XYZ", "single-x": "X", "single-z": "Z"}[args.errors]
    return list(single_qubit_errors(code.n, letters))


def _couplings(code: CodeSpec, args):
    if args.coupling == "file":
        if not args.coupling_file:
            raise InputError("--coupling file needs --coupling-file PATH")
        return coupling_paulis(code, "file", _read_text(args.coupling_file, "coupling file"))
    return coupling_paulis(code, args.coupling)


def _dressing(code: CodeSpec, text: str | None):
    if text is None or text.strip() in ("", "I"):
        return None
    return pauli_from_string(text, code.n)


# -- subcommands -------------------------------------------------------------------


def cmd_parse(cfg: RunConfig) -> str:
    report = validate(cfg.code)
    payload = report.as_dict()
    payload["gauge"] = [
        {"coupling": r, "generator": str(g)} for r, g in cfg.code.gauge_terms
    ]
    return _dump_json(payload, "parse")


def cmd_spectrum(cfg: RunConfig) -> str:
    spec = sector_spectra(cfg.code, cfg.args.method)
    return _dump_json(spec.as_dict(), "spectrum")


def cmd_syndromes(cfg: RunConfig) -> str:
    code = cfg.code
    decoder = build_decoder(code)
    cl = classify_syndromes(code, decoder, _error_set(code, cfg.args))
    records = decoder.as_records()
    for rec, (s, good) in zip(records, cl.good.items()):
        rec["class"] = "good" if good else "bad"
    payload = {
        "errors": [str(E) for E in cl.errors],
        "syndromes": records,
        "summary": {"count_good": cl.count_good, "count_bad": cl.count_bad},
    }
    return _dump_json(payload, "syndromes")


def cmd_rate(cfg: RunConfig) -> str:
    code, args = cfg.code, cfg.args
    decoder = build_decoder(code)
    cl = classify_syndromes(code, decoder, _error_set(code, args))
    spec = sector_spectra(code)
    ga = partition_functions(spec, args.beta)
    rate = relaxation_rate(ga, cl, args.K, args.hmax)
    table = []
    for s, z in ga.z_scaled.items():
        log_z = ga.log_scale + math.log(z) if z > 0 else -math.inf
        table.append(
            {
                "syndrome": str(s),
                "class": "good" if cl.good[s] else "bad",
                "Z": math.exp(log_z) if log_z < 700 else None,
                "log_Z": log_z if math.isfinite(log_z) else None,
            }
        )
    try:
        gt = gt_bound(code, args.beta, cl, decoder).bound
    except SizeLimitError as exc:
        print(f"qmem: gt_bound skipped: {exc}", file=sys.stderr)
        gt = None
    payload = {
        "beta": args.beta,
        "ground_sector": str(spec.ground_sector),
        "ground_energy": spec.ground_energy,
        "gap": spec.gap,
        "Z_s": table,
        "log_Z_total": ga.log_z_total,
        "epsilon_qmem": rate.epsilon,
        "gt_bound": gt,
    }
    if rate.storage_time is not None:
        payload["storage_time"] = rate.storage_time
    return _dump_json(payload, "rate")


def cmd_fragility(cfg: RunConfig) -> str:
    code, args = cfg.code, cfg.args
    decoder = build_decoder(code) if "ec" in (args.field, args.observable) else None
    fd = _dressing(code, args.field_dressing)
    od = _dressing(code, args.observable_dressing)
    rows = []
    for beta in _floats(args.beta, "--beta"):
        for h in _floats(args.h, "--h"):
            value = fragility_expectation(
                code, beta, h, args.field, args.observable, fd, od, decoder
            )
            rows.append((h, beta, value, beta * h))
    return _dump_csv(FRAGILITY_HEADER, rows)


def cmd_bogoliubov(cfg: RunConfig) -> str:
    code, args = cfg.code, cfg.args
    pairs = []
    for item in args.dressing or []:
        if ";" not in item:
            raise InputError(f"--dressing expects 'G;G2', got {item!r}")
        g, gp = item.split(";", 1)
        pairs.append((_dressing(code, g), _dressing(code, gp)))
    report = bogoliubov_check(
        code, args.beta, _floats(args.h, "--h"), pairs, raise_on_violation=False
    )
    payload = {
        "beta": args.beta,
        "ok": report.ok,
        "min_margin": report.min_margin,
        "points": [
            {
                "h": p.h,
                "pair": p.label,
                "expectation": p.expectation,
                "field_expectation": p.field_expectation,
                "bound": p.bound,
                "margin": p.margin,
            }
            for p in report.points
        ],
    }
    out = _dump_json(payload, "bogoliubov")
    if not report.ok:
        _write(cfg.args.output, out)
        raise BoundViolation(f"fragility bound violated (min margin {report.min_margin:.3e})")
    return out


def cmd_evolve(cfg: RunConfig) -> str:
    code, args = cfg.code, cfg.args
    if args.tmax < 0:
        raise InputError(f"--tmax must be non-negative, got {args.tmax}")
    if args.checkpoints < 1:
        raise InputError(f"--checkpoints must be positive, got {args.checkpoints}")
    eta = _floats(args.eta, "--eta")
    if len(eta) != 3:
        raise InputError(f"--eta needs three components, got {len(eta)}")
    couplings = _couplings(code, args)
    decoder = build_decoder(code)
    model = davies_model(code, args.beta, args.hmax, couplings)
    cl = classify_syndromes(code, decoder, [P for _, P in couplings])
    times = np.linspace(0.0, args.tmax, args.checkpoints)
    report = storage_report(
        code, decoder, model, np.array(eta), times, cl, mode=args.encode
    )
    rows = [(r.t, r.drift, r.bound, r.decoded_distance) for r in report.rows]
    summary = {
        "beta": args.beta,
        "h_max": args.hmax,
        "K": model.K,
        "encode": report.mode,
        "epsilon_qmem": report.epsilon,
        "norm_bound": report.norm_bound,
        "fixed_point_residual": report.fixed_point_residual,
        "max_drift_ratio": report.max_ratio,
        "gap": model.gap,
        "method": report.method,
        "profile": report.profile,
        "checkpoints": len(rows),
    }
    if args.summary:
        _write(args.summary, _dump_json(summary, "evolve"))
    if args.format == "json":
        summary["trajectory"] = [dict(zip(EVOLVE_HEADER, r)) for r in rows]
        return _dump_json(summary, "evolve")
    return _dump_csv(EVOLVE_HEADER, rows)


def cmd_gapped(cfg: RunConfig) -> str:
    code, args = cfg.code, cfg.args
    decoder = build_decoder(code)
    model = davies_model(code, args.beta, args.hmax, _couplings(code, args))
    report = gapped_bound_check(code, decoder, model, samples=args.samples, seed=args.seed)
    nb = norm_bounds(model, args.norm_samples, args.seed) if args.norm_samples else None
    payload = {
        "beta": args.beta,
        "h_max": args.hmax,
        "K": model.K,
        "gap": report.gap,
        "bound": report.bound,
        "skipped": report.skipped,
        "reason": report.reason,
        "measured": report.measured,
        "max_measured": report.max_measured,
        "lowering_residual": report.lowering_residual,
        "zero_frequency_residual": report.zero_frequency_residual,
    }
    if nb is not None:
        payload["norm_upper"] = nb.upper
        payload["norm_sampled"] = nb.sampled_lower
    if report.skipped:
        print(f"qmem: gapped check skipped: {report.reason}", file=sys.stderr)
    return _dump_json(payload, "gapped")


COMMANDS = {
    "parse": cmd_parse,
    "spectrum": cmd_spectrum,
    "syndromes": cmd_syndromes,
    "rate": cmd_rate,
    "fragility": cmd_fragility,
    "bogoliubov": cmd_bogoliubov,
    "evolve": cmd_evolve,
    "gapped": cmd_gapped,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qmem", description="Thermal stability analysis of stabilizer and subsystem codes.")
    parser.add_argument("--version", action="version", version=f"qmem {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("code", nargs="?", help="code definition file")
    common.add_argument("--builtin", metavar="FAMILY:PARAM", help="built-in code, e.g. repetition:5")
    common.add_argument("--output", "-o", metavar="PATH", help="write data here instead of stdout")
    common.add_argument("--dense-limit", type=int, metavar="N", help="override the dense-matrix qubit cap")
    common.add_argument("--seed", type=int, default=0, help="seed for all sampling")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("parse", parents=[common], help="validate a code and report its group data")

    p = sub.add_parser("spectrum", parents=[common], help="sector-resolved spectrum")
    p.add_argument("--method", choices=("auto", "dense", "commuting"), default="auto")

    def add_errors(p):
        p.add_argument("--errors", choices=("single-xyz", "single-x", "single-z"), default="single-xyz",
                       help="elementary error set used for good/bad classification")
        p.add_argument("--errors-file", metavar="PATH", help="explicit error list, one Pauli per line")

    p = sub.add_parser("syndromes", parents=[common], help="decoder table and good/bad syndromes")
    add_errors(p)

    p = sub.add_parser("rate", parents=[common], help="relaxation rate and Golden-Thompson bound")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--K", type=int, help="coupling count for the storage-time estimate")
    p.add_argument("--hmax", type=float, help="rate scale for the storage-time estimate")
    add_errors(p)

    p = sub.add_parser("fragility", parents=[common], help="logical expectation under a field (CSV)")
    p.add_argument("--beta", required=True, help="comma-separated inverse temperatures")
    p.add_argument("--h", required=True, help="comma-separated field strengths")
    p.add_argument("--field", choices=("bare", "dressed", "ec"), default="bare")
    p.add_argument("--observable", choices=("bare", "dressed", "ec"), default="bare")
    p.add_argument("--field-dressing", metavar="PAULI")
    p.add_argument("--observable-dressing", metavar="PAULI")

    p = sub.add_parser("bogoliubov", parents=[common], help="check the fragility bounds")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--h", required=True, help="comma-separated field strengths")
    p.add_argument("--dressing", action="append", metavar="G;G2",
                   help="gauge elements dressing the field and the observable ('I' for none)")

    def add_bath(p):
        p.add_argument("--beta", type=float, required=True)
        p.add_argument("--hmax", type=float, default=1.0)
        p.add_argument("--coupling", choices=("single-x", "single-xyz", "file"), default="single-x")
        p.add_argument("--coupling-file", metavar="PATH")

    p = sub.add_parser("evolve", parents=[common], help="Davies evolution of an encoded qubit")
    add_bath(p)
    p.add_argument("--encode", choices=("thermal", "ground"), default="thermal")
    p.add_argument("--tmax", type=float, default=10.0)
    p.add_argument("--checkpoints", type=int, default=20)
    p.add_argument("--eta", default="0,0,1", help="Bloch vector x,y,z of the stored qubit")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--summary", metavar="PATH", help="also write a JSON summary here")

    p = sub.add_parser("gapped", parents=[common], help="gapped relaxation bound for ground encoding")
    add_bath(p)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--norm-samples", type=int, default=0, help="also sample the generator norm")
    return parser


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def main(argv=None) -> int:
    saved = os.environ.get("QMEM_DENSE_LIMIT")
    try:
        args = build_parser().parse_args(argv)
        if args.dense_limit is not None:
            if args.dense_limit < 1:
                raise InputError(f"--dense-limit must be positive, got {args.dense_limit}")
            os.environ["QMEM_DENSE_LIMIT"] = str(args.dense_limit)
        cfg = RunConfig(args.command, _load_code(args), args)
        out = COMMANDS[args.command](cfg)
        _write(args.output, out)
        return 0
    except (InputError, PreconditionError, AmbiguousGroundError) as exc:
        print(f"qmem: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SizeLimitError as exc:
        print(f"qmem: size limit: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except (BoundViolation, NumericalError) as exc:
        print(f"qmem: invariant violated: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except SystemExit as exc:
        # --help and --version
        return int(exc.code or 0)
    finally:
        if saved is None:
            os.environ.pop("QMEM_DENSE_LIMIT", None)
        else:
            os.environ["QMEM_DENSE_LIMIT"] = saved


def run(argv=None) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
