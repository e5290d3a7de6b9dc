"""Command-line front end: ``sadic <command> ...``.

Exit codes: 0 on success, 1 when a verification fails, 2 on usage or
input errors.  Tabular output is CSV by default, JSON with ``--format json``.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from pathlib import Path
from typing import Sequence

from .complexity import bispecial_report, complexity_profile, growth_fit, special_factors
from .directive import generate_prefix, load_directive
from .errors import SadicError
from .fixtures import FIXTURES, MORPHISMS, fixture
from .index import FactorIndex
from .morphisms import (
    format_morphism,
    growth_classify,
    load_morphism,
    pansiot_classify,
    predicates,
    uniform_recurrence_check,
)
from .returns import pow_set, return_profile, return_words
from .verify import TARGETS, run_target
from .words import Word, read_words

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- output -----------------------------------------------------------------

def emit(rows: list[dict], fmt: str, out, extra: dict | None = None) -> None:
    if fmt == "json":
        payload = {**(extra or {}), "rows": rows} if extra else rows
        json.dump(payload, out, indent=2, default=str)
        out.write("\n")
        return
    if not rows:
        return
    writer = csv.DictWriter(out, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


# -- inputs -----------------------------------------------------------------

def _read_input(args) -> Word:
    if args.input:
        text = sys.stdin.read() if args.input == "-" else Path(args.input).read_text()
        words = read_words(text)
        if len(words) != 1:
            raise UsageError(f"expected one word in {args.input}, found {len(words)}")
        return words[0]
    if args.fixture:
        if args.prefix is None:
            raise UsageError("--fixture needs --prefix")
        return fixture(args.fixture).generate(args.prefix)
    raise UsageError("give --input FILE or --fixture NAME --prefix N")


def _resolve_morphism(name: str):
    if name in MORPHISMS:
        return MORPHISMS[name]
    path = Path(name)
    if not path.exists():
        raise UsageError(f"{name!r} is neither a known morphism nor a file")
    return load_morphism(path.read_text())


def _factor(text: str, w: Word) -> Word:
    return Word.parse(text, w.alphabet_size)


# -- commands ---------------------------------------------------------------

def cmd_morph_info(args, out) -> int:
    sigma = _resolve_morphism(args.morphism)
    preds = predicates(sigma)
    info = {
        "morphism": format_morphism(sigma),
        "domain": sigma.domain_size,
        "codomain": sigma.codomain_size,
        "image_lengths": sigma.image_lengths(),
        "non_erasing": preds.non_erasing,
        "primitive": preds.primitive,
        "strongly_primitive": preds.strongly_primitive,
        "proper": preds.proper,
        "expansive": preds.expansive,
    }
    if sigma.domain_size == sigma.codomain_size and not sigma.is_erasing():
        gc = growth_classify(sigma)
        info.update(
            growth=gc.kind.value,
            bounded_letters=sorted(gc.bounded_letters),
            alpha=[gc.alpha[a] for a in range(sigma.domain_size)],
            beta=[round(gc.beta[a], 9) for a in range(sigma.domain_size)],
        )
    emit([{"property": k, "value": _cell(v)} for k, v in info.items()], args.format, out)
    return EXIT_OK


def _cell(value) -> str:
    if isinstance(value, (list, tuple)):
        return " ".join(str(x) for x in value)
    return str(value)


def cmd_gen(args, out) -> int:
    if args.directive:
        d = load_directive(Path(args.directive).read_text())
    elif args.fixture:
        fx = fixture(args.fixture)
        if fx.directive is None:
            raise UsageError(f"fixture {args.fixture} has no directive")
        d = fx.directive
    else:
        raise UsageError("give --directive FILE or --fixture NAME")
    if args.length == 0:
        if args.out:
            Path(args.out).write_text("")
        return EXIT_OK
    prefix = generate_prefix(d, args.length, args.mem_cap)
    text = prefix.word.to_text() + "\n"
    if args.out:
        Path(args.out).write_text(text)
        sidecar = {"directive": d.name, **prefix.sidecar()}
        Path(args.out + ".json").write_text(json.dumps(sidecar, indent=2) + "\n")
    else:
        out.write(text)
    return EXIT_OK


def cmd_complexity(args, out) -> int:
    w = _read_input(args)
    profile = complexity_profile(w, min(args.nmax, len(w)))
    emit(profile.rows(), args.format, out,
         {"prefix_length": len(w), "validity_horizon": profile.validity_horizon})
    return EXIT_OK


def cmd_special(args, out) -> int:
    w = _read_input(args)
    rows = [
        {"factor": sf.word.to_text(), "extensions": " ".join(map(str, sf.extensions))}
        for sf in special_factors(w, args.n, args.side)
    ]
    emit(rows, args.format, out)
    return EXIT_OK


def cmd_bispecial(args, out) -> int:
    w = _read_input(args)
    report = bispecial_report(w, min(args.nmax, len(w)))
    emit(report.rows(), args.format, out)
    return EXIT_OK


def cmd_returns(args, out) -> int:
    w = _read_input(args)
    if args.factor is not None:
        rows = [return_words(w, _factor(args.factor, w)).row()]
    else:
        index = FactorIndex(w)
        prof = return_profile(w, args.length, index)
        rows = [
            return_words(w, prof.factor(w, fid)).row()
            for fid in range(len(prof.counts))
            if prof.occurrences[fid] >= 2
        ]
        rows.sort(key=lambda r: r["factor"])
    emit(rows, args.format, out)
    return EXIT_OK


def cmd_pow(args, out) -> int:
    w = _read_input(args)
    result = pow_set(w, _factor(args.factor, w), args.cap)
    if args.format == "json":
        json.dump(result.to_json(), out)
        out.write("\n")
    else:
        row = result.to_json()
        emit([{"u": row["u"], "pow": " ".join(map(str, row["pow"])), "cap": row["cap"]}], "csv", out)
    return EXIT_OK


def cmd_classify(args, out) -> int:
    if args.morphism:
        sigma = _resolve_morphism(args.morphism)
        pc = pansiot_classify(sigma, args.seed)
        ur = uniform_recurrence_check(sigma, args.seed)
        info = {
            "label": pc.label.value,
            "growth": pc.growth.kind.value,
            "empirical": pc.empirical,
            "recurrence": ur.verdict,
            **{f"evidence.{k}": v for k, v in pc.evidence.items()},
        }
    else:
        w = _read_input(args)
        fit = growth_fit(complexity_profile(w, min(args.nmax, len(w))))
        info = {
            "label": fit.label,
            "best_model": fit.best_model,
            "margin": round(fit.margin, 6),
            "fit_range": fit.fit_range,
            **{f"residual.{k}": f"{v:.6g}" for k, v in fit.residuals.items()},
        }
    emit([{"property": k, "value": _cell(v)} for k, v in info.items()], args.format, out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    names = list(TARGETS) if args.target == "all" else [args.target]
    if args.target != "all" and args.target not in TARGETS:
        raise UsageError(f"unknown target {args.target!r}; choose from all, {', '.join(TARGETS)}")
    options = {}
    if args.k:
        if args.target != "sturmian":
            raise UsageError("--k applies to the sturmian target")
        options["k"] = [int(x) for x in args.k.split(",")]
    start = time.perf_counter()
    results = [run_target(name, **(options if name == "sturmian" else {})) for name in names]
    rows = [
        {"target": r.target, "criterion": r.criterion, **c.row()}
        for r in results
        for c in r.checks
    ]
    digest = hashlib.sha256(json.dumps([names, options], sort_keys=True).encode()).hexdigest()[:16]
    extra = {
        "command": "verify",
        "inputs_digest": digest,
        "targets": {r.target: {"passed": r.passed, "seconds": round(r.seconds, 3), "limit": r.time_limit} for r in results},
    }
    emit(rows, args.format, out, extra)
    for r in results:
        print(r.summary(), file=sys.stderr)
    print(f"wall clock {time.perf_counter() - start:.1f}s", file=sys.stderr)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


# -- parser -----------------------------------------------------------------

def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", help="file holding one word in the text format ('-' for stdin)")
    p.add_argument("--fixture", choices=sorted(FIXTURES), help="generate the input from a fixture")
    p.add_argument("--prefix", type=_non_negative, help="prefix length generated from --fixture")


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    parser = argparse.ArgumentParser(prog="sadic", description="S-adic words and factor statistics")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("morph-info", parents=[common], help="predicates and growth of a morphism")
    p.add_argument("morphism", help="catalog name or a morphism file (text or JSON)")
    p.set_defaults(func=cmd_morph_info)

    p = sub.add_parser("gen", parents=[common], help="generate a prefix of a directive word")
    p.add_argument("--directive", help="directive JSON file")
    p.add_argument("--fixture", choices=sorted(FIXTURES))
    p.add_argument("--length", type=_non_negative, required=True)
    p.add_argument("--out", help="write the word here and the provenance to OUT.json")
    p.add_argument("--mem-cap", type=int, default=None, help="letter cap (default from SADIC_MEM_CAP)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("complexity", parents=[common], help="p(n), s(n) and the certified horizon")
    _add_input(p)
    p.add_argument("--nmax", type=_non_negative, required=True)
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("special", parents=[common], help="special factors of one length")
    _add_input(p)
    p.add_argument("--n", type=_non_negative, required=True)
    p.add_argument("--side", choices=("left", "right"), default="right")
    p.set_defaults(func=cmd_special)

    p = sub.add_parser("bispecial", parents=[common], help="bispecial factors with bilateral orders")
    _add_input(p)
    p.add_argument("--nmax", type=_non_negative, required=True)
    p.set_defaults(func=cmd_bispecial)

    p = sub.add_parser("returns", parents=[common], help="return words to a factor or to every factor of a length")
    _add_input(p)
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--factor")
    which.add_argument("--length", type=int, help="report every factor of this length")
    p.set_defaults(func=cmd_returns)

    p = sub.add_parser("pow", parents=[common], help="exponent set of a factor")
    _add_input(p)
    p.add_argument("--factor", required=True)
    p.add_argument("--cap", type=_non_negative, required=True)
    p.set_defaults(func=cmd_pow)

    p = sub.add_parser("classify", parents=[common], help="complexity class of a fixed point or a word")
    _add_input(p)
    p.add_argument("--morphism", help="classify the fixed point of this morphism")
    p.add_argument("--seed", type=int, default=0, help="letter the fixed point starts with")
    p.add_argument("--nmax", type=int, default=5000, help="largest length fitted for --input")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("target", help=f"one of: all, {', '.join(TARGETS)}")
    p.add_argument("--k", help="comma-separated k-sequence for the sturmian target")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (UsageError, SadicError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"sadic {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
