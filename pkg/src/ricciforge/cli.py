"""Command-line front end.

Exit codes: 0 when every selected claim passes, 1 when one fails, 2 for
usage errors (bad flags or parameters outside a claim's domain), 3 for
anything unexpected.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import suites
from .errors import NotFound, ProfileTooLarge, RicciForgeError, Unsatisfiable
from .reports import VerificationReport, dumps_csv, dumps_json, loads_json

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def thread_count(config: dict | None = None) -> int:
    """Pool size: ``RICCIFORGE_THREADS``, else the config ``threads`` key, else the CPU count."""
    raw = os.environ.get("RICCIFORGE_THREADS") or (config or {}).get("threads")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise UsageError(f"thread count must be an integer, got {raw!r}") from exc
    if n < 1:
        raise UsageError("thread count must be positive")
    return n


def read_config(path: str | None) -> dict[str, str]:
    """Simple ``key = value`` file; ``#`` starts a comment, dashes in keys become underscores."""
    if not path:
        return {}
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _k_range(text: str) -> range:
    try:
        a, b = text.split("..")
        lo, hi = int(a), int(b)
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected a..b") from exc
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError("need 1 <= a <= b")
    return range(lo, hi + 1)


def _lambda(text: str):
    if text == "auto":
        return "auto"
    try:
        v = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError("lambda must be a number or 'auto'") from exc
    if not v > 1:
        raise argparse.ArgumentTypeError("lambda must exceed 1")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file merged under the flags")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--timing", action="store_true", help="record wall-clock runtime (breaks byte-identity)")
    single = argparse.ArgumentParser(add_help=False, parents=[common])
    single.add_argument("--out", help="write the report here instead of stdout")

    p = argparse.ArgumentParser(prog="ricciforge", description="Numerical certificates for the bundle metrics.")
    sub = p.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run one claim family")
    vsub = verify.add_subparsers(dest="claim", required=True)

    r = vsub.add_parser("ricci", parents=[single])
    r.add_argument("--k", type=_positive_int, required=True)
    r.add_argument("--lambda", dest="lam", type=_lambda, default="auto")
    r.add_argument("--samples", type=_positive_int, default=10_000)
    r.add_argument("--exclusion", type=float, default=0.05)
    r.add_argument("--seed", type=int, default=0)

    c = vsub.add_parser("chern", parents=[single])
    c.add_argument("--k", type=_positive_int, required=True)
    c.add_argument("--radius", type=float)
    c.add_argument("--clifford", action="store_true")
    c.add_argument("--order", type=_positive_int, default=32)

    d = vsub.add_parser("diameter", parents=[single])
    d.add_argument("--k", type=_positive_int, required=True)
    d.add_argument("--lambda", dest="lam", type=_lambda, default="auto")
    d.add_argument("--nodes", type=_positive_int, default=5000)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--round", action="store_true", help="also run the round-metric control")

    vsub.add_parser("green", parents=[single])

    cf = vsub.add_parser("conformal", parents=[single])
    cf.add_argument("--k", type=_positive_int, default=1)
    cf.add_argument("--points", type=_positive_int, default=20)
    cf.add_argument("--seed", type=int, default=0)

    fb = vsub.add_parser("framebundle", parents=[single])
    fb.add_argument("--ric-lower", type=float, required=True)
    fb.add_argument("--rm", type=float, required=True)
    fb.add_argument("--drm", type=float, required=True)
    fb.add_argument("--margin", type=float, default=2.0)

    group = sub.add_parser("group", help="Heisenberg group checks")
    gsub = group.add_subparsers(dest="claim", required=True)
    gi = gsub.add_parser("index", parents=[single])
    gi.add_argument("--k", type=_positive_int, required=True)
    gr = gsub.add_parser("relations", parents=[single])
    gr.add_argument("--k", type=_positive_int, required=True)
    gr.add_argument("--seed", type=int, default=0)

    sw = sub.add_parser("sweep", parents=[common], help="Ricci band, layers and Clifford integral over a k range")
    sw.add_argument("--k-range", type=_k_range, required=True)
    sw.add_argument("--delta", type=float, default=0.05)
    sw.add_argument("--samples", type=_positive_int, default=10_000)
    sw.add_argument("--out", dest="out_dir", help="directory for reports.json and reports.csv")

    rp = sub.add_parser("report", parents=[single], help="re-emit a saved JSON report")
    rp.add_argument("--input", help="saved JSON report (default: stdin)")
    return p


def _leaf_parsers(parser: argparse.ArgumentParser):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for child in action.choices.values():
                yield child
                yield from _leaf_parsers(child)


def apply_config(parser: argparse.ArgumentParser, config: dict[str, str]) -> None:
    """Use config values as defaults, converted with each option's own type."""
    for leaf in _leaf_parsers(parser):
        for action in leaf._actions:
            if action.dest in config and action.dest != "config":
                raw = config[action.dest]
                if isinstance(action, argparse._StoreTrueAction):
                    value = raw.lower() in ("1", "true", "yes", "on")
                elif action.type is not None:
                    try:
                        value = action.type(raw)
                    except (argparse.ArgumentTypeError, ValueError) as exc:
                        raise UsageError(f"config {action.dest}: {exc}") from exc
                else:
                    value = raw
                if action.choices is not None and value not in action.choices:
                    raise UsageError(f"config {action.dest}: {value!r} not in {sorted(action.choices)}")
                action.required = False
                leaf.set_defaults(**{action.dest: value})


def _sweep_one(k: int, args) -> list[VerificationReport]:
    t = args.timing
    return [
        suites.ricci_band(k, "auto", args.samples, delta=args.delta, timing=t),
        suites.layer_consistency(k, timing=t),
        suites.chern_clifford(k, timing=t),
    ]


def run_claims(args, config) -> list[VerificationReport]:
    t = args.timing
    if args.command == "verify":
        if args.claim == "ricci":
            return [suites.ricci_band(args.k, args.lam, args.samples, args.exclusion, args.seed, timing=t)]
        if args.claim == "chern":
            out = []
            if args.radius is not None:
                out.append(suites.chern_spheres(args.k, args.radius, args.order, timing=t))
            elif not args.clifford:
                out += [suites.chern_spheres(args.k, r, args.order, timing=t) for r in (0.1, 0.2)]
            if args.clifford:
                out.append(suites.chern_clifford(args.k, max(args.order, 64), timing=t))
            return out
        if args.claim == "diameter":
            out = [suites.diameter(args.k, args.lam, args.nodes, args.seed, timing=t)]
            if args.round:
                out.append(suites.diameter_round(args.nodes, args.seed, timing=t))
            return out
        if args.claim == "green":
            return [suites.green_ode(timing=t), suites.green_limit(timing=t)]
        if args.claim == "conformal":
            return [suites.conformal_identity(args.k, args.points, args.seed, timing=t),
                    suites.oracle_conformal(seed=args.seed, timing=t)]
        if args.claim == "framebundle":
            return [suites.framebundle(args.ric_lower, args.rm, args.drm, args.margin, timing=t)]
    if args.command == "group":
        if args.claim == "index":
            return [suites.group_index(args.k, timing=t)]
        return [suites.group_relations(args.k, args.seed, timing=t)]
    if args.command == "sweep":
        with ThreadPoolExecutor(max_workers=thread_count(config)) as pool:
            chunks = list(pool.map(lambda k: _sweep_one(k, args), args.k_range))
        reports = [r for chunk in chunks for r in chunk]
        if args.out_dir:
            out = Path(args.out_dir)
            out.mkdir(parents=True, exist_ok=True)
            (out / "reports.json").write_text(dumps_json(reports), encoding="utf-8", newline="\n")
            (out / "reports.csv").write_text(dumps_csv(reports), encoding="utf-8", newline="\n")
        return reports
    if args.command == "report":
        try:
            text = Path(args.input).read_text(encoding="utf-8") if args.input else sys.stdin.read()
            return loads_json(text)
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot read report file: {exc}") from exc
    raise UsageError("unknown command")


def emit(reports, fmt: str, out: str | None) -> None:
    text = dumps_json(reports) if fmt == "json" else dumps_csv(reports)
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    try:
        known, _ = pre.parse_known_args(argv)
        config = read_config(known.config)
        parser = build_parser()
        apply_config(parser, config)
    except UsageError as exc:
        print(f"ricciforge: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        reports = run_claims(args, config)
        emit(reports, args.format, getattr(args, "out", None))
    except (NotFound, Unsatisfiable, ProfileTooLarge) as exc:
        # a search for parameters meeting the claim came up empty
        print(f"ricciforge: claim failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (UsageError, ValueError, RicciForgeError) as exc:
        # precondition violations surface as ValueError or a package error
        print(f"ricciforge: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"ricciforge: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
