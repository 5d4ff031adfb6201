"""Command-line front end: ``twophoton <command> <scenario> [options]``.

Exit codes: 0 success, 1 parse error, 2 contract violation while running,
3 no-signaling verification failure.
"""
from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from .qstate import ContractViolation
from .scenario import (
    ScenarioError, chsh_from_report, emit, parse_scenario, run_scenario,
)

EXIT_OK, EXIT_PARSE, EXIT_CONTRACT, EXIT_NOSIGNAL = 0, 1, 2, 3


def _read_scenario_text(path: str) -> tuple[str, str]:
    p = Path(path)
    if p.is_file():
        return p.read_text(encoding="utf-8"), p.stem
    # fall back to the scenarios shipped with the package
    bundled = resources.files("twophoton") / "scenarios" / p.name
    if not p.suffix:
        bundled = resources.files("twophoton") / "scenarios" / f"{p.name}.scenario"
    if bundled.is_file():
        return bundled.read_text(encoding="utf-8"), Path(bundled.name).stem
    raise FileNotFoundError(f"scenario file not found: {path}")


def _coincidence_view(report: dict) -> dict:
    """Report variant whose sampled columns hold coincidence frequencies."""
    out = dict(report)
    ms = []
    for m in report["measurements"]:
        m = dict(m)
        c = m["coincidence"]
        m["freq_sampled"] = c["frequencies"]
        m["n_shots"] = sum(sum(row) for row in c["counts"])
        ms.append(m)
    out["measurements"] = ms
    return out


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twophoton",
        description="Two-photon polarization entanglement scenarios: exact tables, "
                    "sampling, no-signaling checks and coincidence counting.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "run": "all analyses (analytic, sampled, no-signaling, coincidences if configured)",
        "table": "analytic joint tables only",
        "chsh": "CHSH statistic from four measurement pairs (a0,b0) (a0,b1) (a1,b0) (a1,b1)",
        "nosignal": "verify arm-B marginals are unchanged by the arm-A operators",
        "coincidence": "time-tagged detector simulation and coincidence counting",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("scenario", help="scenario file (or name of a bundled scenario, e.g. paper.scenario)")
        p.add_argument("--format", choices=("table", "json", "csv"), default="table")
        p.add_argument("--out", type=Path, help="write output here instead of stdout")
        p.add_argument("--seed", type=int, help="override the scenario seed")
        p.add_argument("--shots", type=int, help="override the scenario shot count")
        if name == "coincidence":
            p.add_argument("--dump-streams", type=Path, metavar="DIR",
                           help="write each measurement's tag streams as CSV into DIR")
    return parser


def _dump_streams(sc, directory: Path) -> None:
    from . import coincidence as coinc
    from .optics import AnalyzerSetting
    from .qstate import Arm, apply_local
    from .scenario import _derived_seed

    directory.mkdir(parents=True, exist_ok=True)
    state = sc.state()
    for op in [o.build() for o in sc.ops_b] + [o.build() for o in sc.ops_a]:
        state = apply_local(state, op)
    spec = sc.coincidence
    for k, (sa, sb) in enumerate(sc.measurements, start=1):
        a = AnalyzerSetting(Arm.A, sa.build())
        b = AnalyzerSetting(Arm.B, sb.build())
        streams = coinc.generate_streams(state, a, b, spec.source, spec.duration,
                                         _derived_seed(sc.seed, k - 1, 1))
        for st in streams:
            coinc.write_tag_stream(st, directory / f"{sc.name}_m{k}_{st.station.value}.csv")


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        text, stem = _read_scenario_text(args.scenario)
        sc = parse_scenario(text, name=stem)
        if args.seed is not None and args.seed < 0:
            raise ScenarioError([(0, "--seed must be non-negative")])
        if args.shots is not None and args.shots < 0:
            raise ScenarioError([(0, "--shots must be non-negative")])
    except (OSError, ScenarioError) as exc:
        print(f"twophoton: {exc}", file=sys.stderr)
        return EXIT_PARSE

    sc = sc.with_overrides(seed=args.seed, shots=args.shots)
    cmd = args.command
    try:
        if cmd == "table":
            report = run_scenario(sc.with_overrides(shots=0), coincidences=False)
        elif cmd == "coincidence":
            if sc.coincidence is None:
                raise ContractViolation("scenario has no 'coincidence' directive")
            report = _coincidence_view(run_scenario(sc.with_overrides(shots=0)))
            if args.dump_streams is not None:
                _dump_streams(sc, args.dump_streams)
        elif cmd == "nosignal":
            report = run_scenario(sc.with_overrides(shots=0), coincidences=False)
        else:
            report = run_scenario(sc, coincidences=(cmd == "run"))
        if cmd == "chsh":
            report["chsh"] = chsh_from_report(report)
    except ContractViolation as exc:
        print(f"twophoton: {exc}", file=sys.stderr)
        return EXIT_CONTRACT

    if cmd == "nosignal" and args.format != "table":
        report = {"scenario": report["scenario"], "no_signaling": report["no_signaling"]}
    text = emit(report, args.format)
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if not report["no_signaling"]["passed"]:
        print("twophoton: no-signaling verification failed", file=sys.stderr)
        return EXIT_NOSIGNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
