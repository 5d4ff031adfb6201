"""Line-oriented experiment scenarios: parsing, running, and report output.

A scenario is one directive per line; ``#`` starts a comment::

    name     paper
    state    singlet                  # or four complex amplitudes (VV VH HV HH)
    opA      qwp                      # qwp | retarder <delta> <angle> | matrix <m00> <m01> <m10> <m11>
    opB      retarder pi/2 pi/4
    measure  circular linear 0        # basis spec for A, then for B
    shots    100000
    seed     42
    coincidence pair_rate=1e4 duration=1 window=5e-9 efficiency_a=0.8 ...

Basis specs are ``circular``, ``linear <angle>``, ``elliptical <angle> <chi>``
or ``explicit <e0V> <e0H> <e1V> <e1H>``.  Angles are radians and accept
forms like ``0.3``, ``pi/8``, ``-3pi/4``, ``3*pi/8`` or ``22.5deg``.
Complex numbers use Python syntax (``0.5j``, ``-0.5+0.5j``).
"""
from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, replace
from typing import Any

import numpy as np

from . import coincidence as coinc
from . import measure as msr
from .optics import (
    AnalyzerSetting, RetarderSpec, circular_basis, elliptical_basis,
    explicit_basis, linear_basis, paper_qwp, retarder,
)
from .qstate import (
    ACCUM_TOL, Arm, ContractViolation, LocalOperator, PolarizationBasis,
    TwoPhotonState, apply_local, make_singlet,
)

__all__ = [
    "Scenario", "ScenarioError", "BasisSpec", "OperatorSpec", "CoincidenceSpec",
    "parse_scenario", "run_scenario", "emit", "SIGNIFICANT_DIGITS", "CSV_COLUMNS",
]

SIGNIFICANT_DIGITS = 12
CSV_COLUMNS = ["scenario", "basisA", "basisB", "outA", "outB",
               "p_analytic", "freq_sampled", "n_shots"]


class ScenarioError(ValueError):
    """Scenario text could not be parsed; ``errors`` holds ``(line, message)`` pairs."""

    def __init__(self, errors: list[tuple[int, str]]):
        self.errors = errors
        super().__init__("\n".join(f"line {n}: {msg}" if n else msg for n, msg in errors))


@dataclass(frozen=True)
class BasisSpec:
    kind: str  # circular | linear | elliptical | explicit
    params: tuple = ()

    def build(self) -> PolarizationBasis:
        if self.kind == "circular":
            return circular_basis()
        if self.kind == "linear":
            return linear_basis(self.params[0])
        if self.kind == "elliptical":
            return elliptical_basis(*self.params)
        m = _nearest_unitary(np.array(self.params, dtype=complex).reshape(2, 2).T,
                             "explicit basis is not orthonormal")
        return explicit_basis(m[:, 0], m[:, 1], name=self.label)

    @property
    def label(self) -> str:
        if self.kind == "circular":
            return "circular"
        args = ",".join(_fmt_param(p) for p in self.params)
        return f"{self.kind}({args})"


@dataclass(frozen=True)
class OperatorSpec:
    kind: str  # qwp | retarder | matrix
    arm: Arm
    params: tuple = ()

    def build(self) -> LocalOperator:
        if self.kind == "qwp":
            return paper_qwp(self.arm)
        if self.kind == "retarder":
            return retarder(RetarderSpec.wrapped(*self.params), self.arm)
        m = _nearest_unitary(np.array(self.params, dtype=complex).reshape(2, 2))
        return LocalOperator(m, self.arm, "matrix")


@dataclass(frozen=True)
class CoincidenceSpec:
    source: coinc.PairSourceSpec
    window: float
    duration: float


@dataclass(frozen=True)
class Scenario:
    name: str
    initial_state: str | tuple[complex, complex, complex, complex]
    ops_a: tuple[OperatorSpec, ...] = ()
    ops_b: tuple[OperatorSpec, ...] = ()
    measurements: tuple[tuple[BasisSpec, BasisSpec], ...] = ()
    shots: int = 0
    seed: int = 0
    coincidence: CoincidenceSpec | None = None

    def state(self) -> TwoPhotonState:
        if self.initial_state == "singlet":
            return make_singlet()
        v = np.array(self.initial_state, dtype=complex)
        return TwoPhotonState(v / np.linalg.norm(v))

    def with_overrides(self, seed: int | None = None, shots: int | None = None) -> "Scenario":
        kw = {}
        if seed is not None:
            kw["seed"] = seed
        if shots is not None:
            kw["shots"] = shots
        return replace(self, **kw)


# -- parsing -----------------------------------------------------------------

_ANGLE_RE = re.compile(
    r"^(?P<sign>[+-]?)(?P<num>\d+(?:\.\d*)?|\.\d+)?\*?pi(?:/(?P<den>\d+(?:\.\d*)?))?$")
_COINC_KEYS = {
    "pair_rate": "pair_rate", "efficiency_a": "efficiency_a", "efficiency_b": "efficiency_b",
    "jitter": "jitter_sigma", "dark_a": "dark_rate_a", "dark_b": "dark_rate_b",
}


def _nearest_unitary(m: np.ndarray, what: str = "matrix is not unitary") -> np.ndarray:
    """Polar projection onto U(2); rejects input farther than ACCUM_TOL from unitary."""
    err = np.max(np.abs(m.conj().T @ m - np.eye(2)))
    if err > ACCUM_TOL:
        raise ContractViolation(f"{what} (max |M^H M - I| = {err:.3g})")
    u, _, vh = np.linalg.svd(m)
    return u @ vh


def _fmt_param(p) -> str:
    if isinstance(p, complex):
        return repr(p)
    return f"{p:.12g}"


def parse_angle(tok: str) -> float:
    t = tok.strip().lower()
    if t.endswith("deg"):
        return math.radians(float(t[:-3]))
    m = _ANGLE_RE.match(t)
    if m:
        val = math.pi * float(m["num"] or 1.0) / float(m["den"] or 1.0)
        return -val if m["sign"] == "-" else val
    val = float(t)
    if not math.isfinite(val):
        raise ValueError(f"angle {tok!r} is not finite")
    return val


def _complex(tok: str) -> complex:
    val = complex(tok)
    if not (math.isfinite(val.real) and math.isfinite(val.imag)):
        raise ValueError(f"{tok!r} is not finite")
    return val


def _take_basis(toks: list[str]) -> tuple[BasisSpec, list[str]]:
    if not toks:
        raise ValueError("missing basis spec")
    kind, rest = toks[0].lower(), toks[1:]
    if kind == "circular":
        return BasisSpec("circular"), rest
    if kind == "linear":
        if not rest:
            raise ValueError("linear basis needs an angle")
        return BasisSpec("linear", (parse_angle(rest[0]),)), rest[1:]
    if kind == "elliptical":
        if len(rest) < 2:
            raise ValueError("elliptical basis needs <angle> <chi>")
        return BasisSpec("elliptical", (parse_angle(rest[0]), parse_angle(rest[1]))), rest[2:]
    if kind == "explicit":
        if len(rest) < 4:
            raise ValueError("explicit basis needs four complex components")
        spec = BasisSpec("explicit", tuple(_complex(x) for x in rest[:4]))
        spec.build()  # orthonormality check
        return spec, rest[4:]
    raise ValueError(f"unknown basis kind {toks[0]!r}")


def _parse_op(arm: Arm, toks: list[str]) -> OperatorSpec:
    if not toks:
        raise ValueError("missing operator")
    kind, rest = toks[0].lower(), toks[1:]
    if kind == "qwp":
        if rest:
            raise ValueError(f"qwp takes no arguments, got {rest}")
        spec = OperatorSpec("qwp", arm)
    elif kind == "retarder":
        if len(rest) != 2:
            raise ValueError("retarder needs <retardance> <fast-axis angle>")
        spec = OperatorSpec("retarder", arm, tuple(parse_angle(x) for x in rest))
    elif kind == "matrix":
        if len(rest) != 4:
            raise ValueError("matrix needs four complex entries m00 m01 m10 m11")
        spec = OperatorSpec("matrix", arm, tuple(_complex(x) for x in rest))
    else:
        raise ValueError(f"unknown operator {toks[0]!r}")
    spec.build()  # unitarity check
    return spec


def _parse_coincidence(toks: list[str]) -> CoincidenceSpec:
    kw: dict[str, float] = {}
    window = duration = None
    for tok in toks:
        if "=" not in tok:
            raise ValueError(f"expected key=value, got {tok!r}")
        key, val = tok.split("=", 1)
        key = key.lower()
        if key not in _COINC_KEYS and key not in ("window", "duration"):
            raise ValueError(f"unknown coincidence key {key!r}")
        x = float(val)
        if key == "window":
            window = x
        elif key == "duration":
            duration = x
        else:
            kw[_COINC_KEYS[key]] = x
    if "pair_rate" not in kw or window is None or duration is None:
        raise ValueError("coincidence needs pair_rate, window and duration")
    if not (window > 0 and duration > 0):
        raise ValueError("coincidence window and duration must be positive")
    return CoincidenceSpec(coinc.PairSourceSpec(**kw), window, duration)


def parse_scenario(text: str, name: str = "scenario") -> Scenario:
    """Parse scenario text; raises :class:`ScenarioError` listing every bad line."""
    errors: list[tuple[int, str]] = []
    fields: dict[str, Any] = {"name": name}
    ops = {Arm.A: [], Arm.B: []}
    measurements = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *toks = line.split()
        key = key.lower()
        try:
            if key == "name":
                if len(toks) != 1:
                    raise ValueError("name takes one token")
                fields["name"] = toks[0]
            elif key == "state":
                if "initial_state" in fields:
                    raise ValueError("state given twice")
                if toks == ["singlet"]:
                    fields["initial_state"] = "singlet"
                elif len(toks) == 4:
                    amps = tuple(_complex(x) for x in toks)
                    norm2 = sum(abs(c) ** 2 for c in amps)
                    if abs(norm2 - 1.0) > ACCUM_TOL:
                        raise ValueError(f"state amplitudes are not normalized (norm^2 = {norm2:.12g})")
                    fields["initial_state"] = amps
                else:
                    raise ValueError("state must be 'singlet' or four complex amplitudes")
            elif key in ("opa", "opb"):
                arm = Arm.A if key == "opa" else Arm.B
                ops[arm].append(_parse_op(arm, toks))
            elif key == "measure":
                ba, rest = _take_basis(toks)
                bb, rest = _take_basis(rest)
                if rest:
                    raise ValueError(f"unexpected trailing tokens {rest}")
                measurements.append((ba, bb))
            elif key in ("shots", "seed"):
                if len(toks) != 1:
                    raise ValueError(f"{key} takes one integer")
                v = int(toks[0])
                if v < 0:
                    raise ValueError(f"{key} must be non-negative")
                fields[key] = v
            elif key == "coincidence":
                fields["coincidence"] = _parse_coincidence(toks)
            else:
                raise ValueError(f"unknown directive {key!r}")
        except (ValueError, ContractViolation) as exc:
            errors.append((lineno, str(exc)))
    if "initial_state" not in fields:
        errors.append((0, "no initial state"))
    if errors:
        raise ScenarioError(errors)
    return Scenario(ops_a=tuple(ops[Arm.A]), ops_b=tuple(ops[Arm.B]),
                    measurements=tuple(measurements), **fields)


# -- running -----------------------------------------------------------------

def _derived_seed(seed: int, *key: int) -> int:
    return int(np.random.SeedSequence([seed, *key]).generate_state(1, np.uint64)[0])


def _ent(report: msr.EntanglementReport) -> dict:
    return {"concurrence": report.concurrence, "schmidt": list(report.schmidt_coefficients)}


def _amps(state: TwoPhotonState) -> list[list[float]]:
    return [[c.real, c.imag] for c in state.vector]


def run_scenario(sc: Scenario, coincidences: bool = True) -> dict:
    """Evaluate every requested analysis; the result is a plain JSON-ready dict."""
    initial = sc.state()
    ops_a = [o.build() for o in sc.ops_a]
    ops_b = [o.build() for o in sc.ops_b]
    after_b = initial
    for op in ops_b:
        after_b = apply_local(after_b, op)
    final = after_b
    for op in ops_a:
        final = apply_local(final, op)

    measurements = []
    probes = []
    for k, (sa, sb) in enumerate(sc.measurements):
        try:
            a = AnalyzerSetting(Arm.A, sa.build())
            b = AnalyzerSetting(Arm.B, sb.build())
        except ContractViolation as exc:
            raise ContractViolation(f"measurement {k + 1} ({sa.label} x {sb.label}): {exc}") from exc
        probes.append(b)
        jd = msr.joint_distribution(final, a, b)
        entry = {
            "basisA": sa.label,
            "basisB": sb.label,
            "labelsA": list(a.basis.labels),
            "labelsB": list(b.basis.labels),
            "p_analytic": jd.p.tolist(),
            "correlation": jd.correlation,
            "marginalA": msr.marginal(final, a).tolist(),
            "marginalB": msr.marginal(final, b).tolist(),
            "n_shots": sc.shots,
            "freq_sampled": None,
        }
        if sc.shots > 0:
            counts = msr.sample_counts(final, a, b, sc.shots, _derived_seed(sc.seed, k))
            entry["counts"] = counts.tolist()
            entry["freq_sampled"] = (counts / sc.shots).tolist()
        if sc.coincidence is not None and coincidences:
            entry["coincidence"] = _run_coincidence(final, a, b, sc.coincidence,
                                                    _derived_seed(sc.seed, k, 1))
        measurements.append(entry)

    if not probes:
        probes = [AnalyzerSetting(Arm.B, linear_basis(0.0))]
    ns = msr.verify_no_signaling(after_b, ops_a, probes)
    return {
        "scenario": sc.name,
        "seed": sc.seed,
        "shots": sc.shots,
        "initial_state": _amps(initial),
        "final_state": _amps(final),
        "operators": {"A": [o.build().name for o in sc.ops_a], "B": [o.build().name for o in sc.ops_b]},
        "entanglement": {"before": _ent(msr.entanglement_report(initial)),
                         "after": _ent(msr.entanglement_report(final))},
        "measurements": measurements,
        "no_signaling": {"passed": ns.passed, "max_deviation": ns.max_deviation,
                         "tol": ns.tol, "probes": len(probes)},
    }


def _run_coincidence(state, a, b, spec: CoincidenceSpec, seed: int) -> dict:
    sa, sb = coinc.generate_streams(state, a, b, spec.source, spec.duration, seed)
    res = coinc.match_coincidences(sa, sb, spec.window, spec.duration)
    out = {
        "events": [len(sa), len(sb)],
        "counts": res.counts.tolist(),
        "singlesA": res.singles_a.tolist(),
        "singlesB": res.singles_b.tolist(),
        "accidentals_estimate": res.accidentals_estimate,
        "window": res.window,
        "duration": res.duration,
    }
    try:
        est = coinc.estimate_statistics(res)
    except coinc.EmptyResultError:
        out.update(frequencies=None, correlation=None, correlation_error=None)
    else:
        out.update(frequencies=est.frequencies.tolist(), correlation=est.correlation,
                   correlation_error=est.correlation_error)
    return out


def chsh_from_report(report: dict) -> dict:
    """CHSH value from a report whose measurements are ordered
    (a0,b0), (a0,b1), (a1,b0), (a1,b1)."""
    ms = report["measurements"]
    if len(ms) != 4:
        raise ContractViolation(f"chsh needs exactly four measurement pairs, got {len(ms)}")
    if not (ms[0]["basisA"] == ms[1]["basisA"] and ms[2]["basisA"] == ms[3]["basisA"]
            and ms[0]["basisB"] == ms[2]["basisB"] and ms[1]["basisB"] == ms[3]["basisB"]):
        raise ContractViolation("measurements must be ordered (a0,b0), (a0,b1), (a1,b0), (a1,b1)")
    signs = (1, 1, 1, -1)
    out = {"S_analytic": _round(sum(s * m["correlation"] for s, m in zip(signs, ms))),
           "S_sampled": None, "S_sampled_error": None}
    if all(m["freq_sampled"] is not None for m in ms):
        es = []
        var = 0.0
        for m in ms:
            f = np.array(m["freq_sampled"])
            e = f[0, 0] + f[1, 1] - f[0, 1] - f[1, 0]
            es.append(e)
            var += (1 - e * e) / m["n_shots"]
        out["S_sampled"] = float(sum(s * e for s, e in zip(signs, es)))
        out["S_sampled_error"] = float(np.sqrt(var))
    return out


# -- output ------------------------------------------------------------------

# Below this magnitude a printed number is floating-point residue of an exact zero.
ZERO_FLOOR = 1e-15


def _round(x):
    if isinstance(x, float):
        return 0.0 if abs(x) < ZERO_FLOOR else float(f"{x:.{SIGNIFICANT_DIGITS}g}")
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    if isinstance(x, np.generic):
        return _round(x.item())
    return x


def _num(x) -> str:
    if x is None:
        return ""
    return f"{_round(float(x)):.{SIGNIFICANT_DIGITS}g}"


def _csv_rows(report: dict):
    for m in report.get("measurements", []):
        for i in range(2):
            for j in range(2):
                fs = m["freq_sampled"]
                yield [report.get("scenario", ""), m["basisA"], m["basisB"], i, j,
                       _num(m["p_analytic"][i][j]),
                       _num(fs[i][j]) if fs is not None else "",
                       m["n_shots"]]


def _table(report: dict) -> str:
    if not report:
        return ""
    out = io.StringIO()
    w = out.write
    w(f"scenario {report['scenario']}  seed {report['seed']}  shots {report['shots']}\n")
    ops = report.get("operators", {})
    w(f"operators  A: {', '.join(ops.get('A', [])) or '-'}   B: {', '.join(ops.get('B', [])) or '-'}\n")
    ent = report["entanglement"]
    w(f"concurrence  before {_num(ent['before']['concurrence'])}  after {_num(ent['after']['concurrence'])}\n")
    for k, m in enumerate(report["measurements"], start=1):
        la, lb = m["labelsA"], m["labelsB"]
        w(f"\n[{k}] A: {m['basisA']}   B: {m['basisB']}\n")
        width = max(8, *(len(x) + 2 for x in la + lb)) + 2
        w(" " * width + "".join(f"{'B=' + x:>{width}}" for x in lb) + "\n")
        for i in range(2):
            w(f"{'A=' + la[i]:<{width}}" + "".join(f"{m['p_analytic'][i][j]:>{width}.6f}" for j in range(2)))
            if m["freq_sampled"] is not None:
                w("   sampled " + " ".join(f"{m['freq_sampled'][i][j]:.6f}" for j in range(2)))
            w("\n")
        w(f"E = {m['correlation']:+.6f}   marginal A {m['marginalA'][0]:.6f}/{m['marginalA'][1]:.6f}"
          f"   marginal B {m['marginalB'][0]:.6f}/{m['marginalB'][1]:.6f}\n")
        c = m.get("coincidence")
        if c:
            w(f"coincidences {c['counts']}  singles A {c['singlesA']} B {c['singlesB']}"
              f"  accidentals~{c['accidentals_estimate']:.3g}")
            if c["correlation"] is not None:
                w(f"  E_est = {c['correlation']:+.6f} +/- {c['correlation_error']:.6f}")
            w("\n")
    ns = report["no_signaling"]
    w(f"\nno-signaling: {'PASS' if ns['passed'] else 'FAIL'} (max deviation {ns['max_deviation']:.3g}, "
      f"{ns['probes']} probe bases)\n")
    if "chsh" in report:
        ch = report["chsh"]
        w(f"CHSH S = {ch['S_analytic']:+.9f}")
        if ch["S_sampled"] is not None:
            w(f"   sampled {ch['S_sampled']:+.6f} +/- {ch['S_sampled_error']:.6f}")
        w("\n")
    return out.getvalue()


def emit(report: dict, fmt: str = "table") -> str:
    """Render a report as ``table``, ``json`` or ``csv`` text."""
    if fmt == "json":
        return json.dumps(_round(report), indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        out = io.StringIO()
        wr = csv.writer(out, lineterminator="\n")
        wr.writerow(CSV_COLUMNS)
        wr.writerows(_csv_rows(report))
        return out.getvalue()
    if fmt == "table":
        return _table(report)
    raise ValueError(f"unknown format {fmt!r}")
