"""``lab`` command line: reproducible experiments with JSON-lines, CSV and manifest output.

Usage::

    lab <subcommand> [--config file.json] [--set key=value ...] [--out DIR]

Exit status is 0 on success, 2 when a check fails (the witness is written to
``results.jsonl`` and stderr) and 1 on a usage error. ``KZLAB_THREADS`` sets
the worker count for Monte-Carlo trials.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import DomainError, StrategyPreconditionFailed
from .extensions import common_neighbor, count_extensions, f_alpha, pendant_edge, pendant_path
from .game import DISTINCT, Winner, legal_moves, partial_isomorphism_holds, play, solve
from .graph import Graph
from .io import from_graph6, to_graph6
from .random_graphs import GnpSpec, alpha_to_p, monte_carlo, sample_gnp
from .sparseness import CEIL, check_property1, check_property2, sparseness_params
from .special import LemmaViolation, enumerate_Hm, m_decomposition, verify_lemma1_property1
from .strategies import Conservator, CounterexampleConfig, NovatorT2, build_counterexample, counterexample_alpha

SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


# --- parameter parsing ---------------------------------------------------------------


def rational(value, name: str) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise UsageError(f"{name} must be an integer or a 'p/q' string, got {value!r}")
    try:
        return Fraction(value)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise UsageError(f"{name}: cannot read {value!r} as a rational") from exc


def probability(value, name: str) -> float:
    try:
        p = float(Fraction(value)) if isinstance(value, str) else float(value)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise UsageError(f"{name}: cannot read {value!r} as a probability") from exc
    if not 0 <= p <= 1:
        raise UsageError(f"{name}={p} is not a probability")
    return p


def integer(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise UsageError(f"{name} must be an integer, got {value!r}")
    try:
        return int(value)
    except ValueError as exc:
        raise UsageError(f"{name} must be an integer, got {value!r}") from exc


@dataclass
class ExperimentConfig:
    subcommand: str
    params: dict = field(default_factory=dict)
    out: str = "out"

    def to_json(self) -> str:
        return json.dumps({"subcommand": self.subcommand, "params": self.params, "out": self.out}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> ExperimentConfig:
        d = json.loads(text)
        return cls(d["subcommand"], dict(d.get("params", {})), d.get("out", "out"))


def _get(params: dict, key: str, default=None, required: bool = False):
    if key not in params:
        if required:
            raise UsageError(f"missing parameter {key!r}")
        return default
    return params[key]


@dataclass
class Outcome:
    records: list
    summary: dict
    ok: bool = True
    witness: dict | None = None


# --- validation of the exponent ------------------------------------------------------------


def validate_alpha(k: int, beta, theorem: str):
    """``(ok, reason, alpha)`` for Theorem-1 or Theorem-2 admissibility of ``beta``."""
    if k <= 3:
        raise DomainError("k must exceed 3; smaller k reduce to known cases")
    beta = Fraction(beta)
    top = 2 ** (k - 1)
    alpha = 1 - 1 / (top + beta)
    if theorem.upper() == "T1":
        if beta <= 0:
            return False, "beta must be positive", alpha
        if beta.numerator <= top:
            return False, f"numerator {beta.numerator} <= {top}: beta lies in the excluded set", alpha
        return True, f"numerator {beta.numerator} > {top}", alpha
    if theorem.upper() == "T2":
        if beta.denominator != 1 or not 1 <= beta <= top:
            return False, f"beta must be a natural number at most {top}", alpha
        return True, f"natural number at most {top}", alpha
    raise DomainError(f"unknown theorem {theorem!r}")


# --- subcommands -------------------------------------------------------------------------

_EVENTS = {
    ("K3", "present"): "contains_k3",
    ("K3", "absent"): "triangle_free",
    ("K4", "present"): "contains_k4",
}


def _executor():
    threads = int(os.environ.get("KZLAB_THREADS", "1"))
    return ProcessPoolExecutor(threads) if threads > 1 else None


def _band(params, value: float):
    band = _get(params, "expect")
    if band is None:
        return True
    lo, hi = float(band[0]), float(band[1])
    return lo <= value <= hi


def cmd_thresholds(params: dict) -> Outcome:
    pattern = str(_get(params, "pattern", "K3")).upper()
    event = _get(params, "event", "absent")
    if (pattern, event) not in _EVENTS:
        raise UsageError(f"unsupported pattern/event {pattern}/{event}")
    n = integer(_get(params, "n", required=True), "n")
    if "p" in params:
        p = probability(params["p"], "p")
    else:
        p = alpha_to_p(n, rational(_get(params, "alpha", required=True), "alpha"))
    trials = integer(_get(params, "trials", 100), "trials")
    seed = integer(_get(params, "seed", 0), "seed")
    records: list = []
    ex = _executor()
    try:
        est = monte_carlo(_EVENTS[pattern, event], n, p, trials, seed, executor=ex, records=records)
    finally:
        if ex is not None:
            ex.shutdown()
    summary = {"pattern": pattern, "event": event, "n": n, "p": p, **est.to_dict()}
    ok = _band(params, est.frequency)
    return Outcome(records, summary, ok, None if ok else {"frequency": est.frequency, "expect": params["expect"]})


_PAIRS = {"pendant_edge": lambda a: pendant_edge(), "common_neighbor": lambda a: common_neighbor()}


def _pair(spec: str):
    name, _, arg = spec.partition(":")
    if name == "pendant_path":
        return pendant_path(int(arg or 2))
    if name in _PAIRS:
        return _PAIRS[name](arg)
    raise UsageError(f"unknown pair {spec!r}")


def cmd_extension_stats(params: dict) -> Outcome:
    n = integer(_get(params, "n", required=True), "n")
    alpha = rational(_get(params, "alpha", required=True), "alpha")
    pair = _pair(_get(params, "pair", "pendant_path:2"))
    roots = integer(_get(params, "roots", 20), "roots")
    seed = integer(_get(params, "seed", 0), "seed")
    g = sample_gnp(GnpSpec(n, alpha_to_p(n, alpha), seed))
    rng = random.Random(seed)
    records = []
    counts = []
    for _ in range(roots):
        r = rng.sample(range(n), pair.k)
        c = count_extensions(g, pair, r)
        counts.append(c)
        records.append({"roots": r, "count": c})
    mean = sum(counts) / len(counts)
    scale = float(n) ** float(f_alpha(pair, alpha))
    summary = {
        "n": n,
        "alpha": str(alpha),
        "edges": g.e,
        "mean": mean,
        "min_ratio": min(counts) / mean if mean else 0.0,
        "max_ratio": max(counts) / mean if mean else 0.0,
        "scale": scale,
        "mean_over_scale": mean / scale,
    }
    return Outcome(records, summary)


def cmd_hm_enumerate(params: dict) -> Outcome:
    m = integer(_get(params, "m", required=True), "m")
    v_max = integer(_get(params, "v_max", required=True), "v_max")
    members = enumerate_Hm(m, v_max)
    codes = [to_graph6(g) for g in members]
    records = [{"graph6": c, "v": g.n, "e": g.e} for c, g in zip(codes, members)]
    checksum = hashlib.sha256("\n".join(codes).encode()).hexdigest()
    return Outcome(records, {"m": m, "v_max": v_max, "count": len(codes), "checksum": checksum})


def cmd_lemma1_verify(params: dict) -> Outcome:
    m = integer(_get(params, "m", required=True), "m")
    v_max = integer(_get(params, "v_max", required=True), "v_max")
    records = []
    skipped = 0
    for g in enumerate_Hm(m, v_max):
        dec = m_decomposition(g, m)
        if dec is None:
            return Outcome(records, {"m": m}, False, {"graph6": to_graph6(g), "reason": "no decomposition"})
        if not dec.satisfies_lemma_hypothesis():
            skipped += 1
            continue
        try:
            a, b = verify_lemma1_property1(g, m, dec)
        except LemmaViolation as exc:
            return Outcome(records, {"m": m}, False, {"graph6": to_graph6(g), "reason": str(exc)})
        records.append({"graph6": to_graph6(g), "a": a, "b": b, "t": dec.t})
    return Outcome(records, {"m": m, "v_max": v_max, "verified": len(records), "outside_hypothesis": skipped})


def cmd_sparseness_audit(params: dict) -> Outcome:
    rho = rational(_get(params, "rho", required=True), "rho")
    k = integer(_get(params, "k", required=True), "k")
    sp = sparseness_params(rho, k, _get(params, "mode", CEIL))
    if "graph6" in params:
        g = from_graph6(params["graph6"])
    else:
        n = integer(_get(params, "n", 50), "n")
        seed = integer(_get(params, "seed", 0), "seed")
        g = sample_gnp(GnpSpec(n, alpha_to_p(n, 1 / rho), seed))
    p1 = check_property1(g, sp.n1, rho, integer(_get(params, "pattern_cap", 4), "pattern_cap"))
    samples = _get(params, "root_samples")
    p2 = check_property2(
        g,
        sp,
        pair_v_cap=integer(_get(params, "pair_v_cap", 3), "pair_v_cap"),
        root_samples=None if samples is None else integer(samples, "root_samples"),
        seed=integer(_get(params, "seed", 0), "seed"),
    )
    records = [
        {"property": 1, "passed": p1.passed, "witness": p1.witness, "checked": p1.checked},
        {"property": 2, "passed": p2.passed, "witness": p2.witness, "checked": p2.checked},
    ]
    ok = p1.passed and p2.passed
    summary = {"graph6": to_graph6(g), **sp.to_dict(), "property1": p1.passed, "property2": p2.passed}
    return Outcome(records, summary, ok, None if ok else (p1.witness or p2.witness))


def _random_spoiler(seed: int):
    rng = random.Random(seed)
    return lambda pos: rng.choice(legal_moves(pos, DISTINCT))


def cmd_strategy_validate(params: dict) -> Outcome:
    from .suites import conservator_suite

    k = integer(_get(params, "k", 3), "k")
    rho = rational(_get(params, "rho", "29/23"), "rho")
    seeds = integer(_get(params, "random_spoilers", 6), "random_spoilers")
    pairs = _get(params, "pairs")
    suite = [(f"pair{j}", from_graph6(a), from_graph6(b)) for j, (a, b) in enumerate(pairs)] if pairs else conservator_suite()
    records = []
    bad = None
    for name, g, h in suite:
        winner, solver = solve(g, h, k)
        spoilers = [("minimax", solver.spoiler_move)] + [(f"random{s}", _random_spoiler(s)) for s in range(seeds)]
        for label, sp in spoilers:
            rec = {"instance": name, "spoiler": label, "solve": winner.value}
            try:
                tr = play(g, h, k, sp, Conservator(g, h, k, rho))
                rec.update(status="completed", winner=tr.winner.value, cases=[t.get("case") for t in tr.trace])
                if tr.winner is not Winner.DUPLICATOR or winner is not Winner.DUPLICATOR:
                    bad = bad or {"instance": name, "spoiler": label, "left": to_graph6(g), "right": to_graph6(h)}
            except StrategyPreconditionFailed as exc:
                rec.update(status="precondition_failed", step=exc.step)
            records.append(rec)
    done = sum(1 for r in records if r["status"] == "completed")
    return Outcome(records, {"k": k, "rho": str(rho), "games": len(records), "completed": done}, bad is None, bad)


def cmd_counterexample(params: dict) -> Outcome:
    k = integer(_get(params, "k", 4), "k")
    beta = integer(_get(params, "beta", 1), "beta")
    c1 = _get(params, "c1_len")
    c2 = _get(params, "c2_len")
    cfg = CounterexampleConfig(k, beta, None if c1 is None else int(c1), None if c2 is None else int(c2))
    h = from_graph6(params["h"]) if "h" in params else None
    g, h = build_counterexample(cfg, h)
    cap_v = max(g.n, h.n, 12)
    winner, solver = solve(g, h, k, max_vertices=cap_v)
    tr = play(g, h, k, NovatorT2(g, h, cfg), solver.duplicator_move)
    summary = {
        "k": k,
        "beta": beta,
        "cycles": list(cfg.lengths()),
        "alpha": str(counterexample_alpha(cfg)),
        "solve": winner.value,
        "play": tr.winner.value,
        "rounds": tr.rounds_played,
    }
    ok = winner is Winner.SPOILER and tr.winner is Winner.SPOILER
    return Outcome([tr.to_dict()], summary, ok, None if ok else tr.to_dict())


def cmd_zero_one_scan(params: dict) -> Outcome:
    ns = [integer(v, "n") for v in _get(params, "n", [6, 8, 10])]
    alpha = rational(_get(params, "alpha", required=True), "alpha")
    k = integer(_get(params, "k", 3), "k")
    trials = integer(_get(params, "trials", 20), "trials")
    seed = integer(_get(params, "seed", 0), "seed")
    records = []
    summary = {"alpha": str(alpha), "k": k}
    for n in ns:
        p = alpha_to_p(n, alpha)
        wins = 0
        for t in range(trials):
            g = sample_gnp(GnpSpec(n, p, seed, (n, t, 0)))
            h = sample_gnp(GnpSpec(n, p, seed, (n, t, 1)))
            w, _ = solve(g, h, k)
            wins += w is Winner.DUPLICATOR
            records.append({"n": n, "trial": t, "left": to_graph6(g), "right": to_graph6(h), "winner": w.value})
        summary[f"duplicator_freq_n{n}"] = wins / trials
    return Outcome(records, summary)


def cmd_validate_alpha(params: dict) -> Outcome:
    k = integer(_get(params, "k", required=True), "k")
    beta = rational(_get(params, "beta", required=True), "beta")
    theorem = str(_get(params, "theorem", "T1"))
    ok, reason, alpha = validate_alpha(k, beta, theorem)
    rec = {"k": k, "beta": str(beta), "theorem": theorem, "valid": ok, "reason": reason, "alpha": str(alpha)}
    return Outcome([rec], rec)


COMMANDS = {
    "thresholds": cmd_thresholds,
    "extension-stats": cmd_extension_stats,
    "hm-enumerate": cmd_hm_enumerate,
    "lemma1-verify": cmd_lemma1_verify,
    "sparseness-audit": cmd_sparseness_audit,
    "strategy-validate": cmd_strategy_validate,
    "counterexample": cmd_counterexample,
    "zero-one-scan": cmd_zero_one_scan,
    "validate-alpha": cmd_validate_alpha,
}


# --- output --------------------------------------------------------------------------


def _flatten(d: dict, prefix: str = "") -> list[tuple[str, str]]:
    rows = []
    for key in sorted(d):
        v = d[key]
        name = f"{prefix}{key}"
        if isinstance(v, dict):
            rows.extend(_flatten(v, name + "."))
        else:
            rows.append((name, json.dumps(v) if isinstance(v, (list, tuple)) else str(v)))
    return rows


def write_outputs(out: Path, cfg: ExperimentConfig, result: Outcome) -> None:
    out.mkdir(parents=True, exist_ok=True)
    # the output directory is not part of the experiment, so it stays out of the results
    header = {"kind": "config", "subcommand": cfg.subcommand, "params": cfg.params, "version": __version__}
    lines = [header] + [{"kind": "record", **r} for r in result.records]
    lines.append({"kind": "summary", "ok": result.ok, "summary": result.summary, "witness": result.witness})
    (out / "results.jsonl").write_text("".join(json.dumps(x, sort_keys=True) + "\n" for x in lines))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["schema_version", "key", "value"])
    for key, value in _flatten(result.summary):
        w.writerow([SCHEMA_VERSION, key, value])
    (out / "summary.csv").write_text(buf.getvalue())
    manifest = {
        "config": json.loads(cfg.to_json()),
        "version": __version__,
        "seeds": {k: v for k, v in cfg.params.items() if "seed" in k},
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "ok": result.ok,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")


def _override(params: dict, item: str) -> None:
    key, sep, raw = item.partition("=")
    if not sep:
        raise UsageError(f"--set expects key=value, got {item!r}")
    try:
        params[key] = json.loads(raw)
    except json.JSONDecodeError:
        params[key] = raw


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lab", description="Reproducible random-graph and game experiments.")
    ap.add_argument("subcommand", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="JSON file with the parameters (or a full ExperimentConfig)")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override one parameter")
    ap.add_argument("--out", help="output directory")
    return ap


def run_experiment(cfg: ExperimentConfig) -> int:
    try:
        result = COMMANDS[cfg.subcommand](dict(cfg.params))
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    write_outputs(Path(cfg.out), cfg, result)
    if not result.ok:
        print(json.dumps({"check_failed": result.witness}, sort_keys=True), file=sys.stderr)
        return 2
    return 0


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    params: dict = {}
    out = None
    try:
        if args.config:
            data = json.loads(Path(args.config).read_text())
            if "params" in data:
                params.update(data["params"])
                out = data.get("out")
            else:
                params.update(data)
        for item in args.set:
            _override(params, item)
    except (OSError, json.JSONDecodeError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    cfg = ExperimentConfig(args.subcommand, params, args.out or out or f"runs/{args.subcommand}")
    return run_experiment(cfg)


if __name__ == "__main__":
    sys.exit(main())
