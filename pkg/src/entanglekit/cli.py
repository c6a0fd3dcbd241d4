"""Command-line interface: ``entanglekit <command> ...``.

Reports go to standard output as JSON (default), CSV or a flat
``key: value`` listing.  Exit status is 0 on success, 2 when inputs or
arguments fail validation and 1 on internal errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .axioms import AXIOM_IDS, DISTRIBUTIONS, StateSampler, irreversibility_search, monotone_suite, run_axiom, thermo_map
from .convert import (
    MAJORIZATION_TOL,
    asymptotic_probe,
    catalysis_impossible,
    catalytic_convertible,
    common_source_sink,
    deterministic_rate_bounds,
    find_catalyst,
    max_entangled_reachable_dim,
    nielsen_convertible,
    prefix_comparison,
    stochastic_probability,
)
from .errors import EntanglementError, MixedStateError
from .measures import (
    DEFAULT_RESTARTS,
    DEFAULT_TOL,
    eof_mixed,
    entanglement_temperature,
    entropy_of_entanglement,
    first_law_bound_entanglement,
    pure_rates,
    relative_entropy_of_entanglement,
)
from .ppt import PPT_TOL, ppt_report
from .protocols import dilution_cost, distill_sample, distill_statistics, teleport, teleport_sample, typical_set_report
from .schmidt import SchmidtVector, binary_entropy, entropy_of, osc, tensor_osc
from .stateio import load_state
from .states import DensityMatrix, PureState, as_density

SIG_DIGITS = 12
TOLERANCE_KEYS = {
    "majorization": MAJORIZATION_TOL,
    "ppt": PPT_TOL,
    "optimizer": DEFAULT_TOL,
}


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _clean(obj):
    """Round floats to 12 significant digits and make the tree JSON-safe."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        v = float(f"{v:.{SIG_DIGITS}g}")
        return 0.0 if v == 0 else v
    if isinstance(obj, (complex, np.complexfloating)):
        return [_clean(obj.real), _clean(obj.imag)]
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"unserialisable value of type {type(obj).__name__}")


def _flatten(obj, prefix: str = "") -> list[tuple[str, object]]:
    if isinstance(obj, dict):
        out = []
        for k in sorted(obj):
            out += _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
        return out
    if isinstance(obj, list) and obj and any(isinstance(v, (dict, list)) for v in obj):
        out = []
        for i, v in enumerate(obj):
            out += _flatten(v, f"{prefix}[{i}]")
        return out
    return [(prefix, obj)]


def _render(report: dict, fmt: str, rows: list[dict] | None = None) -> str:
    report = _clean(report)
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if fmt == "pretty":
        lines = []
        for key, val in _flatten(report):
            lines.append(f"{key}: {json.dumps(val, ensure_ascii=False) if not isinstance(val, str) else val}")
        return "\n".join(lines) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if rows:
        rows = _clean(rows)
        header = list(rows[0])
        writer.writerow(header)
        for r in rows:
            writer.writerow([r[h] for h in header])
    else:
        writer.writerow(["key", "value"])
        for key, val in _flatten(report):
            writer.writerow([key, json.dumps(val, ensure_ascii=False) if isinstance(val, list) else val])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# input helpers
# ---------------------------------------------------------------------------


def _pure(path: str):
    """Load a pure state or Schmidt vector (a pure density matrix is accepted)."""
    obj = load_state(path)
    if isinstance(obj, DensityMatrix):
        if obj.purity < 1 - 1e-9:
            raise MixedStateError(f"{path}: mixed state given where a pure state is required")
        w, v = np.linalg.eigh(obj.matrix)
        return PureState.normalized(v[:, -1], obj.dims)
    return obj


def _density(path: str) -> DensityMatrix:
    obj = load_state(path)
    if isinstance(obj, SchmidtVector):
        raise UsageError(f"{path}: a Schmidt vector has no density matrix; give amplitudes or a matrix")
    return as_density(obj)


def _parse_schedule(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            a, b = part.split("-", 1)
            out += list(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    if not out or min(out) < 1:
        raise UsageError(f"schedule must list positive integers, got {text!r}")
    return out


def _parse_tolerances(items: Sequence[str]) -> dict:
    tol = dict(TOLERANCE_KEYS)
    for item in items or ():
        if "=" not in item:
            raise UsageError(f"--tol expects key=value, got {item!r}")
        key, val = item.split("=", 1)
        if key not in tol:
            raise UsageError(f"unknown tolerance {key!r}; known: {', '.join(sorted(tol))}")
        try:
            tol[key] = float(val)
        except ValueError as exc:
            raise UsageError(f"tolerance {key} must be a number, got {val!r}") from exc
        if not tol[key] >= 0:
            raise UsageError(f"tolerance {key} must be non-negative")
    return tol


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_schmidt(args, tol):
    x = osc(_pure(args.state))
    return {
        "coeffs": x.coeffs.tolist(),
        "rank": x.rank,
        "entropy": entropy_of(x),
        "max_entangled_reachable_dim": max_entangled_reachable_dim(x, tol["majorization"]),
    }, None


def _verdict_dict(a, b, t):
    v = nielsen_convertible(a, b, t)
    out = v.to_dict()
    out["prefix_sums"] = [list(p) for p in prefix_comparison(a, b)]
    return out


def cmd_convert(args, tol):
    t = tol["majorization"]
    a = osc(_pure(args.phi))
    if args.action == "bounds":
        return {**deterministic_rate_bounds(a, args.n).to_dict(), "entropy": entropy_of(a)}, None
    if args.psi is None:
        raise UsageError(f"convert {args.action} needs two state files")
    b = osc(_pure(args.psi))
    if args.action == "check":
        return _verdict_dict(a, b, t), None
    if args.action == "prob":
        return {"forward": stochastic_probability(a, b), "backward": stochastic_probability(b, a)}, None
    if args.action == "probe":
        rep = asymptotic_probe(a, b, _parse_schedule(args.schedule))
        return rep.to_dict(), None
    if args.action == "catalyst":
        out = {"direct": nielsen_convertible(a, b, t).forward}
        if a.rank == b.rank:
            out["catalysis_impossible"] = catalysis_impossible(a, b)
        if args.eta:
            eta = osc(_pure(args.eta))
            out["eta"] = eta.coeffs.tolist()
            out["catalytic"] = catalytic_convertible(a, b, eta, t)
            out["prefix_sums"] = [
                list(p) for p in prefix_comparison(*(tensor_osc(v, eta) for v in (a, b)))
            ]
        else:
            found = find_catalyst(a, b, max_rank=args.max_rank, grid=args.grid, tol=t)
            out["catalyst"] = None if found is None else found.coeffs.tolist()
            out["search_complete"] = False
        return out, None
    if args.action == "meet-join":
        source, sink = common_source_sink(a, b, t)
        return {
            "comparable": nielsen_convertible(a, b, t).comparable,
            "source": source.coeffs.tolist(),
            "sink": sink.coeffs.tolist(),
        }, None
    raise UsageError(f"unknown convert action {args.action}")


def cmd_measure(args, tol):
    kind = args.kind
    if kind == "temperature":
        if None in (args.ec, args.ed, args.se):
            raise UsageError("measure --kind temperature needs --ec, --ed and --se")
        return {
            "bound_entanglement": first_law_bound_entanglement(args.ec, args.ed),
            "temperature": entanglement_temperature(args.ec, args.ed, args.se),
            "inputs": {"E_C": args.ec, "E_D": args.ed, "S_e": args.se},
        }, None
    if args.state is None:
        raise UsageError(f"measure --kind {kind} needs a state file")
    if kind == "es":
        return entropy_of_entanglement(_pure(args.state)).to_dict(), None
    if kind == "rates":
        e_d, e_c = pure_rates(_pure(args.state))
        return {"E_D": e_d, "E_C": e_c}, None
    rho = _density(args.state)
    if kind == "eof":
        res = eof_mixed(rho, restarts=args.restarts, tol=tol["optimizer"], seed=args.seed)
    else:
        res = relative_entropy_of_entanglement(rho, restarts=args.restarts, tol=tol["optimizer"], seed=args.seed)
    return res.to_dict(), None


def cmd_ppt(args, tol):
    return ppt_report(_density(args.state), tol["ppt"]).to_dict(), None


def cmd_distill(args, tol):
    rep = distill_statistics(args.alpha_sq, args.n)
    out = rep.to_dict()
    out["entropy_per_copy"] = binary_entropy(args.alpha_sq)
    if args.shots:
        samples = distill_sample(args.alpha_sq, args.n, args.shots, args.seed)
        out["samples"] = samples
        out["sample_mean"] = float(np.mean(samples))
        out["seed"] = args.seed
    if args.delta is not None:
        out["typical_set"] = typical_set_report(args.alpha_sq, args.n, args.delta).to_dict()
    rows = None
    if args.series:
        rows = []
        for n in _parse_schedule(args.series):
            r = distill_statistics(args.alpha_sq, n)
            rows.append({"n": n, "yield_per_copy": r.expected_yield_bits / n, "entropy": binary_entropy(args.alpha_sq)})
        out["series"] = rows
    return out, rows


def cmd_dilute(args, tol):
    cost = dilution_cost(args.alpha_sq, args.n)
    return {"n": args.n, "alpha_sq": args.alpha_sq, "cost_bits": cost, "cost_per_copy": cost / args.n,
            "entropy_per_copy": binary_entropy(args.alpha_sq)}, None


def cmd_teleport(args, tol):
    if args.sample:
        return {"outcome": teleport_sample(args.alpha, args.beta, args.seed).to_dict(), "seed": args.seed}, None
    outs = teleport(args.alpha, args.beta)
    return {"outcomes": [o.to_dict() for o in outs]}, None


def _sampler(args) -> StateSampler:
    return StateSampler(args.seed, (args.dim_min, args.dim_max), args.distribution)


def cmd_axioms(args, tol):
    sampler = _sampler(args)
    if args.action == "run":
        ids = AXIOM_IDS if args.axiom == "all" else (args.axiom,)
        reports = [run_axiom(a, sampler, args.trials).to_dict() for a in ids]
        return {"sampler": sampler.to_dict(), "reports": reports}, None
    if args.action == "irreversibility":
        return irreversibility_search(sampler, args.n_max, args.m_max, args.pairs).to_dict(), None
    return monotone_suite(sampler, args.pairs).to_dict(), None


def cmd_thermo_map(args, tol):
    pts = thermo_map(_sampler(args), args.count)
    rows = [{"log2_dim": p.log2_dim, "entropy": p.entropy} for p in pts]
    return {"sampler": _sampler(args).to_dict(), "points": rows}, rows


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=0, help="seed for every random choice (default 0)")
    p.add_argument("--tol", action="append", metavar="KEY=VALUE", default=[],
                   help="override a tolerance: " + ", ".join(f"{k} (default {v:g})" for k, v in TOLERANCE_KEYS.items()))
    p.add_argument("--format", choices=("json", "csv", "pretty"), default="json", help="output format (default json)")


def _add_sampler(p: argparse.ArgumentParser, dim_min: int = 2, dim_max: int = 4):
    p.add_argument("--dim-min", type=int, default=dim_min)
    p.add_argument("--dim-max", type=int, default=dim_max)
    p.add_argument("--distribution", choices=DISTRIBUTIONS, default="dirichlet_flat")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entanglekit",
        description="Bipartite pure- and mixed-state entanglement toolkit.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, fn: Callable, help_text: str, description: str):
        p = sub.add_parser(name, help=help_text, description=description)
        p.set_defaults(func=fn, command_name=name)
        return p

    p = command("schmidt", cmd_schmidt, "ordered Schmidt coefficients of a pure state",
                "Schmidt decomposition (singular values of the coefficient matrix), rank, "
                "entropy of entanglement and the largest reachable maximally entangled dimension.")
    p.add_argument("state")
    _add_common(p)

    p = command("convert", cmd_convert, "LOCC convertibility between pure states",
                "Deterministic conversion by majorization of Schmidt coefficients (check), optimal "
                "stochastic success probability from tail sums (prob), finite-copy probes of the "
                "entropy ordering (probe), copy-rate bounds against maximally entangled qubit pairs "
                "(bounds), catalysis tests and search (catalyst) and the common source/sink of an "
                "incomparable pair (meet-join).")
    p.add_argument("action", choices=("check", "prob", "probe", "bounds", "catalyst", "meet-join"))
    p.add_argument("phi")
    p.add_argument("psi", nargs="?")
    p.add_argument("--n", type=int, default=100, help="copies for 'bounds' (default 100)")
    p.add_argument("--schedule", default="1-10", help="copy counts for 'probe', e.g. 1-10 or 1,2,4 (default 1-10)")
    p.add_argument("--eta", help="catalyst state file for 'catalyst' (otherwise a grid search runs)")
    p.add_argument("--max-rank", type=int, default=3, choices=(2, 3), help="catalyst search rank (default 3)")
    p.add_argument("--grid", type=int, default=2000, help="rank-2 catalyst grid points (default 2000)")
    _add_common(p)

    p = command("measure", cmd_measure, "entanglement measures",
                "Entropy of entanglement (es), convex-roof entanglement of formation (eof), relative "
                "entropy of entanglement over separable states (ree), pure-state distillable "
                "entanglement and cost (rates), and bound entanglement with its temperature "
                "(temperature).  Optimizer results are certified upper bounds.")
    p.add_argument("state", nargs="?")
    p.add_argument("--kind", choices=("es", "eof", "ree", "rates", "temperature"), required=True)
    p.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    p.add_argument("--ec", type=float, help="entanglement cost (temperature)")
    p.add_argument("--ed", type=float, help="distillable entanglement (temperature)")
    p.add_argument("--se", type=float, help="entropy S_e (temperature)")
    _add_common(p)

    p = command("ppt", cmd_ppt, "partial-transpose separability test",
                "Minimum eigenvalue of the partial transpose; separable/entangled verdicts are exact "
                "for 2x2 and 2x3 systems, otherwise PPT states are reported as undetermined.")
    p.add_argument("state")
    _add_common(p)

    p = command("distill", cmd_distill, "concentration protocol statistics",
                "Outcome distribution and expected yield (bits) of collective concentration on n "
                "copies of sqrt(a)|00> + sqrt(1-a)|11>, optional sampled runs, typical-set window "
                "and a CSV-friendly yield series.")
    p.add_argument("--alpha-sq", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--shots", type=int, default=0)
    p.add_argument("--delta", type=float, help="typical-set half width")
    p.add_argument("--series", help="copy counts for a yield-per-copy series, e.g. 10,100,1000")
    _add_common(p)

    p = command("dilute", cmd_dilute, "dilution cost",
                "Expected singlets consumed to dilute into n copies via teleportation of typical blocks.")
    p.add_argument("--alpha-sq", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    _add_common(p)

    p = command("teleport", cmd_teleport, "teleportation simulator",
                "Statevector teleportation of alpha|0> + beta|1> through a singlet, listing every "
                "Bell outcome with its correction and fidelity (or one sampled branch with --sample).")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--sample", action="store_true")
    _add_common(p)

    p = command("axioms", cmd_axioms, "axiom property harness",
                "Randomised checks of the ordering axioms for pure-state LOCC (run), the search for "
                "reversible multi-copy conversions (irreversibility) and the entropy monotone suite "
                "(monotone).")
    p.add_argument("action", choices=("run", "irreversibility", "monotone"))
    p.add_argument("--axiom", choices=AXIOM_IDS + ("all",), default="all")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--pairs", type=int, default=100)
    p.add_argument("--n-max", type=int, default=50)
    p.add_argument("--m-max", type=int, default=50)
    _add_sampler(p)
    _add_common(p)

    p = command("thermo-map", cmd_thermo_map, "states in (log2 dim, entropy) coordinates",
                "Samples pure states and emits (log2 dim H, entropy of entanglement) points; "
                "use --format csv for plotting.")
    p.add_argument("--count", type=int, default=1000)
    _add_sampler(p, 1, 8)
    _add_common(p)
    return parser


SCHEMA_VERSION = 1


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = _parse_tolerances(args.tol)
        report, rows = args.func(args, tol)
        report = {"schema": f"entanglekit.{args.command_name}/{SCHEMA_VERSION}", **report}
        sys.stdout.write(_render(report, args.format, rows))
        return 0
    except EntanglementError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - reported, not hidden
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
