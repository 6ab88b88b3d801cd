"""Command-line front end: verification suites, packings, counterexamples,
and protocol demos with machine-readable reports.

Exit codes: 0 all checks passed, 1 a conclusive check failed, 2 bad usage or
configuration.  Reports carry no timestamps, so identical configurations
yield byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from .circuits import Gate, apply, bbpssw_round, gate_count, teleport_dilution, unrotate_distillation
from .harness import all_selectors, run_noninvariance_counterexample, run_suites
from .linalg import SizeLimitError, haar_unitary
from .measures import p_err_dilute, p_err_distill
from .packing import greedy_packing, packing_to_dict, separation_check
from .states import (
    bipartite_from_matrix,
    bipartite_pure,
    epr_pairs,
    random_pure_state,
    rotated_epr,
    tensor_states,
)

SEED_ENV = "COMPENT_SEED"

REPORT_FIELDS = (
    "name", "lambda", "key", "lhs", "rhs", "slack", "tolerance",
    "pass", "inconclusive", "details",
)


class ConfigError(Exception):
    pass


def parse_lambdas(text: str) -> list[int]:
    """Parse 'a..b' (inclusive) or a single value; all values must be >= 1."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            values = list(range(int(lo), int(hi) + 1))
        else:
            values = [int(text)]
    except ValueError as exc:
        raise ConfigError(f"bad lambda range {text!r}") from exc
    if not values or min(values) < 1:
        raise ConfigError(f"lambda values must be >= 1, got {text!r}")
    return values


def records_to_json(records) -> str:
    return json.dumps([r.to_dict() for r in records], indent=2, sort_keys=True) + "\n"


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=REPORT_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in records:
        row = r.to_dict()
        row["details"] = json.dumps(row["details"], sort_keys=True)
        writer.writerow(row)
    return buf.getvalue()


def write_report(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def resolve_seed(args) -> int:
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {env!r}") from exc
    return args.seed


def cmd_verify(args) -> int:
    lambdas = parse_lambdas(args.lambdas)
    if args.tolerance < 0:
        raise ConfigError("tolerance must be nonnegative")
    records = run_suites(
        args.suite, lambdas, resolve_seed(args),
        tolerance=args.tolerance, kappa=args.kappa,
    )
    text = records_to_json(records) if args.format == "json" else records_to_csv(records)
    write_report(text, args.out)
    failed = [r for r in records if not r.passed and not r.inconclusive]
    summary = (
        f"{len(records)} checks: {sum(r.passed for r in records)} passed, "
        f"{len(failed)} failed, {sum(r.inconclusive for r in records)} inconclusive\n"
    )
    sys.stderr.write(summary)
    return 1 if failed else 0


def cmd_net(args) -> int:
    if args.m > 2:
        raise ConfigError("packings support m <= 2")
    if not 0.0 < args.eta < 1.0:
        raise ConfigError(f"eta must lie in (0, 1), got {args.eta}")
    packing = greedy_packing(args.m, args.eta, seed=resolve_seed(args))
    if not separation_check(packing):
        sys.stderr.write("separation check failed\n")
        return 1
    write_report(json.dumps(packing_to_dict(packing), sort_keys=True) + "\n", args.out)
    sys.stderr.write(f"{len(packing)} members, separation check passed\n")
    return 0


def cmd_counterexample(args) -> int:
    if not 0.0 <= args.eps < 1.0:
        raise ConfigError(f"eps must lie in [0, 1), got {args.eps}")
    seed = resolve_seed(args)
    record = run_noninvariance_counterexample(args.m, args.eps, seed)
    eta = record.details.get("threshold")
    if record.inconclusive:
        print(f"threshold: inconclusive (no grid eta beats the g2 term for m={args.m}, eps={args.eps})")
        print("verdict: inconclusive")
        return 0
    print(f"threshold eta: {eta}")
    print(f"packing overlap: {record.details['overlap']:.9f}")
    print(f"squashed upper bound: {record.lhs:.9f} (target < {args.m} - 1e-6)")
    print(f"verdict: {'pass' if record.passed else 'fail'}")
    if args.out:
        write_report(records_to_json([record]), args.out)
    return 0 if record.passed else 1


def _demo_budget_line(count: int, budget: float) -> str:
    verdict = "within" if count <= budget else "exceeds"
    return f"gate count: {count} ({verdict} budget {budget:g})"


def cmd_demo(args) -> int:
    seed = resolve_seed(args)
    rng = np.random.default_rng(seed)
    if args.protocol == "teleport":
        n = args.n
        if n > 2:
            raise ConfigError("teleport demo supports n <= 2")
        if n == 1:
            vec = random_pure_state(2, rng)
            target = bipartite_pure(vec, (1, 1))
            prep = [Gate.unitary(_column_unitary(vec), (0, 1))]
        else:
            vecs = [random_pure_state(2, rng) for _ in range(2)]
            target = tensor_states(bipartite_pure(vecs[0], (1, 1)), bipartite_pure(vecs[1], (1, 1)))
            prep = [
                Gate.unitary(_column_unitary(vecs[0]), (0, 2)),
                Gate.unitary(_column_unitary(vecs[1]), (1, 3)),
            ]
        circuit = teleport_dilution(prep, n)
        err = p_err_dilute(circuit, target, n)
        print(f"teleportation dilution of a random pure target ({n} pairs consumed)")
        print(f"p_err: {err:.3e}")
        print(_demo_budget_line(gate_count(circuit), 20.0 * n + 10.0))
        return 0
    if args.protocol == "unrotate":
        m = args.m
        if m > 2:
            raise ConfigError("unrotate demo supports m <= 2")
        u = haar_unitary(2 ** m, rng)
        circuit = unrotate_distillation(u, m)
        err = p_err_distill(circuit, rotated_epr(u, m), m)
        print(f"unrotation distillation of a Haar-rotated EPR block (m={m})")
        print(f"p_err: {err:.3e}")
        print(_demo_budget_line(gate_count(circuit), 4.0))
        return 0
    if args.protocol == "bbpssw":
        f = args.fidelity
        if not 0.0 <= f <= 1.0:
            raise ConfigError("input fidelity must lie in [0, 1]")
        phi = epr_pairs(1).matrix
        pair_matrix = f * phi + (1 - f) * (np.eye(4) - phi) / 3.0
        pair = bipartite_from_matrix(pair_matrix, (1, 1))
        circuit = bbpssw_round()
        out = apply(circuit, tensor_states(pair, pair))
        channel_fidelity = float(np.real(np.trace(out.matrix @ phi)))
        print(f"purification round on two isotropic pairs with F={f}")
        print(f"channel-output fidelity with the EPR pair: {channel_fidelity:.6f}")
        print(_demo_budget_line(gate_count(circuit), 20.0))
        return 0
    raise ConfigError(f"unknown protocol {args.protocol!r}")


def _column_unitary(vec: np.ndarray) -> np.ndarray:
    d = vec.shape[0]
    m = np.eye(d, dtype=complex)
    m[:, 0] = vec
    q, r = np.linalg.qr(m)
    return q * (r[0, 0] / abs(r[0, 0]))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="compent",
        description="Certify structural properties of resource-bounded entanglement bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run theorem-check suites")
    verify.add_argument("--suite", action="append", default=None,
                        choices=all_selectors(), help="suite selector (repeatable)")
    verify.add_argument("--lambda", dest="lambdas", default="1..2",
                        help="growth parameters, 'a..b' inclusive or a single value")
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--tolerance", type=float, default=1e-9)
    verify.add_argument("--kappa", type=int, default=1, choices=(1, 2, 3),
                        help="key length for keyed suites")
    verify.add_argument("--out", default=None, help="report file (default stdout)")
    verify.add_argument("--format", choices=("json", "csv"), default="json")
    verify.set_defaults(func=cmd_verify)

    net = sub.add_parser("net", help="build a separated unitary packing")
    net.add_argument("--m", type=int, default=1)
    net.add_argument("--eta", type=float, required=True)
    net.add_argument("--seed", type=int, default=0)
    net.add_argument("--out", default=None)
    net.set_defaults(func=cmd_net)

    cex = sub.add_parser("counterexample", help="run the non-invariance pipeline")
    cex.add_argument("--m", type=int, default=1)
    cex.add_argument("--eps", type=float, default=0.0)
    cex.add_argument("--seed", type=int, default=0)
    cex.add_argument("--out", default=None)
    cex.set_defaults(func=cmd_counterexample)

    demo = sub.add_parser("demo", help="run a stock protocol")
    demo.add_argument("protocol", choices=("teleport", "unrotate", "bbpssw"))
    demo.add_argument("--n", type=int, default=1, help="teleported qubits")
    demo.add_argument("--m", type=int, default=1, help="rotated EPR block size")
    demo.add_argument("--fidelity", type=float, default=0.8, help="isotropic input fidelity")
    demo.add_argument("--seed", type=int, default=0)
    demo.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SizeLimitError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
