"""Command-line surface with reproducible CSV/JSON outputs.

Every output starts with a config header (# key=value lines) so downstream
plot scripts can refuse mismatched inputs.  Exit codes: 0 success, 2 means a
witness detected entanglement, 1 any error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import chain, distill, oracle, ppt, separability, states, witness
from .bits import BitString
from .graphs import NotTwoColourable, is_tree, lattice, parse_graph_spec


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _header(command: str, figure: str | None = None, **config) -> list[str]:
    lines = [f"# command={command}"]
    if figure:
        lines.append(f"# figure={figure}")
    lines.extend(f"# {key}={config[key]}" for key in sorted(config))
    return lines


def _emit(lines: list[str], path: str | None):
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _thermal_state(graph, s: float) -> states.DiagonalState:
    return states.DiagonalState(graph, states.Thermal(s))


def cmd_ppt_threshold(args) -> int:
    g = parse_graph_spec(args.graph)
    try:
        s_crit = ppt.thermal_threshold(g)
    except ppt.NoThresholdInBracket as exc:
        print(f"no threshold: {exc}", file=sys.stderr)
        return 1
    if s_crit >= 1.0 - 1e-9:
        print("threshold at s = 1 (never entangled in the physical range)", file=sys.stderr)
    temp = states.from_s(min(s_crit, 1.0 - 1e-15))
    lines = _header("ppt-threshold", graph=args.graph, threads=args.threads)
    lines.append("s_crit,beta_delta,t_over_delta")
    lines.append(f"{_fmt(s_crit)},{_fmt(temp.beta_delta)},{_fmt(temp.t_over_delta)}")
    _emit(lines, args.output)
    return 0


def cmd_chain_scan(args) -> int:
    lines = _header(
        "chain-scan", figure="fig1", n_max=args.n_max, threads=args.threads
    )
    lines.append("n,s_crit,t_over_delta")
    for n in range(2, args.n_max + 1):
        s = chain.chain_critical_s(n)
        lines.append(f"{n},{_fmt(s)},{_fmt(1.0 / (2.0 * math.atanh(s)))}")
    _emit(lines, args.output)
    return 0


def cmd_lattice_scan(args) -> int:
    lines = _header(
        "lattice-scan", figure="fig3", m_max=args.m_max, threads=args.threads
    )
    lines.append("m,n,s_crit,t_over_delta")
    for m in range(2, args.m_max + 1):
        g = lattice(m, m)
        s = ppt.critical_s(
            lambda ss: ppt.fast_bipartite_f(g, ss, threads=args.threads)
        )
        lines.append(f"{m},{m * m},{_fmt(s)},{_fmt(1.0 / (2.0 * math.atanh(s)))}")
    _emit(lines, args.output)
    return 0


def cmd_perturb_scan(args) -> int:
    lines = _header(
        "perturb-scan",
        figure="fig2",
        n_min=args.n_min,
        n_max=args.n_max,
        samples=args.samples,
        seed=args.seed,
        sigma=args.sigma,
        threads=args.threads,
    )
    lines.append("n,mean,std,min,max,seed")
    for n in range(args.n_min, args.n_max + 1):
        stats = chain.perturbation_scan(
            n, args.sigma, args.samples, args.seed, threads=args.threads
        )
        lines.append(
            f"{n},{_fmt(stats.mean)},{_fmt(stats.std)},"
            f"{_fmt(stats.min)},{_fmt(stats.max)},{args.seed}"
        )
    _emit(lines, args.output)
    return 0


def cmd_decompose(args) -> int:
    g = parse_graph_spec(args.graph)
    if is_tree(g):
        decomp = separability.tree_decomposition(g, args.s)
        kind = "tree"
    else:
        try:
            decomp = separability.two_colourable_decomposition(g, args.s)
            kind = "two-colourable"
        except NotTwoColourable as exc:
            print(f"decomposition not available: {exc}", file=sys.stderr)
            return 1
    doc = {
        "command": "decompose",
        "graph": args.graph,
        "s": args.s,
        "kind": kind,
        "min_coefficient": decomp.min_coefficient(),
        "min_term_coefficient": decomp.min_term_coefficient(),
        "separable": decomp.is_separable(),
        "decomposition": json.loads(decomp.to_json()),
    }
    _emit([json.dumps(doc, indent=1)], args.output)
    return 0


def cmd_witness(args) -> int:
    g = parse_graph_spec(args.graph)
    x = BitString.from_string(args.x).value if args.x else (1 << g.n) - 1
    if args.z:
        z = BitString.from_string(args.z).value
    else:
        labels = ppt.optimal_thermal_witness_labels(g)
        if not labels.resolved:
            print("graph is not two-colourable; pass --z explicitly", file=sys.stderr)
            return 1
        z = labels.z
    st = _thermal_state(g, args.s)
    expectation = witness.witness_expectation(st, x, z)
    doc = {
        "command": "witness",
        "graph": args.graph,
        "x": f"{BitString(x, g.n).to_string()}",
        "z": f"{BitString(z, g.n).to_string()}",
        "s": args.s,
        "expectation": expectation,
        "entangled": bool(expectation < 0),
        "sampling_k": witness.sampling_cost(args.epsilon, args.fail_prob),
    }
    if args.circuit:
        rho = oracle.build_state(st)
        res = witness.simulate_witness_circuit(g, x, z, rho)
        doc["circuit_p0"] = res.p0
        doc["circuit_implied_trace"] = res.implied_trace
    _emit([json.dumps(doc, indent=1)], args.output)
    return 2 if expectation < 0 else 0


def cmd_distill(args) -> int:
    lines = _header(
        "distill", n_a=args.n_a, n_b=args.n_b, max_iter=args.max_iter
    )
    lines.append("alpha,attractor,iterations")
    for alpha in args.alpha:
        result = distill.verify_distillable(args.n_a, args.n_b, alpha, args.max_iter)
        lines.append(f"{_fmt(alpha)},{result.kind},{result.iterations}")
    _emit(lines, args.output)
    return 0


def cmd_ising_params(args) -> int:
    g = parse_graph_spec(args.graph)
    params = ppt.ising_parameters(g, args.s)
    z_value, f_value = ppt.ising_partition_check(g, args.s)
    doc = {
        "command": "ising-params",
        "graph": args.graph,
        "s": args.s,
        "beta_j": [params.beta_j.real, params.beta_j.imag],
        "beta_k": [params.beta_k.real, params.beta_k.imag],
        "beta_h": [[h.real, h.imag] for h in params.beta_h],
        "partition_value": [z_value.real, z_value.imag],
        "f_value": f_value,
        "residual": abs(z_value - f_value),
    }
    _emit([json.dumps(doc, indent=1)], args.output)
    return 0


def _check(name: str, ok: bool, lines: list[str]) -> bool:
    lines.append(f"{'PASS' if ok else 'FAIL'} {name}")
    return ok


def cmd_oracle_check(args) -> int:
    from .graphs import chain as chain_graph, ring, star

    lines: list[str] = []
    ok = True
    if args.suite in ("spectra", "all"):
        rng = np.random.default_rng(20260810)
        for trial in range(6):
            n = int(rng.integers(2, 7))
            g = chain_graph(n) if trial % 2 else star(n)
            model = [
                states.Thermal(float(rng.uniform(0.0, 0.9))),
                states.LocalDepolarised(float(rng.uniform(0.0, 1.0))),
                states.GlobalDepolarised(float(rng.uniform(0.0, 8.0))),
            ][trial % 3]
            st = states.DiagonalState(g, model)
            z = int(rng.integers(1, (1 << n) - 1))
            dense = np.sort(oracle.eigenvalues(
                oracle.partial_transpose(oracle.build_state(st), z, n))) * (1 << n)
            fast = np.sort(ppt.pt_spectrum(st, z))
            ok &= _check(
                f"spectra {type(model).__name__} n={n} z={z:#x}",
                bool(np.allclose(dense, fast, atol=1e-9)),
                lines,
            )
    if args.suite in ("states", "all"):
        for model in (states.Thermal(0.4), states.LocalDepolarised(0.3)):
            st = states.DiagonalState(chain_graph(4), model)
            rho = oracle.build_state(st)
            traces = [
                float(np.trace(rho @ oracle.k_operator(st.graph, y)).real)
                for y in range(16)
            ]
            ok &= _check(
                f"coefficients {type(model).__name__}",
                bool(np.allclose(traces, st.coefficient_table(), atol=1e-10)),
                lines,
            )
    if args.suite in ("decomposition", "all"):
        g = ring(6)
        s = 0.15
        d = separability.two_colourable_decomposition(g, s)
        rho = oracle.build_state(_thermal_state(g, s))
        ok &= _check(
            "decomposition ring6 reconstruction",
            bool(np.abs(oracle.assemble_decomposition(d, g) - rho).max() < 1e-10),
            lines,
        )
    if args.suite in ("witness", "all"):
        g = chain_graph(3)
        st = _thermal_state(g, 0.35)
        res = witness.simulate_witness_circuit(
            g, 0b111, 0b010, oracle.build_state(st)
        )
        ok &= _check(
            "witness circuit vs analytic",
            abs(res.implied_trace - witness.witness_expectation(st, 0b111, 0b010))
            < 1e-9,
            lines,
        )
    _emit(lines, args.output)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphent",
        description="Entanglement thresholds, witnesses, decompositions and "
        "distillation dynamics for graph-diagonal states.",
        epilog="Graphs: chain:N ring:N star:N lattice:MxM tree:-1,0,... or a "
        "JSON file {\"n\": int, \"edges\": [[i,j],...]}.  Bit strings such as "
        "--x/--z list vertex 0 first.  CSV floats carry 12 significant digits.",
    )
    parser.add_argument("--threads", type=int, default=1, help="parallelism degree")
    parser.add_argument("--output", help="output path (default stdout)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ppt-threshold", help="critical s, beta*Delta, T/Delta")
    p.add_argument("--graph", required=True)
    p.set_defaults(func=cmd_ppt_threshold)

    p = sub.add_parser("chain-scan", help="chain thresholds CSV (n,s_crit,t_over_delta)")
    p.add_argument("--n-max", type=int, default=20)
    p.set_defaults(func=cmd_chain_scan)

    p = sub.add_parser("lattice-scan", help="MxM lattice thresholds CSV (m,n,s_crit,t_over_delta)")
    p.add_argument("--m-max", type=int, default=4)
    p.set_defaults(func=cmd_lattice_scan)

    p = sub.add_parser(
        "perturb-scan",
        help="perturbed-chain critical T/Delta CSV (n,mean,std,min,max,seed)",
    )
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=10)
    p.set_defaults(func=cmd_perturb_scan)

    p = sub.add_parser("decompose", help="separable decomposition JSON + positivity")
    p.add_argument("--graph", required=True)
    p.add_argument("--s", type=float, required=True)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("witness", help="witness expectation (exit 2 when negative)")
    p.add_argument("--graph", required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--x", help="eigenvector label bits (default all ones)")
    p.add_argument("--z", help="bipartition bits (default two-colouring)")
    p.add_argument("--circuit", action="store_true", help="also simulate the circuit")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--fail-prob", type=float, default=0.05)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("distill", help="P1/P2 attractor CSV (alpha,attractor,iterations)")
    p.add_argument("--n-a", "--nA", dest="n_a", type=int, required=True)
    p.add_argument("--n-b", "--nB", dest="n_b", type=int, required=True)
    p.add_argument("--alpha", type=float, nargs="+", required=True)
    p.add_argument("--max-iter", type=int, default=distill.DEFAULT_MAX_ITER)
    p.set_defaults(func=cmd_distill)

    p = sub.add_parser("oracle-check", help="cross-module equivalence suites")
    p.add_argument(
        "--suite",
        choices=["spectra", "states", "decomposition", "witness", "all"],
        default="all",
    )
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("ising-params", help="complex Ising couplings JSON + residual")
    p.add_argument("--graph", required=True)
    p.add_argument("--s", type=float, required=True)
    p.set_defaults(func=cmd_ising_params)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
