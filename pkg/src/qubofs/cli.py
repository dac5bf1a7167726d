"""Command-line front end for the selection pipeline.

Every artifact embeds (or, for CSV/plain-text outputs, gets a sidecar
with) a run manifest recording the subcommand, inputs, outputs, and all
parameters including the seed, so a run can be reproduced from its
outputs alone.  Manifests deliberately omit execution batching knobs
(chunk size), which cannot affect results.

Exit codes: 0 success, 1 a verification reported failures, 2 input or
usage errors, 3 requested subset size unreachable, 4 non-monotone probe
trace from a heuristic solver.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__, data, eval as evalmod, infotheory, qfs, qubo, solve
from .errors import NonMonotoneTraceError, QubofsError, UnreachableKError

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT = 2
EXIT_UNREACHABLE = 3
EXIT_NON_MONOTONE = 4


def _write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _manifest(subcommand, inputs, outputs, params, seed=None):
    return {
        "tool": "qubofs",
        "version": __version__,
        "subcommand": subcommand,
        "inputs": inputs,
        "outputs": outputs,
        "params": params,
        "seed": seed,
    }


def _add_solver_flags(parser, default="auto"):
    group = parser.add_argument_group("solver")
    group.add_argument(
        "--solver",
        default=default,
        choices=["auto", "exhaustive", "annealing", "tabu"],
        help="auto picks exhaustive up to 20 features, tabu beyond",
    )
    group.add_argument("--shots", type=int, default=None,
                       help="annealing shots / tabu restarts (defaults 100 / 10)")
    group.add_argument("--seed", type=int, default=0)
    group.add_argument("--sweeps", type=int, default=1000)
    group.add_argument("--t-start", type=float, default=None)
    group.add_argument("--t-end", type=float, default=None)
    group.add_argument("--sub-size", type=int, default=20,
                       help="tabu decomposition subproblem size")
    group.add_argument("--tenure", type=int, default=10)
    group.add_argument("--rounds", type=int, default=3,
                       help="stop a tabu restart after this many non-improving rounds")
    group.add_argument("--chunk-size", type=int, default=None,
                       help="annealing batch size; execution detail, never affects results")


def _solver_config(args, n):
    kind = args.solver
    if kind == "auto":
        kind = "exhaustive" if n <= 20 else "tabu"
    if kind == "exhaustive":
        return solve.SolverConfig.exhaustive()
    shots = args.shots if args.shots is not None else (100 if kind == "annealing" else 10)
    return solve.SolverConfig(
        kind=kind,
        shots=shots,
        seed=args.seed,
        sweeps=args.sweeps,
        t_start=args.t_start,
        t_end=args.t_end,
        sub_size=args.sub_size,
        tenure=args.tenure,
        non_improving_rounds=args.rounds,
        chunk_size=args.chunk_size,
    )


def _solver_params(config):
    if config.kind == "exhaustive":
        return {"solver": "exhaustive"}
    params = {"solver": config.kind, "shots": config.shots, "sweeps": config.sweeps,
              "t_start": config.t_start, "t_end": config.t_end}
    if config.kind == "tabu":
        params.update(
            {"sub_size": config.sub_size, "tenure": config.tenure,
             "non_improving_rounds": config.non_improving_rounds}
        )
        params.pop("sweeps")
        params.pop("t_start")
        params.pop("t_end")
    return params


def _label_arg(raw):
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        return raw


def _load_binned(args):
    dataset = data.load_csv(args.input, _label_arg(args.label))
    return dataset, data.discretize(dataset, args.B)


def _parse_mu(raw):
    if raw == "max":
        return None
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"--mu must be 'max' or a positive number, got {raw!r}") from None


# ---------------------------------------------------------------- handlers


def _cmd_gen_synth(args):
    spec = data.SynthSpec(n=args.n, d_inf=args.d_inf, n_samples=args.N, seed=args.seed)
    dataset, truth = data.gen_synth(spec)
    data.write_csv(dataset, args.out)
    sidecar = args.out + ".manifest.json"
    manifest = _manifest(
        "gen-synth",
        inputs={},
        outputs={"csv": args.out, "sidecar": sidecar},
        params={"n": args.n, "d_inf": args.d_inf, "N": args.N},
        seed=args.seed,
    )
    _write_json(sidecar, {"manifest": manifest, "n": args.n, "ground_truth": list(truth)})
    return EXIT_OK


def _cmd_discretize(args):
    _, binned = _load_binned(args)
    manifest = _manifest(
        "discretize",
        inputs={"csv": args.input},
        outputs={"json": args.out},
        params={"B": args.B, "label": args.label},
    )
    _write_json(args.out, {**binned.to_json_dict(), "manifest": manifest})
    return EXIT_OK


def _cmd_mi(args):
    if args.discretized:
        with open(args.discretized, "r", encoding="utf-8") as fh:
            binned = data.DiscretizedDataset.from_json_dict(json.load(fh))
        inputs = {"discretized": args.discretized}
        params = {}
    else:
        if not args.input:
            raise ValueError("mi needs --input or --discretized")
        _, binned = _load_binned(args)
        inputs = {"csv": args.input}
        params = {"B": args.B, "label": args.label}
    imp = infotheory.importance(binned)
    red = infotheory.redundancy(binned)
    manifest = _manifest("mi", inputs=inputs, outputs={"json": args.out}, params=params)
    _write_json(args.out, {**infotheory.to_json_dict(imp, red), "manifest": manifest})
    return EXIT_OK


def _read_measures(path):
    with open(path, "r", encoding="utf-8") as fh:
        return infotheory.from_json_dict(json.load(fh))


def _cmd_build(args):
    imp, red = _read_measures(args.mi)
    params = {"alpha": args.alpha}
    if args.penalty_k is not None or args.penalty_weight is not None:
        if args.penalty_k is None or args.penalty_weight is None:
            raise ValueError("--penalty-k and --penalty-weight go together")
        instance = qubo.build_penalty(imp, red, args.alpha, args.penalty_k,
                                      args.penalty_weight)
        params.update({"penalty_k": args.penalty_k, "penalty_weight": args.penalty_weight})
    else:
        instance = qubo.build(imp, red, args.alpha)
        if args.apply_mu:
            mu = _parse_mu(args.mu)
            instance = qubo.apply_epsilon_mu(instance, imp, args.alpha,
                                             args.epsilon, mu)
            params.update({"epsilon": args.epsilon, "mu": args.mu})
    manifest = _manifest("build", inputs={"mi": args.mi},
                         outputs={"json": args.out}, params=params)
    _write_json(args.out, {**qubo.to_json_dict(instance), "manifest": manifest})
    return EXIT_OK


def _cmd_solve(args):
    instance = qubo.import_file(args.qubo)
    config = _solver_config(args, instance.n)
    manifest = _manifest(
        "solve",
        inputs={"qubo": args.qubo},
        outputs={"json": args.out},
        params=_solver_params(config),
        seed=None if config.kind == "exhaustive" else config.seed,
    )
    if config.kind == "exhaustive":
        result = solve.solve_exhaustive(instance)
        payload = {
            "best": {"x": [int(b) for b in result.x], "energy": result.energy},
            "minimizer_count": int(result.minimizers.shape[0]),
            "manifest": manifest,
        }
    else:
        samples = solve.solve_sampling(instance, config)
        reference = args.reference_energy
        if reference is None and args.reference_exhaustive:
            reference = solve.solve_exhaustive(instance).energy
        payload = {**solve.summarize(samples, reference), "manifest": manifest}
    _write_json(args.out, payload)
    return EXIT_OK


def _cmd_select(args):
    dataset, binned = _load_binned(args)
    imp = infotheory.importance(binned)
    red = infotheory.redundancy(binned)
    config = _solver_config(args, dataset.n_features)
    result = qfs.select_k(imp, red, args.k, solver=config,
                          epsilon=args.epsilon, mu=_parse_mu(args.mu))
    names = dataset.feature_names or tuple(f"f{i}" for i in range(dataset.n_features))
    manifest = _manifest(
        "select",
        inputs={"csv": args.input},
        outputs={"json": args.out},
        params={"B": args.B, "k": args.k, "label": args.label,
                "epsilon": args.epsilon, "mu": args.mu, **_solver_params(config)},
        seed=None if config.kind == "exhaustive" else config.seed,
    )
    payload = {
        **result.to_json_dict(),
        "selected_features": [names[i] for i in np.flatnonzero(result.x_star)],
        "manifest": manifest,
    }
    _write_json(args.out, payload)
    return EXIT_OK


def _cmd_sweep(args):
    _, binned = _load_binned(args)
    imp = infotheory.importance(binned)
    red = infotheory.redundancy(binned)
    config = _solver_config(args, binned.n_features)
    alphas = np.linspace(0.0, 1.0, args.grid)
    points = qfs.sweep_alpha(imp, red, alphas, solver=config)
    manifest = _manifest(
        "sweep",
        inputs={"csv": args.input},
        outputs={"json": args.out},
        params={"B": args.B, "grid": args.grid, "label": args.label,
                **_solver_params(config)},
        seed=None if config.kind == "exhaustive" else config.seed,
    )
    _write_json(args.out, {"points": [list(p) for p in points], "manifest": manifest})
    return EXIT_OK


def _cmd_verify_prop1(args):
    rng = np.random.default_rng(args.seed)
    trials = []
    all_ok = True
    for trial in range(args.trials):
        imp = rng.uniform(0.0, 1.0, args.n)
        upper = np.triu(rng.uniform(0.0, 0.5, (args.n, args.n)), 1)
        red = upper + upper.T
        report = qfs.verify_proposition1(imp, red)
        trials.append({"trial": trial, **report.to_json_dict()})
        all_ok = all_ok and report.ok
        cells = " ".join(
            f"k={k}:{'none' if a is None else format(a, '.6f')}"
            for k, a in sorted(report.witnesses.items())
        )
        print(f"trial {trial:3d} {'ok  ' if report.ok else 'FAIL'} {cells}")
    if args.out:
        manifest = _manifest(
            "verify-prop1",
            inputs={},
            outputs={"json": args.out},
            params={"n": args.n, "trials": args.trials},
            seed=args.seed,
        )
        _write_json(args.out, {"ok": all_ok, "trials": trials, "manifest": manifest})
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


def _load_subset(path):
    """Read a feature subset from any of the JSON shapes the tool emits."""
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if "x_star" in payload:
        return evalmod.FeatureSubset.from_bits(np.asarray(payload["x_star"]))
    if "ground_truth" in payload:
        return evalmod.FeatureSubset(tuple(payload["ground_truth"]), int(payload["n"]))
    if "indices" in payload:
        return evalmod.FeatureSubset(tuple(payload["indices"]), int(payload["n"]))
    raise ValueError(
        f"{path}: expected a JSON object with 'x_star', 'ground_truth', or 'indices'"
    )


def _cmd_eval(args):
    if args.subsets:
        if len(args.subsets) < 2:
            raise ValueError("--subsets needs at least two name=path entries")
        named = []
        paths = {}
        for item in args.subsets:
            name, sep, path = item.partition("=")
            if not sep or not name or not path:
                raise ValueError(f"--subsets entries look like name=path, got {item!r}")
            named.append((name, _load_subset(path)))
            paths[name] = path
        graph = evalmod.distance_graph(named)
        manifest = _manifest(
            "eval",
            inputs=paths,
            outputs={"json": args.out},
            params={"mode": "distance-graph"},
        )
        _write_json(args.out, {**graph, "manifest": manifest})
        return EXIT_OK
    if not (args.selected and args.truth):
        raise ValueError("eval needs either --subsets or both --selected and --truth")
    report = evalmod.recovery_report(_load_subset(args.selected), _load_subset(args.truth))
    manifest = _manifest(
        "eval",
        inputs={"selected": args.selected, "truth": args.truth},
        outputs={"json": args.out},
        params={"mode": "recovery"},
    )
    _write_json(args.out, {**report, "manifest": manifest})
    return EXIT_OK


def _cmd_export(args):
    instance = qubo.import_file(args.qubo)
    manifest = _manifest(
        "export",
        inputs={"qubo": args.qubo},
        outputs={"out": args.out},
        params={"format": args.format},
    )
    if args.format == "json":
        _write_json(args.out, {**qubo.to_json_dict(instance), "manifest": manifest})
    elif args.format == "coord":
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(qubo.to_coordinate_string(instance))
        _write_json(args.out + ".manifest.json", {"manifest": manifest})
    else:  # ising
        ising = qubo.to_ising(instance)
        payload = {
            "n": ising.n,
            "couplings": ising.couplings.tolist(),
            "fields": ising.fields.tolist(),
            "offset": ising.offset,
            "manifest": manifest,
        }
        _write_json(args.out, payload)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qubofs",
        description="Mutual-information feature selection via QUBO",
    )
    parser.add_argument("--version", action="version", version=f"qubofs {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("gen-synth", help="generate a labelled synthetic dataset")
    p.add_argument("--n", type=int, required=True, help="total features")
    p.add_argument("--d-inf", type=int, required=True, help="informative features")
    p.add_argument("--N", type=int, required=True, help="samples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="synth.csv")
    p.set_defaults(func=_cmd_gen_synth)

    p = sub.add_parser("discretize", help="quantile-bin a CSV dataset")
    p.add_argument("--input", required=True)
    p.add_argument("--label", default=None, help="label column name or index (default: last)")
    p.add_argument("--B", type=int, default=20, help="number of bins")
    p.add_argument("--out", default="discretized.json")
    p.set_defaults(func=_cmd_discretize)

    p = sub.add_parser("mi", help="importance and redundancy measures")
    p.add_argument("--input", default=None)
    p.add_argument("--discretized", default=None, help="pre-binned JSON instead of --input")
    p.add_argument("--label", default=None)
    p.add_argument("--B", type=int, default=20)
    p.add_argument("--out", default="mi.json")
    p.set_defaults(func=_cmd_mi)

    p = sub.add_parser("build", help="assemble the selection QUBO at a fixed alpha")
    p.add_argument("--mi", required=True, help="measures JSON from the mi subcommand")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--apply-mu", action="store_true",
                   help="replace near-zero diagonal rewards with the exclusion penalty")
    p.add_argument("--epsilon", type=float, default=1e-8)
    p.add_argument("--mu", default="max")
    p.add_argument("--penalty-k", type=int, default=None,
                   help="instead: add the (sum x - k)^2 cardinality penalty")
    p.add_argument("--penalty-weight", type=float, default=None)
    p.add_argument("--out", default="qubo.json")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("solve", help="minimize a QUBO from a file")
    p.add_argument("--qubo", required=True, help="JSON or coordinate-format instance")
    p.add_argument("--out", default="solution.json")
    p.add_argument("--reference-energy", type=float, default=None,
                   help="energy that counts as the optimum in the summary")
    p.add_argument("--reference-exhaustive", action="store_true",
                   help="use the exhaustive optimum as the reference")
    _add_solver_flags(p, default="annealing")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("select", help="full pipeline: CSV -> subset of exactly k features")
    p.add_argument("--input", required=True)
    p.add_argument("--label", default=None)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--B", type=int, default=20)
    p.add_argument("--epsilon", type=float, default=1e-8)
    p.add_argument("--mu", default="max")
    p.add_argument("--out", default="selection.json")
    _add_solver_flags(p)
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("sweep", help="minimizer size and energy across an alpha grid")
    p.add_argument("--input", required=True)
    p.add_argument("--label", default=None)
    p.add_argument("--B", type=int, default=20)
    p.add_argument("--grid", type=int, default=101, help="number of alpha grid points")
    p.add_argument("--out", default="sweep.json")
    _add_solver_flags(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("verify-prop1",
                       help="check attainability of every subset size on random instances")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_verify_prop1)

    p = sub.add_parser("eval", help="compare subsets: recovery report or distance graph")
    p.add_argument("--selected", default=None)
    p.add_argument("--truth", default=None)
    p.add_argument("--subsets", nargs="*", default=None,
                   help="name=path entries for a pairwise distance graph")
    p.add_argument("--out", default="eval.json")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("export", help="re-emit a QUBO as JSON, coordinate text, or Ising form")
    p.add_argument("--qubo", required=True)
    p.add_argument("--format", default="json", choices=["json", "coord", "ising"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UnreachableKError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"probe trace: {exc.trace}", file=sys.stderr)
        return EXIT_UNREACHABLE
    except NonMonotoneTraceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NON_MONOTONE
    except (QubofsError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
