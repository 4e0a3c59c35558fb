"""Command-line entry point.

Subcommands: fit, curve, experiment, analyze, simulate, validate. Every
command is deterministic given its flags and input files; all randomness
flows from the master seed. Tabular output is CSV with a fixed column
order; anything nested is JSON.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from eigengreedy import analysis, selection
from eigengreedy.experiments import (
    DEFAULT_SEEDS,
    ExperimentConfig,
    run_experiment,
)
from eigengreedy.gaussian import fit_gaussian, load_model, save_model, whiten
from eigengreedy.store import read_feature_set

# Shallow backbone stages are skipped by default for generalization
# experiments; they are noisier and weaker than the deep ones.
DEEP_NODES = ("features.5", "features.6", "features.7", "features.8")


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


@click.group()
def main():
    """Gaussian anomaly detection with greedy eigencomponent selection."""


@main.command("fit")
@click.option("--train", "train_path", required=True, help="Feature store stem.")
@click.option("--out", "out_path", required=True, help="Output model file.")
def cmd_fit(train_path, out_path):
    """Fit a Gaussian model on a training feature store."""
    try:
        train = read_feature_set(train_path)
        model = fit_gaussian(train)
        save_model(model, out_path)
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    click.echo(
        json.dumps(
            {
                "d": model.d,
                "n": train.n,
                "shrinkage": model.shrinkage,
                "min_eigenvalue": float(model.eigenvalues[0]),
                "max_eigenvalue": float(model.eigenvalues[-1]),
            }
        )
    )


@main.command("curve")
@click.option("--train", "train_path", required=True)
@click.option("--test", "test_path", required=True)
@click.option(
    "--methods",
    default="bottom_up,top_down,pca,npca",
    show_default=True,
    help="Comma-separated selection methods.",
)
@click.option("--out", "out_path", required=True, help="Output CSV.")
def cmd_curve(train_path, test_path, methods, out_path):
    """Fit, whiten, and emit overfit-style curves (greedy = eval = test)."""
    method_list = [m.strip() for m in methods.split(",") if m.strip()]
    try:
        train = read_feature_set(train_path)
        test = read_feature_set(test_path)
        config = ExperimentConfig(
            kind="exp1",
            category=test.category,
            node=test.node_name,
            methods=tuple(method_list),
        )
        results = run_experiment(train, test, config)
        (_, curves), = results
        selection.write_curves_csv(
            [curves[m] for m in method_list], out_path
        )
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    click.echo(f"wrote {out_path}")


def _load_config(path):
    with open(path) as f:
        raw = json.load(f)
    required = {"kind", "category", "node", "methods", "feature_store_paths"}
    missing = required - raw.keys()
    if missing:
        raise ValueError(f"config missing keys: {sorted(missing)}")
    paths = raw["feature_store_paths"]
    if not isinstance(paths, dict) or {"train", "test"} - paths.keys():
        raise ValueError("feature_store_paths must map 'train' and 'test'")
    config = ExperimentConfig(
        kind=raw["kind"],
        category=raw["category"],
        node=raw["node"],
        methods=tuple(raw["methods"]),
        n_min=raw.get("n_min"),
        seeds=tuple(raw.get("seeds", DEFAULT_SEEDS)),
    )
    return config, paths


@main.command("experiment")
@click.option("--config", "config_path", required=True, help="Config JSON.")
@click.option("--out-dir", required=True)
@click.option(
    "--allow-shallow-nodes",
    is_flag=True,
    help="Permit exp2/exp3 on nodes below features.5.",
)
def cmd_experiment(config_path, out_dir, allow_shallow_nodes):
    """Run one experiment config and write per-split, per-method CSVs."""
    try:
        config, paths = _load_config(config_path)
        if (
            config.kind in ("exp2", "exp3")
            and config.node not in DEEP_NODES
            and not allow_shallow_nodes
        ):
            raise ValueError(
                f"node {config.node!r} is below features.5; generalization "
                "experiments default to deep nodes "
                "(pass --allow-shallow-nodes to override)"
            )
        train = read_feature_set(paths["train"])
        test = read_feature_set(paths["test"])
        results = run_experiment(train, test, config)

        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        index = []
        for split, curves in results:
            for method in config.methods:
                name = f"{split.descriptor}__{method}.csv"
                selection.write_curves_csv([curves[method]], out / name)
                index.append(
                    {
                        "descriptor": split.descriptor,
                        "method": method,
                        "csv": name,
                        "d": curves[method].d,
                        "greedy_rows": len(split.greedy_rows),
                        "eval_rows": len(split.eval_rows),
                    }
                )
        with open(out / "index.json", "w") as f:
            json.dump(
                {
                    "kind": config.kind,
                    "category": config.category,
                    "node": config.node,
                    "results": index,
                },
                f,
                indent=1,
            )
            f.write("\n")
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    click.echo(f"wrote {len(index)} curve files to {out_dir}")


@main.command("analyze")
@click.option("--curves", "curves_dir", required=True)
@click.option("--tolerance", default=analysis.DEFAULT_REGIME_TOLERANCE,
              show_default=True)
@click.option("--out-dir", default=None, help="Defaults to the curves dir.")
def cmd_analyze(curves_dir, tolerance, out_dir):
    """Segment regimes and extract the minimal k at max AUROC per curve."""
    curves_dir = Path(curves_dir)
    out = Path(out_dir) if out_dir else curves_dir
    try:
        files = sorted(p for p in curves_dir.glob("*.csv")
                       if p.name not in ("regimes.csv", "k_at_max.csv"))
        if not files:
            raise ValueError(f"no curve CSVs in {curves_dir}")
        regime_rows = []
        kmax_rows = []
        for path in files:
            for c in selection.read_curves_csv(path):
                seg = analysis.segment_regimes(c, tolerance)
                regime_rows.append(
                    [path.name, c.method, seg.rise_end, seg.plateau_end,
                     repr(seg.max_auroc), repr(seg.tolerance)]
                )
                k, value = analysis.k_at_max_auroc(c)
                kmax_rows.append([path.name, c.method, k, repr(value)])
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(
            out / "regimes.csv",
            ["file", "method", "rise_end", "plateau_end", "max_auroc",
             "tolerance"],
            regime_rows,
        )
        _write_csv(
            out / "k_at_max.csv",
            ["file", "method", "k", "auroc"],
            kmax_rows,
        )
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    click.echo(f"wrote {out / 'regimes.csv'} and {out / 'k_at_max.csv'}")


def _write_csv(path, header, rows):
    import csv

    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        writer.writerows(rows)


@main.command("simulate")
@click.option("--model", "model_path", required=True, help="GMD1 model file.")
@click.option("--trace", "trace_path", required=True, help="Trace JSON.")
@click.option("--test", "test_path", required=True, help="Feature store stem.")
@click.option("--signal", type=click.Choice(["noise", "redundant"]),
              required=True)
@click.option("--k-prime", type=int, required=True)
@click.option("--seeds", type=int, default=30, show_default=True)
@click.option("--master-seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, help="Output CSV.")
def cmd_simulate(model_path, trace_path, test_path, signal, k_prime, seeds,
                 master_seed, out_path):
    """Run a synthetic replacement simulation on a test feature store."""
    try:
        model = load_model(model_path)
        trace = selection.load_trace(trace_path)
        test = read_feature_set(test_path)
        white = whiten(model, test)
        result = analysis.simulate_replacement(
            trace, white, k_prime, signal, seeds, master_seed
        )
        analysis.write_simulation_csv(result, out_path)
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    click.echo(f"wrote {out_path}")


@main.command("validate")
@click.option("--store", "store_path", required=True, help="Feature store stem.")
def cmd_validate(store_path):
    """Check a feature store pair against the FVS1 format."""
    try:
        fset = read_feature_set(store_path)
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    labels = [s.label for s in fset.samples]
    click.echo(f"ok: {store_path}")
    click.echo(f"  category: {fset.category}")
    click.echo(f"  node: {fset.node_name}")
    click.echo(f"  n: {fset.n}  d: {fset.d}")
    click.echo(
        f"  normal: {labels.count('normal')}  "
        f"anomalous: {labels.count('anomalous')}"
    )
    click.echo(f"  value range: [{np.min(fset.matrix):g}, "
               f"{np.max(fset.matrix):g}]")


if __name__ == "__main__":
    main()
