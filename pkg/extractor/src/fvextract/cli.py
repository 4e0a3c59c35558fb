"""Command-line entry point: fvextract extract."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from fvextract.extract import ExtractionJob, run_extraction


@click.group()
def main():
    """Pooled backbone feature extraction into FVS1 feature stores."""


@main.command("extract")
@click.option("--root", required=True, type=click.Path(exists=True),
              help="Dataset root containing <category>/train and test dirs.")
@click.option("--category", required=True, help="Dataset category name.")
@click.option("--nodes", required=True,
              help="Comma-separated node names, e.g. features.5,features.6.")
@click.option("--out", "out_dir", required=True, type=click.Path(),
              help="Directory for the output .fvs/.json pairs.")
@click.option("--batch-size", default=8, show_default=True, type=int)
@click.option("--weights", default="imagenet", show_default=True,
              type=click.Choice(["imagenet", "none"]),
              help="Backbone weights: published classification weights, or "
                   "a fixed-seed random initialization for offline runs.")
def cmd_extract(root, category, nodes, out_dir, batch_size, weights):
    """Extract pooled activations for one category and write stores."""
    try:
        job = ExtractionJob(
            dataset_root=Path(root),
            category=category,
            nodes=tuple(n.strip() for n in nodes.split(",") if n.strip()),
            output_dir=Path(out_dir),
            batch_size=batch_size,
            weights=weights,
        )
        written = run_extraction(job)
    except (ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    for stem in written:
        click.echo(str(stem))


if __name__ == "__main__":
    main()
