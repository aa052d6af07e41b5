"""Command line entry points: serve a dataset, or generate a synthetic one."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .build import BuildConfig
from .dataset import load_dataset, save_dataset
from .errors import McsgError
from .similarity import MEASURES
from .synthetic import generate_synthetic_dataset

logger = logging.getLogger("mcsg")


def _serve_parser(subparsers) -> None:
    p = subparsers.add_parser("serve", help="build the graph and run the localhost service")
    p.add_argument("--data", required=True, help="dataset container (JSON, optional binary sidecar)")
    p.add_argument("--port", type=int, default=8077)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--similarity", choices=MEASURES, default="pearson")
    p.add_argument("--tau", type=float, default=0.7, help="channel edge threshold in [0, 1)")
    p.add_argument("--seed", type=int, default=0, help="community detection seed")
    p.add_argument("--max-depth", type=int, default=3, help="deepest hierarchy level index")
    p.add_argument("--min-split-size", type=int, default=4,
                   help="only communities larger than this are re-clustered")
    p.add_argument("--epsilon", type=float, default=0.01, help="hybrid edge weight")
    p.add_argument("--import", dest="import_path", default=None, metavar="JSON",
                   help="start from a previously exported graph instead of rebuilding")


def _synth_parser(subparsers) -> None:
    p = subparsers.add_parser("synth", help="write a synthetic planted-pattern dataset")
    p.add_argument("--out", required=True, help="output dataset path (JSON)")
    p.add_argument("--patterns", type=int, default=3)
    p.add_argument("--channels-per-pattern", type=int, default=15)
    p.add_argument("--noise-channels", type=int, default=5)
    p.add_argument("--width", type=int, default=32)
    p.add_argument("--height", type=int, default=32)
    p.add_argument("--noise", type=float, default=0.05, help="half-normal noise scale")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--sidecar", action="store_true",
                   help="store intensities in a float32 binary sidecar")


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = argparse.ArgumentParser(prog="mcsg",
                                     description="mass channel similarity graph explorer")
    subparsers = parser.add_subparsers(dest="command", required=True)
    _serve_parser(subparsers)
    _synth_parser(subparsers)
    args = parser.parse_args(argv)

    if args.command == "synth":
        ds, truth = generate_synthetic_dataset(
            n_patterns=args.patterns,
            channels_per_pattern=args.channels_per_pattern,
            noise_channels=args.noise_channels,
            width=args.width,
            height=args.height,
            noise_sigma=args.noise,
            seed=args.seed,
        )
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        sidecar = out.with_suffix(".bin").name if args.sidecar else None
        save_dataset(ds, out, sidecar=sidecar)
        logger.info("wrote %s (%d channels, %d patterns, grid %dx%d)", out, ds.n_channels,
                    len(truth.patterns), ds.grid.width, ds.grid.height)
        return 0

    # serve
    try:
        dataset = load_dataset(args.data)
        config = BuildConfig(measure=args.similarity, tau=args.tau, seed=args.seed,
                             max_depth=args.max_depth, min_split_size=args.min_split_size,
                             epsilon=args.epsilon)
        imported = None
        if args.import_path:
            from .editing import import_json
            imported = import_json(Path(args.import_path).read_text())
        from .service import create_app, create_session
        state = create_session(dataset, config, imported=imported)
    except McsgError as exc:
        logger.error("startup failed: %s", exc)
        return 1
    logger.info("dataset %r: %d channels on %dx%d grid; %d communities at level 0",
                dataset.name, dataset.n_channels, dataset.grid.width, dataset.grid.height,
                len(state.graph.hierarchy.levels[0]) if state.graph.hierarchy.n_levels else 0)

    import uvicorn
    uvicorn.run(create_app(state), host=args.host, port=args.port, log_level="info")
    return 0


if __name__ == "__main__":
    sys.exit(main())
