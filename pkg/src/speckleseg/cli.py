"""Command-line front end: phantom generation, segmentation runs, benchmark sweeps.

Exit codes: 0 success, 2 usage or configuration error, 3 numeric failure,
4 I/O error. Input images are mapped to strictly positive reals via
f <- max(f, 1) before solving (the data term takes logarithms of region
intensities).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .bench import BenchImage, run_benchmark, write_csv
from .errors import ConfigurationError, InvalidInputError, NumericFailureError
from .imageio import (
    phi_to_u8,
    quantize_u8,
    read_image,
    write_overlay_png,
    write_pgm,
)
from .solvers import ALGORITHMS, default_config, run
from .speckle import GEOMETRIES, SpeckleSpec, make_phantom

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

#: config keys parsed as integers; every other numeric key is a float
_INT_KEYS = {"max_iter", "means_update_every"}
_STR_KEYS = {"data_term"}
#: accepted parameter keys in config files and flags
_PARAM_KEYS = (
    "mu", "lam", "alpha", "beta", "eps", "sigma", "kernel_sigma", "data_term",
    "t", "gamma", "xi", "dt1", "dt2", "max_iter", "tol", "means_update_every",
)


def _coerce(key: str, raw: str):
    if key in _STR_KEYS:
        return raw
    if key in _INT_KEYS:
        return int(raw)
    return float(raw)


def parse_config_file(path) -> dict[str, dict]:
    """Flat ``key = value`` lines with ``#`` comments. A key may be scoped to
    one algorithm as ``<algorithm>.<key>``; unscoped keys apply to all."""
    scopes: dict[str, dict] = {"": {}}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigurationError(f"{path}:{lineno}: expected key = value")
            key, raw = (part.strip() for part in text.split("=", 1))
            scope = ""
            if "." in key:
                scope, key = key.split(".", 1)
                if scope not in ALGORITHMS:
                    raise ConfigurationError(f"{path}:{lineno}: unknown algorithm {scope!r}")
            key = key.replace("-", "_")
            if key == "lambda":
                key = "lam"
            if key not in _PARAM_KEYS:
                raise ConfigurationError(f"{path}:{lineno}: unknown parameter {key!r}")
            try:
                value = _coerce(key, raw)
            except ValueError as exc:
                raise ConfigurationError(f"{path}:{lineno}: {exc}") from exc
            scopes.setdefault(scope, {})[key] = value
    return scopes


def build_config(algorithm: str, file_scopes: dict | None, flag_overrides: dict):
    merged: dict = {}
    if file_scopes:
        merged.update(file_scopes.get("", {}))
        merged.update(file_scopes.get(algorithm, {}))
    merged.update({k: v for k, v in flag_overrides.items() if v is not None})
    return default_config(algorithm, **merged)


def _positive_field(image_u8: np.ndarray) -> np.ndarray:
    return np.maximum(image_u8.astype(np.float64), 1.0)


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("solver parameters (override config file and defaults)")
    g.add_argument("--mu", type=float, help="data-term weight")
    g.add_argument("--lambda", dest="lam", type=float, help="TV splitting weight")
    g.add_argument("--alpha", type=float, help="quadratic/proximal weight")
    g.add_argument("--beta", type=float, help="edge-detector detail weight")
    g.add_argument("--eps", type=float, help="smoothed Heaviside width")
    g.add_argument("--sigma", type=float, help="ISEF pre-smoothing scale")
    g.add_argument("--kernel-sigma", dest="kernel_sigma", type=float,
                   help="local-statistics kernel scale")
    g.add_argument("--data-term", dest="data_term", choices=["log", "linear"],
                   help="data fidelity flavor")
    g.add_argument("--t", type=float, help="fixed-point relaxation, in (0,1)")
    g.add_argument("--gamma", type=float, help="mask threshold, in (0,1)")
    g.add_argument("--xi", type=float, help="reaction-diffusion split factor")
    g.add_argument("--dt1", type=float, help="reaction step size")
    g.add_argument("--dt2", type=float, help="diffusion step size")
    g.add_argument("--max-iter", dest="max_iter", type=int, help="iteration cap")
    g.add_argument("--tol", type=float, help="sup-norm stopping tolerance")
    g.add_argument("--means-update-every", dest="means_update_every", type=int,
                   help="iterations between region-statistics refreshes")


def _flag_overrides(args: argparse.Namespace) -> dict:
    return {k: getattr(args, k, None) for k in _PARAM_KEYS}


def cmd_phantom(args) -> int:
    try:
        spec = SpeckleSpec(looks=args.looks, seed=args.seed)
        phantom = make_phantom(
            (args.size, args.size), args.c1, args.c2, args.geometry, spec
        )
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        write_pgm(f"{args.out}_clean.pgm", quantize_u8(phantom.clean))
        write_pgm(f"{args.out}_noisy.pgm", quantize_u8(phantom.noisy, lo=1))
        write_pgm(f"{args.out}_mask.pgm", phantom.mask * np.uint8(255))
    except OSError as exc:
        print(f"error: cannot write {args.out}_*.pgm: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_segment(args) -> int:
    try:
        file_scopes = parse_config_file(args.config) if args.config else None
        cfg = build_config(args.alg, file_scopes, _flag_overrides(args))
    except (ConfigurationError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        image = read_image(args.input)
        truth = None
        if args.truth:
            truth = read_image(args.truth) > 0
    except (OSError, InvalidInputError) as exc:
        print(f"error: cannot read image: {exc}", file=sys.stderr)
        return EXIT_IO

    f = _positive_field(image)
    try:
        result = run(f, cfg, truth=truth)
    except NumericFailureError as exc:
        print(f"error: numeric failure at iteration {exc.iteration}", file=sys.stderr)
        return EXIT_NUMERIC
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        write_pgm(f"{args.out}_mask.pgm", result.mask * np.uint8(255))
        write_pgm(f"{args.out}_phi.pgm", phi_to_u8(result.phi))
        write_overlay_png(f"{args.out}_overlay.png", image, result.mask)
    except OSError as exc:
        print(f"error: cannot write {args.out}_*: {exc}", file=sys.stderr)
        return EXIT_IO

    line = f"{cfg.algorithm} {result.iterations} {result.wall_seconds:.3f} {result.pp:.4f}"
    if result.dice is not None:
        line += f" {result.dice:.4f}"
    print(line)
    return EXIT_OK


def _synthetic_images(count, size, looks, seed, c1, c2):
    images = []
    for i in range(count):
        geometry = GEOMETRIES[i % len(GEOMETRIES)]
        spec = SpeckleSpec(looks=looks, seed=seed + i)
        phantom = make_phantom((size, size), c1, c2, geometry, spec)
        f = _positive_field(quantize_u8(phantom.noisy, lo=1))
        images.append(
            BenchImage(
                image_id=f"{geometry}-{size}-L{looks}-s{seed + i}",
                f=f,
                reference=phantom.clean,
                truth=phantom.mask.astype(bool),
            )
        )
    return images


def _manifest_images(path):
    images = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            img = read_image(parts[0])
            truth = read_image(parts[1]) > 0 if len(parts) > 1 else None
            images.append(
                BenchImage(
                    image_id=Path(parts[0]).stem,
                    f=_positive_field(img),
                    reference=None,
                    truth=truth,
                )
            )
    return images


def cmd_benchmark(args) -> int:
    algs = [a.strip() for a in args.algs.split(",") if a.strip()]
    try:
        if not algs:
            raise ConfigurationError("no algorithms given")
        file_scopes = parse_config_file(args.config) if args.config else None
        configs = [build_config(a, file_scopes, {}) for a in algs]
        if args.synthetic is not None:
            if args.synthetic < 1:
                raise ConfigurationError("--synthetic must be >= 1")
            images = _synthetic_images(
                args.synthetic, args.size, args.looks, args.seed, args.c1, args.c2
            )
        else:
            images = _manifest_images(args.manifest)
            if not images:
                raise ConfigurationError(f"manifest {args.manifest} lists no images")
    except (ConfigurationError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        records = run_benchmark(images, configs, repeat=args.repeat, workers=args.workers)
    except NumericFailureError as exc:
        print(f"error: numeric failure at iteration {exc.iteration}", file=sys.stderr)
        return EXIT_NUMERIC
    try:
        write_csv(records, args.out)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {len(records)} rows to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="speckleseg",
        description="Active-contour segmentation of speckled images "
        "(RDLS, SBRD, FPRD1, FPRD2).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phantom", help="generate a synthetic speckled phantom")
    p.add_argument("--geometry", choices=GEOMETRIES, default="disk")
    p.add_argument("--size", type=int, default=128, help="image side in pixels")
    p.add_argument("--looks", type=int, default=4,
                   help="number of looks L of the Gamma speckle")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--c1", type=float, default=200.0, help="inside intensity")
    p.add_argument("--c2", type=float, default=50.0, help="outside intensity")
    p.add_argument("--out", required=True, help="output file prefix")
    p.set_defaults(func=cmd_phantom)

    s = sub.add_parser(
        "segment",
        help="segment one image",
        description="Runs the chosen solver; input values are mapped to "
        "max(value, 1) so the logarithmic data term is defined. Prints "
        "'algorithm iterations seconds pp' plus dice when --truth is given.",
    )
    s.add_argument("--alg", required=True, choices=ALGORITHMS)
    s.add_argument("--in", dest="input", required=True, help="PGM (P2/P5) or 8-bit PNG")
    s.add_argument("--out", required=True, help="output prefix for mask/phi/overlay")
    s.add_argument("--truth", help="ground-truth mask image for the dice column")
    s.add_argument("--config", help="key = value parameter file")
    _add_param_flags(s)
    s.set_defaults(func=cmd_segment)

    b = sub.add_parser(
        "benchmark",
        help="run an (images x algorithms) benchmark table",
        description="Each cell runs once unrecorded (warmup), then --repeat "
        "recorded runs; wall_seconds_median is the median. For synthetic "
        "phantoms pp is scored on the clean image.",
    )
    src = b.add_mutually_exclusive_group(required=True)
    src.add_argument("--manifest", help="file listing 'image [truth]' per line")
    src.add_argument("--synthetic", type=int, help="number of phantoms to generate")
    b.add_argument("--algs", default=",".join(ALGORITHMS),
                   help="comma-separated algorithm list")
    b.add_argument("--size", type=int, default=128, help="synthetic phantom side")
    b.add_argument("--looks", type=int, default=4)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--c1", type=float, default=200.0)
    b.add_argument("--c2", type=float, default=50.0)
    b.add_argument("--repeat", type=int, default=5, help="recorded runs per cell")
    b.add_argument("--workers", type=int, default=1,
                   help="concurrent cells (rows stay in manifest order)")
    b.add_argument("--config", help="key = value parameter file; keys may be "
                   "scoped per algorithm as e.g. 'sbrd.mu'")
    b.add_argument("--out", default="benchmark.csv")
    b.set_defaults(func=cmd_benchmark)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
