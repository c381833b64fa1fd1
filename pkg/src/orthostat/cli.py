"""Command-line interface: solve, expand, mc, compare, weingarten, moments."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from orthostat.asymptotics import load_bundled_tables
from orthostat.config import RunConfig, build_run_config
from orthostat.errors import ConfigurationError, OrthostatError, UnsupportedError
from orthostat.montecarlo import (
    MC_COLUMNS,
    NTK_COLUMNS,
    EnsembleResult,
    haar_moment_oracle,
    run_ensemble,
    sweep_cw,
)
from orthostat.recursion import (
    NORMALIZED_COLUMNS,
    normalized_rows,
    run,
    trajectory_columns,
    trajectory_rows,
)
from orthostat.report import (
    COMPARE_COLUMNS,
    EXPANSION_COLUMNS,
    compare_rows,
    comparison_tables,
    expansion_rows,
    write_csv,
)
from orthostat.weingarten import (
    cycle_types,
    orthogonal_moment,
    weingarten_series,
    weingarten_value,
)

WEINGARTEN_COLUMNS = ("m", "lambda", "n", "exact", "series_order5")
MOMENT_COLUMNS = (
    "n",
    "c_w",
    "rows",
    "cols",
    "exact",
    "mc_mean",
    "mc_stderr",
    "n_samples",
    "z_score",
)
DEFAULT_MOMENT_SAMPLES = 100_000
MAX_SEED = 2**64 - 1


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected an integer seed, got {text!r}"
        ) from None
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 bits, got {value}")
    return value


def _index_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers: {text!r}"
        ) from None


def _banner(title: str) -> None:
    print(title)
    print("-" * 60)


def _single_input(config: RunConfig) -> tuple[str, np.ndarray]:
    vectors = config.input_vectors()
    if len(vectors) != 1:
        raise ConfigurationError(
            f"'{config.mode}' takes a single input, got {len(vectors)}"
        )
    return vectors[0]


def cmd_solve(config: RunConfig) -> list[Path]:
    """Run the recursions: one input gives raw + normalized CSVs, two give pairs."""
    vectors = config.input_vectors()
    if len(vectors) > 2:
        raise ConfigurationError(
            f"'solve' takes one or two inputs, got {len(vectors)}"
        )
    labels = ", ".join(label for label, _ in vectors)
    x = vectors[0][1] if len(vectors) == 1 else np.stack([v for _, v in vectors])
    _banner(
        f"Solving recursions: n={config.network.n} L={config.network.depth} "
        f"C_W={config.network.c_w:g} input={labels}"
    )

    trajectory = run(x, config.network)
    out = config.io.out_dir
    written = [
        write_csv(
            trajectory_rows(trajectory),
            trajectory_columns(trajectory),
            out / "trajectory.csv",
        )
    ]
    if not trajectory.is_pair:
        written.append(
            write_csv(
                normalized_rows(trajectory),
                NORMALIZED_COLUMNS,
                out / "trajectory_normalized.csv",
            )
        )
    return written


def cmd_expand(config: RunConfig, tensor: str | None = None) -> list[Path]:
    """Evaluate the bundled large-depth series for ell = 1..L."""
    tables = load_bundled_tables()
    if tensor is not None:
        tables = [t for t in tables if t.tensor_name == tensor]
        if not tables:
            raise ConfigurationError(f"No expansion table for tensor {tensor!r}")
    _banner(f"Evaluating large-depth series for ell = 1..{config.network.depth}")
    ells = list(range(1, config.network.depth + 1))
    return [
        write_csv(
            expansion_rows(table, ells),
            EXPANSION_COLUMNS,
            config.io.out_dir / f"expansion_{table.tensor_name}.csv",
        )
        for table in tables
    ]


def _run_mc(config: RunConfig, x: np.ndarray) -> list[EnsembleResult]:
    if config.sweep_cw:
        results = sweep_cw(config.sweep_cw, x, config.network, config.mc, config.seed)
        return list(results.values())
    return [run_ensemble(x, config.network, config.mc, config.seed)]


def cmd_mc(config: RunConfig) -> list[Path]:
    """Monte-Carlo ensemble estimates (one block per C_W when sweeping)."""
    label, x = _single_input(config)
    _banner(
        f"Monte Carlo: {config.mc.n_stats} x {config.mc.n_net} networks, "
        f"{config.network.ensemble} weights, input={label}, seed={config.seed}"
    )
    rows: list[dict[str, Any]] = []
    ntk: list[dict[str, Any]] = []
    for result in _run_mc(config, x):
        rows.extend(result.rows())
        ntk.extend(result.ntk_rows())
    out = config.io.out_dir
    return [
        write_csv(rows, MC_COLUMNS, out / "montecarlo.csv"),
        write_csv(ntk, NTK_COLUMNS, out / "montecarlo_ntk.csv"),
    ]


def cmd_compare(config: RunConfig) -> list[Path]:
    """Join recursion, expansion and Monte Carlo per (tensor, ell)."""
    label, x = _single_input(config)
    _banner(
        f"Comparing recursion, expansion and Monte Carlo: input={label} "
        f"L={config.network.depth} C_W={config.network.c_w:g}"
    )
    trajectory = run(x, config.network)
    tables, bundled_constants = comparison_tables(trajectory, config.network)
    mc = run_ensemble(x, config.network, config.mc, config.seed)
    rows = compare_rows(trajectory, tables, mc, bundled_constants)
    return [write_csv(rows, COMPARE_COLUMNS, config.io.out_dir / "compare.csv")]


def cmd_weingarten(config: RunConfig, k: int) -> list[Path]:
    """Weingarten values for every cycle type with m <= k at n = --width."""
    if k > 3:
        raise UnsupportedError(
            f"Weingarten values are available for k <= 3, got k={k}"
        )
    n = config.matrix_size
    rows = []
    for m in range(1, k + 1):
        for lam in cycle_types(m):
            value = weingarten_value(n, lam)
            rows.append(
                {
                    "m": m,
                    # space-separated parts keep the CSV cell unquoted
                    "lambda": " ".join(str(p) for p in lam.parts),
                    "n": n,
                    "exact": "" if value.exact is None else str(value.exact),
                    "series_order5": weingarten_series(n, lam),
                }
            )
    print(",".join(WEINGARTEN_COLUMNS))
    for row in rows:
        print(",".join(str(row[col]) for col in WEINGARTEN_COLUMNS))
    return [
        write_csv(rows, WEINGARTEN_COLUMNS, config.io.out_dir / "weingarten.csv")
    ]


def cmd_moments(
    config: RunConfig,
    row_indices: Sequence[int],
    col_indices: Sequence[int],
    samples: int = DEFAULT_MOMENT_SAMPLES,
) -> list[Path]:
    """Weingarten-formula moment next to a Haar Monte-Carlo estimate."""
    n, c_w = config.matrix_size, config.network.c_w
    exact = orthogonal_moment(n, c_w, row_indices, col_indices)
    oracle = haar_moment_oracle(
        n, c_w, row_indices, col_indices, samples, config.seed
    )
    z = (oracle.mean - exact) / oracle.stderr if oracle.stderr > 0 else None
    row = {
        "n": n,
        "c_w": c_w,
        "rows": " ".join(map(str, row_indices)),
        "cols": " ".join(map(str, col_indices)),
        "exact": exact,
        "mc_mean": oracle.mean,
        "mc_stderr": oracle.stderr,
        "n_samples": oracle.n_samples,
        "z_score": z,
    }
    print(f"Exact: {exact!r}")
    print(
        f"Monte Carlo: {oracle.mean!r} +/- {oracle.stderr!r} "
        f"({oracle.n_samples} draws)"
    )
    return [write_csv([row], MOMENT_COLUMNS, config.io.out_dir / "moments.csv")]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=str, default=None, help="JSON config path")
    parser.add_argument("--seed", type=_seed, default=None, help="Root RNG seed (u64)")
    parser.add_argument("--cw", type=float, default=None, help="Weight variance C_W")
    parser.add_argument("--depth", type=_positive_int, default=None, help="Depth L")
    parser.add_argument(
        "--width",
        "--n",
        dest="width",
        type=_positive_int,
        default=None,
        help="Width n",
    )
    parser.add_argument(
        "--preset",
        choices=["x0", "x1", "x2", "x3"],
        default=None,
        help="Bundled input vector",
    )
    parser.add_argument("--out", type=str, default=None, help="Output directory")
    parser.add_argument(
        "--gaussian",
        action="store_true",
        help="Use i.i.d. Gaussian weights instead of orthogonal ones",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="INFO logging")


def _add_mc(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--n-net", type=_positive_int, default=None, help="Networks per repetition"
    )
    parser.add_argument(
        "--n-stats", type=_positive_int, default=None, help="Repetitions"
    )
    parser.add_argument(
        "--full-paper-scale",
        dest="full_scale",
        action="store_true",
        help="600 networks x 10 repetitions",
    )
    parser.add_argument(
        "--error-convention",
        choices=["networks", "repetitions"],
        default=None,
        help="Standard errors for K/Theta across networks or across repetitions",
    )
    parser.add_argument(
        "--exclude-diagonal",
        action="store_true",
        help="Drop i = j terms from the F and B estimators",
    )


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orthostat",
        description="Finite-width statistics of orthogonally initialized tanh MLPs",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Recursion trajectory for the x0 input, 30 layers
  python -m orthostat solve --preset x0 --depth 30 --out results

  # Large-depth series for K
  python -m orthostat expand --tensor K --depth 100

  # Monte-Carlo ensemble across C_W values
  python -m orthostat mc --sweep-cw 0.5 1 4 --depth 30

  # Three-way comparison at full scale
  python -m orthostat compare --full-paper-scale

  # Weingarten values and a Haar moment check
  python -m orthostat weingarten --n 3 --k 2
  python -m orthostat moments --n 4 --indices 1,1,1,1
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="Iterate the layer recursions")
    _add_common(solve)

    expand = sub.add_parser("expand", help="Evaluate the large-depth series")
    _add_common(expand)
    expand.add_argument("--tensor", type=str, default=None, help="Only this tensor")

    mc = sub.add_parser("mc", help="Monte-Carlo ensemble estimates")
    _add_common(mc)
    _add_mc(mc)
    mc.add_argument(
        "--sweep-cw", type=float, nargs="*", default=None,
        help="C_W values to sweep (bare flag: values from the config)",
    )

    compare = sub.add_parser("compare", help="Recursion vs expansion vs Monte Carlo")
    _add_common(compare)
    _add_mc(compare)

    weingarten = sub.add_parser("weingarten", help="Weingarten function values")
    _add_common(weingarten)
    weingarten.add_argument("--k", type=_positive_int, default=2, help="Max m")

    moments = sub.add_parser("moments", help="Haar moment: formula vs Monte Carlo")
    _add_common(moments)
    moments.add_argument("--indices", type=_index_list, default=None,
                         help="Row and column indices, e.g. 1,1,1,1")
    moments.add_argument("--rows", type=_index_list, default=None)
    moments.add_argument("--cols", type=_index_list, default=None)
    moments.add_argument("--samples", type=_positive_int,
                         default=DEFAULT_MOMENT_SAMPLES, help="Monte-Carlo draws")
    return parser


def _dispatch(config: RunConfig, args: argparse.Namespace) -> list[Path]:
    if config.mode == "solve":
        return cmd_solve(config)
    if config.mode == "expand":
        return cmd_expand(config, args.tensor)
    if config.mode == "mc":
        return cmd_mc(config)
    if config.mode == "compare":
        return cmd_compare(config)
    if config.mode == "weingarten":
        return cmd_weingarten(config, args.k)
    rows = args.rows if args.rows is not None else args.indices
    cols = args.cols if args.cols is not None else args.indices
    if rows is None or cols is None:
        raise ConfigurationError("'moments' needs --indices or both --rows and --cols")
    return cmd_moments(config, rows, cols, args.samples)


def main(argv: list[str] | None = None) -> int:
    """
    CLI entry point.

    Returns:
        Exit code (0 for success, 1 for error); usage and configuration
        errors exit with 2
    """
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        config = build_run_config(args)
    except OrthostatError as e:
        parser.error(str(e))

    try:
        written = _dispatch(config, args)
        print("-" * 60)
        for path in written:
            print(f"Output: {path}")
        return 0
    except OrthostatError as e:
        print(f"\nError: {e}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("\n\nRun cancelled by user", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
