"""Command-line batch runs: ``sample``, ``compare``, ``rate``, ``equilibrium``, ``constants``.

Data files are written deterministically (floats with 17 significant
digits, records in sample-index order), and every run with ``--out`` also
writes ``<out>.manifest.json`` holding what is needed to repeat it. The
``replay`` subcommand reruns a manifest and compares the data bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from truncated_haar import __version__
from truncated_haar import limit_law, potential, sampling, spectra

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


class ValidationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# serialization


def fmt_float(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def to_json(obj) -> str:
    """Compact JSON with every float written to 17 significant digits."""
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    return json.dumps(obj)


def dataset_lines(m: int, n: int, spectra_list) -> list[str]:
    lines = []
    for index, eigs in enumerate(spectra_list):
        pairs = [{"re": float(z.real), "im": float(z.imag)} for z in eigs]
        lines.append(to_json({"sample_index": index, "m": m, "n": n, "eigenvalues": pairs}))
    return lines


def read_dataset(path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            eigs = np.array([complex(p["re"], p["im"]) for p in rec["eigenvalues"]])
            records.append({"sample_index": rec["sample_index"], "m": rec["m"], "n": rec["n"], "eigenvalues": eigs})
    return records


def read_radial_table(path) -> potential.RadialMeasure:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or not {"radius", "density"} <= set(rows[0]):
        raise ValidationError(f"{path}: expected CSV columns 'radius' and 'density'")
    radii = np.array([float(r["radius"]) for r in rows])
    density = np.array([float(r["density"]) for r in rows])
    return potential.RadialMeasure.from_density(radii, density)


def read_weight_table(path) -> potential.TabulatedWeight:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or not {"radius", "q", "dq"} <= set(rows[0]):
        raise ValidationError(f"{path}: expected CSV columns 'radius', 'q' and 'dq'")
    cols = [np.array([float(r[c]) for r in rows]) for c in ("radius", "q", "dq")]
    return potential.TabulatedWeight(*cols)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands; each returns the text of its data output


def _dimensions(args) -> tuple[int, int]:
    if args.lam is not None and args.m is not None:
        raise ValidationError("give either --m or --lambda, not both")
    if args.lam is not None:
        m = int(math.floor(args.lam * args.n + 0.5))
    elif args.m is not None:
        m = args.m
    else:
        raise ValidationError("one of --m or --lambda is required")
    if not (args.n >= 1 and m > args.n):
        raise ValidationError(f"need m > n >= 1, got m={m}, n={args.n}")
    return m, args.n


def cmd_sample(args) -> str:
    m, n = _dimensions(args)
    if args.samples < 1:
        raise ValidationError("--samples must be positive")
    config = sampling.EnsembleConfig(m, n, args.samples, args.seed)
    batch = sampling.batch_spectra(config, workers=args.workers, kind=args.kind)
    return "\n".join(dataset_lines(m, n, batch)) + "\n"


def _load_spectra(path) -> list[np.ndarray]:
    records = read_dataset(path)
    if not records:
        raise ValidationError(f"{path}: dataset is empty")
    return [r["eigenvalues"] for r in records]


def compare_report(spectra_list, lam: float, grid_size: int = spectra.DEFAULT_GRID_SIZE, law: str = "limit") -> dict:
    """Pooled spectral statistics next to the limit law (or its QUQ mixture)."""
    mu = spectra.pooled_measure(spectra_list)
    theory = limit_law.LimitLaw(lam) if law == "limit" else limit_law.brown_mixture(lam)
    grid = spectra.default_grid(grid_size)
    emp = spectra.radial_cdf_empirical(mu, grid)
    ref = spectra.radial_cdf_table(theory.radial_cdf, grid)
    moments = []
    for (k1, k2), value in spectra.moment_table(mu, 4).items():
        ref_value = theory.moment(k1, k2)
        moments.append({"k1": k1, "k2": k2, "empirical_re": value.real, "empirical_im": value.imag,
                        "theory_re": ref_value.real, "theory_im": ref_value.imag})
    return {
        "lambda": float(lam),
        "law": law,
        "sample_count": len(spectra_list),
        "atom_count": len(mu),
        "ks_distance": spectra.kolmogorov_distance(emp, ref),
        "abs2_moment": mu.moment(1, 1).real,
        "abs2_moment_theory": theory.moment(1, 1).real,
        "moments": moments,
        "cdf": [{"radius": float(r), "empirical": float(e), "theory": float(t)}
                for r, e, t in zip(grid, emp.values, ref.values)],
    }


def cmd_compare(args) -> str:
    report = compare_report(_load_spectra(args.dataset), args.lam, args.grid_size, args.law)
    if args.format == "csv":
        rows = [(row["radius"], row["empirical"], row["theory"]) for row in report["cdf"]]
        return csv_text(["radius", "empirical_cdf", "theory_cdf"], rows)
    return to_json(report) + "\n"


def cmd_rate(args) -> str:
    path = Path(args.input)
    if path.suffix == ".csv":
        mu = read_radial_table(path)
    else:
        mu = spectra.pooled_measure(_load_spectra(path))
    report = potential.rate_function(mu, args.lam, args.clamp)
    fields = {
        "sigma_term": report.sigma_term,
        "weight_term": report.weight_term,
        "constant_b": report.constant_b,
        "total": report.total,
        "clamp_alpha": report.clamp_alpha,
        "mass_beyond_cutoff": report.mass_beyond_cutoff,
    }
    if args.format == "csv":
        return csv_text(list(fields), [list(fields.values())])
    return to_json(fields) + "\n"


def cmd_equilibrium(args) -> str:
    if (args.lam is None) == (args.weight_table is None):
        raise ValidationError("give exactly one of --lambda or --weight-table")
    weight = potential.LogWeight(args.lam) if args.lam is not None else read_weight_table(args.weight_table)
    result = potential.equilibrium_measure(weight, tol=args.tol, grid_size=args.grid_size)
    table = list(zip(result.density.radii.tolist(), result.density.density.tolist()))
    if args.format == "csv":
        return csv_text(["radius", "density"], table)
    cert = potential.FrostmanCertificate(result.frostman_constant, result.max_residual_on_support,
                                         result.min_slack_off_support, args.tol_support)
    return to_json({
        "r0": result.r0,
        "R0": result.R0,
        "frostman_constant": result.frostman_constant,
        "max_residual_on_support": result.max_residual_on_support,
        "min_slack_off_support": result.min_slack_off_support,
        "certificate_passed": cert.passed,
        "mass_defect": result.mass_defect,
        "density": [{"radius": r, "density": d} for r, d in table],
    }) + "\n"


def constants_table(lam: float, n_list) -> list[tuple]:
    b = potential.constant_B(lam)
    rows = []
    for n in n_list:
        m = int(math.floor(lam * n + 0.5))
        if not (n >= 1 and m > n):
            raise ValidationError(f"round(lambda * n) must exceed n, got m={m} for n={n}")
        scaled = potential.log_normalizing_constant(m, n) / n**2
        rows.append((n, m, scaled, b, scaled - b))
    return rows


def cmd_constants(args) -> str:
    rows = constants_table(args.lam, args.n)
    header = ["n", "m", "scaled_log_c", "constant_b", "error"]
    if args.format == "json":
        return to_json([dict(zip(header, row)) for row in rows]) + "\n"
    return csv_text(header, rows)


COMMANDS = {
    "sample": cmd_sample,
    "compare": cmd_compare,
    "rate": cmd_rate,
    "equilibrium": cmd_equilibrium,
    "constants": cmd_constants,
}


# ---------------------------------------------------------------------------
# argument parsing


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=0, help="64-bit master seed")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--out", help="output path (default: stdout, no manifest)")
    common.add_argument("--format", choices=["json", "csv"], default=None)

    parser = argparse.ArgumentParser(prog="truncated-haar", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", parents=[common], help="draw spectra of truncated Haar unitaries")
    p.add_argument("--m", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--kind", choices=["truncation", "projection", "unitary"], default="truncation")

    p = sub.add_parser("compare", parents=[common], help="pooled statistics against the limit law")
    p.add_argument("dataset")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--grid-size", type=int, default=spectra.DEFAULT_GRID_SIZE)
    p.add_argument("--law", choices=["limit", "brown"], default="limit")

    p = sub.add_parser("rate", parents=[common], help="evaluate the rate function")
    p.add_argument("input", help="JSONL dataset or CSV radial table (radius,density)")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--clamp", type=float, default=None, help="cap alpha for the pair kernel")

    p = sub.add_parser("equilibrium", parents=[common], help="solve a radial equilibrium problem")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--weight-table", help="CSV with columns radius,q,dq")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--tol-support", type=float, default=1e-6)
    p.add_argument("--grid-size", type=int, default=4096)

    p = sub.add_parser("constants", parents=[common], help="normalizing-constant convergence table")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--n", type=int, nargs="+", required=True)

    p = sub.add_parser("replay", help="rerun a manifest and compare output bytes")
    p.add_argument("manifest")
    p.add_argument("--workers", type=int, default=None)
    return parser


DEFAULT_FORMAT = {"sample": "json", "compare": "json", "rate": "json", "equilibrium": "json", "constants": "csv"}


def _manifest(command: str, argv: list[str], args, duration: float) -> dict:
    params = {k: v for k, v in vars(args).items() if k not in {"command", "out"}}
    return {
        "command": command,
        "argv": argv,
        "parameters": params,
        "master_seed": args.seed,
        "worker_count": args.workers,
        "tool_version": __version__,
        "wall_clock_seconds": duration,
    }


def _write_text(path: str, text: str):
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise OSError(f"directory does not exist: {parent}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def replay(manifest_path, workers: int | None = None) -> bool:
    """Rerun the command recorded in a manifest; True if the data bytes match."""
    with open(manifest_path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    argv = list(manifest["argv"])
    out_index = argv.index("--out") + 1
    original = argv[out_index]
    with tempfile.TemporaryDirectory() as tmp:
        argv[out_index] = os.path.join(tmp, "replay" + Path(original).suffix)
        if workers is not None:
            argv += ["--workers", str(workers)]
        code = main(argv)
        if code != EXIT_OK:
            return False
        return Path(argv[out_index]).read_bytes() == Path(original).read_bytes()


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    if args.command == "replay":
        try:
            same = replay(args.manifest, args.workers)
        except (OSError, KeyError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        print("identical" if same else "DIFFERENT")
        return EXIT_OK if same else EXIT_NUMERICAL

    if args.format is None:
        args.format = DEFAULT_FORMAT[args.command]
    if args.workers < 1:
        print("error: --workers must be positive", file=sys.stderr)
        return EXIT_VALIDATION
    if args.command == "sample" and not args.out:
        print("error: sample requires --out", file=sys.stderr)
        return EXIT_VALIDATION
    start = time.perf_counter()
    try:
        text = COMMANDS[args.command](args)
    except potential.ConditionsNotMet as exc:
        print(f"error: weight conditions not met: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (sampling.NumericalError, ArithmeticError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    duration = time.perf_counter() - start

    if not args.out:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        _write_text(args.out, text)
        _write_text(args.out + ".manifest.json", to_json(_manifest(args.command, argv, args, duration)) + "\n")
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
