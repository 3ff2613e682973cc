"""Command-line front end: lattices, transforms, diagnostics, figure data.

Artifacts are JSON (rules, spectral vectors, coefficient trees, reports) and
CSV (sampled grids).  Outputs are written atomically; exit code 0 means
success, 2 a validation failure and 3 a numerical-tolerance failure in a
check command.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from jsonschema import Draft202012Validator, ValidationError

from . import basis, filters, quadrature, transform

MAX_LEVEL = 8
MAX_GRID = 2048

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_TOLERANCE = 3


class ToleranceFailure(Exception):
    """A check command exceeded its numerical tolerance."""


_PAIR = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 2,
    "maxItems": 2,
}

RULE_SCHEMA = {
    "type": "object",
    "required": ["kind", "level", "nodes", "weights"],
    "properties": {
        "kind": {"enum": ["kronecker_lattice", "gauss_reference", "custom"]},
        "level": {"type": ["integer", "null"], "minimum": 0},
        "generator": {"anyOf": [_PAIR, {"type": "null"}]},
        "shift": {"anyOf": [_PAIR, {"type": "null"}]},
        "strategy": {"type": ["string", "null"]},
        "nodes": {"type": "array", "items": _PAIR},
        "weights": {"type": "array", "items": {"type": "number"}},
    },
    "additionalProperties": False,
}

SPECTRAL_SCHEMA = {
    "type": "object",
    "required": ["cutoff", "coeffs"],
    "properties": {
        "cutoff": {"type": "integer", "minimum": 0},
        "coeffs": {"type": "array", "items": _PAIR},
    },
    "additionalProperties": False,
}

_SEQUENCE_ENTRY = {
    "type": "object",
    "required": ["channel", "j", "rule_ref", "v", "spectral"],
    "properties": {
        "channel": {"enum": ["low", "high"]},
        "j": {"type": "integer", "minimum": 0},
        "n": {"type": "integer", "minimum": 1},
        "rule_ref": {"type": "string"},
        "v": {"type": "array", "items": _PAIR},
        "spectral": SPECTRAL_SCHEMA,
    },
    "additionalProperties": False,
}

TREE_SCHEMA = {
    "type": "object",
    "required": ["J", "r", "levels"],
    "properties": {
        "J": {"type": "integer", "minimum": 1},
        "r": {"type": "integer", "minimum": 1},
        "levels": {"type": "array", "items": _SEQUENCE_ENTRY, "minItems": 2},
    },
    "additionalProperties": False,
}

SEQUENCE_SCHEMA = _SEQUENCE_ENTRY


@dataclass
class JobConfig:
    """Validated parameters of one CLI invocation."""

    command: str
    level: int = 4
    generator: tuple = quadrature.DEFAULT_GENERATOR
    shift: tuple = quadrature.DEFAULT_SHIFT
    strategy: str = "fold"
    bank_name: str = filters.DEFAULT_BANK_NAME
    mode: str | None = None
    rules_family: str = "kronecker"
    kind: str | None = None
    node: int = 0
    grid: int = 256
    tol: float = 1e-12
    bit_repro: bool = False
    input_path: str | None = None
    out_path: str | None = None

    def __post_init__(self):
        if not 0 <= self.level <= MAX_LEVEL:
            raise ValidationError(f"level must lie in 0..{MAX_LEVEL}")
        if not 2 <= self.grid <= MAX_GRID:
            raise ValidationError(f"grid resolution must lie in 2..{MAX_GRID}")
        if self.tol <= 0:
            raise ValidationError("tolerance must be positive")


def data_dir() -> Path:
    return Path(os.environ.get("FRAMELET_DATA_DIR", "."))


def _resolve_out(cfg: JobConfig, default_name: str) -> Path:
    if cfg.out_path is not None:
        return Path(cfg.out_path)
    return data_dir() / default_name


def _atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path: Path, doc: dict) -> None:
    _atomic_write_text(path, json.dumps(doc, indent=1) + "\n")


def _write_csv(path: Path, header: list, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(float(v)) for v in row))
    _atomic_write_text(path, "\n".join(lines) + "\n")


def _load_json(path: str) -> dict:
    with open(path) as handle:
        return json.load(handle)


def _load_bank(name: str) -> filters.FilterBank:
    if name == filters.DEFAULT_BANK_NAME:
        return filters.default_bank()
    if os.path.exists(name):
        return filters.bank_from_dict(_load_json(name))
    raise ValidationError(f"unknown bank {name!r} (not the shipped name or a file)")


def _build_system(cfg: JobConfig, levels: int) -> transform.FrameletSystem:
    bank = _load_bank(cfg.bank_name)
    if cfg.rules_family == "reference":
        return transform.reference_system(bank, levels)
    return transform.kronecker_system(
        bank, levels, cfg.generator, cfg.shift, cfg.strategy
    )


def cmd_gen_lattice(cfg: JobConfig) -> int:
    rule = quadrature.kronecker_lattice(
        cfg.level, cfg.generator, cfg.shift, cfg.strategy
    )
    doc = quadrature.rule_to_dict(rule)
    Draft202012Validator(RULE_SCHEMA).validate(doc)
    out = _resolve_out(cfg, f"lattice_j{cfg.level}.json")
    _write_json(out, doc)
    cutoff = basis.degree_cutoff(cfg.level)
    deviation = quadrature.gram_matrix(rule, cutoff).max_deviation_from_identity()
    print(f"nodes: {rule.size}")
    print(f"gram deviation at cutoff {cutoff}: {deviation:.6e}")
    print(f"wrote {out}")
    return EXIT_OK


def _spectral_from_doc(doc: dict, levels: int) -> basis.SpectralVector:
    Draft202012Validator(SPECTRAL_SCHEMA).validate(doc)
    cutoff = int(doc["cutoff"])
    cap = basis.degree_cutoff(levels)
    if cutoff > cap:
        raise ValidationError(
            f"spectral cutoff {cutoff} exceeds the level-{levels} cap {cap}"
        )
    coeffs = transform._pairs_to_array(doc["coeffs"])
    if coeffs.shape[0] != basis.tri_dim(cutoff):
        raise ValidationError(
            f"expected {basis.tri_dim(cutoff)} coefficients for cutoff {cutoff}"
        )
    return basis.SpectralVector(cutoff, coeffs)


def cmd_transform(cfg: JobConfig) -> int:
    transform.set_bit_reproducible(cfg.bit_repro)
    doc = _load_json(cfg.input_path)
    sys_ = _build_system(cfg, cfg.level)
    if cfg.mode in ("decompose", "roundtrip"):
        f = _spectral_from_doc(doc, cfg.level)
        top = transform.analyze_lowpass(sys_, f, cfg.level)
        tree = transform.multilevel_decompose(sys_, top)
        out = _resolve_out(cfg, f"tree_J{cfg.level}.json")
        _write_json(out, transform.tree_to_dict(tree))
        print(f"coefficients: {tree.coefficient_count()}")
        print(f"wrote {out}")
        if cfg.mode == "roundtrip":
            recon = transform.multilevel_reconstruct(sys_, tree)
            residual = transform.relative_difference(top, recon)
            print(f"round-trip residual: {residual:.3e}")
    elif cfg.mode == "reconstruct":
        Draft202012Validator(TREE_SCHEMA).validate(doc)
        tree = transform.tree_from_dict(doc, sys_)
        recon = transform.multilevel_reconstruct(sys_, tree)
        out = _resolve_out(cfg, f"coefficients_j{recon.level}.json")
        _write_json(out, transform.sequence_to_dict(recon, channel="low"))
        print(f"reconstructed level {recon.level} ({len(recon)} coefficients)")
        print(f"wrote {out}")
    else:
        raise ValidationError("transform needs --decompose, --reconstruct or --roundtrip")
    return EXIT_OK


def cmd_diagnostics(cfg: JobConfig) -> int:
    if cfg.level < 1:
        raise ValidationError("diagnostics needs level >= 1")
    bank = _load_bank(cfg.bank_name)
    grid = np.linspace(0.0, 0.5, 10001)
    partition = filters.check_partition(bank, grid)
    refinement = filters.check_refinement(bank, grid)
    sys_ = _build_system(cfg, cfg.level)

    levels = []
    cap = 2 * basis.degree_cutoff(cfg.level) + 2
    for j in range(cfg.level + 1):
        rule = sys_.rule(j)
        cutoff = basis.degree_cutoff(j)
        levels.append(
            {
                "j": j,
                "nodes": rule.size,
                "gram_deviation": quadrature.gram_matrix(
                    rule, cutoff
                ).max_deviation_from_identity(),
                "exactness_degree": quadrature.exactness_degree(
                    rule, cfg.tol, max_degree=cap
                ),
            }
        )
    tightness = [
        {
            "j": j,
            "residual": quadrature.generalized_tightness_residual(
                sys_.rule(j - 1), sys_.rule(j), bank, j, basis.degree_cutoff(j)
            ),
        }
        for j in range(1, cfg.level + 1)
    ]
    band = basis.degree_cutoff(cfg.level - 1)
    rng = np.random.default_rng(0)
    f = basis.SpectralVector(
        band,
        rng.standard_normal(basis.tri_dim(band))
        + 1j * rng.standard_normal(basis.tri_dim(band)),
    )
    parseval = transform.parseval_report(sys_, f, cfg.level)

    report = {
        "bank": bank.name,
        "rules": cfg.rules_family,
        "tolerance": cfg.tol,
        "partition_residual": partition,
        "refinement_residual": refinement,
        "levels": levels,
        "generalized_tightness": tightness,
        "parseval": {
            "band_cutoff": band,
            "seed": 0,
            "levels": parseval["levels"],
            "top_residual": parseval["top"]["residual"],
        },
        "notes": [
            "transforms use direct synthesis sums costing O(N_j * dim_j) per level;"
            " a sub-quadratic basis transform is not implemented, so FFT-speed"
            " scaling is not reproduced",
        ],
    }
    out = _resolve_out(cfg, f"diagnostics_J{cfg.level}.json")
    _write_json(out, report)

    print(f"bank {bank.name}: partition residual {partition:.3e}, "
          f"refinement residual {refinement:.3e}")
    for row in levels:
        print(
            f"level {row['j']}: {row['nodes']} nodes, exactness degree "
            f"{row['exactness_degree']}, gram deviation {row['gram_deviation']:.3e}"
        )
    for row in tightness:
        print(f"tightness residual at j={row['j']}: {row['residual']:.3e}")
    print(f"parseval top residual: {report['parseval']['top_residual']:.3e}")
    print(f"wrote {out}")

    if partition > cfg.tol or refinement > cfg.tol:
        raise ToleranceFailure(
            f"mask identities exceed tolerance {cfg.tol:.1e} "
            f"(partition {partition:.3e}, refinement {refinement:.3e})"
        )
    return EXIT_OK


def cmd_sample(cfg: JobConfig) -> int:
    if cfg.kind == "masks":
        bank = _load_bank(cfg.bank_name)
        xi = np.linspace(0.0, 0.5, cfg.grid)
        columns = [xi, bank.low(xi)]
        header = ["xi", "a_hat"]
        for n, high in enumerate(bank.highs, start=1):
            columns.append(high(xi))
            header.append(f"b{n}_hat")
        out = _resolve_out(cfg, f"masks_{cfg.grid}.csv")
        _write_csv(out, header, zip(*columns))
        print(f"wrote {out}")
        return EXIT_OK

    if cfg.kind == "low":
        kind, n = "low", 1
        levels = cfg.level
    elif cfg.kind in ("high1", "high2"):
        kind, n = "high", int(cfg.kind[-1])
        levels = cfg.level + 1
    else:
        raise ValidationError(f"unknown sample kind {cfg.kind!r}")
    if levels > MAX_LEVEL:
        raise ValidationError("sampling a high-pass at the top level exceeds the level guard")
    sys_ = _build_system(cfg, levels)
    pts = transform.triangle_grid(cfg.grid)
    values = transform.framelet_values(sys_, kind, cfg.level, cfg.node, pts, n=n)
    out = _resolve_out(cfg, f"framelet_{cfg.kind}_j{cfg.level}_k{cfg.node}.csv")
    _write_csv(out, ["x1", "x2", "value"], np.column_stack((pts, values)))
    print(f"wrote {out}")
    return EXIT_OK


def _add_lattice_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--generator", nargs=2, type=float, metavar=("G1", "G2"),
        default=list(quadrature.DEFAULT_GENERATOR),
        help="lattice generator pair (default: frac sqrt2, frac sqrt3)",
    )
    parser.add_argument(
        "--shift", nargs=2, type=float, metavar=("S1", "S2"),
        default=list(quadrature.DEFAULT_SHIFT), help="lattice shift pair",
    )
    parser.add_argument(
        "--strategy", choices=["fold", "intersect"], default="fold",
        help="mapping of unit-square lattice points into the triangle",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="triframe",
        description="Tight framelet transforms on the unit triangle",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen-lattice", help="generate a Kronecker lattice rule")
    p_gen.add_argument("--level", "-j", type=int, required=True)
    _add_lattice_args(p_gen)
    p_gen.add_argument("--out", default=None)

    p_tr = sub.add_parser("transform", help="multi-level framelet transforms")
    mode = p_tr.add_mutually_exclusive_group(required=True)
    mode.add_argument("--decompose", action="store_const", dest="mode", const="decompose")
    mode.add_argument("--reconstruct", action="store_const", dest="mode", const="reconstruct")
    mode.add_argument("--roundtrip", action="store_const", dest="mode", const="roundtrip")
    p_tr.add_argument("--level", "-j", type=int, required=True, help="top level J")
    p_tr.add_argument("--input", required=True, help="spectral vector or tree JSON")
    p_tr.add_argument("--bank", default=filters.DEFAULT_BANK_NAME)
    p_tr.add_argument("--bit-repro", action="store_true")
    _add_lattice_args(p_tr)
    p_tr.add_argument("--out", default=None)

    p_diag = sub.add_parser("diagnostics", help="tightness and exactness report")
    p_diag.add_argument("--level", "-j", type=int, default=4)
    p_diag.add_argument("--tol", type=float, default=1e-12)
    p_diag.add_argument("--rules", choices=["kronecker", "reference"], default="kronecker")
    p_diag.add_argument("--bank", default=filters.DEFAULT_BANK_NAME)
    _add_lattice_args(p_diag)
    p_diag.add_argument("--out", default=None)

    p_sample = sub.add_parser("sample", help="sample framelets or masks to CSV")
    p_sample.add_argument(
        "--kind", required=True, choices=["low", "high1", "high2", "masks"]
    )
    p_sample.add_argument("--level", "-j", type=int, default=5)
    p_sample.add_argument("--node", "-k", type=int, default=0)
    p_sample.add_argument("--grid", type=int, default=256)
    p_sample.add_argument("--bank", default=filters.DEFAULT_BANK_NAME)
    _add_lattice_args(p_sample)
    p_sample.add_argument("--out", default=None)

    return parser


def _config_from_args(args: argparse.Namespace) -> JobConfig:
    return JobConfig(
        command=args.command,
        level=getattr(args, "level", 4),
        generator=tuple(getattr(args, "generator", quadrature.DEFAULT_GENERATOR)),
        shift=tuple(getattr(args, "shift", quadrature.DEFAULT_SHIFT)),
        strategy=getattr(args, "strategy", "fold"),
        bank_name=getattr(args, "bank", filters.DEFAULT_BANK_NAME),
        mode=getattr(args, "mode", None),
        rules_family=getattr(args, "rules", "kronecker"),
        kind=getattr(args, "kind", None),
        node=getattr(args, "node", 0),
        grid=getattr(args, "grid", 256),
        tol=getattr(args, "tol", 1e-12),
        bit_repro=getattr(args, "bit_repro", False),
        input_path=getattr(args, "input", None),
        out_path=getattr(args, "out", None),
    )


_COMMANDS = {
    "gen-lattice": cmd_gen_lattice,
    "transform": cmd_transform,
    "diagnostics": cmd_diagnostics,
    "sample": cmd_sample,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
        return _COMMANDS[args.command](cfg)
    except ToleranceFailure as exc:
        print(f"tolerance failure: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except ValidationError as exc:
        location = "/".join(str(p) for p in exc.absolute_path)
        where = f" at /{location}" if location else ""
        print(f"validation error{where}: {exc.message}", file=sys.stderr)
        return EXIT_VALIDATION
    except json.JSONDecodeError as exc:
        print(
            f"malformed JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})",
            file=sys.stderr,
        )
        return EXIT_VALIDATION
    except (basis.DomainError, ValueError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
