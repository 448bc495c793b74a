"""Command-line front end: algebra validation, pencil scans, quantization checks.

Commands read a JSON config file (all keys optional; defaults are echoed
into every report for provenance) and write JSON/CSV reports with a
versioned schema.  Exit codes: 0 all checks pass, 1 a mathematical check
failed, 2 configuration or I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError, OrbitPencilError, OutOfRange, UnsupportedAlgebra
from .liealg import (
    adjoint_matrix,
    basis_to_json,
    build_basis,
    haar_samples,
    longest_weyl_representative,
)
from .pencil import cross_check_group_vs_chart, degeneracy_scan, weyl_flip_residual
from .prequant import (
    certify_nilpotent_cone,
    certify_scaled_plane,
    cp1_obstruction,
    obstruction_verdict,
)
from .rmatrix import ad_tensor2, compact_r, parabolic_r

PRESETS = {
    "cp1": ("A", 1, ((1, 2),)),
    "cp2": ("A", 2, ((1, 2), (1, 3))),
}

DEFAULT_LAMBDA_GRID = (-3.0, -2.5, -2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0)
DEFAULT_OBSTRUCTION_LAMBDAS = (-0.5, -1.0, -1.5)


@dataclass(frozen=True)
class RunConfig:
    series: str = "A"
    rank: int = 1
    preset: str | None = "cp1"
    dp: tuple = ((1, 2),)
    lambda_grid: tuple = DEFAULT_LAMBDA_GRID
    obstruction_lambdas: tuple = DEFAULT_OBSTRUCTION_LAMBDAS
    samples: int = 50
    seed: int = 0
    rank_tol: float = 1e-9
    residual_tol: float = 1e-8
    quad_rel_err: float = 1e-6
    out_dir: str = "reports"
    formats: tuple = ("json", "csv")

    def validate(self) -> "RunConfig":
        if self.rank < 1:
            raise ConfigError(f"algebra rank must be >= 1, got {self.rank}")
        if not self.lambda_grid:
            raise ConfigError("lambda_grid must be non-empty")
        if self.samples < 1:
            raise ConfigError(f"samples must be >= 1, got {self.samples}")
        for name in ("rank_tol", "residual_tol", "quad_rel_err"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"tolerance {name} must be positive")
        for fmt in self.formats:
            if fmt not in ("json", "csv"):
                raise ConfigError(f"unknown output format {fmt!r}")
        for lam in self.obstruction_lambdas:
            if not (-2.0 <= lam <= 0.0):
                raise OutOfRange(
                    f"obstruction lambda = {lam} outside [-2, 0]; no verdict defined there"
                )
        return self


def _apply_preset(cfg: RunConfig, preset: str) -> RunConfig:
    if preset not in PRESETS:
        raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
    series, rank, dp = PRESETS[preset]
    return replace(cfg, preset=preset, series=series, rank=rank, dp=dp)


def load_config(path: str | None, overrides: dict) -> RunConfig:
    cfg = RunConfig()
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config parse error in {path}: line {exc.lineno}, {exc.msg}") from exc
        known = set(RunConfig.__dataclass_fields__)
        for key, value in raw.items():
            if key not in known:
                raise ConfigError(f"unknown config field {key!r}")
            if key in ("dp", "lambda_grid", "obstruction_lambdas", "formats"):
                value = tuple(tuple(v) if isinstance(v, list) else v for v in value)
            cfg = replace(cfg, **{key: value})
        if "preset" in raw and raw["preset"]:
            cfg = _apply_preset(cfg, raw["preset"])
    if overrides.get("preset"):
        cfg = _apply_preset(cfg, overrides["preset"])
    for key in ("seed", "out_dir"):
        if overrides.get(key) is not None:
            cfg = replace(cfg, **{key: overrides[key]})
    if overrides.get("format"):
        fmt = overrides["format"]
        cfg = replace(cfg, formats=("json", "csv") if fmt == "both" else (fmt,))
    cfg = replace(cfg, dp=tuple(tuple(r) for r in cfg.dp))
    return cfg.validate()


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, newline="\n")


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _config_echo(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    d["dp"] = [list(r) for r in cfg.dp]
    for key in ("lambda_grid", "obstruction_lambdas", "formats"):
        d[key] = list(d[key])
    return d


def cmd_algebra(cfg: RunConfig) -> int:
    """Build the basis, run its structural checks, dump it as JSON."""
    basis = build_basis(cfg.series, cfg.rank, cfg.dp)
    rng = np.random.default_rng(cfg.seed)
    failures = []

    if np.abs(basis.gram - np.eye(basis.dimension)).max() > 1e-12:
        failures.append("orthonormality")
    # Jacobi identity of the matrix bracket on random triples
    worst = 0.0
    for _ in range(100):
        a, b, c = (basis.compact[rng.integers(basis.dimension)] for _ in range(3))
        br = lambda x, y: x @ y - y @ x
        worst = max(worst, float(np.abs(br(br(a, b), c) + br(br(b, c), a) + br(br(c, a), b)).max()))
    if worst > 1e-12:
        failures.append("jacobi")
    w = longest_weyl_representative(basis.root_system)
    r_o = compact_r(basis)
    if float(np.abs(ad_tensor2(w, r_o, basis).coeff + r_o.coeff).max()) > 1e-12:
        failures.append("weyl-flip-of-r_o")
    for g in haar_samples(basis.matrix_dim, 10, seed=cfg.seed):
        a = adjoint_matrix(basis, g)
        if np.abs(a.T @ a - np.eye(basis.dimension)).max() > 1e-11:
            failures.append("adjoint-orthogonality")
            break

    out = Path(cfg.out_dir)
    payload = basis_to_json(basis)
    payload["config"] = _config_echo(cfg)
    payload["checks_failed"] = failures
    if "json" in cfg.formats:
        _write(out / "algebra_basis.json", _json_text(payload))
    for name in failures:
        print(f"algebra check FAILED: {name}")
    print(f"algebra: {cfg.series}{cfg.rank} dim={basis.dimension} m={basis.m} "
          f"{'PASS' if not failures else 'FAIL'}")
    return 0 if not failures else 1


def cmd_pencil_scan(cfg: RunConfig) -> int:
    """Degeneracy/rank scan plus the spectral-bound sweep; JSON + CSV reports."""
    basis = build_basis(cfg.series, cfg.rank, cfg.dp)
    r_o = compact_r(basis)
    r_p = parabolic_r(basis)
    report = degeneracy_scan(
        basis, r_o, r_p, cfg.lambda_grid, samples=cfg.samples, seed=cfg.seed, rank_tol=cfg.rank_tol
    )
    ok = True
    for row in report.rows:
        if row.max_bound > 1.0 + 1e-10:
            ok = False
            print(f"pencil-scan FAILED: bound {row.max_bound} exceeds 1 at lambda={row.lam}")
        expected = -2.0 <= row.lam <= 0.0
        if row.degenerate != expected:
            ok = False
            print(f"pencil-scan FAILED: degeneracy flag at lambda={row.lam} is {row.degenerate}")
    # rank-verdict agreement between the group picture and the chart picture
    if basis.matrix_dim == 2:
        for lam in cfg.lambda_grid:
            if cross_check_group_vs_chart(basis, r_o, r_p, lam, samples=20, seed=cfg.seed) != 0:
                ok = False
                print(f"pencil-scan FAILED: chart cross-check at lambda={lam}")
    rng = np.random.default_rng(cfg.seed)
    worst_flip = 0.0
    for g in haar_samples(basis.matrix_dim, 20, seed=cfg.seed + 1):
        lam = float(rng.uniform(-3.0, 1.0))
        worst_flip = max(worst_flip, weyl_flip_residual(g, lam, r_o, r_p, basis))
    if worst_flip > 1e-10:
        ok = False
        print(f"pencil-scan FAILED: weyl flip residual {worst_flip}")

    out = Path(cfg.out_dir)
    payload = report.to_json_dict()
    payload["config"] = _config_echo(cfg)
    payload["weyl_flip_residual_max"] = worst_flip
    if "json" in cfg.formats:
        _write(out / "pencil_report.json", _json_text(payload))
    if "csv" in cfg.formats:
        _write(out / "pencil_report.csv", report.to_csv_text())
    for row in report.rows:
        print(f"pencil lambda={row.lam:+.3g}: min_rank={row.min_rank} "
              f"degenerate={str(row.degenerate).lower()} bound={row.max_bound:.12f}")
    print(f"pencil-scan: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_vaisman(cfg: RunConfig) -> int:
    """Run both model certifications and the CP^1 obstruction sweeps."""
    out = Path(cfg.out_dir)
    ok = True

    plane = certify_scaled_plane(seed=cfg.seed, tol=cfg.residual_tol)
    cone = certify_nilpotent_cone(seed=cfg.seed, tol=cfg.residual_tol)
    ok &= plane.passed and cone.passed
    print(f"scaled-plane certification: {'PASS' if plane.passed else 'FAIL'} "
          f"(residual {plane.residual_max:.3e})")
    print(f"nilpotent-cone certification: {'PASS' if cone.passed else 'FAIL'} "
          f"(residual {cone.residual_max:.3e}, resolved sign "
          f"{cone.details['resolved_sign']:+.0f})")

    verdicts = {}
    obstruction_payload = []
    for lam in cfg.obstruction_lambdas:
        verdict = obstruction_verdict(lam)
        verdicts[lam] = verdict["quantizable"]
        obstruction_payload.append(verdict)
        if verdict["quantizable"]:
            ok = False
            print(f"obstruction FAILED: lambda={lam} unexpectedly quantizable")
        if verdict["method"] == "quadrature-fit":
            if verdict["max_rel_err"] > cfg.quad_rel_err:
                ok = False
                print(f"obstruction FAILED: quadrature mismatch at lambda={lam}")
            if "csv" in cfg.formats:
                res = cp1_obstruction(lam)
                _write(out / f"obstruction_lambda_{lam:.6g}.csv", res.to_csv_text())
        print(f"obstruction lambda={lam:+.3g}: quantizable={str(verdict['quantizable']).lower()} "
              f"({verdict['method']})")
    # flip symmetry of the verdicts
    flip_pairs = []
    for lam in cfg.obstruction_lambdas:
        partner = -(lam + 2.0)
        pv = verdicts.get(partner, obstruction_verdict(partner)["quantizable"])
        flip_pairs.append({"lambda": lam, "partner": partner, "equal": pv == verdicts[lam]})
        if pv != verdicts[lam]:
            ok = False
            print(f"obstruction FAILED: verdict mismatch between {lam} and {partner}")

    payload = {
        "schema_version": 1,
        "config": _config_echo(cfg),
        "scaled_plane": plane.to_json_dict(),
        "nilpotent_cone": cone.to_json_dict(),
        "obstructions": obstruction_payload,
        "flip_pairs": flip_pairs,
    }
    if "json" in cfg.formats:
        _write(out / "vaisman_report.json", _json_text(payload))
    print(f"vaisman: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_all(cfg: RunConfig) -> int:
    return max(cmd_algebra(cfg), cmd_pencil_scan(cfg), cmd_vaisman(cfg))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbitpencil",
        description="Poisson pencils on coadjoint orbits: scans and quantization checks",
    )
    parser.add_argument("command", choices=["algebra", "pencil-scan", "vaisman", "all"])
    parser.add_argument("--config", metavar="PATH", help="JSON config file")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", dest="out_dir", metavar="DIR", default=None)
    parser.add_argument("--format", choices=["json", "csv", "both"], default=None)
    parser.add_argument("--preset", choices=sorted(PRESETS), default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, vars(args))
        dispatch = {
            "algebra": cmd_algebra,
            "pencil-scan": cmd_pencil_scan,
            "vaisman": cmd_vaisman,
            "all": cmd_all,
        }
        return dispatch[args.command](cfg)
    except (ConfigError, OutOfRange, UnsupportedAlgebra) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2
    except OrbitPencilError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
