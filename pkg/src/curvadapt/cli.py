"""Batch front end: ``curvadapt construct|verify|sweep|focal --config scene.json``.

A scene config is JSON. Unknown keys are rejected. Minimal example::

    {
      "x1": {"kind": "sphere", "dim": 2},
      "x2": {"kind": "sphere", "dim": 2},
      "m1": {"kind": "geodesic_sphere", "params": {"radius": 0.5}},
      "m2": {"kind": "geodesic_sphere", "params": {"radius": 0.5}},
      "curve": {"kind": "circle", "params": {"radius": 0.1}},
      "rng_seed": 7
    }

A seed may itself be a constructed hypersurface, either inline
(``{"kind": "constructed", "scene": {x1, x2, m1, m2, curve}}``) or by a
path to another config file relative to the referring file
(``{"kind": "constructed", "scene": "inner.json"}``). ``x1``/``x2`` may then
be omitted; when present they must equal the seed's ambient space.

Every CSV carries an ``rng_seed`` column, prints floats with 17
significant digits and uses LF line endings.

Exit status: 0 success, 1 invalid config or scene, 2 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, ValidationError

from . import oracle
from .construct import (
    TWO_PI,
    ConstructedHypersurface,
    focal_table,
    make_curve,
)
from .errors import ConfigError
from .hypersurface import SEED_KINDS, seed
from .spaceform import ProductSpace, SpaceForm

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAILED = 2


# ---------------------------------------------------------------------------
# config schema


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SpaceDesc(_Strict):
    kind: Literal["sphere", "hyperbolic", "euclidean", "product"]
    dim: Optional[int] = Field(default=None, ge=1)
    curvature: Optional[float] = None
    factors: Optional[list["SpaceDesc"]] = None


class CurveDesc(_Strict):
    kind: Literal["circle", "ellipse", "fourier"]
    params: dict = Field(default_factory=dict)


class SeedDesc(_Strict):
    kind: str
    params: dict = Field(default_factory=dict)
    scene: Union[str, "SceneCore", None] = None


class SceneCore(_Strict):
    x1: Optional[SpaceDesc] = None
    x2: Optional[SpaceDesc] = None
    m1: SeedDesc
    m2: SeedDesc
    curve: CurveDesc


SeedDesc.model_rebuild()
SpaceDesc.model_rebuild()


class Samples(_Strict):
    points: int = Field(default=5, ge=0)
    thetas: int = Field(default=64, ge=0)


class Tolerances(_Strict):
    spectra: PositiveFloat = oracle.DEFAULT_TOL
    commutator: PositiveFloat = oracle.DEFAULT_TOL
    gauss: PositiveFloat = oracle.DEFAULT_TOL


class SweepOptions(_Strict):
    thetas: int = Field(default=64, ge=1)
    verify: bool = False


class VerifyOptions(_Strict):
    flat_section_points: int = Field(default=0, ge=0)
    gauss_step: PositiveFloat = oracle.GAUSS_H


class SceneConfig(SceneCore):
    samples: Samples = Field(default_factory=Samples)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    fd_step: PositiveFloat = oracle.DEFAULT_H
    rng_seed: int = Field(default=0, ge=0)
    budget: int = Field(default=16, ge=1)
    out: Optional[str] = None
    sweep: SweepOptions = Field(default_factory=SweepOptions)
    verify: VerifyOptions = Field(default_factory=VerifyOptions)


def load_config(path):
    """Parse and validate a config file.

    Raises
    ------
    ConfigError
        On unreadable files, malformed JSON or schema violations.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        return SceneConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(f"invalid config {path}:\n{exc}") from exc


# ---------------------------------------------------------------------------
# scene assembly


def build_space(desc: SpaceDesc):
    if desc.kind == "product":
        if not desc.factors or len(desc.factors) != 2:
            raise ConfigError("a product space descriptor needs exactly two factors")
        if desc.dim is not None or desc.curvature is not None:
            raise ConfigError("a product space descriptor takes only 'factors'")
        return ProductSpace(tuple(build_space(f) for f in desc.factors))
    if desc.factors is not None:
        raise ConfigError(f"'factors' is only allowed for product spaces, not {desc.kind}")
    if desc.dim is None:
        raise ConfigError(f"{desc.kind} descriptor needs 'dim'")
    default = {"sphere": 1.0, "hyperbolic": -1.0, "euclidean": 0.0}[desc.kind]
    c = default if desc.curvature is None else desc.curvature
    try:
        return SpaceForm(desc.kind, desc.dim, c)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_seed(desc: SeedDesc, space_desc, base_dir, seen):
    if desc.kind == "constructed":
        if desc.params:
            raise ConfigError("a constructed seed takes 'scene', not 'params'")
        if desc.scene is None:
            raise ConfigError("a constructed seed needs 'scene' (inline object or file path)")
        if isinstance(desc.scene, str):
            ref = (base_dir / desc.scene).resolve()
            if ref in seen:
                raise ConfigError(f"cyclic scene reference through {ref}")
            cfg = load_config(ref)
            H = build_hypersurface(cfg, ref.parent, seen | {ref}, cfg.budget)
        else:
            H = build_hypersurface(desc.scene, base_dir, seen)
        if space_desc is not None and build_space(space_desc) != H.ambient:
            raise ConfigError(f"declared space {build_space(space_desc)} does not match seed ambient {H.ambient}")
        return H
    if desc.scene is not None:
        raise ConfigError(f"'scene' is only allowed for constructed seeds, not {desc.kind}")
    if desc.kind not in SEED_KINDS:
        raise ConfigError(f"unknown seed kind {desc.kind!r}; expected constructed or one of {sorted(SEED_KINDS)}")
    if space_desc is None:
        raise ConfigError(f"seed {desc.kind} needs its factor space descriptor")
    X = build_space(space_desc)
    if not isinstance(X, SpaceForm):
        raise ConfigError(f"catalog seed {desc.kind} needs a space form, got {X}")
    try:
        return seed(desc.kind, X, **desc.params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {desc.kind}: {exc}") from exc


def build_curve(desc: CurveDesc):
    try:
        return make_curve(desc.kind, **desc.params)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad parameters for curve {desc.kind}: {exc!r}") from exc


def build_hypersurface(core: SceneCore, base_dir=Path("."), seen=frozenset(), budget=16):
    """Resolve a scene to a validated :class:`ConstructedHypersurface`."""
    m1 = build_seed(core.m1, core.x1, base_dir, seen)
    m2 = build_seed(core.m2, core.x2, base_dir, seen)
    return ConstructedHypersurface(m1, m2, build_curve(core.curve), budget=budget)


def build_scene(cfg: SceneConfig, base_dir=Path(".")):
    return build_hypersurface(cfg, base_dir, frozenset(), cfg.budget)


# ---------------------------------------------------------------------------
# output


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def _rng(cfg, *key):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(cfg.rng_seed, spawn_key=key)))


def sample_points(H, cfg):
    """Deterministic ``(p1, p2)`` samples; point ``k`` uses its own stream."""
    out = []
    for k in range(cfg.samples.points):
        rng = _rng(cfg, 0, k)
        out.append((H.m1.sample_param(rng), H.m2.sample_param(rng)))
    return out


def thetas(n):
    return np.linspace(0.0, TWO_PI, n, endpoint=False)


# ---------------------------------------------------------------------------
# commands


def cmd_construct(cfg, H, out):
    d = H.diagnostics
    print(f"scene: {H.ambient}")
    print(f"focal bound {fmt(d.focal_bound)}  admissible {fmt(d.admissible)}  "
          f"max |u| {fmt(d.max_radius)}  margin {fmt(d.margin)}")
    p1, p2, th = H.base_param()
    rows = H.eigen_rows(p1, p2, th)
    print(f"{'row':<10}{'mult':>5}{'shape':>26}{'jacobi':>26}")
    for r in rows:
        print(f"{r.name:<10}{r.multiplicity:>5}{fmt(r.shape):>26}{fmt(r.jacobi):>26}")
    write_csv(
        out / "construct.csv",
        ["rng_seed", "row", "multiplicity", "seed_lambda", "seed_mu", "lambda_closed", "mu_closed",
         "focal_bound", "admissible", "max_radius"],
        [[cfg.rng_seed, r.name, r.multiplicity, r.seed_lam, r.seed_mu, r.shape, r.jacobi,
          d.focal_bound, d.admissible, d.max_radius] for r in rows],
    )
    return EXIT_OK


def cmd_verify(cfg, H, out):
    tol = cfg.tolerances
    rows = []
    ok = True
    worst = worst_comm = 0.0
    for k, (p1, p2) in enumerate(sample_points(H, cfg)):
        for th in thetas(cfg.samples.thetas):
            rep = oracle.verify_point(H, (p1, p2, float(th)), cfg.fd_step, tol.spectra)
            comm_ok = rep.commutator <= tol.commutator
            spec_ok = rep.max_error <= tol.spectra
            ok &= comm_ok and spec_ok
            worst = max(worst, rep.max_error)
            worst_comm = max(worst_comm, rep.commutator)
            for r in rep.rows:
                rows.append([cfg.rng_seed, "spectra", k, th, r.lam_closed, r.lam_numeric, r.mu_closed,
                             r.mu_numeric, r.error, rep.commutator, spec_ok and comm_ok])
    print(f"spectra: max error {fmt(worst)} (tol {fmt(tol.spectra)}), "
          f"max commutator {fmt(worst_comm)} (tol {fmt(tol.commutator)})")

    n_flat = cfg.verify.flat_section_points
    if n_flat:
        rng = _rng(cfg, 1)
        p1, p2 = H.m1.sample_param(rng), H.m2.sample_param(rng)
        sigma = H.flat_section(p1, p2)
        reach = min(1.0, H.diagnostics.admissible)
        worst_k = 0.0
        for k in range(n_flat):
            s0 = rng.uniform(-reach, reach, size=2)
            K = oracle.fd_gauss_curvature(H.ambient, lambda s: sigma(s0 + s), cfg.verify.gauss_step)
            passed = abs(K) <= tol.gauss
            ok &= passed
            worst_k = max(worst_k, abs(K))
            rows.append([cfg.rng_seed, "flat_section", k, math.nan, 0.0, K, math.nan, math.nan, abs(K),
                         math.nan, passed])
        print(f"flat section: max |K| {fmt(worst_k)} (tol {fmt(tol.gauss)})")

    write_csv(
        out / "verify.csv",
        ["rng_seed", "check", "sample", "theta", "lambda_closed", "lambda_fd", "mu_closed", "mu_fd",
         "err", "commutator", "pass"],
        rows,
    )
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAILED


def cmd_sweep(cfg, H, out):
    p1, p2, _ = H.base_param()
    verify = cfg.sweep.verify
    header = ["rng_seed", "theta", "C_formula", "C_via_P"]
    body = []
    ok = True
    for th in thetas(cfg.sweep.thetas):
        th = float(th)
        table = H.eigen_rows(p1, p2, th)
        if not body:
            for r in table:
                header += [f"{r.name}_lambda_closed", f"{r.name}_mu_closed", f"{r.name}_seed_mu"]
                if verify:
                    header += [f"{r.name}_lambda_fd", f"{r.name}_err"]
        row = [cfg.rng_seed, th, H.product_angle(th), H.product_angle_via_structure(p1, p2, th)]
        if verify:
            fd, R = oracle.fd_pair(H.ambient, H.chart((p1, p2, th)), H.dim, cfg.fd_step, H.normal((p1, p2, th)))
            nl, nm = oracle.numeric_joint(fd.shape, R)
            cl = np.array([r.shape for r in table for _ in range(r.multiplicity)])
            cm = np.array([r.jacobi for r in table for _ in range(r.multiplicity)])
            idx = oracle.assign(cl, cm, nl, nm)
        start = 0
        for r in table:
            row += [r.shape, r.jacobi, r.seed_mu]
            if verify:
                j = idx[start:start + r.multiplicity]
                err = float(np.max(np.maximum(np.abs(nl[j] - r.shape), np.abs(nm[j] - r.jacobi))))
                ok &= err <= cfg.tolerances.spectra
                row += [float(np.mean(nl[j])), err]
            start += r.multiplicity
        body.append(row)
    path = write_csv(out / "sweep.csv", header, body)
    print(f"wrote {path} ({len(body)} rows)")
    return EXIT_OK if ok else EXIT_FAILED


def cmd_focal(cfg, H, out):
    table = focal_table(H.m1, H.m2, cfg.budget)
    d = H.diagnostics
    write_csv(
        out / "focal.csv",
        ["rng_seed", "factor", "sample", "lambda", "mu", "multiplicity", "focal_radius"],
        [[cfg.rng_seed, r.factor, r.sample, r.lam, r.mu, r.multiplicity, r.focal_radius] for r in table],
    )
    print(f"focal bound {fmt(d.focal_bound)}  admissible radius {fmt(d.admissible)}")
    return EXIT_OK


COMMANDS = {"construct": cmd_construct, "verify": cmd_verify, "sweep": cmd_sweep, "focal": cmd_focal}


def run(command, config_path, out=None):
    """Run one command; return the exit status."""
    config_path = Path(config_path)
    try:
        cfg = load_config(config_path)
        H = build_scene(cfg, config_path.resolve().parent)
    except ValueError as exc:  # config, geometry, curve and focal errors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    out_dir = Path(out if out is not None else cfg.out if cfg.out is not None else ".")
    try:
        return COMMANDS[command](cfg, H, out_dir)
    except oracle.OracleError as exc:
        print(f"verification error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main(argv=None):
    ap = argparse.ArgumentParser(prog="curvadapt", description=__doc__.split("\n")[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, help="scene config (JSON)")
    ap.add_argument("--out", default=None, help="output directory (overrides the config)")
    args = ap.parse_args(argv)
    return run(args.command, args.config, args.out)


if __name__ == "__main__":
    sys.exit(main())
