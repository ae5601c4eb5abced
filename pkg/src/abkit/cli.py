"""Command-line front end: config ingestion, experiment orchestration,
report emission, reproducibility plumbing.

Config files are plain text key=value under [sections] (read through
configparser; grammar documented in the README).  Every run writes the
requested reports plus a manifest carrying the config hash, package and
library versions, seed and wall time.

Exit codes: 0 success, 2 config error, 3 accuracy target missed,
4 domain error.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import io
import json
import math
import os
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import AccuracyError, ConfigError, DomainError
from .geometry import CylPoint4, FluxParam, PairConfig
from .report import ScanReport

COMMANDS = [
    "kernel-eval",
    "dispersive-scan",
    "heat-scan",
    "spectral-consistency",
    "wave-localized-scan",
    "evolve-linear",
    "evolve-nls",
    "strichartz-scan",
    "sobolev-scan",
    "square-scan",
    "reduction-check",
    "morawetz",
    "decay-scan",
]

DEFAULTS = {
    "run": {
        "alpha": "0.5",
        "seed": "1234",
        "workers": "1",
        "tol_profile": "strict",
    },
    "grid": {
        "radius": "20.0",
        "n_r": "128",
        "k_max": "4",
        "box": "20.0",
        "n_t": "24",
        "dt": "0.005",
    },
    "scan": {
        "t_min": "0.1",
        "t_max": "10.0",
        "t_count": "8",
        "n_pairs": "3",
        "k_lo": "-2",
        "k_hi": "4",
        "lam_max": "0.0",
    },
    "nls": {
        "p": "2.5",
        "t_final": "2.0",
        "sample_every": "20",
        "l_mode": "0",
        "width": "3.2",
        "width_t": "3.2",
        "amplitude_mass": "4.0",
    },
    "estimates": {
        "s": "1.0",
        "p_lebesgue": "2.0",
        "n_data": "4",
        "windows": "1.0,2.0,4.0",
        "fd_step": "0.002",
    },
}


class RunConfig:
    """Typed view over the parsed config with round-trip emission."""

    def __init__(self, parser: configparser.ConfigParser):
        self.parser = parser

    @classmethod
    def from_file(cls, path: str | None, overrides: list[str] = ()) -> "RunConfig":
        parser = configparser.ConfigParser()
        parser.read_dict(DEFAULTS)
        if path:
            read = parser.read(path)
            if not read:
                raise ConfigError(f"config file not readable: {path}")
        for item in overrides:
            try:
                key, value = item.split("=", 1)
                section, name = key.split(".", 1)
            except ValueError as exc:
                raise ConfigError(
                    f"override {item!r} must look like section.key=value"
                ) from exc
            if not parser.has_section(section) and section not in parser.defaults():
                raise ConfigError(f"unknown config section {section!r}")
            if name not in parser[section]:
                raise ConfigError(f"unknown config key {section}.{name}")
            parser.set(section, name, value)
        cfg = cls(parser)
        cfg.validate()
        return cfg

    def validate(self):
        for section in self.parser.sections():
            if section not in DEFAULTS:
                raise ConfigError(f"unknown config section {section!r}")
            for key in self.parser[section]:
                if key not in DEFAULTS[section]:
                    raise ConfigError(f"unknown config key {section}.{key}")
        self.getfloat("run", "alpha")
        if self.getint("grid", "n_t") % 2:
            raise ConfigError("grid.n_t must be even")
        if self.get("run", "tol_profile") not in ("fast", "strict"):
            raise ConfigError("run.tol_profile must be fast or strict")

    def get(self, section, key) -> str:
        try:
            return self.parser[section][key]
        except KeyError as exc:
            raise ConfigError(f"missing config key {section}.{key}") from exc

    def getfloat(self, section, key) -> float:
        try:
            return float(self.get(section, key))
        except ValueError as exc:
            raise ConfigError(f"config key {section}.{key} is not a number") from exc

    def getint(self, section, key) -> int:
        try:
            return int(self.get(section, key))
        except ValueError as exc:
            raise ConfigError(f"config key {section}.{key} is not an integer") from exc

    def floats(self, section, key) -> list[float]:
        return [float(v) for v in self.get(section, key).split(",") if v.strip()]

    def emit(self) -> str:
        buf = io.StringIO()
        self.parser.write(buf)
        return buf.getvalue()

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.emit().encode()).hexdigest()

    # common derived objects

    @property
    def flux(self) -> FluxParam:
        return FluxParam(self.getfloat("run", "alpha"))

    @property
    def seed(self) -> int:
        return self.getint("run", "seed")

    @property
    def strict(self) -> bool:
        return self.get("run", "tol_profile") == "strict"

    def grid(self):
        from .evolve import GridSpec

        return GridSpec(
            radius=self.getfloat("grid", "radius"),
            n_r=self.getint("grid", "n_r"),
            k_max=self.getint("grid", "k_max"),
            box=self.getfloat("grid", "box"),
            n_t=self.getint("grid", "n_t"),
            dt=self.getfloat("grid", "dt"),
        )

    def sample_points(self, n: int) -> list[CylPoint4]:
        rng = np.random.default_rng(self.seed)
        pts = []
        for _ in range(n):
            pts.append(
                CylPoint4(
                    float(rng.uniform(0.6, 2.2)),
                    float(rng.uniform(0.0, 2.0 * math.pi)),
                    float(rng.uniform(-1.0, 1.0)),
                    float(rng.uniform(-1.0, 1.0)),
                )
            )
        return pts


# -- command implementations ---------------------------------------------------


def _cmd_kernel_eval(cfg: RunConfig, outdir: Path) -> dict:
    from .kernel import heat_kernel, propagator_kernel

    flux = cfg.flux
    pts = cfg.sample_points(2 * cfg.getint("scan", "n_pairs"))
    pairs = list(zip(pts[::2], pts[1::2]))
    report = ScanReport(
        "kernel_eval",
        ["t", "r", "theta", "x3", "x4", "rbar", "thetabar", "y3", "y4",
         "re", "im", "abs", "heat_re", "err_estimate"],
        metadata={"alpha": flux.alpha},
    )
    for t in np.linspace(cfg.getfloat("scan", "t_min"), cfg.getfloat("scan", "t_max"), 4):
        for x, y in pairs:
            kv = propagator_kernel(flux, float(t), x, y)
            hv = heat_kernel(flux, float(t), x, y)
            report.add_row(
                float(t), x.r, x.theta, x.x3, x.x4, y.r, y.theta, y.x3, y.x4,
                kv.value.real, kv.value.imag, abs(kv.value), hv.value.real,
                kv.err_estimate,
            )
    report.write(outdir)
    return {"reports": [report.name], "all_pass": True}


def _scan_grid_times(cfg: RunConfig) -> np.ndarray:
    return np.geomspace(
        cfg.getfloat("scan", "t_min"),
        cfg.getfloat("scan", "t_max"),
        cfg.getint("scan", "t_count"),
    )


def _cmd_dispersive(cfg: RunConfig, outdir: Path) -> dict:
    from .kernel import dispersive_ratio_scan

    pts = cfg.sample_points(2 * cfg.getint("scan", "n_pairs"))
    pairs = list(zip(pts[::2], pts[1::2]))
    report = dispersive_ratio_scan(
        cfg.flux, _scan_grid_times(cfg), pairs, workers=_workers(cfg)
    )
    report.write(outdir)
    ok = report.all_pass
    return {"reports": [report.name], "all_pass": ok, "accuracy_ok": ok}


def _cmd_heat(cfg: RunConfig, outdir: Path) -> dict:
    from .kernel import heat_ratio_scan

    pts = cfg.sample_points(2 * cfg.getint("scan", "n_pairs"))
    pairs = list(zip(pts[::2], pts[1::2]))
    t_grid = np.geomspace(0.01, cfg.getfloat("scan", "t_max"), cfg.getint("scan", "t_count"))
    report = heat_ratio_scan(cfg.flux, t_grid, pairs, workers=_workers(cfg))
    report.write(outdir)
    return {"reports": [report.name], "all_pass": report.all_pass,
            "accuracy_ok": report.all_pass}


def _cmd_spectral(cfg: RunConfig, outdir: Path) -> dict:
    from .spectral import measure_kernel_consistency

    pts = cfg.sample_points(4)
    configs = [(0.4, pts[0], pts[1]), (0.5, pts[2], pts[3]), (0.55, pts[0], pts[2])]
    report = ScanReport(
        "spectral_consistency",
        ["t", "r", "rbar", "rel_deviation", "n_lambda", "pass"],
        metadata={"alpha": cfg.flux.alpha},
    )
    worst = 0.0
    for t, x, y in configs:
        res = measure_kernel_consistency(
            cfg.flux, t, x, y, lam_max=cfg.getfloat("scan", "lam_max") or 0.0
        )
        worst = max(worst, res["rel_deviation"])
        report.add_row(t, x.r, y.r, res["rel_deviation"], res["n_lambda"],
                       res["rel_deviation"] < 1e-4)
    report.write(outdir)
    return {"reports": [report.name], "all_pass": report.all_pass,
            "accuracy_ok": worst < 1e-4, "worst_rel_deviation": worst}


def _cmd_wave(cfg: RunConfig, outdir: Path) -> dict:
    from .spectral import localized_bound_scan, wave_dispersive_scan

    pts = cfg.sample_points(4)
    pairs = [(pts[0], pts[1]), (pts[2], pts[3])]
    ks = range(cfg.getint("scan", "k_lo"), cfg.getint("scan", "k_hi") + 1)
    t_grid = np.linspace(0.0, cfg.getfloat("scan", "t_max"), 6)
    rep1 = wave_dispersive_scan(cfg.flux, ks, t_grid, pairs)
    rep2 = localized_bound_scan(cfg.flux, ks, pairs)
    rep1.write(outdir)
    rep2.write(outdir)
    return {"reports": [rep1.name, rep2.name], "all_pass": True}


def _nls_datum(cfg: RunConfig, grid, flux):
    from .evolve import mode_gaussian, normalized

    u0 = mode_gaussian(
        grid,
        flux,
        l=cfg.getint("nls", "l_mode"),
        w=cfg.getfloat("nls", "width"),
        w_t=cfg.getfloat("nls", "width_t"),
    )
    return normalized(grid, u0, cfg.getfloat("nls", "amplitude_mass"))


def _cmd_evolve_linear(cfg: RunConfig, outdir: Path) -> dict:
    from .evolve import decompose, linear_evolve, spatial_norm, synthesize

    grid = cfg.grid()
    flux = cfg.flux
    u0 = _nls_datum(cfg, grid, flux)
    m0 = decompose(u0, grid, flux)
    report = ScanReport(
        "evolve_linear",
        ["t", "mass", "l4_norm"],
        metadata={"alpha": flux.alpha},
    )
    for t in np.linspace(0.0, cfg.getfloat("nls", "t_final"), 9):
        m = linear_evolve(m0, float(t))
        u = synthesize(m)
        report.add_row(float(t), grid.physical_norm_sq(u), spatial_norm(grid, u, 4.0))
    report.write(outdir)
    mass = report.column("mass")
    drift = max(abs(v - mass[0]) for v in mass) / mass[0]
    return {"reports": [report.name], "all_pass": True,
            "accuracy_ok": drift < 1e-8, "mass_drift": drift}


def _cmd_evolve_nls(cfg: RunConfig, outdir: Path) -> dict:
    from .evolve import (
        NLSConfig,
        mass_energy_drift,
        nls_evolve,
        write_checkpoint,
    )
    from .evolve.observables import Observables

    grid = cfg.grid()
    flux = cfg.flux
    u0 = _nls_datum(cfg, grid, flux)
    nls_cfg = NLSConfig(
        p=cfg.getfloat("nls", "p"),
        t_final=cfg.getfloat("nls", "t_final"),
        sample_every=cfg.getint("nls", "sample_every"),
        norms=(cfg.getfloat("nls", "p") + 1.0,),
    )
    traj = nls_evolve(u0, grid, flux, nls_cfg)
    report = ScanReport(
        "evolve_nls", Observables.columns(), metadata={"alpha": flux.alpha}
    )
    for obs in traj.series:
        report.add_row(*obs.row())
    report.write(outdir)
    write_checkpoint(
        outdir / "final_state.ckpt", traj.final, grid, flux, nls_cfg.p, nls_cfg.t_final
    )
    dm, de = mass_energy_drift(traj)
    ok = dm < 1e-8 and de < 1e-5
    return {
        "reports": [report.name],
        "all_pass": ok,
        "accuracy_ok": ok,
        "mass_drift": dm,
        "energy_drift": de,
    }


def _cmd_strichartz(cfg: RunConfig, outdir: Path) -> dict:
    from .estimates import CANONICAL_PAIRS, strichartz_scan
    from .evolve import datum_family

    grid = cfg.grid()
    flux = cfg.flux
    data = datum_family(grid, flux, cfg.getint("estimates", "n_data"), cfg.seed)
    report = strichartz_scan(
        flux, grid, data, CANONICAL_PAIRS, cfg.floats("estimates", "windows")
    )
    report.write(outdir)
    return {"reports": [report.name], "all_pass": True}


def _cmd_sobolev(cfg: RunConfig, outdir: Path) -> dict:
    from .estimates import sobolev_equiv_ratio
    from .evolve import mode_gaussian

    grid = cfg.grid()
    flux = cfg.flux
    data = []
    for l, w in [(0, 2.0), (1, 2.5)]:
        u = mode_gaussian(grid, flux, l=l, w=w, w_t=w)
        nu = flux.order(-l)

        def fn(x1, x2, x3, x4, w=w, l=l, nu=nu):
            r = np.hypot(x1, x2)
            th = np.arctan2(x2, x1)
            return (
                (r / w) ** nu
                * np.exp(-(r * r) / (2 * w * w))
                * np.exp(1j * l * th)
                * np.exp(-(x3**2 + x4**2) / (2 * w * w))
            )

        data.append((u, fn))
    report = sobolev_equiv_ratio(
        flux, grid, data, cfg.getfloat("estimates", "s"),
        cfg.getfloat("estimates", "p_lebesgue"),
    )
    report.write(outdir)
    return {"reports": [report.name], "all_pass": report.all_pass,
            "accuracy_ok": report.all_pass}


def _cmd_square(cfg: RunConfig, outdir: Path) -> dict:
    from .estimates import square_function_ratio
    from .evolve import datum_family

    grid = cfg.grid()
    flux = cfg.flux
    data = datum_family(grid, flux, 2, cfg.seed)
    report = square_function_ratio(flux, grid, data, [2.0, 3.0])
    report.write(outdir)
    return {"reports": [report.name], "all_pass": report.all_pass,
            "accuracy_ok": report.all_pass}


def _cmd_reduction(cfg: RunConfig, outdir: Path) -> dict:
    from .estimates import reduction_identity_check

    rng = np.random.default_rng(cfg.seed)
    center = rng.uniform(-0.8, 0.8, size=4)

    def fn(x):
        return np.exp(-0.5 * np.sum((x - center) ** 2)) * np.exp(1j * 0.3 * x[0])

    pairs = []
    while len(pairs) < 5:
        a = rng.uniform(-1.2, 1.2, size=2)
        b = rng.uniform(-1.2, 1.2, size=2)
        if np.hypot(*(a - b)) > 0.4:
            pairs.append(PairConfig(tuple(a), tuple(b)))
    h = cfg.getfloat("estimates", "fd_step")
    rep1 = reduction_identity_check(cfg.flux, fn, pairs, h)
    rep2 = reduction_identity_check(cfg.flux, fn, pairs, h / 2.0)
    rep1.name = "reduction_identity_h"
    rep2.name = "reduction_identity_h2"
    rep1.write(outdir)
    rep2.write(outdir)
    orders = [
        math.log2(a / b)
        for a, b in zip(rep1.column("rel_dev"), rep2.column("rel_dev"))
    ]
    ok = all(1.8 <= o <= 2.2 for o in orders)
    return {"reports": [rep1.name, rep2.name], "all_pass": ok,
            "accuracy_ok": ok, "orders": orders}


def _cmd_morawetz(cfg: RunConfig, outdir: Path) -> dict:
    from .evolve import NLSConfig, nls_evolve, virial_residuals

    grid = cfg.grid()
    flux = cfg.flux
    u0 = _nls_datum(cfg, grid, flux)
    nls_cfg = NLSConfig(
        p=cfg.getfloat("nls", "p"),
        t_final=cfg.getfloat("nls", "t_final"),
        sample_every=cfg.getint("nls", "sample_every"),
        virial=True,
        morawetz=True,
    )
    traj = nls_evolve(u0, grid, flux, nls_cfg)
    report = ScanReport(
        "morawetz_virial",
        ["t", "phi", "d2phi_dt2", "virial_rhs", "residual", "morawetz_density"],
        metadata={"alpha": flux.alpha, "p": nls_cfg.p},
    )
    rows = virial_residuals(traj)
    mora = dict(traj.morawetz)
    phi = dict(traj.phi)
    for t, dd, rhs in rows:
        report.add_row(t, phi[t], dd, rhs, abs(dd - rhs), mora[t])
    report.write(outdir)
    worst = max((abs(dd - rhs) / abs(rhs) for _, dd, rhs in rows), default=0.0)
    return {"reports": [report.name], "all_pass": worst < 1e-2,
            "accuracy_ok": worst < 1e-2, "worst_residual": worst}


def _cmd_decay(cfg: RunConfig, outdir: Path) -> dict:
    from .estimates import potential_decay_scan
    from .evolve import NLSConfig, nls_evolve

    grid = cfg.grid()
    flux = cfg.flux
    u0 = _nls_datum(cfg, grid, flux)
    p = cfg.getfloat("nls", "p")
    nls_cfg = NLSConfig(
        p=p,
        t_final=cfg.getfloat("nls", "t_final"),
        sample_every=cfg.getint("nls", "sample_every"),
        norms=(p + 1.0, 2.5),
        morawetz=True,
    )
    traj = nls_evolve(u0, grid, flux, nls_cfg)
    report = potential_decay_scan(traj)
    report.write(outdir)
    series = traj.norms[p + 1.0]
    ratio = series[-1][1] / series[0][1]
    return {"reports": [report.name], "all_pass": True, "terminal_ratio": ratio}


HANDLERS = {
    "kernel-eval": _cmd_kernel_eval,
    "dispersive-scan": _cmd_dispersive,
    "heat-scan": _cmd_heat,
    "spectral-consistency": _cmd_spectral,
    "wave-localized-scan": _cmd_wave,
    "evolve-linear": _cmd_evolve_linear,
    "evolve-nls": _cmd_evolve_nls,
    "strichartz-scan": _cmd_strichartz,
    "sobolev-scan": _cmd_sobolev,
    "square-scan": _cmd_square,
    "reduction-check": _cmd_reduction,
    "morawetz": _cmd_morawetz,
    "decay-scan": _cmd_decay,
}


def _workers(cfg: RunConfig) -> int:
    env = os.environ.get("AB_KIT_WORKERS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError("AB_KIT_WORKERS must be an integer") from exc
    return max(1, cfg.getint("run", "workers"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abkit",
        description="Scans and solvers for the 4D Aharonov-Bohm two-particle operator.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="key=value config file with [sections]")
    parser.add_argument("--out", default="abkit-out", help="output directory")
    parser.add_argument("--seed", type=int, help="override run.seed")
    parser.add_argument("--workers", type=int, help="override run.workers")
    parser.add_argument("--tol-profile", choices=["fast", "strict"])
    parser.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="config override (repeatable)",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.time()
    try:
        overrides = list(args.set)
        if args.seed is not None:
            overrides.append(f"run.seed={args.seed}")
        if args.workers is not None:
            overrides.append(f"run.workers={args.workers}")
        if args.tol_profile is not None:
            overrides.append(f"run.tol_profile={args.tol_profile}")
        cfg = RunConfig.from_file(args.config, overrides)
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        result = HANDLERS[args.command](cfg, outdir)
        status = 0 if result.get("accuracy_ok", True) else 3
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except AccuracyError as exc:
        print(f"accuracy error: {exc}", file=sys.stderr)
        return 3
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 4
    manifest = {
        "command": args.command,
        "config_sha256": cfg.digest,
        "config": cfg.emit(),
        "seed": cfg.seed,
        "abkit_version": __version__,
        "numpy_version": np.__version__,
        "python_version": platform.python_version(),
        "wall_time_s": round(time.time() - t0, 3),
        "exit_status": status,
        **{k: v for k, v in result.items() if k != "reports"},
        "reports": result.get("reports", []),
    }
    (outdir / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=1, default=str) + "\n"
    )
    if status == 3:
        print(
            f"{args.command}: accuracy target missed (see manifest)", file=sys.stderr
        )
    return status


if __name__ == "__main__":
    sys.exit(main())
