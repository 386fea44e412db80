"""Batch pipeline: config ingestion, stage orchestration, file emission.

A run executes background -> spectrum -> [solve -> diagnostics ->
asymptotics] -> [probe] -> plots from a flat INI config, writing
machine-readable CSV/JSON results plus self-contained SVG figures.
Identical config and seed produce byte-identical outputs (the manifest,
which records wall-clock times, is the one exception).
"""

import argparse
import concurrent.futures
import configparser
import hashlib
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .asymptotics import classical_decay_crosscheck, decay_rate_fit, flux_tail_expansion
from .background import build_primitive, solve_background
from .dispersion import criticality_check, sl_spectrum
from .errors import ConfigError, WaveforceError
from .flowforce import diagnostics as flux_diagnostics
from .flowforce import flow_force
from .physical import flow_force_consistency
from .physical import reconstruct as physical_reconstruct
from .solver import solve_periodic, solve_solitary, subcritical_probe

SECTION_ORDER = ("background", "dispersion", "solver", "diagnostics", "probe", "output")
STAGE_DEPS = {
    "background": (),
    "spectrum": ("background",),
    "solve": ("background",),
    "diagnostics": ("solve",),
    "asymptotics": ("solve",),
    "probe": ("background",),
    "plots": ("solve",),
}


def fmt(x):
    """Canonical 17-significant-digit float formatting for CSV output."""
    return "%.17g" % float(x)


@dataclass(frozen=True)
class RunConfig:
    """Parsed, validated run configuration (raw strings preserved)."""

    sections: dict = field(repr=False)

    @classmethod
    def from_ini(cls, text):
        parser = configparser.ConfigParser()
        parser.optionxform = str  # preserve key case and dots
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError("config parse failure: %s" % exc) from exc
        sections = {
            name: dict(parser.items(name)) for name in parser.sections()
        }
        cfg = cls(sections)
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_ini(fh.read())

    def to_ini(self):
        out = io.StringIO()
        known = [s for s in SECTION_ORDER if s in self.sections]
        extra = sorted(set(self.sections) - set(known))
        for name in known + extra:
            out.write("[%s]\n" % name)
            for key in sorted(self.sections[name]):
                out.write("%s = %s\n" % (key, self.sections[name][key]))
            out.write("\n")
        return out.getvalue()

    def config_hash(self):
        return hashlib.sha256(self.to_ini().encode()).hexdigest()

    def replace(self, section, key, value):
        sections = {k: dict(v) for k, v in self.sections.items()}
        sections.setdefault(section, {})[key] = str(value)
        cfg = RunConfig(sections)
        cfg.validate()
        return cfg

    # typed accessors ---------------------------------------------------
    def _raw(self, section, key, default=None, required=False):
        sec = self.sections.get(section, {})
        if key not in sec:
            if required:
                raise ConfigError("missing key '%s' in [%s]" % (key, section))
            return default
        return sec[key]

    def get_float(self, section, key, default=None, required=False):
        raw = self._raw(section, key, default, required)
        if raw is None:
            return None
        try:
            return float(raw)
        except (TypeError, ValueError):
            raise ConfigError("key '%s' in [%s] is not a number: %r"
                              % (key, section, raw))

    def get_int(self, section, key, default=None, required=False):
        raw = self._raw(section, key, default, required)
        if raw is None:
            return None
        try:
            return int(str(raw))
        except (TypeError, ValueError):
            raise ConfigError("key '%s' in [%s] is not an integer: %r"
                              % (key, section, raw))

    def get_bool(self, section, key, default=False):
        raw = self._raw(section, key, None)
        if raw is None:
            return default
        return str(raw).strip().lower() in ("1", "true", "yes", "on")

    def get_str(self, section, key, default=None, required=False):
        raw = self._raw(section, key, default, required)
        return None if raw is None else str(raw)

    def get_floats(self, section, key, required=False):
        raw = self._raw(section, key, None, required)
        if raw is None:
            return None
        parts = str(raw).replace(",", " ").split()
        try:
            return [float(v) for v in parts]
        except ValueError:
            raise ConfigError("key '%s' in [%s] is not a number list: %r"
                              % (key, section, raw))

    def validate(self):
        if "background" not in self.sections:
            raise ConfigError("missing section [background]")
        kind = self.get_str("background", "vorticity.kind", required=True)
        if kind not in ("polynomial", "sampled"):
            raise ConfigError("vorticity.kind must be polynomial or sampled, got %r"
                              % kind)
        self.get_floats("background", "vorticity.values", required=True)
        self.get_float("background", "s", required=True)
        n_p = self.get_int("background", "n_p", default=2001)
        if n_p < 5:
            raise ConfigError("key 'n_p' in [background] must be >= 5, got %d" % n_p)
        if "solver" in self.sections:
            bc = self.get_str("solver", "bc", default="even-symmetric")
            if bc not in ("even-symmetric", "periodic"):
                raise ConfigError(
                    "key 'bc' in [solver] must be even-symmetric or periodic "
                    "(decaying runs belong in [probe]), got %r" % bc
                )
            if bc == "periodic":
                self.get_float("solver", "amplitude", required=True)
            tol = self.get_float("solver", "tol_newton", default=1e-11)
            if not tol > 0:
                raise ConfigError("key 'tol_newton' in [solver] must be positive")
        if "probe" in self.sections and self.get_bool("probe", "subcritical"):
            self.get_float("probe", "a0", required=True)


@dataclass
class RunManifest:
    """Record of one pipeline run: stage statuses and emitted files."""

    version: str
    config_hash: str
    stages: list
    files: list

    def to_dict(self):
        return {
            "version": self.version,
            "config_hash": self.config_hash,
            "stages": self.stages,
            "files": sorted(self.files),
        }

    @property
    def ok(self):
        return all(s["status"] == "done" or s["status"] == "skipped"
                   for s in self.stages)


# file emission ---------------------------------------------------------

def write_csv(path, header, columns):
    rows = zip(*columns)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if np.isfinite(x) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(obj), fh, sort_keys=True, indent=2)
        fh.write("\n")


def _svg_header(width, height):
    return (
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
        'viewBox="0 0 %d %d">\n<rect width="%d" height="%d" fill="white"/>\n'
        % (width, height, width, height, width, height)
    )


def svg_line_plot(path, x, y, title, width=640, height=400, margin=50):
    """Self-contained SVG polyline plot (no external dependencies)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = np.isfinite(x) & np.isfinite(y)
    x, y = x[ok], y[ok]
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(y.min()), float(y.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    sx = (width - 2 * margin) / (x1 - x0)
    sy = (height - 2 * margin) / (y1 - y0)
    pts = " ".join(
        "%.2f,%.2f" % (margin + (xi - x0) * sx, height - margin - (yi - y0) * sy)
        for xi, yi in zip(x, y)
    )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_svg_header(width, height))
        fh.write('<rect x="%d" y="%d" width="%d" height="%d" fill="none" '
                 'stroke="black"/>\n'
                 % (margin, margin, width - 2 * margin, height - 2 * margin))
        fh.write('<text x="%d" y="%d" font-family="monospace" font-size="14">'
                 "%s</text>\n" % (margin, margin - 12, title))
        fh.write('<text x="%d" y="%d" font-family="monospace" font-size="11">'
                 "[%s, %s] x [%s, %s]</text>\n"
                 % (margin, height - margin + 30, fmt(x0), fmt(x1), fmt(y0), fmt(y1)))
        fh.write('<polyline fill="none" stroke="steelblue" stroke-width="1.5" '
                 'points="%s"/>\n' % pts)
        fh.write("</svg>\n")


def svg_heatmap(path, q, p, Z, title, width=640, height=400, margin=50,
                max_cells=(160, 120)):
    """Downsampled rectangular heat map of a (q, p) field."""
    Z = np.asarray(Z, dtype=float)
    nq, np_ = Z.shape
    step_q = max(1, nq // max_cells[0])
    step_p = max(1, np_ // max_cells[1])
    Zs = Z[::step_q, ::step_p]
    lo, hi = float(Zs.min()), float(Zs.max())
    span = hi - lo if hi > lo else 1.0
    cw = (width - 2 * margin) / Zs.shape[0]
    ch = (height - 2 * margin) / Zs.shape[1]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_svg_header(width, height))
        fh.write('<text x="%d" y="%d" font-family="monospace" font-size="14">'
                 "%s</text>\n" % (margin, margin - 12, title))
        fh.write('<text x="%d" y="%d" font-family="monospace" font-size="11">'
                 "range [%s, %s]</text>\n"
                 % (margin, height - margin + 30, fmt(lo), fmt(hi)))
        for i in range(Zs.shape[0]):
            for j in range(Zs.shape[1]):
                t = (Zs[i, j] - lo) / span
                r = int(255 * t)
                b = int(255 * (1.0 - t))
                g = int(80 + 100 * t * (1 - t))
                fh.write(
                    '<rect x="%.2f" y="%.2f" width="%.2f" height="%.2f" '
                    'fill="rgb(%d,%d,%d)"/>\n'
                    % (margin + i * cw, height - margin - (j + 1) * ch,
                       cw + 0.5, ch + 0.5, r, g, b)
                )
        fh.write("</svg>\n")


# pipeline --------------------------------------------------------------

class _StageFailure(Exception):
    def __init__(self, stage, cause):
        super().__init__("stage '%s' failed: %s: %s"
                         % (stage, type(cause).__name__, cause))
        self.stage = stage
        self.cause = cause


def run_pipeline(config, out_dir=None, seed=None, modes=None):
    """Execute the configured stages; returns the run manifest.

    Failures mark the stage and skip everything downstream; the
    manifest is always written.
    """
    out_dir = out_dir or config.get_str("output", "dir", default="waveforce_out")
    os.makedirs(out_dir, exist_ok=True)
    if seed is None:
        seed = config.get_int("output", "seed", default=0)
    if modes is None:
        modes = config.get_int("dispersion", "modes", default=6)

    requested = ["background", "spectrum"]
    if "solver" in config.sections:
        requested += ["solve", "diagnostics"]
        if config.get_str("solver", "bc", default="even-symmetric") == "even-symmetric":
            requested.append("asymptotics")  # tails need a decaying wave
    if config.get_bool("probe", "subcritical"):
        requested.append("probe")
    if "solve" in requested:
        requested.append("plots")

    stages = []
    files = []
    state = {}
    failed = set()

    def emit(name, writer, *args):
        path = os.path.join(out_dir, name)
        writer(path, *args)
        files.append(name)

    for stage in requested:
        if any(dep in failed or dep not in requested for dep in STAGE_DEPS[stage]):
            stages.append({"name": stage, "status": "skipped", "wall_time_s": 0.0})
            failed.add(stage)
            continue
        t0 = time.perf_counter()
        try:
            _run_stage(stage, config, state, emit, seed=seed, modes=modes)
            stages.append({
                "name": stage, "status": "done",
                "wall_time_s": round(time.perf_counter() - t0, 6),
            })
        except Exception as exc:  # recorded, then downstream skipped
            stages.append({
                "name": stage,
                "status": "failed: %s: %s" % (type(exc).__name__, exc),
                "wall_time_s": round(time.perf_counter() - t0, 6),
            })
            failed.add(stage)

    files.append("manifest.json")
    manifest = RunManifest(__version__, config.config_hash(), stages, files)
    write_json(os.path.join(out_dir, "manifest.json"), manifest.to_dict())
    return manifest


def _run_stage(stage, config, state, emit, seed, modes):
    if stage == "background":
        prof = build_primitive(
            config.get_floats("background", "vorticity.values", required=True),
            kind=config.get_str("background", "vorticity.kind", required=True),
            n_p=config.get_int("background", "n_p", default=2001),
        )
        flow = solve_background(
            prof,
            s=config.get_float("background", "s", required=True),
            n_p=config.get_int("background", "n_p", default=2001),
        )
        state["profile"], state["flow"] = prof, flow
        emit("background.csv", write_csv, ("p", "H", "H_p", "H_pp"),
             (flow.p, flow.H, flow.H_p, flow.H_pp))
        emit("background.json", write_json,
             {"d": flow.d, "R": flow.R, "s": flow.s, "F": flow.F})

    elif stage == "spectrum":
        flow = state["flow"]
        spec = sl_spectrum(flow, n_modes=modes)
        state["spectrum"] = spec
        report = criticality_check(flow, spec)
        state["criticality"] = report
        emit("spectrum.csv", write_csv, ("j", "lambda", "zero_count"),
             (np.arange(modes), spec.lambdas, spec.zero_counts))
        emit("eigenfunctions.csv", write_csv,
             ("p",) + tuple("phi_%d" % j for j in range(modes)),
             (flow.p,) + tuple(spec.phis[j] for j in range(modes)))

    elif stage == "solve":
        prof = state["profile"]
        n_p = config.get_int("solver", "n_p",
                             default=config.get_int("background", "n_p", 2001))
        flow = solve_background(
            prof, s=config.get_float("background", "s", required=True), n_p=n_p
        )
        bc = config.get_str("solver", "bc", default="even-symmetric")
        tol = config.get_float("solver", "tol_newton", default=1e-11)
        max_iter = config.get_int("solver", "max_iter", default=50)
        L = config.get_float("solver", "L")
        n_q = config.get_int("solver", "n_q")
        if bc == "even-symmetric":
            wave = solve_solitary(flow, n_q=n_q, L=L, tol=tol, max_iter=max_iter)
        else:
            wave = solve_periodic(
                flow, config.get_float("solver", "amplitude", required=True),
                n_q=n_q or 128, L=L, tol=tol, max_iter=max_iter,
            )
        state["wave"] = wave
        grid = wave.grid
        Q, P = np.meshgrid(grid.q, grid.p, indexing="ij")
        emit("wave.csv", write_csv, ("q", "p", "w"),
             (Q.ravel(), P.ravel(), wave.w.ravel()))
        emit("surface.csv", write_csv, ("q", "eta"), (grid.q, wave.eta))
        emit("solve.json", write_json, {
            "F": wave.flow.F,
            "amplitude": wave.amplitude,
            "iterations": wave.newton.iterations,
            "residual_inf": wave.newton.residual_inf,
        })

    elif stage == "diagnostics":
        wave = state["wave"]
        diag = flux_diagnostics(wave)
        state["diagnostics"] = diag
        grid = wave.grid
        sup = {
            "phi_q": float(np.max(np.abs(diag.Phi_q_residual[2:-2, 2:-2]))),
            "bc": float(np.max(np.abs(diag.bc_residual[2:-2]))),
            "wp_slope": float(np.max(np.abs(diag.wp_residuals[0][2:-2, 2:-2]))),
            "wp_mixed": float(np.max(np.abs(diag.wp_residuals[1][2:-2, 2:-2]))),
            "wp_resolved": float(np.max(np.abs(diag.wp_residuals[2][2:-2, 2:-2]))),
            "elliptic_inhom":
                float(np.max(np.abs(diag.elliptic_residual_inhom[2:-2, 2:-2]))),
            "elliptic_hom":
                float(np.max(np.abs(diag.elliptic_residual_hom[2:-2, 2:-2]))),
        }
        payload = {
            "S": diag.S,
            "S_plus": diag.S_plus,
            "S_variation": diag.S_variation,
            "min_Phi": diag.min_Phi_interior,
            "sign_changes": int(np.sum(diag.sign_change_map)),
            "sup_residuals": sup,
            "flow_force_physical_rel_gap": flow_force_consistency(wave),
        }
        if config.get_bool("diagnostics", "negative_control"):
            payload["negative_control_S_variation"] = _negative_control(wave, seed)
        state["diag_payload"] = payload
        Q, P = np.meshgrid(grid.q, grid.p, indexing="ij")
        emit("phi.csv", write_csv, ("q", "p", "Phi"),
             (Q.ravel(), P.ravel(), diag.Phi.ravel()))
        emit("diagnostics.csv", write_csv, ("q", "S", "Phi_top_residual"),
             (grid.q, diag.S_of_q, diag.bc_residual))
        emit("diagnostics.json", write_json, payload)
        pf = physical_reconstruct(wave)
        X = np.broadcast_to(pf.x[:, None], pf.y.shape)
        emit("physical.csv", write_csv, ("x", "y", "u_rel", "v", "P"),
             (X.ravel(), pf.y.ravel(), pf.rel_u.ravel(), pf.v.ravel(),
              pf.P.ravel()))

    elif stage == "asymptotics":
        wave = state["wave"]
        if wave.bc.kind != "even-symmetric":
            raise WaveforceError("tail asymptotics need a decaying wave")
        spec_fine = sl_spectrum(wave.flow, n_modes=1, shoot_check=False)
        fit = decay_rate_fit(wave)
        tau_sl = float(np.sqrt(spec_fine.lambdas[0]))
        phi_hat = spec_fine.phis[0] / spec_fine.phis[0][-1]
        diag = state.get("diagnostics")
        Phi = diag.Phi if diag is not None else None
        report = {
            "tau": fit.tau,
            "a": fit.a,
            "lambda0_sl": float(spec_fine.lambdas[0]),
            "relative_gap": abs(fit.tau - tau_sl) / tau_sl,
            "profile_sup_error": float(np.max(np.abs(fit.profile - phi_hat))),
            "r_squared": fit.r_squared,
        }
        if Phi is not None:
            tail = flux_tail_expansion(wave, Phi, fit, spec_fine)
            report["flux_tail_rel_deviation"] = tail["sup_rel_deviation"]
        if np.max(np.abs(wave.flow.H_pp)) < 1e-13:
            report["classical_crosscheck"] = classical_decay_crosscheck(
                wave.flow, fit
            )
        state["fit"] = fit
        eta = wave.eta
        log_abs = np.where(np.abs(eta) > 0, np.log(np.abs(np.where(eta == 0, 1, eta))),
                           -np.inf)
        emit("tail.csv", write_csv, ("q", "eta", "log_abs_eta"),
             (wave.grid.q, eta, log_abs))
        emit("asymptotics.json", write_json, report)

    elif stage == "probe":
        flow = state["flow"]
        prof = state["profile"]
        n_p = config.get_int("probe", "n_p", default=41)
        probe_flow = solve_background(prof, flow.s, n_p=n_p)
        rep = subcritical_probe(
            probe_flow,
            config.get_float("probe", "a0", required=True),
            n_q=config.get_int("probe", "n_q", default=401),
            L=config.get_float("probe", "L", default=20.0),
        )
        emit("probe.json", write_json, {
            "outcome": rep.outcome,
            "sup_w": rep.sup_w,
            "residual_inf": rep.residual_inf,
            "tail_decays": rep.tail_decays,
            "tail_wavelength": rep.tail_wavelength,
            "linear_wavelength": rep.linear_wavelength,
            "iterations": rep.iterations,
        })

    elif stage == "plots":
        wave = state["wave"]
        grid = wave.grid
        emit("surface.svg", svg_line_plot, grid.q, wave.eta, "surface profile eta(q)")
        diag = state.get("diagnostics")
        if diag is not None:
            emit("phi.svg", svg_heatmap, grid.q, grid.p, diag.Phi,
                 "flow force flux Phi(q,p)")
        eta = wave.eta
        mask = np.abs(eta) > 0
        if np.any(mask):
            emit("tail.svg", svg_line_plot, grid.q[mask],
                 np.log10(np.abs(eta[mask])), "log10 |eta| vs q")

    else:  # pragma: no cover
        raise WaveforceError("unknown stage %r" % stage)


def _negative_control(wave, seed):
    """S-variation of a seeded random smooth field on the same flow."""
    from .solver import BoundaryCondition, StripGrid, WaveField

    flow = wave.flow
    grid = wave.grid
    rng = np.random.default_rng(seed)
    modes = rng.standard_normal((4, 2))
    Q, P = np.meshgrid(grid.q, flow.p, indexing="ij")
    w = np.zeros_like(Q)
    for k, (aq, _) in enumerate(modes):
        w += (aq * np.exp(-((Q / (0.2 * grid.L + k)) ** 2))
              * np.sin((k + 1) * np.pi * P / 2.0) * np.cos((k + 1) * Q / 2.0))
    w *= 0.2 * flow.d / np.max(np.abs(w))
    w[:, 0] = 0.0
    control = WaveField(StripGrid(grid.q, flow.p, grid.L), flow,
                        BoundaryCondition("decay"), w)
    S = flow_force(control)
    return float((S.max() - S.min()) / abs(S.mean()))


# command line ----------------------------------------------------------

def _cmd_run(args):
    config = RunConfig.from_file(args.config)
    manifest = run_pipeline(config, out_dir=args.out, seed=args.seed,
                            modes=args.modes)
    for stage in manifest.stages:
        print("%-12s %s" % (stage["name"], stage["status"]))
    return 0 if manifest.ok else 1


def _cmd_sweep(args):
    config = RunConfig.from_file(args.config)
    if "." in args.param:
        section, key = args.param.split(".", 1)
    else:
        section, key = "background", args.param
    values = args.values.split(",")
    out_root = args.out or config.get_str("output", "dir", default="waveforce_out")
    max_workers = int(os.environ.get("WAVEFORCE_THREADS", "0")) or None

    def one(value):
        cfg = config.replace(section, key, value)
        sub = os.path.join(out_root, "%s=%s" % (args.param, value))
        return run_pipeline(cfg, out_dir=sub, seed=args.seed, modes=args.modes)

    with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as pool:
        manifests = list(pool.map(one, values))
    ok = True
    for value, manifest in zip(values, manifests):
        status = "ok" if manifest.ok else "FAILED"
        ok &= manifest.ok
        print("%s=%s: %s" % (args.param, value, status))
    return 0 if ok else 1


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="waveforce",
        description="steady water waves with vorticity: solve and verify",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run the pipeline from a config file")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--modes", type=int, default=None)
    p_run.set_defaults(func=_cmd_run)
    p_sweep = sub.add_parser("sweep", help="run the pipeline over a parameter sweep")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--param", required=True)
    p_sweep.add_argument("--values", required=True)
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--seed", type=int, default=None)
    p_sweep.add_argument("--modes", type=int, default=None)
    p_sweep.set_defaults(func=_cmd_sweep)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    except WaveforceError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
