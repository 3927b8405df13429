"""CSV / SVG / JSON output.  Every file is a deterministic function of the
configuration: floats are written with ``repr``, SVG ids use a fixed salt
and carry no timestamp, and the manifest holds no wall-clock data."""
from __future__ import annotations

import csv
import hashlib
import json
from importlib import metadata
from pathlib import Path

import numpy as np

from ..diagrammatics import (
    coupling_for_power,
    diffusion_ratio,
    kappa_tilde,
    sigma_D,
    sigma_P,
    write_predictions_csv,
)
from ..ensemble import write_linewidths_csv, write_response_csv
from ..model import PhononDamping
from .config import SCHEMA_VERSION
from .fitting import saturating
from .scenarios import Fig2Result, SweepResult, _opto

MANIFEST_NAME = "manifest.json"


def _versions() -> dict:
    out = {}
    for pkg in ("artifact", "numpy", "scipy", "matplotlib"):
        try:
            out[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            out[pkg] = None
    return out


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _num(v):
    v = float(v)
    return None if not np.isfinite(v) else v


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "chiral-phonons"
    return plt


def _save_svg(fig, path: Path):
    fig.savefig(path, format="svg", metadata={"Date": None})


def _prepare(out_dir) -> Path:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {out} is not writable: {exc}") from exc
    return out


def _write_manifest(out: Path, cfg, files: list, results: dict, extra: dict) -> Path:
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "scenario": cfg.scenario,
        "seed": cfg.seed,
        "n_realizations": cfg.n_realizations,
        "config": cfg.to_dict(),
        "versions": _versions(),
        **extra,
        "results": results,
        "files": {f.name if f.parent == out else str(f.relative_to(out)): _sha256(f) for f in sorted(files)},
    }
    path = out / MANIFEST_NAME
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def emit_fig2(res: Fig2Result, out_dir) -> list:
    out = _prepare(out_dir)
    files = []
    gamma = res.gamma
    cw, ccw = res.modes["cw"], res.modes["ccw"]
    qs = [res.grid.wavevectors[cw], res.grid.wavevectors[ccw]]
    for k, go in enumerate(res.gamma_opt):
        files.append(write_response_csv(out / f"response_pump{k:02d}.csv", res.omega, res.chi[k], qs))

    lw = out / "linewidths.csv"
    with lw.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["gamma_opt", "branch", "mode_q", "omega_hat", "gamma_hat", "residual", "n_excluded", "gamma_two_mode"])
        for go, pair, pred in zip(res.gamma_opt, res.estimates, res.predictions):
            for branch, est, p in zip(("cw", "ccw"), pair, pred):
                w.writerow([repr(float(go)), branch, repr(est.mode_q), repr(est.center), repr(est.width), repr(est.residual), est.n_excluded, repr(float(p))])
    files.append(lw)

    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    detune = (res.omega - res.config.omega_c) / gamma
    norm = (gamma / 2) ** 2
    ax.plot(detune, np.abs(res.chi[0, :, 1]) ** 2 * norm, color="green", label="pump off")
    ax.plot(detune, np.abs(res.chi[-1, :, 1]) ** 2 * norm, color="red", label="CCW, pump on")
    ax.plot(detune, np.abs(res.chi[-1, :, 0]) ** 2 * norm, color="blue", label="CW, pump on")
    ax.set_xlabel(r"$(\omega - \Omega_c)/\gamma$")
    ax.set_ylabel(r"$|\bar\chi_{qq}|^2 \gamma^2/4$")
    ax.set_xlim(-5, 5)
    ax.legend()
    svg = out / "fig2.svg"
    _save_svg(fig, svg)
    plt.close(fig)
    files.append(svg)

    results = {
        "gamma": gamma,
        "g": res.g,
        "linewidths": [
            {"gamma_opt": float(go), "cw": pair[0].width, "ccw": pair[1].width, "cw_two_mode": pred[0], "ccw_two_mode": pred[1]}
            for go, pair, pred in zip(res.gamma_opt, res.estimates, res.predictions)
        ],
    }
    files.append(_write_manifest(out, res.config, files, results, {"n_excluded": res.n_excluded}))
    return files


def emit_fig4(res: SweepResult, out_dir) -> list:
    cfg = res.config
    out = _prepare(out_dir)
    files = []

    sweep = out / "sweep.csv"
    with sweep.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["rho_gamma", "x", "normalized_diffusion", "sigma", "diffusion_ratio", "born_ratio", "fwhm_ratio", "damping_hat"])
        for s in res.series:
            for row in zip(s.x, s.y, s.sigma, s.y_theory, s.y_born, s.y_fwhm, s.damping_hat):
                w.writerow([repr(float(s.rho_gamma))] + [repr(float(v)) for v in row])
    files.append(sweep)

    rows = []
    x_dense = np.concatenate([[0.0], np.geomspace(1e-4, 1e3, 57)])
    for s in res.series:
        sub = out / f"rhogamma_{s.rho_gamma:g}"
        sub.mkdir(exist_ok=True)
        mode_q = s.grid.wavevectors[s.mode]
        for k in range(s.x.size):
            files.append(write_response_csv(sub / f"response_x{k:02d}.csv", s.omega, s.chi[k][:, None], [mode_q]))
        files.append(write_linewidths_csv(sub / "linewidths.csv", s.fwhm, x=s.x))

        damping = PhononDamping(s.gamma)
        omega_q = s.grid.frequencies[s.mode]
        rho = s.grid.density_of_states
        sd = sigma_D(s.grid, damping, s.strength, omega_q, method="approx")
        for xv, c in zip(x_dense, coupling_for_power(x_dense, cfg.q_center, s.gamma, cfg.kappa_over_gamma * s.gamma)):
            opto = _opto(cfg, s.gamma, float(c))
            sp = sigma_P(s.grid, opto, damping, s.strength, omega_q, s.mode, method="lorentzian", phase_match="lorentzian")
            kt = kappa_tilde(opto.kappa, rho, float(c), cfg.q_center, 1.0)
            rows.append((xv, s.rho_gamma, diffusion_ratio(xv, rho, s.gamma), sd.imag, sp.imag, kt))
    files.append(write_predictions_csv(out / "predictions.csv", rows))

    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    colors = ["tab:blue", "tab:red", "tab:orange", "tab:green", "tab:purple"]
    for s, color in zip(res.series, colors * 4):
        pos = s.x > 0
        bars = ax.errorbar(s.x[pos], s.y[pos], yerr=s.sigma[pos], fmt="o", color=color, label=rf"$\rho\gamma={s.rho_gamma:g}$")
        bars.lines[0].set_gid(f"series-rhogamma-{s.rho_gamma:g}")
        xs = np.geomspace(s.x[pos].min(), s.x.max(), 200)
        if s.fit is not None and not s.fit.degenerate:
            ax.plot(xs, saturating(xs, s.fit.a, s.fit.b), "-", color=color)
        ax.plot(xs, diffusion_ratio(xs, s.grid.density_of_states, s.gamma), "--", color=color, alpha=0.6)
    ax.set_xscale("log")
    ax.set_xlabel(r"normalized pump power $x = c_{cl}^2 q_c^2/(\gamma\kappa)$")
    ax.set_ylabel(r"$D/D_0$ (CCW center mode)")
    ax.legend()
    svg = out / "fig4.svg"
    _save_svg(fig, svg)
    plt.close(fig)
    files.append(svg)

    results = {"series": []}
    for s in res.series:
        entry = {
            "rho_gamma": s.rho_gamma,
            "gamma": s.gamma,
            "disorder_strength": s.strength,
            "n_modes": s.grid.size,
            "n_excluded": s.n_excluded,
            "plateau": _num(s.y[-1]),
            "plateau_theory": s.plateau_theory,
            "max_relative_sigma": _num(np.max(s.sigma / s.y)),
            "fit_error": s.fit_error,
        }
        if s.fit is not None:
            entry.update(
                a=_num(s.fit.a), b=_num(s.fit.b), b_over_pi=_num(s.fit.b / np.pi),
                covariance=[[_num(v) for v in r] for r in s.fit.covariance],
                fit_residual=s.fit.residual, degenerate=s.fit.degenerate,
            )
        results["series"].append(entry)
    extra = {
        "n_excluded": int(sum(s.n_excluded for s in res.series)),
        "block_size": cfg.n_realizations // cfg.n_blocks,
        "n_blocks": cfg.n_blocks,
    }
    files.append(_write_manifest(out, cfg, files, results, extra))
    return files


def emit_report(result, out_dir=None) -> list:
    out_dir = out_dir or result.config.output_dir
    if isinstance(result, Fig2Result):
        return emit_fig2(result, out_dir)
    if isinstance(result, SweepResult):
        return emit_fig4(result, out_dir)
    raise TypeError(f"cannot report {type(result).__name__}")
