"""``nwspec <task> --config <path> [--seed N] [--out DIR]``.

Exit codes: 0 success, 1 a check failed or the testers disagree, 2 bad configuration.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .acceptance import run_all
from .config import TASKS, ExperimentConfig, build_state, load_config, state_wigner
from .errors import ConfigError, NWSpecError
from .gaussian import GaussianSpec
from .husimi import find_husimi_zeros, husimi, write_zeros
from .phase_space import dump_csv, grid_integral
from .report import build_report, emit_lambda_curve, write_report
from .spectrum import Verdict, estimate_spectrum, klm_refute, verify_certificate

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _spectrum_input(obj, cfg):
    # closed-form Gaussians are scanned without grid sampling
    return obj if isinstance(obj, GaussianSpec) else state_wigner(obj, cfg.grid)


def run_dump(cfg: ExperimentConfig, obj, out: Path):
    eta = cfg.params.get("eta") or cfg.grid.hbar
    W = state_wigner(obj, cfg.grid, eta)
    dump_csv(W, out / "wigner.csv")
    total = float(np.real(grid_integral(W)))
    i, j = np.unravel_index(np.argmax(W.real), W.values.shape)
    results = {
        "eta": eta,
        "csv": "wigner.csv",
        "integral": total,
        "max": float(W.real[i, j]),
        "argmax": [float(cfg.grid.q[i]), float(cfg.grid.p[j])],
        "min": float(W.real.min()),
    }
    return results, {"normalized": abs(total - 1.0) <= 1e-8}


def run_spectrum(cfg: ExperimentConfig, obj, out: Path):
    p = cfg.params
    est = estimate_spectrum(
        _spectrum_input(obj, cfg), p["alpha_max"], p["delta_alpha"], grid=cfg.grid,
        trials=p["trials"], m_max=p["m_max"], seed=cfg.seed, tol_psd=p["tol_psd"],
        tol_cert=p["tol_cert"], bisection_depth=p["bisection_depth"],
    )
    emit_lambda_curve(est, out / "lambda_curve.csv")
    results = est.as_dict()
    results["lambda_curve_csv"] = "lambda_curve.csv"
    return results, {"testers_consistent": est.consistent}


def run_klm(cfg: ExperimentConfig, obj, out: Path):
    p = cfg.params
    F = _spectrum_input(obj, cfg)
    res = klm_refute(F, p["alpha"], p["trials"], p["m_max"], cfg.seed, p["tol_cert"])
    results = {"alpha": p["alpha"], **res.as_dict()}
    checks = {}
    if res.verdict == Verdict.EXCLUDED:
        lam = verify_certificate(F, res.certificate, p["alpha"])
        results["recomputed_lambda_min"] = lam
        checks["certificate_reproduces"] = bool(lam < -res.tol_cert)
    return results, checks


def run_husimi(cfg: ExperimentConfig, obj, out: Path):
    Q = husimi(state_wigner(obj, cfg.grid))
    zeros = find_husimi_zeros(Q, cfg.params["threshold"])
    dump_csv(Q, out / "husimi.csv")
    write_zeros(zeros, out / "husimi_zeros.json")
    qmin, qmax = float(Q.real.min()), float(Q.real.max())
    results = {
        "csv": "husimi.csv",
        "zeros_json": "husimi_zeros.json",
        "min": qmin,
        "max": qmax,
        "zeros": [z.as_dict() for z in zeros],
    }
    return results, {"nonnegative": qmin >= -1e-9 * qmax}


def run_verify(cfg: ExperimentConfig, obj, out: Path):
    checks = run_all(cfg.grid, cfg.seed)
    for c in checks:
        print(c.line())
    results = {"criteria": [c.as_dict() for c in checks]}
    return results, {f"criterion_{c.number}": bool(c.passed) for c in checks}


RUNNERS = {
    "dump": run_dump,
    "spectrum": run_spectrum,
    "klm": run_klm,
    "husimi": run_husimi,
    "verify": run_verify,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nwspec", description="Wigner spectra, Husimi zeros and acceptance checks on a phase-space grid.")
    ap.add_argument("task", choices=TASKS)
    ap.add_argument("--config", required=True, help="INI experiment file")
    ap.add_argument("--seed", type=int, default=None, help="overrides [run] seed")
    ap.add_argument("--out", default=None, help="output directory (default: [run] out, else '.')")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.task, args.seed)
        obj = build_state(cfg.state, cfg.grid) if cfg.state is not None else None
    except ConfigError as exc:
        print(f"nwspec: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NWSpecError, ValueError) as exc:
        print(f"nwspec: invalid state: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out if args.out is not None else cfg.out_dir)
    try:
        results, pass_fail = RUNNERS[cfg.task](cfg, obj, out)
    except NWSpecError as exc:
        print(f"nwspec: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    report = build_report(cfg.task, cfg.as_dict(), results, pass_fail, cfg.seed, __version__)
    path = write_report(report, out / f"{cfg.task}_report.json")
    ok = all(pass_fail.values())
    print(f"{cfg.task}: {'ok' if ok else 'FAILED'} -> {path}")
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
