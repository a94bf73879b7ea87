"""Experiment configuration files and state descriptors.

Configs are INI files (all lengths and actions in hbar-units)::

    [grid]
    points_N = 256
    half_width_L = 10
    hbar = 1

    [state]
    state = fock{1}

    [spectrum]
    alpha_max = 2.0
    delta_alpha = 0.05

    [run]
    seed = 0

State descriptors: ``coherent{re,im}``, ``fock{n}``, ``cat{re,im,sign}``,
``squeezed{s}``, ``gaussian{[[A]],[center]}`` and
``mixture{[desc,...],[w,...]}``.
"""

from __future__ import annotations

import ast
import configparser
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, NWSpecError
from .gaussian import GaussianSpec, squeezed_gaussian
from .phase_space import GridSpec, PhaseSpaceFunction
from .states import (
    DensityKernel,
    WaveFunction,
    cat_state,
    coherent_state,
    fock_state,
    mix,
    wigner_of_density,
    wigner_transform,
)

__all__ = ["TASKS", "ExperimentConfig", "load_config", "parse_config", "parse_state", "build_state",
           "state_wigner"]

TASKS = ("dump", "spectrum", "klm", "husimi", "verify")
STOCHASTIC = {"spectrum", "klm", "verify"}

# section -> key -> (type, default)
_PARAMS = {
    "spectrum": {
        "alpha_max": (float, 2.0),
        "delta_alpha": (float, 0.05),
        "trials": (int, 200),
        "m_max": (int, 12),
        "tol_psd": (float, 1e-7),
        "tol_cert": (float, 1e-6),
        "bisection_depth": (int, 4),
    },
    "klm": {
        "alpha": (float, 1.0),
        "trials": (int, 200),
        "m_max": (int, 12),
        "tol_cert": (float, 1e-6),
    },
    "dump": {"eta": (float, None)},
    "husimi": {"threshold": (float, 1e-6)},
}
_TOLERANCES = ("tol_psd", "tol_cert", "threshold", "delta_alpha")

_DESC = re.compile(r"^\s*([a-z]+)\s*\{(.*)\}\s*$", re.S)


def _split_top(body: str) -> list:
    """Split on commas that are not nested inside brackets or braces."""
    parts, depth, cur = [], 0, []
    for ch in body:
        if ch in "[{(":
            depth += 1
        elif ch in "]})":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise ConfigError(f"unbalanced brackets in {body!r}")
    tail = "".join(cur).strip()
    if tail or parts:
        parts.append(tail)
    return parts


def _literal(text: str):
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError) as exc:
        raise ConfigError(f"cannot parse {text!r}") from exc


def parse_state(desc: str) -> dict:
    """Parse a state descriptor into a plain dict (also used as the config echo)."""
    m = _DESC.match(desc)
    if not m:
        raise ConfigError(f"malformed state descriptor {desc!r}")
    kind, body = m.group(1), m.group(2)
    args = _split_top(body)
    try:
        if kind == "coherent":
            re_, im = (float(a) for a in args)
            return {"kind": kind, "z": [re_, im]}
        if kind == "fock":
            (n,) = args
            return {"kind": kind, "n": int(n)}
        if kind == "cat":
            re_, im, sign = args
            return {"kind": kind, "z": [float(re_), float(im)], "sign": int(sign)}
        if kind == "squeezed":
            (s,) = args
            return {"kind": kind, "s": float(s)}
        if kind == "gaussian":
            A, center = args
            return {"kind": kind, "A": _literal(A), "center": _literal(center)}
        if kind == "mixture":
            comps, weights = args
            comps = comps.strip()
            if not (comps.startswith("[") and comps.endswith("]")):
                raise ConfigError("mixture components must be a [list]")
            return {
                "kind": kind,
                "components": [parse_state(c) for c in _split_top(comps[1:-1])],
                "weights": [float(w) for w in _literal(weights)],
            }
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad arguments in state descriptor {desc!r}: {exc}") from exc
    raise ConfigError(f"unknown state kind {kind!r}")


def build_state(state: dict, grid: GridSpec):
    """Materialize a parsed descriptor as a WaveFunction, DensityKernel or GaussianSpec."""
    kind = state["kind"]
    if kind == "coherent":
        return coherent_state(complex(*state["z"]), grid)
    if kind == "fock":
        return fock_state(state["n"], grid)
    if kind == "cat":
        return cat_state(complex(*state["z"]), grid, state["sign"])
    if kind == "squeezed":
        return squeezed_gaussian(state["s"], grid.hbar)
    if kind == "gaussian":
        return GaussianSpec(np.array(state["A"], dtype=float), np.array(state["center"], dtype=float))
    if kind == "mixture":
        comps = [build_state(c, grid) for c in state["components"]]
        if not all(isinstance(c, WaveFunction) for c in comps):
            raise ConfigError("mixture components must be pure states")
        return mix(comps, state["weights"])
    raise ConfigError(f"unknown state kind {kind!r}")


def state_wigner(obj, grid: GridSpec, eta: float | None = None) -> PhaseSpaceFunction:
    """Phase-space function of a built state (for a GaussianSpec ``eta`` is irrelevant)."""
    if isinstance(obj, WaveFunction):
        return wigner_transform(obj, eta)
    if isinstance(obj, DensityKernel):
        return wigner_of_density(obj, eta)
    if isinstance(obj, GaussianSpec):
        return obj.on_grid(grid)
    raise TypeError(f"cannot build a phase-space function from {type(obj).__name__}")


@dataclass
class ExperimentConfig:
    grid: GridSpec
    state: dict | None
    task: str | None
    params: dict = field(default_factory=dict)
    seed: int | None = None
    out_dir: str = "."
    source: str = ""

    def as_dict(self) -> dict:
        return {
            "grid": self.grid.as_dict(),
            "state": self.state,
            "task": self.task,
            "params": dict(self.params),
            "seed": self.seed,
        }


def parse_config(text: str, task: str | None = None, seed: int | None = None,
                 source: str = "<string>") -> ExperimentConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    run = cp["run"] if cp.has_section("run") else {}
    task = task or run.get("task")
    if task not in TASKS:
        raise ConfigError(f"task must be one of {TASKS}, got {task!r}")
    try:
        if cp.has_section("grid"):
            g = cp["grid"]
            grid = GridSpec(
                dim_d=g.getint("dim_d", 1),
                half_width_L=g.getfloat("half_width_L", 10.0),
                points_N=g.getint("points_N", 256),
                hbar=g.getfloat("hbar", 1.0),
            )
        else:
            grid = GridSpec()
        if seed is None and "seed" in run:
            seed = int(run["seed"])
    except (ValueError, NWSpecError) as exc:
        raise ConfigError(f"invalid grid or run section: {exc}") from exc
    if grid.dim_d != 1:
        raise ConfigError("numerical tasks need dim_d = 1")
    state = None
    if cp.has_section("state") and "state" in cp["state"]:
        state = parse_state(cp["state"]["state"])
    elif task != "verify":
        raise ConfigError(f"task {task!r} needs a [state] section with a state descriptor")
    if task in STOCHASTIC and seed is None:
        raise ConfigError(f"task {task!r} is stochastic and needs a seed")
    params = {}
    spec = _PARAMS.get(task, {})
    sect = cp[task] if cp.has_section(task) else {}
    for key in sect:
        if key not in spec:
            raise ConfigError(f"unknown parameter {key!r} in [{task}]")
    for key, (typ, default) in spec.items():
        try:
            params[key] = typ(sect[key]) if key in sect else default
        except ValueError as exc:
            raise ConfigError(f"[{task}] {key}: {exc}") from exc
    for key in _TOLERANCES:
        if key in params and params[key] is not None and not params[key] > 0:
            raise ConfigError(f"{key} must be positive")
    if params.get("eta") is not None and not params["eta"] > 0:
        raise ConfigError("eta must be positive")
    out_dir = run.get("out", ".") if run else "."
    return ExperimentConfig(grid, state, task, params, seed, out_dir, source)


def load_config(path, task: str | None = None, seed: int | None = None) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, task, seed, str(path))
