"""Command-line front end.

Usage::

    diracembed converge --N-list 2,4,6,8
    diracembed ldos --V0 1 --N 20 --Emin 1 --Emax 7 --points 400 --emit-plot
    diracembed spectrum --config run.cfg --w-mode scf

Configuration comes from defaults, then an optional ``key = value`` file
(``--config``), then command-line flags.  Every data file is comma-separated
text headed by ``#`` lines that record the fully resolved configuration.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .basis import make_basis
from .core import (BranchPointError, ConditioningError, ContinuumError, ConvergenceError,
                   EmbeddingError, ModelParams, make_channel, C_LIGHT)
from .embedding import embedding_gamma
from .greens import ldos_scan
from .oracle import exact_bound_states
from .solver import bound_states_selfconsistent, solve_fixed_w

__all__ = ["RunConfig", "run", "main", "load_config_file"]

COMMANDS = ("spectrum", "converge", "ldos", "oracle", "gamma")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_CONVERGENCE = 4

log = logging.getLogger("diracembed")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    model: ModelParams = field(default_factory=ModelParams)
    kappa: int = -1
    N: int = 8
    N_list: tuple = (2, 4, 6, 8)
    w_mode: str = "fixed"
    Ew: float = -0.5
    states: int = 2
    Emin: float = 1.0
    Emax: float = 5.0
    points: int = 400
    eta: float = 1e-3
    tol: float = 1e-10
    max_iter: int = 50
    output: str = "diracembed"
    emit_plot: bool = False
    jobs: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        make_channel(self.kappa)
        if self.N < 1 or any(n < 1 for n in self.N_list):
            raise ConfigError("basis sizes must be >= 1")
        if self.w_mode not in ("fixed", "scf"):
            raise ConfigError(f"w-mode must be 'fixed' or 'scf', got {self.w_mode!r}")
        if self.points < 1:
            raise ConfigError("points must be >= 1")
        if self.points > 1 and not self.Emin < self.Emax:
            raise ConfigError("energy grid must be ascending (Emin < Emax)")
        if not self.eta > 0:
            raise ConfigError("eta must be positive")
        if self.states < 1:
            raise ConfigError("states must be >= 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

    def grid(self) -> np.ndarray:
        if self.points == 1:
            return np.array([self.Emin])
        return np.linspace(self.Emin, self.Emax, self.points)

    def describe(self) -> list[str]:
        lines = [f"command = {self.command}"]
        for k, v in dataclasses.asdict(self.model).items():
            lines.append(f"{k} = {v!r}")
        for f in dataclasses.fields(self):
            if f.name in ("command", "model"):
                continue
            v = getattr(self, f.name)
            if f.name == "N_list":
                v = ",".join(str(n) for n in v)
            lines.append(f"{f.name} = {v!r}" if isinstance(v, float) else f"{f.name} = {v}")
        return lines


# key in file / flag dest -> (RunConfig or model field, parser)
def _parse_bool(s):
    s = str(s).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {s!r}")


def _parse_int_list(s):
    if isinstance(s, (tuple, list)):
        return tuple(int(x) for x in s)
    return tuple(int(x) for x in str(s).replace(" ", "").split(",") if x)


_MODEL_KEYS = {"R": float, "V0": float, "Z": float, "c": float}
_RUN_KEYS = {
    "kappa": int, "N": int, "N_list": _parse_int_list, "w_mode": str, "Ew": float,
    "states": int, "Emin": float, "Emax": float, "points": int, "eta": float,
    "tol": float, "max_iter": int, "output": str, "emit_plot": _parse_bool, "jobs": int,
}
_ALIASES = {"out": "output", "n_list": "N_list", "n": "N", "r": "R", "v0": "V0", "z": "Z",
            "ew": "Ew", "emin": "Emin", "emax": "Emax", "w": "Ew"}


def _canonical(key: str) -> str:
    key = key.strip().replace("-", "_")
    if key in _MODEL_KEYS or key in _RUN_KEYS:
        return key
    if key.lower() in _ALIASES:
        return _ALIASES[key.lower()]
    raise ConfigError(f"unknown configuration key {key!r}")


def load_config_file(path) -> dict:
    """Read a ``key = value`` file ('#' starts a comment)."""
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = line.split("=", 1)
        values[_canonical(key)] = value.strip()
    return values


def _resolve(command: str, settings: dict) -> RunConfig:
    model_kw, run_kw = {}, {}
    for key, value in settings.items():
        try:
            if key in _MODEL_KEYS:
                model_kw[key] = _MODEL_KEYS[key](value)
            else:
                run_kw[key] = _RUN_KEYS[key](value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key}: {value!r}") from exc
    try:
        model = ModelParams(**model_kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return RunConfig(command=command, model=model, **run_kw)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="diracembed",
                                description="Relativistic embedding for a hydrogen atom in a spherical cavity.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--R", type=float, dest="R", help="cavity radius (bohr)")
    p.add_argument("--V0", type=float, dest="V0", help="exterior potential (hartree)")
    p.add_argument("--Z", type=float, dest="Z", help="nuclear charge")
    p.add_argument("--c", type=float, dest="c", help=f"speed of light (default {C_LIGHT})")
    p.add_argument("--kappa", type=int)
    p.add_argument("--N", type=int, dest="N", help="basis size")
    p.add_argument("--N-list", dest="N_list", help="comma-separated basis sizes for 'converge'")
    p.add_argument("--w-mode", dest="w_mode", choices=("fixed", "scf"))
    p.add_argument("--Ew", type=float, dest="Ew", help="embedding energy w - mc^2 (fixed mode) or scf start")
    p.add_argument("--states", type=int, help="number of electron states to report")
    p.add_argument("--Emin", type=float, dest="Emin")
    p.add_argument("--Emax", type=float, dest="Emax")
    p.add_argument("--points", type=int)
    p.add_argument("--eta", type=float, help="broadening (hartree)")
    p.add_argument("--tol", type=float, help="scf tolerance (hartree)")
    p.add_argument("--max-iter", type=int, dest="max_iter")
    p.add_argument("--out", dest="output", help="output file prefix")
    p.add_argument("--emit-plot", dest="emit_plot", action="store_const", const=True, default=None)
    p.add_argument("--jobs", type=int, help="threads for the LDOS grid")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(argv=None) -> tuple[RunConfig, bool]:
    args = build_parser().parse_args(argv)
    settings = load_config_file(args.config) if args.config else {}
    for key in list(_MODEL_KEYS) + list(_RUN_KEYS):
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return _resolve(args.command, settings), args.verbose


def _fmt(x) -> str:
    return f"{x:.12g}"


class _Writer:
    """Collects output files so a failed run can remove what it wrote."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.paths: list[Path] = []

    def path(self, suffix: str) -> Path:
        p = Path(f"{self.config.output}_{suffix}")
        self.paths.append(p)
        return p

    def data(self, suffix: str, columns, rows, extra_header=()) -> Path:
        p = self.path(suffix)
        if p.parent and not p.parent.exists():
            p.parent.mkdir(parents=True, exist_ok=True)
        lines = ["# diracembed output"]
        lines += [f"# {line}" for line in self.config.describe()]
        lines += [f"# {line}" for line in extra_header]
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(v if isinstance(v, str) else _fmt(v) for v in row))
        p.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return p

    def cleanup(self):
        for p in self.paths:
            try:
                p.unlink()
            except FileNotFoundError:
                pass


def _scf(cfg: RunConfig, basis, rank, w0):
    res = bound_states_selfconsistent(cfg.model, basis, rank, w0, cfg.tol, cfg.max_iter)
    if not res.converged:
        raise ConvergenceError(f"scf for state {rank} did not converge in {cfg.max_iter} iterations")
    return res


def _electron_states(cfg: RunConfig, basis, mode, Ew):
    """``(values, per-state w used, iterations)`` for the first ``cfg.states`` states."""
    n = min(cfg.states, basis.N)
    if mode == "fixed":
        vals = solve_fixed_w(cfg.model, basis, Ew).electron_values[:n]
        return list(vals), [Ew] * n, [0] * n
    start = solve_fixed_w(cfg.model, basis, Ew).electron_values
    vals, ws, its = [], [], []
    for rank in range(n):
        w0 = min(float(start[rank]), cfg.model.V0 - 1e-6)
        res = _scf(cfg, basis, rank, w0)
        vals.append(res.E)
        ws.append(res.history[-1][0])
        its.append(res.iterations)
    return vals, ws, its


def _cmd_spectrum(cfg: RunConfig, out: _Writer):
    basis = make_basis(cfg.kappa, cfg.N)
    vals, ws, its = _electron_states(cfg, basis, cfg.w_mode, cfg.Ew)
    rows = [(str(i), E, w, str(it)) for i, (E, w, it) in enumerate(zip(vals, ws, its))]
    out.data("spectrum.csv", ("state", "E", "w_minus_mc2", "iterations"), rows,
             extra_header=[f"w provenance: {cfg.w_mode}"])
    for i, E in enumerate(vals):
        print(f"state {i}: E = {_fmt(E)}  ({cfg.w_mode})")


def _cmd_converge(cfg: RunConfig, out: _Writer):
    policies = (("fixed", -0.5), ("fixed", 0.0), ("scf", -0.5))
    names = ("w=mc2-0.5", "w=mc2", "w=W")
    columns = ["N"]
    for name in names:
        columns += [f"E{i + 1}[{name}]" for i in range(cfg.states)]
    rows = []
    last = None
    for N in cfg.N_list:
        basis = make_basis(cfg.kappa, N)
        row = [str(N)]
        for mode, Ew in policies:
            vals = _electron_states(cfg, basis, mode, Ew)[0]
            vals += [math.nan] * (cfg.states - len(vals))
            row += vals
            if mode == "scf":
                last = vals
        rows.append(row)
        print(",".join(v if isinstance(v, str) else _fmt(v) for v in row))
    finite = [E for E in last if math.isfinite(E)]
    lo = min(finite) - 0.25
    hi = min(max(finite) + 0.25, cfg.model.V0 - 1e-9)
    exact = exact_bound_states(cfg.model, cfg.kappa, (lo, hi))[: cfg.states]
    exact += [math.nan] * (cfg.states - len(exact))
    rows.append(["exact"] + exact * len(policies))
    print(",".join(["exact"] + [_fmt(E) for E in exact]))
    out.data("converge.csv", columns, rows)


def _cmd_ldos(cfg: RunConfig, out: _Writer):
    basis = make_basis(cfg.kappa, cfg.N)
    curve = ldos_scan(cfg.model, basis, cfg.grid(), cfg.eta, workers=cfg.jobs)
    data = out.data("ldos.csv", ("E", "n"), zip(curve.energies, curve.values))
    print(f"wrote {data} ({len(curve.energies)} points)")
    if cfg.emit_plot:
        script = out.path("ldos.gp")
        script.write_text(
            "\n".join([
                "# gnuplot script; the data file is the contract, this is convenience",
                "set datafile separator ','",
                "set datafile commentschars '#'",
                "set xlabel 'E = W - mc^2 (hartree)'",
                "set ylabel 'n(E) (states/hartree)'",
                f"set title 'kappa={cfg.kappa}, R={cfg.model.R:g}, V0={cfg.model.V0:g}, N={cfg.N}, eta={cfg.eta:g}'",
                "set key off",
                f"plot '{data.name}' using 1:2 every ::1 with lines",
                "pause -1",
                "",
            ]),
            encoding="utf-8",
        )
        print(f"wrote {script}")


def _cmd_oracle(cfg: RunConfig, out: _Writer):
    hi = min(cfg.Emax, cfg.model.V0 - 1e-9)
    roots = exact_bound_states(cfg.model, cfg.kappa, (cfg.Emin, hi))
    out.data("oracle.csv", ("state", "E"), [(str(i), E) for i, E in enumerate(roots)])
    for i, E in enumerate(roots):
        print(f"state {i}: E = {_fmt(E)}")


def _cmd_gamma(cfg: RunConfig, out: _Writer):
    channel = make_channel(cfg.kappa)
    rows = []
    for E in cfg.grid():
        z = complex(E, cfg.eta) if E >= cfg.model.V0 else complex(E)
        ev = embedding_gamma(channel, cfg.model, z)
        rows.append((E, z.imag, ev.gamma.real, ev.gamma.imag, ev.gamma_dot.real, ev.gamma_dot.imag))
    out.data("gamma.csv", ("E_w", "Im_E_w", "Re_Gamma", "Im_Gamma", "Re_Gamma_dot", "Im_Gamma_dot"), rows,
             extra_header=["energies at or above V0 are evaluated at E + i*eta"])
    print(f"wrote {len(rows)} embedding-potential samples")


_DISPATCH = {
    "spectrum": _cmd_spectrum,
    "converge": _cmd_converge,
    "ldos": _cmd_ldos,
    "oracle": _cmd_oracle,
    "gamma": _cmd_gamma,
}


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, ConvergenceError):
        return EXIT_CONVERGENCE
    if isinstance(exc, (BranchPointError, ConditioningError, ContinuumError, EmbeddingError,
                        np.linalg.LinAlgError, ArithmeticError)):
        return EXIT_NUMERICAL
    return EXIT_CONFIG


def _report(exc: BaseException, code: int):
    message = " ".join(str(exc).split())
    print(f"error code={code} type={type(exc).__name__} message={message!r}", file=sys.stderr)


def run(config: RunConfig) -> int:
    """Execute one command; returns the process exit status."""
    out = _Writer(config)
    try:
        _DISPATCH[config.command](config, out)
    except (EmbeddingError, ValueError, ArithmeticError, np.linalg.LinAlgError, OSError) as exc:
        out.cleanup()
        code = _exit_code(exc)
        _report(exc, code)
        return code
    return EXIT_OK


def main(argv=None) -> int:
    try:
        config, verbose = config_from_args(argv)
    except ValueError as exc:
        _report(exc, EXIT_CONFIG)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return run(config)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
