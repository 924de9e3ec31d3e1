"""``dagger-lab`` batch command line.

Exit codes: 0 success, 1 numerical or axiom failure, 2 invalid configuration,
3 I/O error. Outputs are written only after all computation succeeded.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .algebra_axioms import Ensemble, RandomOperatorSpec, axiom_sweep
from .derivations import DEFAULT_PROBES, Derivation, extract_generator
from .dynamics import Wavepacket, continuum_limit_study, evolution_trace
from .errors import (
    DimensionMismatchError,
    NotADerivationError,
    NotHermitianError,
    ResidualExceedsToleranceError,
    UnderResolvedError,
)
from .lattice import (
    Boundary,
    Centering,
    LatticeSpec,
    PlanckUnits,
    hamiltonian_operator,
    momentum_operator,
    position_operator,
    time_operator,
)
from .linalg_core import cstar_norm, hermitian_eig, hermiticity_defect
from .reports import ToleranceConfig
from .serialization import FormatError, csv_text, dumps, read_json, read_operator

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


class NumericalFailure(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict[str, Any]
    seed: int = 0
    tol: ToleranceConfig = field(default_factory=ToleranceConfig)
    out: str | None = None
    fmt: str | None = None

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> "RunConfig":
        params = dict(vars(ns))
        for key in ("command", "handler", "config", "seed", "tol", "abs_tol", "out", "format"):
            params.pop(key, None)
        try:
            tol = ToleranceConfig(ns.tol, ns.abs_tol)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return cls(ns.command, params, ns.seed, tol, ns.out, ns.format)

    def output_format(self, default: str, allowed: tuple[str, ...]) -> str:
        fmt = self.fmt or default
        if fmt not in allowed:
            raise ConfigError(f"{self.command} supports --format {'|'.join(allowed)}, not {fmt}")
        return fmt


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        Path(cfg.out).write_text(text)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _load_operator(path: str) -> np.ndarray:
    try:
        return read_operator(path)
    except FormatError as exc:
        raise ConfigError(str(exc)) from exc


# commands -----------------------------------------------------------------

def cmd_check_axioms(cfg: RunConfig) -> int:
    p = cfg.params
    _require(p["trials"] >= 1, "--trials must be >= 1")
    _require(p["dim"] >= 1, "--dim must be >= 1")
    _require(p["scale"] > 0, "--scale must be > 0")
    fmt = cfg.output_format("json", ("json", "csv"))
    spec = RandomOperatorSpec(p["dim"], Ensemble(p["ensemble"]), p["scale"])

    reports = axiom_sweep(spec, p["trials"], cfg.seed, cfg.tol)

    if fmt == "json":
        text = dumps([r.to_json() for r in reports])
    else:
        text = csv_text(
            ("axiom_id", "passed", "max_residual", "trials", "seed"),
            ((r.axiom_id.value, r.passed, r.max_residual, r.trials, r.seed) for r in reports),
        )
    _emit(cfg, text)
    stream = sys.stderr if cfg.out is None else sys.stdout
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.axiom_id.value:<14} {status} max_residual={r.max_residual:.3e} trials={r.trials} seed={r.seed}",
              file=stream)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def _lattice_from(p: dict[str, Any]) -> tuple[LatticeSpec, PlanckUnits]:
    try:
        spec = LatticeSpec(p["sites"], p["spacing"], p["centering"], p["boundary"])
        units = PlanckUnits(p["ell_pl"], p["tau_pl"], p["hbar"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return spec, units


def cmd_spectrum(cfg: RunConfig) -> int:
    p = cfg.params
    kind = p["kind"]
    fmt = cfg.output_format("json", ("json", "csv"))
    if kind == "file":
        _require(p["input"] is not None, "--input is required for kind=file")
        A = _load_operator(p["input"])
    else:
        spec, units = _lattice_from(p)
        if kind in ("momentum", "hamiltonian"):
            _require(spec.sites >= 2, "momentum needs --sites >= 2")
        builders: dict[str, Callable] = {
            "position": position_operator,
            "time": time_operator,
            "momentum": momentum_operator,
            "hamiltonian": hamiltonian_operator,
        }
        A = builders[kind](spec, units)

    eig = hermitian_eig(A, p["herm_tol"])
    V, w = eig.eigenvectors, eig.eigenvalues
    residuals = np.linalg.norm(A @ V - V * w, axis=0)
    summary = {
        "kind": kind,
        "dim": int(A.shape[0]),
        "eigenvalues": w.tolist(),
        "max_eigen_residual": float(residuals.max()),
        "reconstruction_residual": eig.reconstruction_residual(A),
        "hermiticity_defect": hermiticity_defect(A),
        "operator_norm": cstar_norm(A),
    }
    if fmt == "json":
        text = dumps(summary)
    else:
        text = csv_text(("index", "eigenvalue", "residual"),
                        ((k, float(w[k]), float(residuals[k])) for k in range(len(w))))
    _emit(cfg, text)
    bound = 1e-10 * max(1.0, summary["operator_norm"])
    return EXIT_OK if summary["max_eigen_residual"] <= bound else EXIT_FAIL


def cmd_extract_generator(cfg: RunConfig) -> int:
    p = cfg.params
    cfg.output_format("json", ("json",))
    _require(p["probes"] >= 0, "--probes must be >= 0")
    try:
        delta = Derivation.from_json(read_json(p["input"]))
    except FormatError as exc:
        raise ConfigError(str(exc)) from exc
    try:
        result = extract_generator(delta, cfg.tol, probes=p["probes"], seed=cfg.seed)
        status = EXIT_OK
    except NotADerivationError as exc:
        raise NumericalFailure(f"not a derivation: {exc}") from exc
    except ResidualExceedsToleranceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        result, status = exc.extraction, EXIT_FAIL
    _emit(cfg, dumps(result.to_json()))
    return status


def cmd_evolve(cfg: RunConfig) -> int:
    p = cfg.params
    _require(p["steps"] >= 1, "--steps must be >= 1")
    _require(math.isfinite(p["s_max"]) and p["s_max"] > 0, "--s-max must be positive")
    _require(p["hbar"] > 0, "--hbar must be positive")
    fmt = cfg.output_format("csv", ("csv", "json"))
    T = _load_operator(p["generator"])
    F = _load_operator(p["observable"])
    _require(T.shape == F.shape, f"generator dim {T.shape[0]} != observable dim {F.shape[0]}")

    s_values = np.linspace(0.0, p["s_max"], p["steps"] + 1)
    trace = evolution_trace(F, T, s_values, p["hbar"], p["herm_tol"])

    if fmt == "csv":
        text = trace.to_csv()
    else:
        text = dumps({"samples": [{"s": x.s, "deviation": x.deviation} for x in trace.samples]})
    _emit(cfg, text)
    if p["dump_dir"] is not None:
        trace.dump_operators(p["dump_dir"])
    return EXIT_OK


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def cmd_continuum_limit(cfg: RunConfig) -> int:
    p = cfg.params
    fmt = cfg.output_format("csv", ("csv", "json"))
    sites = p["sites"]
    _require(len(sites) >= 1, "--sites is empty")
    _require(all(b > a for a, b in zip(sites, sites[1:])), "--sites must be strictly increasing")
    _require(all(d >= 16 for d in sites), "every --sites entry must be >= 16")
    _require(p["hbar"] > 0, "--hbar must be positive")
    try:
        packet = Wavepacket(p["center"], p["width"], p["wavenumber"])
        table = continuum_limit_study(sites, packet, p["shift"], p["hbar"], p["interval"])
    except (UnderResolvedError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if fmt == "csv":
        text = table.to_csv()
    else:
        text = dumps({"interval": list(table.interval),
                      "rows": [{"sites": r.sites, "error": r.error, "order": r.order} for r in table.rows]})
    _emit(cfg, text)
    return EXIT_OK


# parser -------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=ToleranceConfig.rel_tol, help="relative tolerance")
    common.add_argument("--abs-tol", type=float, default=ToleranceConfig.abs_tol)
    common.add_argument("--out", default=None, help="output file (default: standard output)")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--config", default=None, help="JSON file of option defaults")
    return common


def _lattice_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--sites", type=int, default=5)
    sub.add_argument("--spacing", type=float, default=1.0)
    sub.add_argument("--centering", choices=[c.value for c in Centering], default="from_zero")
    sub.add_argument("--boundary", choices=[b.value for b in Boundary], default="periodic")
    sub.add_argument("--ell-pl", type=float, default=1.0)
    sub.add_argument("--tau-pl", type=float, default=1.0)
    sub.add_argument("--hbar", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dagger-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)
    common = _common()

    sub = subs.add_parser("check-axioms", parents=[common], help="randomized axiom sweep")
    sub.add_argument("--dim", type=int, default=8)
    sub.add_argument("--ensemble", choices=[e.value for e in Ensemble], default="general_gaussian")
    sub.add_argument("--scale", type=float, default=1.0)
    sub.add_argument("--trials", type=int, default=100)
    sub.set_defaults(handler=cmd_check_axioms)

    sub = subs.add_parser("spectrum", parents=[common], help="eigenvalues of a lattice or file operator")
    sub.add_argument("--kind", choices=("position", "time", "momentum", "hamiltonian", "file"), default="position")
    sub.add_argument("--input", default=None, help="operator JSON (kind=file)")
    sub.add_argument("--herm-tol", type=float, default=None)
    _lattice_flags(sub)
    sub.set_defaults(handler=cmd_spectrum)

    sub = subs.add_parser("extract-generator", parents=[common], help="recover T from a derivation JSON")
    sub.add_argument("--input", required=True)
    sub.add_argument("--probes", type=int, default=DEFAULT_PROBES)
    sub.set_defaults(handler=cmd_extract_generator)

    sub = subs.add_parser("evolve", parents=[common], help="Heisenberg trace of F under T")
    sub.add_argument("--generator", "--T", dest="generator", required=True, help="operator JSON for T")
    sub.add_argument("--observable", "--F", dest="observable", required=True, help="operator JSON for F")
    sub.add_argument("--s-max", type=float, required=True)
    sub.add_argument("--steps", type=int, default=10)
    sub.add_argument("--hbar", type=float, default=1.0)
    sub.add_argument("--herm-tol", type=float, default=None)
    sub.add_argument("--dump-dir", default=None, help="write sample_<index>.json operators here")
    sub.set_defaults(handler=cmd_evolve)

    sub = subs.add_parser("continuum-limit", parents=[common], help="momentum translation convergence study")
    sub.add_argument("--sites", type=_parse_int_list, default=[32, 64, 128, 256])
    sub.add_argument("--center", type=float, default=0.0)
    sub.add_argument("--width", type=float, default=1.0)
    sub.add_argument("--wavenumber", type=float, default=1.0)
    sub.add_argument("--shift", type=float, default=0.5)
    sub.add_argument("--hbar", type=float, default=1.0)
    sub.add_argument("--interval", type=float, default=None, help="interval length (default: auto)")
    sub.set_defaults(handler=cmd_continuum_limit)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str], ns: argparse.Namespace) -> argparse.Namespace:
    data = read_json(ns.config)
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    sub = parser._subparsers._group_actions[0].choices[ns.command]  # noqa: SLF001
    allowed = {a.dest for a in sub._actions} - {"help", "config"}  # noqa: SLF001
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"unknown config fields: {unknown}")
    sub.set_defaults(**data)
    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if ns.config is not None:
            ns = _apply_config(parser, argv, ns)
        cfg = RunConfig.from_namespace(ns)
        return ns.handler(cfg)
    except (ConfigError, FormatError, DimensionMismatchError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NotHermitianError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except NumericalFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
