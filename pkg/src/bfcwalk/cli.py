"""Command-line front end: ``bfc-walk <command> [options]``.

Options may also come from a JSON file given with ``--config``; flags on the
command line win. A ``manifest.json`` written by a previous run is itself a
valid config file and reproduces that run's CSV output byte for byte.

Exit status: 0 on success, 2 for an invalid configuration, 3 when a computed
distribution misses normalisation by more than 1e-6.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .analysis import (
    confinement_metrics,
    counts_to_csv,
    moments,
    poisson_sample,
    sweep_depth,
    sweep_dimension,
    transfer_distribution,
)
from .bessel import DEFAULT_EPSILON
from .state import NAMED_PROFILES, PROFILE_KINDS, SpectralPhaseProfile, make_maximal_state
from .walk import (
    ConfigurationError,
    JsiMatrix,
    ModulatorConfig,
    biphoton_jsi,
    incoherent_jsi,
    single_photon_distribution,
)

log = logging.getLogger("bfcwalk")

COMMANDS = ("single-walk", "jsi", "incoherent", "transfer", "sweep-depth", "sweep-dimension", "sample")
RESIDUAL_LIMIT = 1e-6

DEFAULTS: dict[str, Any] = {
    "d": 8,
    "delta": 0.0,
    "profile": {"kind": "constant", "theta0": 0.0, "slope_a": 0.0, "curv_b": 0.0, "custom_thetas": None},
    "epsilon": DEFAULT_EPSILON,
    "deltas": None,
    "dims": None,
    "counts": None,
    "seed": 0,
    "out_dir": "out",
    "emit_pgm": True,
}

# fields each command cannot run without (beyond the defaults above)
REQUIRED = {
    "sweep-depth": ("deltas",),
    "sweep-dimension": ("dims",),
    "sample": ("counts",),
}


class ConfigError(Exception):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class NormalizationError(Exception):
    pass


def parse_range(text: str, integer: bool = False) -> list:
    """``start:step:end`` (inclusive), ``a,b,c`` or a single number."""
    text = str(text).strip()
    cast = int if integer else float
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range {text!r} is not start:step:end")
        start, step, end = (float(p) for p in parts)
        if step <= 0:
            raise ValueError(f"range step must be positive in {text!r}")
        count = int(math.floor((end - start) / step + 1e-9)) + 1
        if count < 1:
            raise ValueError(f"range {text!r} is empty")
        values = [start + i * step for i in range(count)]
    else:
        values = [float(p) for p in text.split(",") if p.strip()]
    if integer:
        if any(v != int(v) for v in values):
            raise ValueError(f"{text!r} must contain integers")
        return [int(v) for v in values]
    return [cast(v) for v in values]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bfc-walk",
        description="Frequency-domain quantum walks of entangled photon pairs under phase modulation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", type=Path, help="JSON run config or a previous manifest.json")
    common.add_argument("--d", type=int, help="entanglement dimensionality")
    common.add_argument("--delta", type=float, help="modulation depth")
    common.add_argument(
        "--profile",
        help=f"spectral phase: one of {', '.join(NAMED_PROFILES)} or a kind ({', '.join(PROFILE_KINDS)})",
    )
    common.add_argument("--theta0", type=float, help="constant phase offset [rad]")
    common.add_argument("--slope", dest="slope_a", type=float, help="linear phase slope [rad/mode]")
    common.add_argument("--curvature", dest="curv_b", type=float, help="quadratic phase [rad/mode^2]")
    common.add_argument("--thetas", help="comma-separated per-mode phases for --profile custom")
    common.add_argument("--epsilon", type=float, help="Bessel truncation tolerance")
    common.add_argument("--deltas", help="depth sweep, start:step:end or a,b,c")
    common.add_argument("--dims", help="dimension sweep, start:step:end or a,b,c")
    common.add_argument("--counts", type=float, help="total expected counts for sampling")
    common.add_argument("--seed", type=int, help="sampling seed")
    common.add_argument("--out-dir", dest="out_dir", help="output directory")
    common.add_argument("--pgm", dest="emit_pgm", action="store_true", help="write PGM heatmaps")
    common.add_argument("--no-pgm", dest="emit_pgm", action="store_false")
    common.add_argument("-v", "--verbose", action="store_true", default=False)

    helps = {
        "single-walk": "single-photon output distribution",
        "jsi": "two-photon joint spectral intensity",
        "incoherent": "JSI of the incoherent mixture of pairs",
        "transfer": "net energy-transfer distribution and confinement metrics",
        "sweep-depth": "energy-transfer spread against modulation depth",
        "sweep-dimension": "energy-transfer spread against entanglement dimension",
        "sample": "Poisson-sampled coincidence counts",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    sub.add_parser("run", parents=[common], help="run the command named in --config (e.g. a manifest)")
    return parser


def _load_file(path: Path) -> dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"{path} is not valid JSON ({exc.msg})") from None
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be a JSON object")
    if "config" in data and isinstance(data["config"], dict):
        data = data["config"]
    return data


def _profile_from(raw: Any) -> dict[str, Any]:
    if isinstance(raw, str):
        if raw in NAMED_PROFILES:
            return NAMED_PROFILES[raw]().to_dict()
        if raw in PROFILE_KINDS:
            return dict(DEFAULTS["profile"], kind=raw)
        raise ConfigError("profile", f"unknown profile {raw!r}")
    if isinstance(raw, dict):
        return dict(DEFAULTS["profile"], **raw)
    raise ConfigError("profile", "must be a name or an object")


def resolve_config(args: argparse.Namespace) -> dict[str, Any]:
    """Merge defaults, the config file and explicit flags into one plain dict."""
    flags = vars(args).copy()
    command = flags.pop("command")
    flags.pop("verbose", None)
    file_cfg = _load_file(flags.pop("config")) if "config" in flags else {}

    if command == "run":
        command = file_cfg.get("command")
        if command not in COMMANDS:
            raise ConfigError("command", f"'run' needs a config file naming one of {', '.join(COMMANDS)}")
    elif "command" in file_cfg and file_cfg["command"] != command:
        log.info("config file was written for %r, running %r", file_cfg["command"], command)

    cfg = {k: v for k, v in DEFAULTS.items()}
    unknown = set(file_cfg) - set(DEFAULTS) - {"command"}
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown config field")
    cfg.update({k: v for k, v in file_cfg.items() if k != "command"})
    cfg["profile"] = _profile_from(cfg["profile"])

    if "profile" in flags:
        cfg["profile"] = _profile_from(flags.pop("profile"))
    for key in ("theta0", "slope_a", "curv_b"):
        if key in flags:
            cfg["profile"][key] = flags.pop(key)
    if "thetas" in flags:
        try:
            cfg["profile"]["custom_thetas"] = parse_range(flags.pop("thetas"))
        except ValueError as exc:
            raise ConfigError("thetas", str(exc)) from None
        cfg["profile"]["kind"] = "custom"
    for key, integer in (("deltas", False), ("dims", True)):
        if key in flags:
            try:
                cfg[key] = parse_range(flags.pop(key), integer=integer)
            except ValueError as exc:
                raise ConfigError(key, str(exc)) from None
    cfg.update(flags)
    cfg["command"] = command
    _validate(cfg)
    return cfg


def _validate(cfg: dict[str, Any]) -> None:
    for key in REQUIRED.get(cfg["command"], ()):
        if cfg.get(key) is None:
            raise ConfigError(key, f"required for {cfg['command']}")
    if not isinstance(cfg["d"], int) or cfg["d"] < 1:
        raise ConfigError("d", f"must be an integer >= 1, got {cfg['d']!r}")
    try:
        cfg["delta"] = float(cfg["delta"])
        ModulatorConfig(cfg["delta"], cfg["epsilon"])
    except (TypeError, ValueError) as exc:
        field = "epsilon" if "epsilon" in str(exc) else "delta"
        raise ConfigError(field, str(exc)) from None
    try:
        profile = SpectralPhaseProfile.from_dict(cfg["profile"])
    except (TypeError, ValueError) as exc:
        raise ConfigError("profile", str(exc)) from None
    cfg["profile"] = profile.to_dict()
    if profile.kind == "custom" and cfg["command"] not in ("single-walk", "incoherent", "sweep-dimension"):
        if len(profile.custom_thetas) != cfg["d"]:
            raise ConfigError("profile", f"custom_thetas has {len(profile.custom_thetas)} entries, d is {cfg['d']}")
    if cfg["deltas"] is not None:
        cfg["deltas"] = [float(x) for x in cfg["deltas"]]
        if not cfg["deltas"] or any(not math.isfinite(x) or x < 0 for x in cfg["deltas"]):
            raise ConfigError("deltas", "must be a non-empty list of depths >= 0")
    if cfg["dims"] is not None:
        if not cfg["dims"] or any(not isinstance(x, int) or x < 1 for x in cfg["dims"]):
            raise ConfigError("dims", "must be a non-empty list of integers >= 1")
    if cfg["counts"] is not None:
        cfg["counts"] = float(cfg["counts"])
        if not (math.isfinite(cfg["counts"]) and cfg["counts"] > 0):
            raise ConfigError("counts", "must be > 0")
    if not isinstance(cfg["seed"], int) or cfg["seed"] < 0:
        raise ConfigError("seed", "must be a non-negative integer")
    if not isinstance(cfg["emit_pgm"], bool):
        raise ConfigError("emit_pgm", "must be true or false")
    cfg["out_dir"] = str(cfg["out_dir"])


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


class _Run:
    def __init__(self, cfg: dict[str, Any]):
        self.cfg = cfg
        self.out = Path(cfg["out_dir"])
        self.files: list[str] = []
        self.diagnostics: dict[str, Any] = {}
        self.profile = SpectralPhaseProfile.from_dict(cfg["profile"])
        self.modulator = ModulatorConfig(cfg["delta"], cfg["epsilon"])

    def text(self, name: str, content: str) -> None:
        _write_text(self.out / name, content)
        self.files.append(name)

    def pgm(self, name: str, jsi: JsiMatrix) -> None:
        if self.cfg["emit_pgm"]:
            (self.out / name).write_bytes(jsi.to_pgm())
            self.files.append(name)

    def residual(self, value: float) -> None:
        worst = max(self.diagnostics.get("normalization_residual", 0.0), float(value))
        self.diagnostics["normalization_residual"] = worst

    def coherent_jsi(self) -> JsiMatrix:
        state = make_maximal_state(self.cfg["d"], self.profile)
        return biphoton_jsi(state, self.modulator)

    # one method per command

    def single_walk(self) -> None:
        walk = single_photon_distribution(self.modulator)
        self.text("single_walk.csv", walk.to_csv())
        self.residual(abs(math.fsum(walk.probs) - 1.0))
        self.diagnostics["window"] = walk.n_max

    def jsi(self) -> None:
        jsi = self.coherent_jsi()
        self._emit_jsi(jsi)

    def incoherent(self) -> None:
        self._emit_jsi(incoherent_jsi(self.cfg["d"], self.modulator))

    def _emit_jsi(self, jsi: JsiMatrix) -> None:
        self.text("jsi.csv", jsi.to_csv())
        self.pgm("jsi.pgm", jsi)
        self.residual(jsi.normalization_residual())
        self.diagnostics["window"] = jsi.meta["window"]
        self.diagnostics["max_cell"] = float(jsi.values.max())

    def transfer(self) -> None:
        jsi = self.coherent_jsi()
        dist = transfer_distribution(jsi)
        self.text("transfer.csv", dist.to_csv())
        mean, sigma = moments(dist)
        metrics = confinement_metrics(jsi)
        self.residual(jsi.normalization_residual())
        self.diagnostics.update(
            mean_u=mean,
            sigma_u=sigma,
            antidiag_mass=metrics.antidiag_mass,
            sigma_v=metrics.sigma_v,
        )

    def sweep_depth(self) -> None:
        table = sweep_depth(self.profile, self.cfg["d"], self.cfg["deltas"], epsilon=self.cfg["epsilon"])
        self.text("sweep.csv", table.to_csv())
        self.residual(float(np.max(table.residual)))

    def sweep_dimension(self) -> None:
        table = sweep_dimension(self.profile, self.cfg["delta"], self.cfg["dims"], epsilon=self.cfg["epsilon"])
        self.text("sweep.csv", table.to_csv())
        self.residual(float(np.max(table.residual)))

    def sample(self) -> None:
        jsi = self.coherent_jsi()
        counts = poisson_sample(jsi, self.cfg["counts"], self.cfg["seed"])
        self.text("counts.csv", counts_to_csv(jsi, counts))
        self.pgm("counts.pgm", JsiMatrix(jsi.j_min, jsi.j_max, jsi.k_min, jsi.k_max, counts.astype(float)))
        self.residual(jsi.normalization_residual())
        self.diagnostics["total_sampled"] = int(counts.sum())

    def execute(self) -> dict[str, Any]:
        self.out.mkdir(parents=True, exist_ok=True)
        getattr(self, self.cfg["command"].replace("-", "_"))()
        manifest = {
            "tool": "bfcwalk",
            "version": __version__,
            "config": self.cfg,
            "outputs": self.files,
            "diagnostics": self.diagnostics,
        }
        _write_text(self.out / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        if self.diagnostics.get("normalization_residual", 0.0) > RESIDUAL_LIMIT:
            raise NormalizationError(
                f"normalization residual {self.diagnostics['normalization_residual']:.3e} exceeds {RESIDUAL_LIMIT:g}"
            )
        return manifest


def run(cfg: dict[str, Any]) -> dict[str, Any]:
    """Execute a resolved config and return the manifest written to disk."""
    return _Run(cfg).execute()


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"bfc-walk: invalid config field {exc}", file=sys.stderr)
        return 2
    try:
        run(cfg)
    except OSError as exc:
        print(f"bfc-walk: invalid config field out_dir: {exc}", file=sys.stderr)
        return 2
    except ConfigurationError as exc:
        print(f"bfc-walk: invalid config field delta: {exc}", file=sys.stderr)
        return 2
    except NormalizationError as exc:
        print(f"bfc-walk: {exc}", file=sys.stderr)
        return 3
    log.info("wrote %s", cfg["out_dir"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
