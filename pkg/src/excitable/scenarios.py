"""Scenario layer: config parsing with a strict schema, model dispatch,
CSV/manifest output, figure bundles, and threshold bisection.

CSV is the artifact of record: long format, floats printed with 17
significant digits so reruns are byte-identical.  Plot images are a
convenience on top of the CSVs.
"""

from __future__ import annotations

import dataclasses
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
import yaml

from . import __version__
from .amari import simulate_amari
from .core import (
    AmariParams,
    HHParams,
    MemSynapticParams,
    MemTemporalParams,
    SpatialGrid,
    SynapseParams,
    TimeGrid,
    Trajectory,
    ValidationError,
    make_grid,
    make_time_grid,
)
from .hh import simulate_hh
from .memristive import simulate_ei_field, simulate_spatiotemporal, simulate_temporal
from .stimulus import GaussianPulse, RectangularPulse, StimulusProgram

__all__ = [
    "ConfigError",
    "BracketError",
    "ScenarioConfig",
    "parse_config",
    "load_config",
    "run_scenario",
    "reproduce_figure",
    "bisect_threshold",
    "BisectResult",
    "emit_plot",
    "FIGURES",
    "CALIBRATED_AMPLITUDES",
    "MODELS",
]

MODELS = ("hh", "amari", "mem-temporal", "mem-spatial", "mem-spatiotemporal")
FIELD_MODELS = ("amari", "mem-spatial", "mem-spatiotemporal")

# Stimulus thresholds located by bisection at the default grid (L=25,
# N=1001) and dt=0.01, for the Gaussian pulse families of the figure
# scenarios.  Figure runs re-bisect around these values and record the
# result in the manifest.
CALIBRATED_AMPLITUDES = {
    "amari": 0.2705078125,
    "mem-spatial": 0.37158203125,
}


class ConfigError(ValueError):
    """Config file failed to parse against the schema (CLI exit 2)."""


class BracketError(RuntimeError):
    """Bisection bracket endpoints classify identically (CLI exit 5)."""


def _take(mapping: dict, allowed: set[str], context: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(
            f"unknown key(s) in {context}: {', '.join(sorted(unknown))}; "
            f"allowed: {', '.join(sorted(allowed))}"
        )


def _dataclass_from(mapping: dict, cls, context: str):
    names = {f.name for f in dataclasses.fields(cls)}
    _take(mapping, names, context)
    try:
        return cls(**mapping)
    except TypeError as e:
        raise ConfigError(f"bad {context}: {e}") from None


def _parse_params(model: str, raw: dict):
    if model == "hh":
        return _dataclass_from(raw, HHParams, "params (hh)")
    if model == "amari":
        return _dataclass_from(raw, AmariParams, "params (amari)")
    if model == "mem-temporal":
        return _dataclass_from(raw, MemTemporalParams, "params (mem-temporal)")
    if model == "mem-spatial":
        return _parse_synaptic(raw)
    if model == "mem-spatiotemporal":
        _take(raw, {"temporal", "synaptic"}, "params (mem-spatiotemporal)")
        temporal = _dataclass_from(
            raw.get("temporal", {}), MemTemporalParams, "params.temporal"
        )
        synaptic = _parse_synaptic(raw.get("synaptic", {}))
        return (temporal, synaptic)
    raise ConfigError(f"unknown model {model!r}, expected one of {MODELS}")


def _parse_synaptic(raw: dict) -> MemSynapticParams:
    _take(raw, {"capacitance", "g_leak", "exc", "inh"}, "params (mem-spatial)")
    kwargs = {k: raw[k] for k in ("capacitance", "g_leak") if k in raw}
    if "exc" in raw:
        kwargs["exc"] = _dataclass_from(raw["exc"], SynapseParams, "params.exc")
    if "inh" in raw:
        kwargs["inh"] = _dataclass_from(raw["inh"], SynapseParams, "params.inh")
    return MemSynapticParams(**kwargs)


def _parse_pulse(raw: dict, i: int):
    kind = raw.get("kind")
    if kind == "gaussian":
        _take(
            raw,
            {"kind", "amplitude", "sigma_x", "sigma_t", "t_center"},
            f"stimulus.pulses[{i}]",
        )
        return GaussianPulse(
            amplitude=float(raw["amplitude"]),
            sigma_x=float(raw["sigma_x"]),
            sigma_t=float(raw["sigma_t"]),
            t_center=float(raw["t_center"]),
        )
    if kind == "rect":
        _take(raw, {"kind", "amplitude", "t_on", "t_off"}, f"stimulus.pulses[{i}]")
        return RectangularPulse(
            amplitude=float(raw["amplitude"]),
            t_on=float(raw["t_on"]),
            t_off=float(raw["t_off"]),
        )
    raise ConfigError(
        f"stimulus.pulses[{i}]: kind must be 'gaussian' or 'rect', got {kind!r}"
    )


@dataclass
class ScenarioConfig:
    model: str
    time: TimeGrid
    params: object
    stimulus: StimulusProgram
    grid: SpatialGrid | None = None
    readout_times: tuple[float, ...] = ()
    stride: int = 100
    output_dir: str | None = None
    convergence_check: bool = False

    def resolved(self) -> dict:
        """Full echo of the configuration, defaults included; re-parses to
        an identical config."""
        out: dict = {
            "model": self.model,
            "time": {
                "t_start": self.time.t_start,
                "t_end": self.time.t_end,
                "dt": self.time.dt,
            },
            "params": _params_dict(self.model, self.params),
            "stimulus": {
                "target": self.stimulus.target,
                "pulses": [_pulse_dict(p) for p in self.stimulus.pulses],
            },
            "readout_times": list(self.readout_times),
            "stride": self.stride,
            "output_dir": self.output_dir,
            "convergence_check": self.convergence_check,
        }
        if self.grid is not None:
            out["grid"] = {
                "half_length": self.grid.half_length,
                "n_points": self.grid.n_points,
            }
        return out


def _params_dict(model: str, params) -> dict:
    if model == "mem-spatiotemporal":
        temporal, synaptic = params
        return {
            "temporal": dataclasses.asdict(temporal),
            "synaptic": dataclasses.asdict(synaptic),
        }
    return dataclasses.asdict(params)


def _pulse_dict(p) -> dict:
    if isinstance(p, GaussianPulse):
        return {
            "kind": "gaussian",
            "amplitude": p.amplitude,
            "sigma_x": p.sigma_x,
            "sigma_t": p.sigma_t,
            "t_center": p.t_center,
        }
    return {"kind": "rect", "amplitude": p.amplitude, "t_on": p.t_on, "t_off": p.t_off}


TOP_KEYS = {
    "model",
    "grid",
    "time",
    "params",
    "stimulus",
    "readout_times",
    "stride",
    "output_dir",
    "convergence_check",
}


def parse_config(data: dict) -> ScenarioConfig:
    """Strict-schema parse of a scenario mapping; unknown keys are errors."""
    if not isinstance(data, dict):
        raise ConfigError(f"scenario config must be a mapping, got {type(data).__name__}")
    _take(data, TOP_KEYS, "scenario config")
    model = data.get("model")
    if model not in MODELS:
        raise ConfigError(f"model must be one of {MODELS}, got {model!r}")
    if "time" not in data:
        raise ConfigError("missing required section 'time'")
    time_raw = dict(data["time"])
    _take(time_raw, {"t_start", "t_end", "dt"}, "time")
    try:
        tgrid = make_time_grid(
            float(time_raw.get("t_start", 0.0)),
            float(time_raw["t_end"]),
            float(time_raw.get("dt", 0.01)),
        )
    except KeyError:
        raise ConfigError("time.t_end is required") from None

    grid = None
    if model in FIELD_MODELS:
        grid_raw = dict(data.get("grid", {}))
        _take(grid_raw, {"half_length", "n_points"}, "grid")
        grid = make_grid(
            float(grid_raw.get("half_length", 25.0)),
            int(grid_raw.get("n_points", 1001)),
        )
    elif "grid" in data:
        raise ConfigError(f"model {model!r} is a point model and takes no grid")

    params = _parse_params(model, dict(data.get("params", {})))
    violations = _param_violations(model, params)
    if violations:
        raise ValidationError(violations)

    stim_raw = dict(data.get("stimulus", {}))
    _take(stim_raw, {"target", "pulses"}, "stimulus")
    default_target = "point" if model in ("hh", "mem-temporal") else "E"
    pulses = tuple(
        _parse_pulse(dict(p), i) for i, p in enumerate(stim_raw.get("pulses", []))
    )
    stimulus = StimulusProgram(pulses=pulses, target=stim_raw.get("target", default_target))

    return ScenarioConfig(
        model=model,
        time=tgrid,
        params=params,
        stimulus=stimulus,
        grid=grid,
        readout_times=tuple(float(t) for t in data.get("readout_times", [])),
        stride=int(data.get("stride", 100 if model in FIELD_MODELS else 10)),
        output_dir=data.get("output_dir"),
        convergence_check=bool(data.get("convergence_check", False)),
    )


def _param_violations(model: str, params) -> list[str]:
    if model == "mem-spatiotemporal":
        temporal, synaptic = params
        return [f"temporal: {v}" for v in temporal.violations()] + [
            f"synaptic: {v}" for v in synaptic.violations()
        ]
    return params.violations()


def load_config(path: str | Path) -> ScenarioConfig:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as e:
        raise ConfigError(f"config file {path} is not valid YAML: {e}") from None
    return parse_config(data)


# ---------------------------------------------------------------------------
# Running scenarios
# ---------------------------------------------------------------------------


def run_model(
    cfg: ScenarioConfig, time_grid: TimeGrid | None = None, stride: int | None = None
) -> tuple[Trajectory, dict]:
    """Dispatch to the model simulation; returns (trajectory, snapshots)."""
    tg = time_grid or cfg.time
    st = stride if stride is not None else cfg.stride
    if cfg.model == "hh":
        return simulate_hh(cfg.params, cfg.stimulus, tg, st), {}
    if cfg.model == "mem-temporal":
        return simulate_temporal(cfg.params, cfg.stimulus, tg, st), {}
    if cfg.model == "amari":
        return simulate_amari(
            cfg.params, cfg.stimulus, cfg.grid, tg, st, cfg.readout_times
        )
    if cfg.model == "mem-spatial":
        return simulate_ei_field(
            cfg.params, cfg.stimulus, cfg.grid, tg, st, cfg.readout_times
        )
    if cfg.model == "mem-spatiotemporal":
        temporal, synaptic = cfg.params
        traj = simulate_spatiotemporal(temporal, synaptic, cfg.stimulus, cfg.grid, tg, st)
        snapshots = {
            t: {"t": float(traj.times[traj.index_at(t)]), "v_E": traj.snapshot("v_E", t)}
            for t in cfg.readout_times
        }
        return traj, snapshots
    raise ConfigError(f"unknown model {cfg.model!r}")


FLOAT_FMT = "{:.17g}"


def _fmt(v: float) -> str:
    return FLOAT_FMT.format(float(v))


def write_point_csv(path: Path, traj: Trajectory) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("t,variable,value\n")
        for name in traj.variables:
            series = traj.series(name)
            for t, v in zip(traj.times, series):
                fh.write(f"{_fmt(t)},{name},{_fmt(v)}\n")


def write_field_csv(path: Path, traj: Trajectory, variables: list[str]) -> None:
    x = traj.grid.x
    with open(path, "w", newline="") as fh:
        fh.write("t,x,variable,value\n")
        for name in variables:
            block = traj.series(name)
            for i, t in enumerate(traj.times):
                ts = _fmt(t)
                row = block[i]
                for j in range(x.shape[0]):
                    fh.write(f"{ts},{_fmt(x[j])},{name},{_fmt(row[j])}\n")


def write_snapshot_csv(path: Path, x: np.ndarray, t: float, fields: dict[str, np.ndarray]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("t,x,variable,value\n")
        ts = _fmt(t)
        for name, values in fields.items():
            for j in range(x.shape[0]):
                fh.write(f"{ts},{_fmt(x[j])},{name},{_fmt(values[j])}\n")


def _primary_variables(model: str) -> list[str]:
    return {"amari": ["u"], "mem-spatial": ["v_E", "v_I"], "mem-spatiotemporal": ["v_E"]}[
        model
    ]


def _relative_sup_delta(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(a))), 1e-30)
    return float(np.max(np.abs(a - b))) / scale


def dt_halving_delta(cfg: ScenarioConfig) -> float:
    """Relative sup-norm change of the recorded trajectory when dt is
    halved (recording grid kept identical)."""
    base, _ = run_model(cfg)
    halved_tg = make_time_grid(cfg.time.t_start, cfg.time.t_end, cfg.time.dt / 2.0)
    fine, _ = run_model(cfg, time_grid=halved_tg, stride=cfg.stride * 2)
    n = min(base.states.shape[0], fine.states.shape[0])
    return _relative_sup_delta(base.states[:n], fine.states[:n])


def _atomic_write_json(path: Path, payload: dict) -> None:
    tmp = path.with_suffix(".tmp")
    with open(tmp, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


def run_scenario(cfg: ScenarioConfig, out_dir: str | Path) -> dict:
    """Run one scenario and write CSVs, plots, and the manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    warnings = [
        f"pulse outside simulated window: {p.describe()}"
        for p in cfg.stimulus.outside_window(cfg.time)
    ]
    traj, snapshots = run_model(cfg)
    outputs: list[str] = []

    traj_csv = out / "trajectory.csv"
    if cfg.model in FIELD_MODELS:
        write_field_csv(traj_csv, traj, _primary_variables(cfg.model))
    else:
        write_point_csv(traj_csv, traj)
    outputs.append(traj_csv.name)

    for t_read, snap in snapshots.items():
        snap_csv = out / f"snapshot_t{t_read:g}.csv"
        fields = {k: v for k, v in snap.items() if isinstance(v, np.ndarray)}
        write_snapshot_csv(snap_csv, traj.grid.x, snap["t"], fields)
        outputs.append(snap_csv.name)

    for csv_name in list(outputs):
        png = out / (Path(csv_name).stem + ".png")
        emit_plot(out / csv_name, png)
        outputs.append(png.name)

    convergence = None
    if cfg.convergence_check:
        convergence = {"dt_halved": cfg.time.dt / 2.0, "max_rel_delta": dt_halving_delta(cfg)}

    manifest = {
        "version": __version__,
        "config": cfg.resolved(),
        "duration_s": time.perf_counter() - started,
        "convergence": convergence,
        "warnings": warnings,
        "outputs": outputs,
    }
    _atomic_write_json(out / "manifest.json", manifest)
    return manifest


# ---------------------------------------------------------------------------
# Threshold bisection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BisectResult:
    threshold: float
    bracket: tuple[float, float]
    iterations: int
    probe_amplitudes: tuple[float, ...]
    probe_classes: tuple[bool, ...]
    monotone_in_bracket: bool


def bisect_threshold(
    classify: Callable[[float], bool],
    bracket: tuple[float, float],
    iterations: int = 30,
    probes: int = 3,
) -> BisectResult:
    """Bisect the amplitude where ``classify`` flips from False to True.

    The endpoints must straddle the threshold.  After bisection the final
    bracket is probed at interior points and the monotonicity of the
    classification is reported, not assumed.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    c_lo, c_hi = classify(lo), classify(hi)
    if c_lo == c_hi:
        raise BracketError(
            f"bracket does not straddle threshold: classify({lo:g}) == "
            f"classify({hi:g}) == {c_lo}"
        )
    if c_lo:  # orient so lo is subthreshold
        lo, hi = hi, lo
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if classify(mid):
            hi = mid
        else:
            lo = mid
    lo, hi = min(lo, hi), max(lo, hi)
    probe_amps = tuple(
        lo + (hi - lo) * (k + 1) / (probes + 1) for k in range(probes)
    )
    probe_classes = tuple(classify(a) for a in probe_amps)
    ordered = (False,) + probe_classes + (True,)
    monotone = all(not (a and not b) for a, b in zip(ordered, ordered[1:]))
    return BisectResult(
        threshold=0.5 * (lo + hi),
        bracket=(lo, hi),
        iterations=iterations,
        probe_amplitudes=probe_amps,
        probe_classes=probe_classes,
        monotone_in_bracket=monotone,
    )


def default_response_classifier(cfg: ScenarioConfig) -> Callable[[float], bool]:
    """Superthreshold classifier for the scenario's model: replaces the
    amplitude of the (single) pulse and inspects the response."""
    if len(cfg.stimulus.pulses) != 1:
        raise ConfigError(
            "bisection requires a stimulus with exactly one pulse, got "
            f"{len(cfg.stimulus.pulses)}"
        )
    pulse = cfg.stimulus.pulses[0]

    def with_amplitude(amplitude: float) -> ScenarioConfig:
        new_pulse = dataclasses.replace(pulse, amplitude=amplitude)
        return dataclasses.replace(
            cfg, stimulus=StimulusProgram((new_pulse,), cfg.stimulus.target)
        )

    model = cfg.model

    def classify(amplitude: float) -> bool:
        traj, _ = run_model(with_amplitude(amplitude))
        if model == "hh":
            return float(np.max(traj.series("v"))) > -20.0
        if model == "mem-temporal":
            return float(np.max(traj.series("v"))) > 3.0
        if model == "amari":
            theta = cfg.params.theta
            return float(np.max(traj.series("u")[-1])) > theta
        if model == "mem-spatial":
            return float(np.max(traj.series("v_E")[-1])) > 1.0
        return float(np.max(traj.series("v_E"))) > 3.0

    return classify


def run_bisect(cfg: ScenarioConfig, bracket: tuple[float, float], iterations: int) -> BisectResult:
    return bisect_threshold(default_response_classifier(cfg), bracket, iterations)


# ---------------------------------------------------------------------------
# Figure bundles
# ---------------------------------------------------------------------------


def _figure_scenario(name: str) -> dict:
    if name == "fig2":
        return {
            "model": "hh",
            "time": {"t_start": 0.0, "t_end": 60.0, "dt": 0.01},
            "stimulus": {
                "target": "point",
                "pulses": [{"kind": "rect", "amplitude": 10.0, "t_on": 5.0, "t_off": 6.0}],
            },
            "stride": 10,
        }
    if name == "fig4":
        a_star = CALIBRATED_AMPLITUDES["amari"]
        return {
            "model": "amari",
            "time": {"t_start": 0.0, "t_end": 305.0, "dt": 0.01},
            "stimulus": {
                "target": "E",
                "pulses": [
                    {
                        "kind": "gaussian",
                        "amplitude": 0.98 * a_star,
                        "sigma_x": 5.0,
                        "sigma_t": 5.0,
                        "t_center": 10.0,
                    },
                    {
                        "kind": "gaussian",
                        "amplitude": 1.02 * a_star,
                        "sigma_x": 5.0,
                        "sigma_t": 5.0,
                        "t_center": 210.0,
                    },
                ],
            },
            "readout_times": [205.0, 305.0],
            "stride": 100,
        }
    if name == "fig5":
        return {
            "model": "mem-temporal",
            "time": {"t_start": 0.0, "t_end": 100.0, "dt": 0.01},
            "stimulus": {
                "target": "point",
                "pulses": [{"kind": "rect", "amplitude": 5.0, "t_on": 5.0, "t_off": 6.0}],
            },
            "stride": 10,
        }
    if name == "fig7":
        a_star = CALIBRATED_AMPLITUDES["mem-spatial"]
        return {
            "model": "mem-spatial",
            "time": {"t_start": 0.0, "t_end": 200.0, "dt": 0.01},
            "stimulus": {
                "target": "E",
                "pulses": [
                    {
                        "kind": "gaussian",
                        "amplitude": 0.98 * a_star,
                        "sigma_x": 10.0,
                        "sigma_t": 5.0,
                        "t_center": 5.0,
                    },
                    {
                        "kind": "gaussian",
                        "amplitude": 1.02 * a_star,
                        "sigma_x": 10.0,
                        "sigma_t": 5.0,
                        "t_center": 105.0,
                    },
                ],
            },
            "readout_times": [100.0, 200.0],
            "stride": 100,
        }
    if name == "fig8":
        return {
            "model": "mem-spatiotemporal",
            "time": {"t_start": 0.0, "t_end": 100.0, "dt": 0.01},
            "stimulus": {
                "target": "E",
                "pulses": [
                    {
                        "kind": "gaussian",
                        "amplitude": 0.14,
                        "sigma_x": 10.0,
                        "sigma_t": 5.0,
                        "t_center": 10.0,
                    },
                    {
                        "kind": "gaussian",
                        "amplitude": 0.15,
                        "sigma_x": 10.0,
                        "sigma_t": 5.0,
                        "t_center": 30.0,
                    },
                ],
            },
            "readout_times": [33.0],
            "stride": 100,
        }
    raise ConfigError(f"unknown figure {name!r}; expected fig2, fig4, fig5, fig7, or fig8")


FIGURES = ("fig2", "fig4", "fig5", "fig7", "fig8")


def reproduce_figure(name: str, out_dir: str | Path, quick: bool = False) -> dict:
    """Emit the data and plots for one figure.

    fig2 and fig5 locate the pulse threshold by bisection, then run a
    sub/super pair at 2% spacing.  fig4 and fig7 use the calibrated
    amplitudes (re-bisected around the stored value unless ``quick``).
    fig8 uses the stock two-pulse protocol and adds the two slice CSVs.
    """
    out = Path(out_dir) / name
    out.mkdir(parents=True, exist_ok=True)
    cfg = parse_config(_figure_scenario(name))
    calibration = None

    if name in ("fig2", "fig5"):
        bracket = (0.0, 20.0) if name == "fig2" else (0.0, 10.0)
        result = run_bisect(cfg, bracket, iterations=30)
        calibration = dataclasses.asdict(result)
        manifests = {}
        for label, factor in (("sub", 0.98), ("super", 1.02)):
            pulse = dataclasses.replace(
                cfg.stimulus.pulses[0], amplitude=factor * result.threshold
            )
            sub_cfg = dataclasses.replace(
                cfg, stimulus=StimulusProgram((pulse,), cfg.stimulus.target)
            )
            manifests[label] = run_scenario(sub_cfg, out / label)
        manifest = {
            "version": __version__,
            "figure": name,
            "calibration": calibration,
            "runs": manifests,
        }
        _atomic_write_json(out / "manifest.json", manifest)
        return manifest

    if name in ("fig4", "fig7") and not quick:
        model_key = "amari" if name == "fig4" else "mem-spatial"
        a0 = CALIBRATED_AMPLITUDES[model_key]
        short_end = 105.0 if name == "fig4" else 100.0
        probe_cfg = dataclasses.replace(
            cfg,
            time=make_time_grid(0.0, short_end, cfg.time.dt),
            stimulus=StimulusProgram((cfg.stimulus.pulses[0],), cfg.stimulus.target),
            readout_times=(),
        )
        result = bisect_threshold(
            default_response_classifier(probe_cfg), (0.5 * a0, 1.5 * a0), iterations=4, probes=1
        )
        calibration = dataclasses.asdict(result)
        pulses = tuple(
            dataclasses.replace(p, amplitude=f * result.threshold)
            for p, f in zip(cfg.stimulus.pulses, (0.98, 1.02))
        )
        cfg = dataclasses.replace(
            cfg, stimulus=StimulusProgram(pulses, cfg.stimulus.target)
        )

    run_manifest = run_scenario(cfg, out)
    extras = []
    if name == "fig8":
        traj, _ = run_model(cfg)
        center = int(np.argmin(np.abs(cfg.grid.x)))
        slice_t = out / "slice_x0.csv"
        with open(slice_t, "w", newline="") as fh:
            fh.write("t,variable,value\n")
            for t, v in zip(traj.times, traj.series("v_E")[:, center]):
                fh.write(f"{_fmt(t)},v_E,{_fmt(v)}\n")
        emit_plot(slice_t, out / "slice_x0.png")
        i33 = traj.index_at(33.0)
        slice_x = out / "slice_t33.csv"
        write_snapshot_csv(
            slice_x, cfg.grid.x, float(traj.times[i33]), {"v_E": traj.series("v_E")[i33]}
        )
        emit_plot(slice_x, out / "slice_t33.png")
        extras = [slice_t.name, "slice_x0.png", slice_x.name, "slice_t33.png"]

    manifest = {
        "version": __version__,
        "figure": name,
        "calibration": calibration,
        "runs": {"main": run_manifest},
        "extras": extras,
    }
    _atomic_write_json(out / "manifest.json", manifest)
    return manifest


# ---------------------------------------------------------------------------
# Plotting (CSV in, image out)
# ---------------------------------------------------------------------------


def _read_long_csv(path: Path) -> tuple[list[str], dict[str, list]]:
    try:
        with open(path) as fh:
            header_line = fh.readline().strip()
            if not header_line:
                raise ConfigError(f"{path}: empty CSV")
            header = header_line.split(",")
            if header not in (["t", "variable", "value"], ["t", "x", "variable", "value"]):
                raise ConfigError(
                    f"{path}: unexpected header {header_line!r}; expected "
                    "'t,variable,value' or 't,x,variable,value'"
                )
            columns: dict[str, list] = {h: [] for h in header}
            for line in fh:
                parts = line.rstrip("\n").split(",")
                if len(parts) != len(header):
                    raise ConfigError(f"{path}: malformed row {line!r}")
                for h, p in zip(header, parts):
                    columns[h].append(p)
    except FileNotFoundError:
        raise ConfigError(f"CSV file not found: {path}") from None
    if not columns[header[0]]:
        raise ConfigError(f"{path}: CSV has a header but no rows")
    return header, columns


def emit_plot(csv_path: str | Path, out_path: str | Path) -> Path:
    """Render a long-format CSV: time series for point data, heatmap (or
    profile, if a single time) for field data.  Deterministic."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    csv_path = Path(csv_path)
    out_path = Path(out_path)
    header, cols = _read_long_csv(csv_path)
    fig, ax = plt.subplots(figsize=(7, 4))
    if header == ["t", "variable", "value"]:
        t = np.array([float(v) for v in cols["t"]])
        val = np.array([float(v) for v in cols["value"]])
        names = np.array(cols["variable"])
        for name in dict.fromkeys(cols["variable"]):
            mask = names == name
            ax.plot(t[mask], val[mask], label=name)
        ax.set_xlabel("t (ms)")
        ax.legend(loc="best")
    else:
        t = np.array([float(v) for v in cols["t"]])
        x = np.array([float(v) for v in cols["x"]])
        val = np.array([float(v) for v in cols["value"]])
        names = np.array(cols["variable"])
        first = cols["variable"][0]
        mask = names == first
        t, x, val = t[mask], x[mask], val[mask]
        tu, xu = np.unique(t), np.unique(x)
        if tu.size == 1:
            order = np.argsort(x)
            ax.plot(x[order], val[order], label=f"{first} @ t={tu[0]:g}")
            ax.set_xlabel("x")
            ax.legend(loc="best")
        else:
            img = np.full((tu.size, xu.size), np.nan)
            ti = np.searchsorted(tu, t)
            xi = np.searchsorted(xu, x)
            img[ti, xi] = val
            mesh = ax.pcolormesh(xu, tu, img, shading="nearest")
            fig.colorbar(mesh, ax=ax, label=first)
            ax.set_xlabel("x")
            ax.set_ylabel("t (ms)")
    fig.tight_layout()
    fig.savefig(out_path, dpi=110)
    plt.close(fig)
    return out_path
