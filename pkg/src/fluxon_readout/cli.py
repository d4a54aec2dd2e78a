"""Command-line front end: preset scenarios, sweeps, fabrication and checks.

Subcommands
    scenario <name> [--set key=value ...] [--config file] [--out dir]
    sweep <name> --axis key --values v1,v2,... [--workers n]
    fabricate [--jc ...] [--cj-area ...]
    spectrum [--case A|B] [--phi-b-max x] [--n-bias n]
    check-coherence [--velocity v] [--xi x] [--length l]

Exit codes: 0 success, 2 validation error, 3 numerical failure.  All runs are
seedless and deterministic; identical configurations produce byte-identical
CSV artifacts and the same input hash.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import boundstate, ccmodel, lattice, mqc, quantum1d
from .errors import NumericalError, ValidationError
from .params import (CASE_A, CASE_B, CASE_HALF_FLUX, CONFIG_KEYS,
                     CircuitParams, FabricationInputs, coherence_checks,
                     fabricate, params_from_mapping)

ENGINES = ("lattice", "cc", "mqc", "adiabatic")

#: Preset -> (base parameter set, default engine, qubit eigenstate index).
SCATTER_PRESETS = {
    "caseA-n0": (CASE_A, "lattice", 0),
    "caseA-n1": (CASE_A, "lattice", 1),
    "caseA-cc": (CASE_A, "cc", 0),
    "caseB-n0": (CASE_B, "lattice", 0),
    "caseB-n1": (CASE_B, "lattice", 1),
}

SPECIAL_PRESETS = ("spectrum-caseA", "boundstate-caseA", "fabrication-tableI",
                   "coherence-check", "halfflux-failure")

PRESETS = tuple(SCATTER_PRESETS) + SPECIAL_PRESETS

#: Numerical/engine settings accepted beside the physical parameter keys.
SETTING_KEYS = {
    "engine": str,
    "qubit_state": int,
    "phi_q_offset_over_pi": float,
    "v_over_c": float,
    "x0": float,
    "t_end": float,
    "dt": float,
    "sample_stride": int,
}

DEFAULT_SETTINGS = {
    "engine": None,               # preset default
    "qubit_state": None,          # preset default
    "phi_q_offset_over_pi": 0.0,
    "v_over_c": 0.6,
    "x0": -10.0,
    "t_end": 65.0,
    "dt": None,                   # engine default
    "sample_stride": None,        # engine default
}


@dataclass
class ScenarioConfig:
    """Resolved scenario: preset name, parameters and numerical settings."""

    name: str
    params: CircuitParams
    engine: str
    qubit_state: int
    phi_q_offset: float           # radians, added to the initial qubit phase
    v_over_c: float
    x0: float
    t_end: float
    dt: float | None
    sample_stride: int | None
    out_dir: str

    def canonical(self) -> str:
        """Stable text form used for the input hash."""
        items = {
            "name": self.name, "engine": self.engine,
            "qubit_state": self.qubit_state,
            "phi_q_offset": repr(self.phi_q_offset),
            "v_over_c": repr(self.v_over_c), "x0": repr(self.x0),
            "t_end": repr(self.t_end), "dt": repr(self.dt),
            "sample_stride": repr(self.sample_stride),
        }
        for fld in ("discreteness", "beta2", "ic_term", "cj_term", "ic_rail",
                    "cj_rail", "ic_q", "cj_q", "lq", "phi_ext", "sigma",
                    "n_cells"):
            items[fld] = repr(getattr(self.params, fld))
        return "\n".join(f"{k}={items[k]}" for k in sorted(items))

    def input_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()


@dataclass
class RunSummary:
    """Outcome, provenance and artifact list of one scenario run."""

    scenario: str
    engine: str
    input_hash: str
    wall_time_s: float
    artifacts: list = field(default_factory=list)
    outcome: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "scenario": self.scenario, "engine": self.engine,
            "input_hash": self.input_hash,
            "wall_time_s": round(self.wall_time_s, 3),
            "artifacts": self.artifacts, "outcome": self.outcome,
        }


# ---------------------------------------------------------------------------
# Configuration ingestion
# ---------------------------------------------------------------------------

def read_config_file(path: str) -> dict:
    """Parse a flat key=value file; '#' starts a comment, blank lines skipped."""
    mapping: dict = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValidationError(
                f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key in mapping:
            raise ValidationError(f"{path}:{lineno}: duplicate key {key!r}")
        mapping[key] = value
    return mapping


def resolve_config(name: str, overrides: dict, out_dir: str) -> ScenarioConfig:
    """Apply key=value overrides to a preset and validate every key."""
    if name in SCATTER_PRESETS:
        base_params, default_engine, default_state = SCATTER_PRESETS[name]
    elif name == "halfflux-failure":
        base_params, default_engine, default_state = CASE_HALF_FLUX, "lattice", 0
    elif name in SPECIAL_PRESETS:
        base_params, default_engine, default_state = CASE_A, "lattice", 0
    else:
        raise ValidationError(
            f"unknown scenario {name!r}; choose from {', '.join(PRESETS)}")

    param_over: dict = {}
    settings = dict(DEFAULT_SETTINGS)
    for key, raw in overrides.items():
        if key in CONFIG_KEYS:
            param_over[key] = raw
        elif key in SETTING_KEYS:
            settings[key] = SETTING_KEYS[key](raw)
        else:
            raise ValidationError(f"unknown configuration key: {key!r}")

    params = params_from_mapping(param_over, base=base_params)
    engine = settings["engine"] or default_engine
    if engine not in ENGINES:
        raise ValidationError(f"engine must be one of {ENGINES}, got {engine!r}")
    state = settings["qubit_state"]
    state = default_state if state is None else int(state)
    if state < 0:
        raise ValidationError(f"qubit_state must be >= 0, got {state}")
    return ScenarioConfig(
        name=name, params=params, engine=engine, qubit_state=state,
        phi_q_offset=float(settings["phi_q_offset_over_pi"]) * math.pi,
        v_over_c=float(settings["v_over_c"]), x0=float(settings["x0"]),
        t_end=float(settings["t_end"]),
        dt=None if settings["dt"] is None else float(settings["dt"]),
        sample_stride=(None if settings["sample_stride"] is None
                       else int(settings["sample_stride"])),
        out_dir=out_dir,
    )


# ---------------------------------------------------------------------------
# Engines
# ---------------------------------------------------------------------------

def _initial_qubit_phase(config: ScenarioConfig) -> float:
    base = quantum1d.initial_phase(config.params, config.qubit_state)
    return base + config.phi_q_offset


def _run_lattice(config: ScenarioConfig):
    dt = config.dt if config.dt is not None else lattice.DEFAULT_DT
    stride = config.sample_stride if config.sample_stride is not None else 10
    state = lattice.init_state(config.params, config.v_over_c, x0=config.x0,
                               qubit_init=_initial_qubit_phase(config))
    traj = lattice.run(state, config.params, t_end=config.t_end, dt=dt,
                       sample_stride=stride, v_in=config.v_over_c)
    outcome = lattice.classify_outcome(traj, config.params)
    return traj, outcome


def _run_cc(config: ScenarioConfig):
    dt = config.dt if config.dt is not None else 2e-3
    stride = config.sample_stride if config.sample_stride is not None else 25
    state = ccmodel.initial_cc_state(config.params, config.v_over_c,
                                     x0=config.x0,
                                     qubit_init=_initial_qubit_phase(config))
    traj = ccmodel.run_cc(state, config.params, t_end=config.t_end, dt=dt,
                          sample_stride=stride)
    return traj, traj.outcome


def _run_mqc(config: ScenarioConfig, adiabatic: bool):
    dt = config.dt if config.dt is not None else 2e-3
    stride = config.sample_stride if config.sample_stride is not None else 25
    state = mqc.initial_mqc_state(config.params, config.v_over_c,
                                  x0=config.x0, n=config.qubit_state)
    runner = mqc.run_adiabatic if adiabatic else mqc.run_mqc
    report = runner(state, config.params, t_end=config.t_end, dt=dt,
                    sample_stride=stride, initial_state=config.qubit_state)
    return report, report.outcome


def _scatter_scenario(config: ScenarioConfig, out: Path) -> RunSummary:
    started = time.perf_counter()
    artifacts: list = []
    outcome_dict: dict

    if config.engine == "lattice":
        traj, outcome = _run_lattice(config)
        path = out / f"{config.name}-trajectory.csv"
        lattice.trajectory_to_csv(traj, str(path))
        artifacts.append(path.name)
        outcome_dict = outcome.as_dict()
    elif config.engine == "cc":
        traj, outcome = _run_cc(config)
        path = out / f"{config.name}-trajectory.csv"
        ccmodel.trajectory_to_csv(traj, str(path))
        artifacts.append(path.name)
        outcome_dict = outcome.as_dict()
    else:
        report, outcome = _run_mqc(config, config.engine == "adiabatic")
        path = out / f"{config.name}-trajectory.csv"
        mqc.report_to_csv(report, str(path))
        artifacts.append(path.name)
        outcome_dict = outcome.as_dict()
        outcome_dict["final_infidelity"] = report.final_infidelity

    summary = RunSummary(scenario=config.name, engine=config.engine,
                         input_hash=config.input_hash(),
                         wall_time_s=time.perf_counter() - started,
                         artifacts=artifacts, outcome=outcome_dict)
    _write_summary(summary, out, config.name)
    return summary


def _spectrum_scenario(config: ScenarioConfig, out: Path,
                       phi_b_max: float = math.pi,
                       n_bias: int = 121) -> RunSummary:
    started = time.perf_counter()
    biases = np.linspace(0.0, phi_b_max, n_bias)
    spec = quantum1d.spectrum_vs_bias(config.params, biases, k=4)
    path = out / f"{config.name}-levels.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["phi_b", "e0_E0", "e1_E0", "e2_E0", "e3_E0"])
        for pb, row in zip(spec.phi_b, spec.energies):
            writer.writerow([f"{pb:.9g}"] + [f"{e:.9g}" for e in row])
    outcome = {
        "crossing_phi_b_over_pi": spec.crossing_phi_b / math.pi,
        "crossing_gap_E0": spec.crossing_gap,
        "transition_energy_E0": float(spec.energies[0, 1]
                                      - spec.energies[0, 0]),
    }
    summary = RunSummary(scenario=config.name, engine="spectrum",
                         input_hash=config.input_hash(),
                         wall_time_s=time.perf_counter() - started,
                         artifacts=[path.name], outcome=outcome)
    _write_summary(summary, out, config.name)
    return summary


def _boundstate_scenario(config: ScenarioConfig, out: Path,
                         n_states: int = 3) -> RunSummary:
    started = time.perf_counter()
    report = boundstate.steadystate_report(config.params)
    sol = boundstate.solve_h2(config.params, k=max(n_states, 3))
    artifacts = []
    for m in range(n_states):
        path = out / f"{config.name}-state{m}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["phi_q", "phi_b", "density"])
            for row in sol.state_csv_rows(m):
                writer.writerow([f"{v:.9g}" for v in row])
        artifacts.append(path.name)
    outcome = {
        "masses": [report.m_lr, report.m_b, report.m_q],
        "frequencies_over_omegaJ": [report.omega_lr, report.omega_b,
                                    report.omega_q],
        "phase_uncertainties_over_pi": [
            math.sqrt(report.var_phi_lr) / math.pi,
            math.sqrt(report.var_phi_b) / math.pi,
            math.sqrt(report.var_phi_q) / math.pi],
        "stable": report.stable,
        "energies_E0": [float(e) for e in sol.energies],
        "well_labels": [int(w) for w in sol.well_label],
    }
    summary = RunSummary(scenario=config.name, engine="boundstate",
                         input_hash=config.input_hash(),
                         wall_time_s=time.perf_counter() - started,
                         artifacts=artifacts, outcome=outcome)
    _write_summary(summary, out, config.name)
    return summary


def _fabrication_scenario(config: ScenarioConfig, out: Path,
                          jc: float = 0.1, cj_area: float = 40.0) -> RunSummary:
    started = time.perf_counter()
    rows = []
    for case, params in (("A", CASE_A), ("B", CASE_B)):
        jcq = 1.0 if case == "A" else params.ic_q / params.cj_q
        inputs = FabricationInputs(jc=jc, cj_area=cj_area, case=case,
                                   jcq_ratio=jcq)
        rows.append((case, fabricate(inputs, params)))
    path = out / f"{config.name}.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("case",) + rows[0][1].CSV_COLUMNS)
        for case, phys in rows:
            writer.writerow([case] + [f"{v:.6g}" for v in phys.csv_row()])
    sidecar = out / f"{config.name}-units.json"
    sidecar.write_text(json.dumps({
        "jc_uA_per_um2": jc, "cj_area_fF_per_um2": cj_area,
        "area_um2": "JJ area", "ic_uA": "critical current",
        "cj_fF": "total JJ capacitance", "l_nH": "cell inductance",
        "fj_GHz": "Josephson plasma frequency omega_J/2pi",
        "e0_h_GHz": "characteristic energy E_0/h",
        "f01_GHz": "qubit transition at the operating bias",
        "f01_min_MHz": "qubit transition at half flux",
    }, indent=2))
    outcome = {case: phys.as_dict() for case, phys in rows}
    summary = RunSummary(scenario=config.name, engine="fabricate",
                         input_hash=config.input_hash(),
                         wall_time_s=time.perf_counter() - started,
                         artifacts=[path.name, sidecar.name], outcome=outcome)
    _write_summary(summary, out, config.name)
    return summary


def _coherence_scenario(config: ScenarioConfig, out: Path,
                        v_over_c: float = 0.6, xi_over_a: float = 100.0,
                        l_over_a: float = 240.0) -> RunSummary:
    started = time.perf_counter()
    report = coherence_checks(config.params, v_over_c, xi_over_a, l_over_a)
    outcome = {
        "k_lambda": report.k_lambda,
        "de_broglie_over_lambda": report.de_broglie,
        "xi_lower_bound_over_a": report.xi_lower_bound,
        "xi_lower_bound_delay_over_a": report.xi_lower_bound_delay,
        "v_max_discreteness": report.v_max_discreteness,
        "v_max_plasma": report.v_max_plasma,
        "kinetic_energy_hbar_omegaJ": report.kinetic_energy,
        "passes": report.passes,
    }
    summary = RunSummary(scenario=config.name, engine="coherence",
                         input_hash=config.input_hash(),
                         wall_time_s=time.perf_counter() - started,
                         artifacts=[], outcome=outcome)
    _write_summary(summary, out, config.name)
    return summary


def _halfflux_scenario(config: ScenarioConfig, out: Path) -> RunSummary:
    """Scatter at an unsuitable bias and report the diabatic qubit response."""
    started = time.perf_counter()
    traj, outcome = _run_lattice(config)
    path = out / f"{config.name}-trajectory.csv"
    lattice.trajectory_to_csv(traj, str(path))

    drive = quantum1d.DriveTrace(times=traj.times,
                                 phi_b=traj.phi_b - traj.phi_b[0])
    grid = quantum1d.PhaseGrid()
    sol = quantum1d.eigensolve(
        quantum1d.build_hamiltonian(grid, config.params),
        config.qubit_state + 1)
    psi0 = quantum1d.WaveFunction(
        grid, sol.states[:, config.qubit_state].astype(complex))
    back = quantum1d.propagate_driven(psi0, drive, config.params,
                                      initial_state=config.qubit_state,
                                      n_track=8, dt=2e-3)
    high = float(1.0 - back.cm_abs2[-1, :2].sum())  # weight above levels 0-1
    outcome_dict = outcome.as_dict()
    outcome_dict.update({
        "final_infidelity": back.final_infidelity,
        "peak_infidelity": back.peak_infidelity,
        "weight_above_two_levels": high,
    })
    summary = RunSummary(scenario=config.name, engine="lattice+driven",
                         input_hash=config.input_hash(),
                         wall_time_s=time.perf_counter() - started,
                         artifacts=[path.name], outcome=outcome_dict)
    _write_summary(summary, out, config.name)
    return summary


def _write_summary(summary: RunSummary, out: Path, name: str) -> None:
    path = out / f"{name}-summary.json"
    path.write_text(json.dumps(summary.as_dict(), indent=2) + "\n")
    summary.artifacts.append(path.name)


def run_scenario(config: ScenarioConfig) -> RunSummary:
    """Execute a resolved scenario and write its artifacts."""
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if config.name in SCATTER_PRESETS:
        return _scatter_scenario(config, out)
    if config.name == "spectrum-caseA":
        return _spectrum_scenario(config, out)
    if config.name == "boundstate-caseA":
        return _boundstate_scenario(config, out)
    if config.name == "fabrication-tableI":
        return _fabrication_scenario(config, out)
    if config.name == "coherence-check":
        return _coherence_scenario(config, out)
    if config.name == "halfflux-failure":
        return _halfflux_scenario(config, out)
    raise ValidationError(f"unknown scenario {config.name!r}")


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

SWEEP_RESULT_COLUMNS = ("index", "axis", "value", "channel", "bounce_count",
                        "max_phi_b_over_pi", "energy_retention",
                        "measurement_time_periods", "input_hash", "error")


def _sweep_worker(args) -> dict:
    """One sweep point; returns a flat result row (runs in a worker process)."""
    index, name, overrides, out_dir, axis, value = args
    row = {"index": index, "axis": axis, "value": value, "channel": "",
           "bounce_count": "", "max_phi_b_over_pi": "",
           "energy_retention": "", "measurement_time_periods": "",
           "input_hash": "", "error": ""}
    try:
        config = resolve_config(name, {**overrides, axis: value},
                                str(Path(out_dir) / f"point{index:03d}"))
        row["input_hash"] = config.input_hash()
        summary = run_scenario(config)
        for key in ("channel", "bounce_count", "max_phi_b_over_pi",
                    "energy_retention", "measurement_time_periods"):
            if key in summary.outcome:
                row[key] = summary.outcome[key]
    except (ValidationError, NumericalError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def run_sweep(name: str, axis: str, values: list, overrides: dict,
              out_dir: str, workers: int = 1) -> list:
    """Independent runs over one numeric axis; rows follow the input order."""
    if axis not in CONFIG_KEYS and axis not in SETTING_KEYS:
        raise ValidationError(f"axis must name a configuration key, got {axis!r}")
    if axis in SETTING_KEYS and SETTING_KEYS[axis] is str:
        raise ValidationError(f"axis {axis!r} is not numeric")
    if workers < 1:
        raise ValidationError(f"workers must be >= 1, got {workers}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tasks = [(i, name, overrides, out_dir, axis, v)
             for i, v in enumerate(values)]
    if workers == 1 or len(tasks) <= 1:
        rows = [_sweep_worker(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_worker, tasks))
    path = out / "sweep.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_RESULT_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    return rows


# ---------------------------------------------------------------------------
# Argument parsing and entry point
# ---------------------------------------------------------------------------

def _collect_overrides(args) -> dict:
    overrides: dict = {}
    if getattr(args, "config", None):
        overrides.update(read_config_file(args.config))
    for item in getattr(args, "set", None) or []:
        if "=" not in item:
            raise ValidationError(f"--set expects key=value, got {item!r}")
        key, value = (part.strip() for part in item.split("=", 1))
        overrides[key] = value
    return overrides


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fluxon-readout",
        description="Fluxon-scattering readout simulations and parameter tools.")
    sub = parser.add_subparsers(dest="command", required=True)

    sc = sub.add_parser("scenario", help="run a preset scenario")
    sc.add_argument("name", choices=PRESETS)
    sc.add_argument("--config", help="flat key=value configuration file")
    sc.add_argument("--set", action="append", metavar="KEY=VALUE",
                    help="override one configuration key")
    sc.add_argument("--out", default="out", help="output directory")

    sw = sub.add_parser("sweep", help="run one scenario over a parameter axis")
    sw.add_argument("name", choices=tuple(SCATTER_PRESETS) + ("halfflux-failure",))
    sw.add_argument("--axis", required=True,
                    help="configuration key to sweep")
    sw.add_argument("--values", required=True,
                    help="comma-separated axis values (may be empty)")
    sw.add_argument("--config", help="flat key=value configuration file")
    sw.add_argument("--set", action="append", metavar="KEY=VALUE")
    sw.add_argument("--workers", type=int, default=1)
    sw.add_argument("--out", default="out")

    fb = sub.add_parser("fabricate", help="map a process onto circuit values")
    fb.add_argument("--jc", type=float, default=0.1,
                    help="critical current density, uA/um^2")
    fb.add_argument("--cj-area", type=float, default=40.0,
                    help="specific capacitance, fF/um^2")
    fb.add_argument("--out", default="out")

    sp = sub.add_parser("spectrum", help="qubit levels vs interface bias")
    sp.add_argument("--case", choices=("A", "B"), default="A")
    sp.add_argument("--phi-b-max-over-pi", type=float, default=1.0)
    sp.add_argument("--n-bias", type=int, default=121)
    sp.add_argument("--out", default="out")

    ch = sub.add_parser("check-coherence",
                        help="particle-like-fluxon constraint report")
    ch.add_argument("--velocity", type=float, default=0.6, help="v/c")
    ch.add_argument("--xi", type=float, default=100.0,
                    help="wave-packet width over a")
    ch.add_argument("--length", type=float, default=240.0,
                    help="LJJ length over a")
    ch.add_argument("--case", choices=("A", "B"), default="A")
    ch.add_argument("--out", default="out")
    return parser


def _dispatch(args) -> int:
    if args.command == "scenario":
        config = resolve_config(args.name, _collect_overrides(args), args.out)
        summary = run_scenario(config)
        print(json.dumps(summary.as_dict(), indent=2))
        return 0
    if args.command == "sweep":
        raw = [v for v in args.values.split(",") if v.strip()]
        rows = run_sweep(args.name, args.axis, [v.strip() for v in raw],
                         _collect_overrides(args), args.out,
                         workers=args.workers)
        print(json.dumps(rows, indent=2, default=str))
        return 0
    if args.command == "fabricate":
        config = resolve_config("fabrication-tableI", {}, args.out)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        summary = _fabrication_scenario(config, out, jc=args.jc,
                                        cj_area=args.cj_area)
        print(json.dumps(summary.as_dict(), indent=2))
        return 0
    if args.command == "spectrum":
        params = CASE_A if args.case == "A" else CASE_B
        config = resolve_config("spectrum-caseA", {}, args.out)
        config.params = params
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        summary = _spectrum_scenario(
            config, out, phi_b_max=args.phi_b_max_over_pi * math.pi,
            n_bias=args.n_bias)
        print(json.dumps(summary.as_dict(), indent=2))
        return 0
    if args.command == "check-coherence":
        params = CASE_A if args.case == "A" else CASE_B
        config = resolve_config("coherence-check", {}, args.out)
        config.params = params
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        summary = _coherence_scenario(config, out, v_over_c=args.velocity,
                                      xi_over_a=args.xi, l_over_a=args.length)
        print(json.dumps(summary.as_dict(), indent=2))
        return 0
    raise ValidationError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
