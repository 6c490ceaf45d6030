"""Command-line entry points.

One scenario per invocation::

    nhsim <kind> --config scenario.json --out results/ [--seed N] [--verbose]

where ``<kind>`` is one of evolve, collapse, degeneracy, cases, lindblad,
ensemble, fixed-points and must match the config's ``kind``.  Each command
writes CSV trajectories and/or JSON reports into the output directory and
prints a one-line summary on success.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import blochflow, ensemble as ens, lindblad as lb, measurement as meas
from .config import KINDS, ScenarioConfig, load_config
from .errors import ConfigError
from .evolution import IntegratorOptions, case_formula, evolve_ode, evolve_unnormalized
from .hamiltonians import (
    SwitchingProfile,
    constant_hamiltonian,
    degeneracy_case,
    flip_readout_hamiltonian,
    measurement_hamiltonian,
)
from .linalg import DensityMatrix, PAULI_X, PAULI_Z, PureStateAmplitudes, from_bloch
from .trajfile import _fmt, write_report_json, write_runs_csv, write_trajectory_csv


def _initial_state(spec: dict) -> DensityMatrix:
    if "bloch" in spec:
        return from_bloch(spec["bloch"])
    if "amplitudes" in spec:
        c1 = complex(*spec["amplitudes"]["c1"])
        c2 = complex(*spec["amplitudes"]["c2"])
        return PureStateAmplitudes(c1, c2).density_matrix()
    if "p0" in spec:
        return PureStateAmplitudes.from_probability(spec["p0"]).density_matrix()
    return DensityMatrix.from_diagonal(spec["diagonal"])


def _amplitudes(spec: dict) -> PureStateAmplitudes:
    if "amplitudes" in spec:
        return PureStateAmplitudes(complex(*spec["amplitudes"]["c1"]),
                                   complex(*spec["amplitudes"]["c2"]))
    if "p0" in spec:
        return PureStateAmplitudes.from_probability(spec["p0"])
    raise ConfigError(["initial: this scenario needs two-level amplitudes (p0 or amplitudes)"])


def _constant_hamiltonian(spec: dict):
    if "matrix" in spec:
        re = np.asarray(spec["matrix"]["re"], dtype=float)
        im = np.asarray(spec["matrix"].get("im", np.zeros_like(re)), dtype=float)
        return constant_hamiltonian(re + 1j * im)
    builder = spec["builder"]
    if builder == "sigma_z":
        return constant_hamiltonian(PAULI_Z)
    if builder == "sigma_x":
        return constant_hamiltonian(PAULI_X)
    gamma = spec["gamma"]
    h = PAULI_Z - 0.5j * gamma * (np.eye(2) - PAULI_Z)
    return constant_hamiltonian(h)


def _opts(p: dict) -> IntegratorOptions:
    return IntegratorOptions(rtol=p.get("rtol", 1e-10), atol=p.get("atol", 1e-13),
                             sample_every=p.get("sample_every", 0.02))


def _run_evolve(cfg: ScenarioConfig, out: Path, verbose: bool) -> str:
    p = cfg.parameters
    h = _constant_hamiltonian(p["hamiltonian"])
    initials = p.get("initial_list") or [p["initial"]]
    engine = evolve_unnormalized if p["engine"] == "unnormalized" else evolve_ode
    prefix = cfg.output["prefix"]
    finals = []
    for k, init in enumerate(initials):
        rho0 = _initial_state(init)
        traj = engine(h, rho0, tuple(p["t_span"]), _opts(p))
        name = f"{prefix}.csv" if len(initials) == 1 else f"{prefix}_{k:02d}.csv"
        write_trajectory_csv(traj, out / name)
        finals.append(traj.populations()[-1])
    pops = ", ".join(_fmt(v) for v in finals[-1])
    return f"evolve: {len(initials)} trajectory(ies), final populations [{pops}]"


def _run_collapse(cfg: ScenarioConfig, out: Path, verbose: bool) -> str:
    p = cfg.parameters
    rho0 = _initial_state(p["initial"])
    sign = int(p["sign"])
    if p["variant"] == "flip_readout":
        profile = (SwitchingProfile.hard_window(p["t_i"], p["t_f"]) if p["literal_window"]
                   else SwitchingProfile.tanh_window(p["t_i"], p["t_f"], p["gamma_m"]))
        h = flip_readout_hamiltonian(sign, p["gamma_m"], profile,
                                     literal_window=p["literal_window"])
    else:
        gamma = p["gamma"]
        profile = (SwitchingProfile.hard_window(p["t_i"], p["t_f"]) if p["profile"] == "hard"
                   else SwitchingProfile.tanh_window(p["t_i"], p["t_f"], gamma))
        if p["basis"] == "z":
            basis = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
        else:
            basis = [np.array([1.0, 1.0]) / np.sqrt(2), np.array([1.0, -1.0]) / np.sqrt(2)]
        target = 0 if sign > 0 else 1
        h = measurement_hamiltonian(basis, [1.0, -1.0], target, gamma, profile)
    scenario = meas.MeasurementScenario(hamiltonian=h, initial_state=rho0,
                                        t_start=p["t_start"], t_end=p["t_end"],
                                        sample_step=p["sample_every"])
    traj, metrics = meas.run_scenario(scenario, _opts(p))
    prefix = cfg.output["prefix"]
    write_trajectory_csv(traj, out / f"{prefix}.csv")
    write_report_json({
        "kappa": metrics.kappa,
        "target_index": metrics.target_index,
        "final_target_population": metrics.final_target_population,
        "persistence_error": metrics.persistence_error,
        "warning": metrics.warning,
    }, out / f"{prefix}_metrics.json")
    return (f"collapse: target {metrics.target_index}, final population "
            f"{metrics.final_target_population:.6f}, kappa {metrics.kappa:.6f}, "
            f"persistence error {metrics.persistence_error:.2e}")


def _run_degeneracy(cfg: ScenarioConfig, out: Path, verbose: bool) -> str:
    p = cfg.parameters
    traj, rep = meas.degeneracy_run(p["case"], p["gamma"], p["t_i"], p["t_f"],
                                    _initial_state(p["initial"]), p["t_start"], p["t_end"],
                                    _opts(p))
    prefix = cfg.output["prefix"]
    write_trajectory_csv(traj, out / f"{prefix}.csv")
    write_report_json({
        "case": rep.case,
        "attractor_kind": rep.attractor_kind,
        "attractor_indices": list(rep.attractor_indices),
        "kappa": rep.kappa,
        "final_populations": rep.final_populations,
        "max_ratio_drift": rep.max_ratio_drift,
    }, out / f"{prefix}_report.json")
    pops = ", ".join(_fmt(v) for v in rep.final_populations)
    return (f"degeneracy case {rep.case}: attractor {rep.attractor_kind} "
            f"{list(rep.attractor_indices)}, final populations [{pops}]")


def _run_cases(cfg: ScenarioConfig, out: Path, verbose: bool) -> str:
    import csv as _csv

    p = cfg.parameters
    amps = _amplitudes(p["initial"])
    lam1, lam2, gamma = p["lambda1"], p["lambda2"], p["gamma"]
    ts = np.linspace(0.0, p["t_max"], p["n_points"])
    prefix = cfg.output["prefix"]
    for which in ("A", "B", "C1", "C2"):
        with open(out / f"{prefix}_{which}.csv", "w", newline="", encoding="utf-8") as fh:
            writer = _csv.writer(fh)
            writer.writerow(["t", "re_rho_0_0", "im_rho_0_0", "re_rho_0_1", "im_rho_0_1",
                             "re_rho_1_1", "im_rho_1_1", "trace"])
            for t in ts:
                m = case_formula(which, lam1, lam2, gamma, amps, float(t))
                writer.writerow([_fmt(t), _fmt(m[0, 0].real), _fmt(m[0, 0].imag),
                                 _fmt(m[0, 1].real), _fmt(m[0, 1].imag),
                                 _fmt(m[1, 1].real), _fmt(m[1, 1].imag),
                                 _fmt(np.trace(m).real)])
    resid_b_c1 = max(np.abs(case_formula("B", lam1, lam2, gamma, amps, float(t))
                            - case_formula("C1", lam1, lam2, gamma, amps, float(t))).max()
                     for t in ts)
    resid_b2_a = max(np.abs(case_formula("B", lam1, lam2, 2.0 * gamma, amps, float(t))
                            - case_formula("A", lam1, lam2, gamma, amps, float(t))).max()
                     for t in ts)
    write_report_json({"max_B_vs_C1": resid_b_c1, "max_B_halfrate_vs_A": resid_b2_a},
                      out / f"{prefix}_identities.json")
    return (f"cases: max |B - C1| = {resid_b_c1:.3e}, "
            f"max |B(2*gamma) - A(gamma)| = {resid_b2_a:.3e}")


def _run_lindblad(cfg: ScenarioConfig, out: Path, verbose: bool) -> str:
    import csv as _csv

    p = cfg.parameters
    amps = _amplitudes(p["initial"])
    ts = np.linspace(0.0, p["t_max"], p["n_points"])
    report = lb.compare_to_dephasing(p["lambda1"], p["lambda2"], p["gamma"], amps, ts)
    prefix = cfg.output["prefix"]
    with open(out / f"{prefix}.csv", "w", newline="", encoding="utf-8") as fh:
        writer = _csv.writer(fh)
        writer.writerow(["t", "p0", "p1", "coherence", "sech_envelope", "distance"])
        for k, t in enumerate(ts):
            writer.writerow([_fmt(t), _fmt(report.populations[k, 0]),
                             _fmt(report.populations[k, 1]), _fmt(report.coherence[k]),
                             _fmt(report.sech_envelope[k]), _fmt(report.distances[k])])
    model = lb.dephasing_model(np.diag([p["lambda1"], p["lambda2"]]), report.fitted_rate)
    traj = lb.lindblad_evolve(model, amps.density_matrix(), (0.0, p["t_max"]))
    write_report_json({
        "fitted_rate": report.fitted_rate,
        "final_distance": report.final_distance,
        "max_trace_drift": traj.meta["max_trace_drift"],
    }, out / f"{prefix}_report.json")
    return (f"lindblad: fitted dephasing rate {report.fitted_rate:.6f}, "
            f"final distance {report.final_distance:.3e}")


def _run_ensemble(cfg: ScenarioConfig, out: Path, verbose: bool) -> str:
    p = cfg.parameters
    part = p["partitions"]
    partitions = (("fixed", part["value"]) if part["kind"] == "fixed"
                  else ("uniform-even", part["min"], part["max"]))
    spec = ens.EnsembleSpec(
        amplitudes=_amplitudes(p["initial"]),
        gamma=p["gamma"], t_i=p["t_i"], window=p["window"], n_runs=p["n_runs"],
        partitions=partitions, tf_jitter=p["tf_jitter"], seed=p["seed"],
        g_mode=p["g_mode"], fourier_order=p["fourier_order"], log_runs=p["log_runs"],
    )
    result = ens.run_ensemble(spec)
    prefix = cfg.output["prefix"]
    record = result.to_record()
    record.pop("runs", None)
    record["born_deviation"] = ens.born_deviation(result, spec.amplitudes)
    write_report_json(record, out / f"{prefix}.json")
    if result.runs is not None:
        write_runs_csv(result.runs, out / f"{prefix}_runs.csv")
    return (f"ensemble: n={result.n_runs} freq0={result.freq0:.4f} "
            f"freq1={result.freq1:.4f} indeterminate={result.indeterminate:.4f}")


def _run_fixed_points(cfg: ScenarioConfig, out: Path, verbose: bool) -> str:
    import csv as _csv

    p = cfg.parameters
    spec = blochflow.FlowSpec(p["variant"], p["gamma"])
    reports = blochflow.fixed_points(spec)
    record = {
        "variant": spec.variant,
        "gamma": spec.gamma,
        "fixed_points": [
            {
                "location": list(r.location),
                "eigenvalues": [[ev.real, ev.imag] for ev in np.asarray(r.jacobian_eigenvalues)],
                "classification": r.classification,
                "point_classification": r.point_classification,
                "description": r.description,
            }
            for r in reports
        ],
    }
    prefix = cfg.output["prefix"]
    write_report_json(record, out / f"{prefix}.json")
    if "portrait_grid" in p:
        n = p["portrait_grid"].get("n", 15)
        axis = np.linspace(-1.0, 1.0, n)
        with open(out / f"{prefix}_portrait.csv", "w", newline="", encoding="utf-8") as fh:
            writer = _csv.writer(fh)
            writer.writerow(["x", "z", "dx", "dz"])
            for x in axis:
                for z in axis:
                    if spec.variant == "normalized":
                        d = blochflow.flow_rhs(spec, (x, 0.0, z))
                        writer.writerow([_fmt(x), _fmt(z), _fmt(d[0]), _fmt(d[2])])
                    else:
                        d = blochflow.flow_rhs(spec, (x, 0.0, z, 1.0))
                        writer.writerow([_fmt(x), _fmt(z), _fmt(d[0]), _fmt(d[2])])
    labels = ", ".join(
        f"{r.classification}@({', '.join(f'{float(v):g}' for v in r.location)})" for r in reports)
    return f"fixed-points ({spec.variant}, gamma={spec.gamma}): {labels}"


_RUNNERS = {
    "evolve": _run_evolve,
    "collapse": _run_collapse,
    "degeneracy": _run_degeneracy,
    "cases": _run_cases,
    "lindblad": _run_lindblad,
    "ensemble": _run_ensemble,
    "fixed-points": _run_fixed_points,
}


def run(config: ScenarioConfig, out_dir, verbose: bool = False) -> str:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return _RUNNERS[config.kind](config, out, verbose)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="nhsim",
                                     description="non-Hermitian collapse dynamics simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in KINDS:
        cmd = sub.add_parser(kind, help=f"run a '{kind}' scenario")
        cmd.add_argument("--config", required=True, help="path to the scenario JSON")
        cmd.add_argument("--out", required=True, help="output directory")
        cmd.add_argument("--seed", type=int, default=None, help="override the config seed")
        cmd.add_argument("--verbose", action="store_true")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if cfg.kind != args.command:
            print(f"error: config kind '{cfg.kind}' does not match command "
                  f"'{args.command}'", file=sys.stderr)
            return 2
        if args.seed is not None:
            if cfg.kind != "ensemble":
                print("error: --seed only applies to ensemble scenarios", file=sys.stderr)
                return 2
            params = dict(cfg.parameters)
            params["seed"] = args.seed
            cfg = ScenarioConfig(kind=cfg.kind, parameters=params, output=cfg.output)
        summary = run(cfg, args.out, args.verbose)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # propagate module errors with context
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
