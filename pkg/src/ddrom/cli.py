"""Command-line experiment runner emitting plot-ready CSV.

Every command is deterministic given ``--seed``: rerunning writes
byte-identical files.  Each CSV starts with a ``# config-hash:`` provenance
comment over the fully resolved parameters, followed by a header row.
Desk-scale defaults keep individual commands fast; ``--full-scale`` switches
to the large experiment sizes.

Exit codes: 0 success, 2 informativity failure, 3 non-convergence, 1 other
errors.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import conditioning, h2, informativity, irka, loewner, lti

__all__ = ["main", "ExperimentConfig"]

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_INFORMATIVE = 2
EXIT_NOT_CONVERGED = 3


# -- configuration plumbing ---------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved parameters of one command invocation.

    The hash over the sorted parameter set goes into every emitted file as a
    provenance comment, so identical configurations produce byte-identical
    output.
    """

    name: str
    seed: int
    full_scale: bool
    params: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.params[key]

    @property
    def config_hash(self) -> str:
        blob = json.dumps(
            {"command": self.name, "seed": self.seed, "full_scale": self.full_scale, **self.params},
            sort_keys=True,
            separators=(",", ":"),
        )
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def require_files(self, *keys) -> None:
        for key in keys:
            value = self.params.get(key)
            if value and not Path(str(value)).exists():
                raise ValueError(f"{key}: file {value!r} does not exist")

    def require_nonempty_grid(self, label: str, grid) -> None:
        if len(grid) == 0:
            raise ValueError(f"{label} grid is empty")


def _resolve(args, defaults: dict, full_scale_overrides: dict) -> ExperimentConfig:
    """Merge defaults, full-scale overrides, config file, and CLI flags."""
    params = dict(defaults)
    if args.full_scale:
        params.update(full_scale_overrides)
    if args.config:
        file_cfg = json.loads(Path(args.config).read_text())
        unknown = set(file_cfg) - set(defaults)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        params.update(file_cfg)
    for key in defaults:
        cli_val = getattr(args, key.replace("-", "_"), None)
        if cli_val is not None:
            params[key] = cli_val
    return ExperimentConfig(
        name=args.command, seed=args.seed, full_scale=bool(args.full_scale), params=params
    )


def _write_csv(path: Path, header: list[str], rows, cfg_hash: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# config-hash: {cfg_hash}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([x if isinstance(x, str) else repr(float(x)) for x in row])


def _fmt_cell(x) -> str:
    return repr(float(x))


_SYSTEM_RE = re.compile(r"^(\w+)\((.*)\)$")


def parse_system_spec(spec: str, seed: int):
    """Build a system from ``name(key=value,...)`` or load it from a JSON path.

    Builtins: ``random(n,radius)``, ``advection(n,a,fs)``,
    ``heat(n,Cp,rho,K0,output_x,fs)``, ``scalar(a)``.
    """
    m = _SYSTEM_RE.match(spec.strip())
    if not m:
        return lti.load_system(spec)
    name, body = m.group(1), m.group(2)
    kwargs = {}
    if body.strip():
        for part in body.split(","):
            key, _, val = part.partition("=")
            kwargs[key.strip()] = float(val)
    if name == "random":
        return lti.random_stable_system(
            n=int(kwargs.get("n", 100)),
            spectral_radius_bound=kwargs.get("radius", 0.9),
            seed=int(kwargs.get("seed", seed)),
        )
    if name == "modes":
        return lti.lightly_damped_system(
            n=int(kwargs.get("n", 40)),
            damping=kwargs.get("damping", 5e-3),
            theta_min=kwargs.get("theta_min", 1e-2),
            theta_max=kwargs.get("theta_max", 2.0),
            seed=int(kwargs.get("seed", seed)),
        )
    if name == "advection":
        return lti.advection_fd_model(
            n=int(kwargs.get("n", 200)),
            a=kwargs.get("a", 20.0),
            fs=kwargs.get("fs", 1e4),
        )
    if name == "heat":
        return lti.heat_fd_model(
            n=int(kwargs.get("n", 100)),
            Cp=kwargs.get("Cp", 0.896),
            rho=kwargs.get("rho", 2700.0),
            K0=kwargs.get("K0", 167.0),
            output_x=kwargs.get("output_x", 0.8),
            fs=kwargs.get("fs", 1e3),
        )
    if name == "scalar":
        a = kwargs.get("a", 0.5)
        return lti.DiscreteLTI(E=[[1.0]], A=[[a]], b=[1.0], c=[1.0], stable=abs(a) < 1)
    raise ValueError(f"unknown system spec {spec!r}")


def _make_input(kind: str, length: int, amplitude: float, seed: int) -> np.ndarray:
    if kind == "gaussian":
        return amplitude * np.random.default_rng(seed).standard_normal(length + 1)
    if kind == "impulse":
        u = np.zeros(length + 1)
        u[0] = amplitude
        return u
    if kind == "zero":
        return np.zeros(length + 1)
    raise ValueError(f"unknown input kind {kind!r}")


def _sawtooth(t: np.ndarray, frequency: float, amplitude: float) -> np.ndarray:
    phase = t * frequency
    return amplitude * (2.0 * (phase - np.floor(phase)) - 1.0)


def _load_or_simulate_data(args, resolved, seed: int) -> lti.TimeSeriesData:
    if getattr(args, "data_u", None):
        return lti.load_timeseries(args.data_u, args.data_y)
    sys_model = parse_system_spec(resolved["system"], seed)
    u = _make_input(resolved["input"], int(resolved["length"]), resolved["amplitude"], seed)
    return lti.simulate(sys_model, u)


# -- commands -----------------------------------------------------------------


def _cmd_simulate(args) -> int:
    defaults = {
        "system": "random(n=100,radius=0.9)",
        "length": 1000,
        "input": "gaussian",
        "amplitude": 1.0,
        "prefix": "trajectory",
    }
    resolved = _resolve(args, defaults, {"length": 10000})
    cfg_hash = resolved.config_hash
    out = Path(args.out)
    sys_model = parse_system_spec(resolved["system"], args.seed)
    u = _make_input(resolved["input"], int(resolved["length"]), resolved["amplitude"], args.seed)
    data = lti.simulate(sys_model, u)
    lti.save_timeseries(
        data,
        out / f"{resolved['prefix']}_u.csv",
        out / f"{resolved['prefix']}_y.csv",
        (f"config-hash: {cfg_hash}",),
    )
    print(f"wrote {resolved['prefix']}_u.csv / _y.csv (T={data.T})")
    return EXIT_OK


def _cmd_recover(args) -> int:
    defaults = {
        "system": "random(n=100,radius=0.9)",
        "length": 2000,
        "input": "gaussian",
        "amplitude": 1.0,
        "nhat": 200,
        "policy": "scaled",
        "derivative": True,
    }
    resolved = _resolve(args, defaults, {"length": 10000})
    if not args.sigma:
        raise ValueError("at least one --sigma is required")
    resolved.params["sigma"] = [str(s) for s in args.sigma]
    cfg_hash = resolved.config_hash

    data = _load_or_simulate_data(args, resolved, args.seed)
    ws = informativity.build_workspace(data, int(resolved["nhat"]))
    samples = []
    failures = []
    for text in args.sigma:
        sigma = complex(text)
        try:
            s = informativity.recover_value(ws, sigma, overflow_policy=resolved["policy"])
            if resolved["derivative"] and s.informativity.hermite:
                s = informativity.recover_derivative(ws, s)
            samples.append(s)
        except informativity.NotInformativeError as exc:
            failures.append(exc)
    informativity.write_samples_csv(
        Path(args.out) / "recover.csv", samples, comment_lines=(f"config-hash: {cfg_hash}",)
    )
    for exc in failures:
        print(f"error: {exc}", file=sys.stderr)
    print(f"recovered {len(samples)}/{len(args.sigma)} points -> recover.csv")
    return EXIT_NOT_INFORMATIVE if failures else EXIT_OK


def _irka_outputs(args, report, cfg_hash: str) -> None:
    out = Path(args.out)
    loewner.save_rom(report.rom, out / "rom.json")
    payload = irka.report_to_json_dict(report)
    payload["config_hash"] = cfg_hash
    (out / "report.json").write_text(json.dumps(payload, indent=1) + "\n")
    irka.write_report_summary_csv(report, out / "report_summary.csv", (f"config-hash: {cfg_hash}",))


def _cmd_tfirka(args) -> int:
    defaults = {
        "system": "random(n=100,radius=0.9)",
        "order": 4,
        "max_iterations": 100,
        "tol": 1e-6,
        "radius": 1.05,
    }
    resolved = _resolve(args, defaults, {})
    cfg_hash = resolved.config_hash
    sys_model = parse_system_spec(resolved["system"], args.seed)
    config = irka.IrkaConfig(
        r=int(resolved["order"]),
        max_iterations=int(resolved["max_iterations"]),
        convergence_tol=resolved["tol"],
        initial_radius=resolved["radius"],
    )
    report = irka.tf_irka(sys_model, config)
    _irka_outputs(args, report, cfg_hash)
    print(f"tfirka r={config.r}: converged={report.converged} iterations={report.iterations}")
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def _cmd_tdirka(args) -> int:
    defaults = {
        "system": "random(n=100,radius=0.9)",
        "length": 2000,
        "input": "gaussian",
        "amplitude": 1.0,
        "order": 4,
        "nhat": 200,
        "max_iterations": 100,
        "tol": 1e-6,
        "radius": 1.05,
        "policy": "scaled",
    }
    resolved = _resolve(args, defaults, {"length": 10000, "nhat": 600})
    cfg_hash = resolved.config_hash
    data = _load_or_simulate_data(args, resolved, args.seed)
    config = irka.IrkaConfig(
        r=int(resolved["order"]),
        max_iterations=int(resolved["max_iterations"]),
        convergence_tol=resolved["tol"],
        initial_radius=resolved["radius"],
        nhat=int(resolved["nhat"]),
        overflow_policy=resolved["policy"],
    )
    report = irka.td_irka(data, config)
    _irka_outputs(args, report, cfg_hash)
    print(f"tdirka r={config.r}: converged={report.converged} iterations={report.iterations}")
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def _cmd_cond_vs_radius(args) -> int:
    defaults = {
        "n": 60,
        "radius": 0.9,
        "t_factor": 3,
        "nhat": None,
        "omega": 0.5,
        "d_min": 1.0,
        "d_max": 2.0,
        "d_step": 0.05,
    }
    resolved = _resolve(args, defaults, {"n": 270})
    n = int(resolved["n"])
    nhat = n if resolved["nhat"] is None else int(resolved["nhat"])
    resolved.params["nhat"] = nhat
    cfg_hash = resolved.config_hash

    sys_model = lti.random_stable_system(n, resolved["radius"], args.seed)
    T = int(resolved["t_factor"]) * n
    u = _make_input("gaussian", T, 1.0, args.seed)
    data = lti.simulate(sys_model, u)
    ws = informativity.build_workspace(data, nhat)

    d_grid = np.round(np.arange(resolved["d_min"], resolved["d_max"] + resolved["d_step"] / 2, resolved["d_step"]), 12)
    rows = []
    for d in d_grid:
        sigma = d * np.exp(1j * resolved["omega"])
        sv = informativity.sigma_vectors(sigma, nhat)
        z_full = sv.zhat * sv.scale.value
        kappa_unscaled = conditioning.condition_number(ws.Ubasis, z_full).kappa
        kappa_scaled = conditioning.condition_number(ws.Ubasis, sv.zhat).kappa
        rows.append([d, kappa_unscaled, kappa_scaled])
    _write_csv(Path(args.out) / "cond_vs_radius.csv", ["d", "kappa_unscaled", "kappa_scaled"], rows, cfg_hash)
    print(f"wrote cond_vs_radius.csv ({len(rows)} rows)")
    return EXIT_OK


def _cmd_error_vs_nhat(args) -> int:
    defaults = {
        "benchmark": "modes",
        "n": 40,
        "radius": 0.95,
        "damping": 5e-3,
        "length": 2000,
        "d": 2.5,
        "sigma_count": 40,
        "nhat_max_power": 9,
        "policy": "scaled",
    }
    resolved = _resolve(args, defaults, {"length": 10000, "sigma_count": 1000, "nhat_max_power": 11})
    cfg_hash = resolved.config_hash
    n = int(resolved["n"])

    if resolved["benchmark"] == "modes":
        sys_model = lti.lightly_damped_system(n, resolved["damping"], seed=args.seed)
    elif resolved["benchmark"] == "random":
        sys_model = lti.random_stable_system(n, resolved["radius"], args.seed)
    else:
        raise ValueError(f"unknown benchmark {resolved['benchmark']!r}")
    u = _make_input("gaussian", int(resolved["length"]), 1.0, args.seed)
    data = lti.simulate(sys_model, u)
    ev = lti.TransferEvaluator(sys_model)

    omegas = np.geomspace(1e-3, np.pi * (1 - 1e-9), int(resolved["sigma_count"]))
    circle = np.exp(1j * omegas)
    d = resolved["d"]
    sigma_fixed = np.exp(1j * 1e-3)
    true_circle = ev.value(circle)
    true_outer = ev.value(d * circle)

    nhat_grid = sorted(
        {2**k for k in range(1, int(resolved["nhat_max_power"]) + 1)} | {n, 2 * n}
    )
    nhat_grid = [h for h in nhat_grid if h <= data.T - 1]

    rows = []
    for nhat in nhat_grid:
        ws = informativity.build_workspace(data, nhat)

        def max_err(points, truth):
            worst = 0.0
            for sigma, ref in zip(points, truth):
                try:
                    s = informativity.recover_value(ws, sigma, overflow_policy=resolved["policy"])
                except informativity.NotInformativeError:
                    return float("nan")
                worst = max(worst, abs(s.M0 - ref) / abs(ref))
            return worst

        try:
            kappa = informativity.recover_value(ws, sigma_fixed, overflow_policy=resolved["policy"]).kappa
        except informativity.NotInformativeError:
            kappa = float("nan")
        rows.append([nhat, kappa, max_err(circle, true_circle), max_err(d * circle, true_outer)])

    _write_csv(
        Path(args.out) / "error_vs_nhat.csv",
        ["nhat", "kappa", "rel_error_modulus1", "rel_error_modulusd"],
        [[str(int(r[0]))] + [_fmt_cell(x) for x in r[1:]] for r in rows],
        cfg_hash,
    )
    print(f"wrote error_vs_nhat.csv ({len(rows)} rows)")
    return EXIT_OK


def _benchmark_model(resolved, seed: int):
    name = resolved["benchmark"]
    if name == "advection":
        return lti.advection_fd_model(int(resolved["n"]), resolved["a"], resolved["fs"])
    if name == "random":
        return lti.random_stable_system(int(resolved["n"]), resolved["radius"], seed)
    raise ValueError(f"unknown benchmark {name!r}")


def _cmd_h2_convergence(args) -> int:
    defaults = {
        "benchmark": "advection",
        "n": 200,
        "a": 20.0,
        "fs": 1e4,
        "radius": 0.9,
        "length": 2000,
        "nhat": 400,
        "r_min": 4,
        "r_max": 20,
        "r_step": 2,
        "max_iterations": 100,
        "tol": 1e-6,
        "quad_tol": 1e-9,
    }
    # full-scale advection needs the sampling rate raised with n to stay CFL-safe
    resolved = _resolve(
        args, defaults, {"n": 1000, "fs": 4e4, "length": 10000, "nhat": 600, "r_max": 30}
    )
    cfg_hash = resolved.config_hash

    fom = _benchmark_model(resolved, args.seed)
    u = _make_input("gaussian", int(resolved["length"]), 1.0, args.seed)
    data = lti.simulate(fom, u)
    ws = informativity.build_workspace(data, int(resolved["nhat"]))
    ev = lti.TransferEvaluator(fom)

    rows = []
    all_converged = True
    r_grid = range(int(resolved["r_min"]), int(resolved["r_max"]) + 1, int(resolved["r_step"]))
    for r in r_grid:
        config = irka.IrkaConfig(
            r=r,
            max_iterations=int(resolved["max_iterations"]),
            convergence_tol=resolved["tol"],
            nhat=int(resolved["nhat"]),
        )
        rep_tf = irka.tf_irka(fom, config)
        rep_td = irka.td_irka(data, config, workspace=ws)
        err_tf = h2.relative_h2_error(ev.value, rep_tf.rom.transfer_value, resolved["quad_tol"])
        err_td = h2.relative_h2_error(ev.value, rep_td.rom.transfer_value, resolved["quad_tol"])
        all_converged = all_converged and rep_tf.converged and rep_td.converged
        rows.append([str(r), _fmt_cell(err_tf), _fmt_cell(err_td), str(rep_tf.iterations), str(rep_td.iterations)])
        print(f"r={r}: err_tf={float(rows[-1][1]):.3e} err_td={float(rows[-1][2]):.3e}")

    _write_csv(
        Path(args.out) / "h2_convergence.csv",
        ["r", "err_tf", "err_td", "iters_tf", "iters_td"],
        rows,
        cfg_hash,
    )
    print(f"wrote h2_convergence.csv ({len(rows)} rows, all_converged={all_converged})")
    return EXIT_OK


def _cmd_heat_trajectory(args) -> int:
    defaults = {
        "n": 100,
        "Cp": 0.896,
        "rho": 2700.0,
        "K0": 167.0,
        "output_x": 0.8,
        "fs": 1e3,
        "duration": 4.0,
        "order": 4,
        "nhat": 200,
        "test_frequency": 10.0,
        "test_amplitude": 10.0,
        "max_iterations": 100,
        "tol": 1e-6,
    }
    resolved = _resolve(args, defaults, {"n": 200, "nhat": 400})
    cfg_hash = resolved.config_hash

    fom = lti.heat_fd_model(
        int(resolved["n"]), resolved["Cp"], resolved["rho"], resolved["K0"], resolved["output_x"], resolved["fs"]
    )
    T = int(round(resolved["duration"] * resolved["fs"]))
    u_train = _make_input("gaussian", T, 1.0, args.seed)
    train = lti.simulate(fom, u_train)

    config = irka.IrkaConfig(
        r=int(resolved["order"]),
        max_iterations=int(resolved["max_iterations"]),
        convergence_tol=resolved["tol"],
        nhat=int(resolved["nhat"]),
    )
    report = irka.td_irka(train, config)
    rom_sys = report.rom.to_discrete_lti()

    t = np.arange(T + 1) / resolved["fs"]
    u_test = _sawtooth(t, resolved["test_frequency"], resolved["test_amplitude"])
    y_test = lti.simulate(fom, u_test).Y
    y_td = lti.simulate(rom_sys, u_test).Y

    out = Path(args.out)
    loewner.save_rom(report.rom, out / "rom.json")
    sidecar = {
        "config_hash": cfg_hash,
        "train_input": f"gaussian(seed={args.seed})",
        "test_input": f"sawtooth(frequency={resolved['test_frequency']},amplitude={resolved['test_amplitude']})",
        "converged": report.converged,
        "iterations": report.iterations,
        "max_abs_error": float(np.max(np.abs(y_test - y_td))),
    }
    (out / "heat_trajectory.json").write_text(json.dumps(sidecar, indent=1) + "\n")
    rows = [
        [str(k), _fmt_cell(y_test[k]), _fmt_cell(y_td[k]), _fmt_cell(abs(y_test[k] - y_td[k]))]
        for k in range(T + 1)
    ]
    _write_csv(out / "heat_trajectory.csv", ["k", "y_test", "y_td", "abs_error"], rows, cfg_hash)
    print(f"wrote heat_trajectory.csv, max |y_test - y_td| = {sidecar['max_abs_error']:.3e}")
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


# -- entry point ----------------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--out", default=".")
    sub.add_argument("--config", default=None, help="JSON file overriding command defaults")
    sub.add_argument("--full-scale", action="store_true", help="use full experiment sizes")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ddrom", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("simulate", help="simulate a system and write u/y CSV trajectories")
    _add_common(p)
    p.add_argument("--system")
    p.add_argument("--length", type=int)
    p.add_argument("--input", choices=["gaussian", "impulse", "zero"])
    p.add_argument("--amplitude", type=float)
    p.add_argument("--prefix")

    p = subs.add_parser("recover", help="recover transfer values/derivatives at given points")
    _add_common(p)
    p.add_argument("--system")
    p.add_argument("--length", type=int)
    p.add_argument("--input", choices=["gaussian", "impulse", "zero"])
    p.add_argument("--amplitude", type=float)
    p.add_argument("--data-u", help="CSV with input trajectory (k,u)")
    p.add_argument("--data-y", help="CSV with output trajectory (k,y)")
    p.add_argument("--nhat", type=int)
    p.add_argument("--policy", choices=["scaled", "halve-nhat"])
    p.add_argument("--no-derivative", dest="derivative", action="store_false", default=None)
    p.add_argument("--sigma", action="append", help="complex point, e.g. '1.5+0.5j' (repeatable)")

    p = subs.add_parser("tfirka", help="oracle-driven fixed point on a known system")
    _add_common(p)
    p.add_argument("--system")
    p.add_argument("--order", type=int)
    p.add_argument("--max-iterations", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--radius", type=float)

    p = subs.add_parser("tdirka", help="data-driven fixed point on a single trajectory")
    _add_common(p)
    p.add_argument("--system")
    p.add_argument("--length", type=int)
    p.add_argument("--input", choices=["gaussian", "impulse", "zero"])
    p.add_argument("--amplitude", type=float)
    p.add_argument("--data-u")
    p.add_argument("--data-y")
    p.add_argument("--order", type=int)
    p.add_argument("--nhat", type=int)
    p.add_argument("--max-iterations", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--radius", type=float)
    p.add_argument("--policy", choices=["scaled", "halve-nhat"])

    p = subs.add_parser("cond-vs-radius", help="condition number of the recovery matrix vs |sigma|")
    _add_common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--radius", type=float)
    p.add_argument("--t-factor", type=int)
    p.add_argument("--nhat", type=int)
    p.add_argument("--omega", type=float)
    p.add_argument("--d-min", type=float)
    p.add_argument("--d-max", type=float)
    p.add_argument("--d-step", type=float)

    p = subs.add_parser("error-vs-nhat", help="recovery error and conditioning vs working order")
    _add_common(p)
    p.add_argument("--benchmark", choices=["modes", "random"])
    p.add_argument("--n", type=int)
    p.add_argument("--radius", type=float)
    p.add_argument("--damping", type=float)
    p.add_argument("--length", type=int)
    p.add_argument("--d", type=float)
    p.add_argument("--sigma-count", type=int)
    p.add_argument("--nhat-max-power", type=int)
    p.add_argument("--policy", choices=["scaled", "halve-nhat"])

    p = subs.add_parser("h2-convergence", help="paired oracle/data reduction errors over orders")
    _add_common(p)
    p.add_argument("--benchmark", choices=["advection", "random"])
    p.add_argument("--n", type=int)
    p.add_argument("--a", type=float)
    p.add_argument("--fs", type=float)
    p.add_argument("--radius", type=float)
    p.add_argument("--length", type=int)
    p.add_argument("--nhat", type=int)
    p.add_argument("--r-min", type=int)
    p.add_argument("--r-max", type=int)
    p.add_argument("--r-step", type=int)
    p.add_argument("--max-iterations", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--quad-tol", type=float)

    p = subs.add_parser("heat-trajectory", help="train on random flux data, test on a sawtooth")
    _add_common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--Cp", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--K0", type=float)
    p.add_argument("--output-x", dest="output_x", type=float)
    p.add_argument("--fs", type=float)
    p.add_argument("--duration", type=float)
    p.add_argument("--order", type=int)
    p.add_argument("--nhat", type=int)
    p.add_argument("--test-frequency", type=float)
    p.add_argument("--test-amplitude", type=float)
    p.add_argument("--max-iterations", type=int)
    p.add_argument("--tol", type=float)

    return parser


_HANDLERS = {
    "simulate": _cmd_simulate,
    "recover": _cmd_recover,
    "tfirka": _cmd_tfirka,
    "tdirka": _cmd_tdirka,
    "cond-vs-radius": _cmd_cond_vs_radius,
    "error-vs-nhat": _cmd_error_vs_nhat,
    "h2-convergence": _cmd_h2_convergence,
    "heat-trajectory": _cmd_heat_trajectory,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    Path(args.out).mkdir(parents=True, exist_ok=True)
    try:
        return _HANDLERS[args.command](args)
    except informativity.NotInformativeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_INFORMATIVE
    except (ValueError, OSError, h2.QuadratureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
