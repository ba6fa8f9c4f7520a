"""Command-line front end.

    prflow stationary --config run.toml
    prflow evolve     --config run.toml [--backend both] [--theta 0.25,0.5,0.75]
    prflow eigenflow  --config run.toml
    prflow ferus P N | --rho N | --ferus-number L
    prflow sweep      --config sweep.toml
    prflow verify

Every command that writes files puts them under OUT/RUN_ID together with
``manifest.json``.  Exit codes: 0 success, 1 configuration error,
2 computation error (or failed checks for ``verify``).
"""
import argparse
from concurrent.futures import ProcessPoolExecutor
import hashlib
import json
import math
import os
from pathlib import Path
import shutil
import sys
import time

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import kernels
from .bounds import DEFAULT_THETAS, divergence_rate, resonance_bound, subcritical_bound
from .eigenflow import EigenFlowState, blow_up_time, eigen_closed_form, eigen_rk4, ric_n_margin
from .errors import ConfigError, MissingSolution, NonPositiveWarping, PRFError, TooShort
from .flow import BoundaryData, Constant, ExponentialApproach, FlowConfig, Tabulated, evolve, lift_U
from .geometry import (WarpedProductMetric, check_A_evolution, check_rN_evolution,
                       check_tau1_evolution, curvature_snapshot)
from .stationary import (Regime, critical_phi, is_resonant, stationary_residual,
                         stationary_solution)
from .topology import adams_rho, ferus_check, ferus_number

CSV_VERSION = "prflow-csv v1"
EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE = 0, 1, 2


# ---------------------------------------------------------------------------
# output helpers


class RunDir:
    """Output directory of one run; records every file written."""

    def __init__(self, root, run_id, force=False):
        self.path = Path(root) / run_id
        self.run_id = run_id
        if self.path.exists() and any(self.path.iterdir()):
            if not force:
                raise ConfigError(f"run directory {self.path} exists; use --force to overwrite")
            shutil.rmtree(self.path)
        self.path.mkdir(parents=True, exist_ok=True)
        self.files = []

    def _register(self, name):
        self.files.append(name)
        return self.path / name

    def csv(self, name, kind, columns, rows):
        path = self._register(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        write_csv(path, kind, columns, rows)

    def json(self, name, obj):
        path = self._register(name)
        path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")

    def text(self, name, content):
        self._register(name).write_text(content)

    def manifest(self, command, params, started, checks=None, flags=None):
        doc = {
            "run_id": self.run_id,
            "command": command,
            "parameters": params,
            "files": sorted(self.files),
            "duration_s": round(time.perf_counter() - started, 6),
            "checks": checks or {},
            "flags": flags or {},
            "kernel_backend": kernels.BACKEND,
        }
        (self.path / "manifest.json").write_text(
            json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n")
        return doc


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"not serialisable: {type(obj)}")


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    v = float(v)
    return "nan" if math.isnan(v) else repr(v)


def write_csv(path, kind, columns, rows):
    """Header comment with schema version, header row, then data rows."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# {CSV_VERSION} kind={kind}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_csv(path):
    """Inverse of write_csv: (kind, columns, float array)."""
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().strip()
        if not first.startswith(f"# {CSV_VERSION}"):
            raise ValueError(f"{path}: not a {CSV_VERSION} file")
        kind = first.split("kind=", 1)[1]
        columns = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return kind, columns, data


PLOT_TEMPLATE = '''"""Plot snapshots of {csv}: python3 {script}"""
import matplotlib.pyplot as plt
import numpy as np

data = np.loadtxt("{csv}", delimiter=",", skiprows=2)
t, x, phi = data[:, 0], data[:, 1], data[:, 2]
times = np.unique(t)
pick = times[np.linspace(0, len(times) - 1, min(8, len(times))).astype(int)]
for s in pick:
    sel = t == s
    plt.plot(x[sel], phi[sel], label=f"t={{s:.3g}}")
plt.xlabel("x")
plt.ylabel("phi")
plt.legend()
plt.savefig("{png}", dpi=120)
'''


# ---------------------------------------------------------------------------
# configuration


def load_config(path):
    if path is None:
        raise ConfigError("--config is required for this command")
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    try:
        return tomllib.loads(raw.decode("utf-8")), raw
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None


def _section(cfg, name, required=True):
    sec = cfg.get(name)
    if sec is None:
        if required:
            raise ConfigError(f"missing [{name}] section")
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(f"[{name}] must be a table")
    return sec


def _num(sec, key, default=None, kind=float):
    if key not in sec:
        if default is None:
            raise ConfigError(f"missing key {key!r}")
        return default
    v = sec[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key!r} must be a number, got {v!r}")
    if kind is int:
        if int(v) != v:
            raise ConfigError(f"{key!r} must be an integer, got {v!r}")
        return int(v)
    v = float(v)
    if not math.isfinite(v):
        raise ConfigError(f"{key!r} must be finite")
    return v


def parse_family(sec):
    family = sec.get("family", "constant")
    if family == "constant":
        return Constant(_num(sec, "mu_tilde"))
    if family == "exponential":
        return ExponentialApproach(_num(sec, "mu_tilde"), _num(sec, "delta0"), _num(sec, "rate"))
    if family == "tabulated":
        try:
            return Tabulated(tuple(sec["times"]), tuple(sec["values"]))
        except KeyError as exc:
            raise ConfigError(f"tabulated boundary needs {exc}") from None
    raise ConfigError(f"unknown boundary family {family!r}")


def parse_boundary(sec):
    if "left" not in sec or "right" not in sec:
        raise ConfigError("[boundary] needs left and right tables")
    return BoundaryData(parse_family(sec["left"]), parse_family(sec["right"]))


def _phi_value(sec, l):
    if "phi_factor" in sec:
        return _num(sec, "phi_factor") * critical_phi(l)
    return _num(sec, "phi")


def initial_profile(init, phi_param, l, n, m, bd):
    """phi0 = base + bump x (l - x) + sum amp sin(k pi x / l).

    base ``stationary`` is phi_tilde + U(0, .); base ``linear`` interpolates
    the boundary values at t = 0.  Both match the boundary data."""
    x = np.linspace(0.0, l, m + 1)
    base = init.get("base", "stationary")
    m0, m1 = (float(v) for v in bd.mu(0.0))
    if base == "stationary":
        st = stationary_solution(phi_param, l, *bd.mu_tilde)
        if st.phi_tilde is None:
            raise ConfigError(f"no stationary profile in regime {st.regime.value}; use base = 'linear'")
        phi = st.phi_tilde(x) + lift_U(bd, 0.0, x, l)
    elif base == "linear":
        phi = m0 + (m1 - m0) * x / l
    else:
        raise ConfigError(f"unknown initial base {base!r}")
    phi = phi + _num(init, "bump", 0.0) * x * (l - x)
    for entry in init.get("sine", []):
        if not isinstance(entry, list) or len(entry) != 2:
            raise ConfigError("sine entries are [mode, amplitude] pairs")
        k, amp = int(entry[0]), float(entry[1])
        phi = phi + amp * np.sin(np.pi * k * x / l)
    phi[0], phi[-1] = m0, m1
    return WarpedProductMetric(l, n, phi)


def parse_flow(cfg, backend_override=None):
    flow = _section(cfg, "flow")
    l = _num(flow, "l", 1.0)
    if l <= 0:
        raise ConfigError("l must be positive")
    n = _num(flow, "n", 1, int)
    phi_param = _phi_value(flow, l)
    m = _num(flow, "m", 200, int)
    J = flow.get("J")
    fc = FlowConfig(phi_param=phi_param, t_end=_num(flow, "t_end"), dt=_num(flow, "dt"), m=m,
                    backend=backend_override or flow.get("backend", "fd"),
                    J=None if J is None else int(J),
                    snapshot_stride=_num(flow, "snapshot_stride", 1, int))
    bd = parse_boundary(_section(cfg, "boundary"))
    phi0 = initial_profile(_section(cfg, "initial", required=False), phi_param, l, n, m, bd)
    return phi0, bd, fc


def _parse_thetas(text, cfg_list):
    if text:
        try:
            vals = [float(s) for s in text.split(",") if s.strip()]
        except ValueError:
            raise ConfigError(f"--theta must be a comma-separated list of numbers, got {text!r}") from None
    else:
        vals = list(cfg_list) if cfg_list is not None else list(DEFAULT_THETAS)
    if not vals or any(not 0.0 < v < 1.0 for v in vals):
        raise ConfigError("theta values must lie in (0, 1)")
    return vals


# ---------------------------------------------------------------------------
# commands


def cmd_stationary(args, cfg, run):
    sec = _section(cfg, "stationary")
    l = _num(sec, "l", 1.0)
    phi_param = _phi_value(sec, l)
    m = _num(sec, "m", 1000, int)
    res = stationary_solution(phi_param, l, _num(sec, "mu0"), _num(sec, "mu1"),
                              sec.get("family_C"))
    report = {"regime": res.regime.value, "stable_under_flow": res.stable_under_flow,
              "phi_param": phi_param, "l": l, "critical_phi": critical_phi(l),
              "family_param": res.family_param}
    if res.regime == Regime.RESONANCE_UNSOLVABLE:
        run.json("report.json", report)
        raise MissingSolution("no stationary solution at resonance unless mu1 = -mu0")
    x = np.linspace(0.0, l, m + 1)
    run.csv("stationary.csv", "stationary", ["x", "phi_tilde"], zip(x, res.phi_tilde(x)))
    report["residual"] = stationary_residual(res, phi_param, m)
    run.json("report.json", report)
    return {"residual": report["residual"]}, {"regime": res.regime.value}


def _trajectory_rows(tr):
    for k, t in enumerate(tr.times):
        for x, v in zip(tr.x, tr.values[k]):
            yield (t, x, v)


def _exact_solution(cfg, phi0, bd):
    """Closed-form solution when the data are pure sine modes with zero
    constant boundaries; None otherwise."""
    init = cfg.get("initial", {})
    if not all(isinstance(f, Constant) and f.mu_tilde == 0.0 for f in bd.families):
        return None
    if init.get("bump", 0.0) != 0.0 or not init.get("sine"):
        return None
    l = phi0.l
    flow_phi = _phi_value(cfg["flow"], l)
    modes = [(int(k), float(a)) for k, a in init["sine"]]

    def exact(t, x):
        return sum(a * math.exp((flow_phi - (math.pi * k / l) ** 2) * t) * np.sin(math.pi * k * x / l)
                   for k, a in modes)
    return exact


def _identity_checks(tr, trim, t_min):
    try:
        a = check_A_evolution(tr, trim=trim, t_min=t_min)
        tau = check_tau1_evolution(tr, trim=trim, t_min=t_min)
        rho = check_rN_evolution(tr, trim=trim, t_min=t_min)
    except (PRFError, ValueError) as exc:
        return {"error": f"{type(exc).__name__}: {exc}"}
    return {
        "trim": trim, "t_min": t_min,
        "A": {"sup": a.residual.sup, "l2": a.residual.l2},
        "tau1_transport": {"sup": tau.transport.residual.sup, "l2": tau.transport.residual.l2},
        "tau1_heat": {"sup": tau.heat.residual.sup, "l2": tau.heat.residual.l2},
        "tau1_forms_gap": tau.forms_gap,
        "rho": {"sup": rho.residual.sup, "l2": rho.residual.l2},
    }


def _curvature_rows(tr):
    for k, t in enumerate(tr.times):
        snap = curvature_snapshot(WarpedProductMetric(tr.l, tr.n, tr.values[k]))
        for i, x in enumerate(tr.x):
            yield (t, x, snap.a[i], snap.rho[i], snap.tau1[i], snap.ric_n[i])


def _bound_reports(tr, bd, thetas, corrected=False):
    l, phi_param = tr.l, tr.phi_param
    if phi_param < critical_phi(l) and not is_resonant(phi_param, l):
        kind, fn = "subcritical", lambda th: subcritical_bound(tr, bd, phi_param, theta=th, corrected=corrected)
    elif is_resonant(phi_param, l):
        kind, fn = "resonance", lambda th: resonance_bound(tr, bd, theta=th, corrected=corrected)
    else:
        return None, [], "supercritical: no stability estimate"
    try:
        return kind, [fn(th) for th in thetas], None
    except PRFError as exc:
        return kind, [], f"{type(exc).__name__}: {exc}"


def cmd_evolve(args, cfg, run):
    phi0, bd, fc = parse_flow(cfg, args.backend)
    checks_cfg = _section(cfg, "checks", required=False)
    thetas = _parse_thetas(args.theta, checks_cfg.get("thetas"))
    trajectories = evolve(phi0, bd, fc)
    checks, flags = {}, {}
    for name, tr in trajectories.items():
        run.csv(f"trajectory_{name}.csv", "trajectory", ["t", "x", "phi"], _trajectory_rows(tr))
        run.text(f"plot_{name}.py", PLOT_TEMPLATE.format(
            csv=f"trajectory_{name}.csv", script=f"plot_{name}.py", png=f"trajectory_{name}.png"))
        flags[f"{name}_diverged"] = tr.diverged
        if tr.diverged:
            flags[f"{name}_divergence_time"] = tr.divergence_time
    primary = trajectories.get("fd") or trajectories["spectral"]

    exact = _exact_solution(cfg, phi0, bd)
    if exact is not None:
        for name, tr in trajectories.items():
            err = float(np.max(np.abs(tr.values[-1] - exact(tr.times[-1], tr.x))))
            checks[f"{name}_final_sup_error"] = err
    if len(trajectories) == 2:
        fd, sp = trajectories["fd"], trajectories["spectral"]
        k = min(len(fd.times), len(sp.times))
        checks["cross_backend_sup_distance"] = float(np.max(np.abs(fd.values[:k] - sp.values[:k])))

    if checks_cfg.get("curvature", True):
        try:
            run.csv("curvature.csv", "curvature", ["t", "x", "a", "rho", "tau1", "ric_n"],
                    list(_curvature_rows(primary)))
        except NonPositiveWarping as exc:
            flags["curvature_skipped"] = str(exc)
            run.files.remove("curvature.csv")
            (run.path / "curvature.csv").unlink(missing_ok=True)
    if checks_cfg.get("identities", True):
        run.json("identities.json", _identity_checks(
            primary, float(checks_cfg.get("trim", 0.1)), float(checks_cfg.get("t_min", 0.1))))
    if checks_cfg.get("bounds", True):
        kind, reports, reason = _bound_reports(primary, bd, thetas)
        if reports:
            rows = [(r.theta,) + row for r in reports for row in r.rows()]
            run.csv("bounds.csv", f"bounds-{kind}", ["theta", "t", "observed", "bound", "margin"], rows)
            checks["bound_min_margin"] = {str(r.theta): float(np.min(r.margin)) for r in reports}
            scale = max(1.0, float(np.max(np.abs(primary.values))))
            checks["bound_holds"] = all(r.holds(scale=scale) for r in reports)
            # the uncorrected estimate lacks sqrt(2/l) on ||v0||; record the corrected one too
            _, fixed, _ = _bound_reports(primary, bd, thetas, corrected=True)
            checks["corrected_bound_holds"] = all(r.holds(scale=scale) for r in fixed)
        if reason:
            flags["bounds_skipped"] = reason
    try:
        fit = divergence_rate(primary)
        checks["divergence"] = {"kind": fit.kind, "rate": fit.rate, "slope": fit.slope}
    except TooShort as exc:
        flags["divergence_fit_skipped"] = str(exc)
    return checks, flags


def cmd_eigenflow(args, cfg, run):
    sec = _section(cfg, "eigenflow")
    mus = sec.get("mus")
    if not isinstance(mus, list) or not mus:
        raise ConfigError("[eigenflow] needs a nonempty list 'mus'")
    phi_param = _num(sec, "phi")
    state = EigenFlowState(tuple(float(v) for v in mus), phi_param, _num(sec, "n", len(mus), int))
    t0, t1 = _num(sec, "t_start", 0.0), _num(sec, "t_end")
    samples = _num(sec, "samples", 201, int)
    if samples < 2 or t1 <= t0:
        raise ConfigError("need samples >= 2 and t_end > t_start")
    times = np.linspace(t0, t1, samples)
    flags, checks = {}, {}
    stars = [s for s in (blow_up_time(mu, phi_param) for mu in state.mus) if s is not None]
    if stars:
        t_star = min(stars)
        flags["blow_up_time"] = t_star
        times = times[times < t_star]
        if times.size == 0:
            raise PRFError(f"BlowUp before the first sample time: t* = {t_star}")
    mu = np.array([eigen_closed_form(m, phi_param, times) for m in state.mus])
    ric = mu.sum(axis=0)
    margin = ric_n_margin(state, times)
    cols = ["t"] + [f"mu_{i + 1}" for i in range(mu.shape[0])] + \
        [f"theta_{i + 1}" for i in range(mu.shape[0])] + ["ric_n", "ric_n_margin"]
    rows = np.column_stack([times, mu.T, np.sqrt(mu.T), ric, margin])
    run.csv("eigenflow.csv", "eigenflow", cols, rows)
    checks["ric_n_margin_min"] = float(np.min(margin))
    if sec.get("rk4", True) and t0 == 0.0:
        dt = _num(sec, "rk4_dt", 1e-3)
        steps = int(math.ceil(times[-1] / dt - 1e-9))
        worst = 0.0
        for m0 in state.mus:
            r = eigen_rk4(m0, phi_param, dt, steps)
            ok = r.times <= times[-1] + 1e-12
            ref = eigen_closed_form(m0, phi_param, r.times[ok])
            worst = max(worst, float(np.max(np.abs(r.values[ok] - ref))))
        checks["rk4_max_abs_diff"] = worst
    return checks, flags


def cmd_ferus(args):
    try:
        if args.rho is not None:
            d = adams_rho(args.rho)
            print(f"rho({d.n}) = {d.rho}  (n = {d.odd_part} * 2^(4*{d.d} + {d.c}))")
        elif args.ferus_number is not None:
            if args.ferus_number < 2:
                raise ValueError("Ferus number needs l >= 2")
            print(ferus_number(args.ferus_number))
        elif args.p is not None and args.n is not None:
            if args.p < 1 or args.n < 1:
                raise ValueError("p and n must be positive")
            print("true" if ferus_check(args.p, args.n) else "false")
        else:
            raise ValueError("give P N, --rho N or --ferus-number L")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


# sweep ---------------------------------------------------------------------


def classify(divergence_kind, diverged, perturbation_ratio):
    """Trichotomy from observables: growth means divergence; a bounded run
    converges if a perturbation of the initial data dies out (single point
    attractor) and is resonant if the perturbation persists."""
    if diverged or divergence_kind in ("Exponential", "Linear"):
        return "diverge"
    if perturbation_ratio <= 0.1:
        return "converge"
    if perturbation_ratio >= 0.5:
        return "resonance"
    return "undecided"


def _sweep_worker(job):
    index, phi_param, l, bname, bsec, flow, init, eps, outdir = job
    row = {"index": index, "phi": phi_param, "l": l, "phi_over_critical": phi_param / critical_phi(l),
           "boundary": bname, "classification": "error", "kind": "", "rate": math.nan,
           "slope": math.nan, "perturbation_ratio": math.nan, "error": ""}
    try:
        bd = parse_boundary(bsec)
        m = int(flow.get("m", 100))
        fc = FlowConfig(phi_param, float(flow["t_end"]), float(flow["dt"]), m, "fd",
                        snapshot_stride=int(flow.get("snapshot_stride", 10)))
        phi0 = initial_profile(init, phi_param, l, 1, m, bd)
        x = phi0.x
        bumped = WarpedProductMetric(l, 1, phi0.phi + eps * np.sin(np.pi * np.minimum(x, l - x) / l))
        tr = evolve(phi0, bd, fc)["fd"]
        tr2 = evolve(bumped, bd, fc)["fd"]
        fit = divergence_rate(tr)
        k = min(len(tr.times), len(tr2.times)) - 1
        ratio = float(np.max(np.abs(tr.values[k] - tr2.values[k]))) / eps
        row.update(kind=fit.kind, rate=fit.rate, slope=fit.slope, perturbation_ratio=ratio,
                   classification=classify(fit.kind, tr.diverged or tr2.diverged, ratio))
        path = Path(outdir) / f"trajectory_{index:03d}.csv"
        write_csv(path, "trajectory", ["t", "x", "phi"], _trajectory_rows(tr))
        row["file"] = path.name
    except (PRFError, ValueError, KeyError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


SWEEP_COLUMNS = ["index", "phi", "l", "phi_over_critical", "boundary", "classification", "kind",
                 "rate", "slope", "perturbation_ratio", "error"]


def cmd_sweep(args, cfg, run):
    sec = _section(cfg, "sweep")
    flow = _section(cfg, "flow")
    init = _section(cfg, "initial", required=False) or {"base": "linear", "bump": 0.3}
    ls = [float(v) for v in sec.get("l", [1.0])]
    boundaries = sec.get("boundaries") or [{"name": "zero", "left": {"family": "constant", "mu_tilde": 0.0},
                                            "right": {"family": "constant", "mu_tilde": 0.0}}]
    for b in boundaries:
        parse_boundary(b)
    if "phi_factor" in sec:
        grid = [(f * critical_phi(l), l) for l in ls for f in sec["phi_factor"]]
    elif "phi" in sec:
        grid = [(float(p), l) for l in ls for p in sec["phi"]]
    else:
        raise ConfigError("[sweep] needs 'phi' or 'phi_factor'")
    for key in ("t_end", "dt"):
        _num(flow, key)
    eps = _num(sec, "perturbation", 0.05)
    runs_dir = run.path / "runs"
    runs_dir.mkdir(exist_ok=True)
    jobs = []
    for phi_param, l in grid:
        for b in boundaries:
            jobs.append((len(jobs), phi_param, l, str(b.get("name", f"b{len(jobs)}")),
                         {"left": b["left"], "right": b["right"]}, flow, init, eps, str(runs_dir)))
    workers = _num(sec, "workers", min(4, os.cpu_count() or 1), int)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_worker, jobs))
    else:
        rows = [_sweep_worker(j) for j in jobs]
    rows.sort(key=lambda r: r["index"])
    for r in rows:
        if "file" in r:
            run.files.append(f"runs/{r['file']}")
    run.csv("summary.csv", "sweep-summary", SWEEP_COLUMNS,
            ([r[c] if isinstance(r[c], str) else r[c] for c in SWEEP_COLUMNS] for r in rows))
    checks = {"classification": {str(r["index"]): r["classification"] for r in rows}}
    flags = {"failed_runs": sum(1 for r in rows if r["error"])}
    if rows and flags["failed_runs"] == len(rows):
        raise PRFError("all sweep runs failed")
    return checks, flags


def cmd_verify(args, cfg, run):
    from .verify import run_suite
    results = run_suite()
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.value:.3e} (threshold {r.threshold:g}) {r.detail}")
    run.json("verify.json", [r.as_dict() for r in results])
    checks = {r.name: r.passed for r in results}
    return checks, {"all_passed": all(checks.values())}


COMMANDS = {
    "stationary": cmd_stationary,
    "evolve": cmd_evolve,
    "eigenflow": cmd_eigenflow,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------------------
# entry point


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML run configuration")
    common.add_argument("--out", default="runs", help="output root directory (default: runs)")
    common.add_argument("--run-id", help="run directory name (default: derived from the config)")
    common.add_argument("--force", action="store_true", help="overwrite an existing run directory")
    common.add_argument("--theta", help="comma-separated split parameters for the bounds")
    common.add_argument("--backend", choices=("fd", "spectral", "both"), help="override the flow backend")

    parser = argparse.ArgumentParser(prog="prflow", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("stationary", "evolve", "eigenflow", "sweep", "verify"):
        sub.add_parser(name, parents=[common])
    fer = sub.add_parser("ferus", help="Ferus inequality, Adams and Ferus numbers")
    fer.add_argument("p", nargs="?", type=int)
    fer.add_argument("n", nargs="?", type=int)
    fer.add_argument("--rho", type=int, metavar="N", help="print the Adams number rho(N)")
    fer.add_argument("--ferus-number", type=int, metavar="L", help="print F(L)")
    return parser


def _default_run_id(command, raw):
    if raw is None:
        return command
    return f"{command}-{hashlib.sha1(raw).hexdigest()[:10]}"


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.command == "ferus":
        return cmd_ferus(args)
    started = time.perf_counter()
    try:
        if args.command == "verify" and args.config is None:
            cfg, raw = {}, None
        else:
            cfg, raw = load_config(args.config)
        run = RunDir(args.out, args.run_id or _default_run_id(args.command, raw), args.force)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        checks, flags = COMMANDS[args.command](args, cfg, run)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        run.manifest(args.command, cfg, started, flags={"error": str(exc)})
        return EXIT_CONFIG
    except PRFError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        run.manifest(args.command, cfg, started, flags={"error": f"{type(exc).__name__}: {exc}"})
        return EXIT_COMPUTE
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        run.manifest(args.command, cfg, started, flags={"error": str(exc)})
        return EXIT_CONFIG
    run.manifest(args.command, cfg, started, checks, flags)
    if args.command == "verify" and not flags.get("all_passed", True):
        return EXIT_COMPUTE
    print(f"wrote {run.path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
