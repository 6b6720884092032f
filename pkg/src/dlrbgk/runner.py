"""Run loop: scenario setup, time stepping, diagnostics, snapshots and figures."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io, plotting
from .config import ScenarioConfig
from .errors import ConfigError, NumericalError
from .fluid import FluidState, cfl_number, maccormack_step, vorticity
from .grids import SpatialGrid, VelocityGrid, make_grids
from .integrator import full_step
from .lowrank import LowRankState, constant_state, deviation_from_equilibrium, evaluate_g
from .maxwell import MomentState, build_conv_tables, sigma_u, stress_tensor_P1
from .scenarios import beam_init, epsilon_field, explosion_init, reynolds_to_eps, shear_flow_init

log = logging.getLogger(__name__)

OUTPUT_ENV = "DLRBGK_OUTPUT_DIR"

DIAG_COLUMNS = ("time", "step", "mass", "mom_x", "mom_y", "max_dev", "min_rho", "moment_error", "stress_error")


@dataclass
class RunResult:
    config: ScenarioConfig
    output_dir: Path
    diagnostics: Path
    snapshots: list = field(default_factory=list)
    figures: list = field(default_factory=list)
    moments: MomentState | None = None
    state: LowRankState | None = None


def output_dir(cfg: ScenarioConfig) -> Path:
    return Path(os.environ.get(OUTPUT_ENV) or cfg.output_dir)


def grids(cfg: ScenarioConfig):
    return make_grids(cfg.nx, cfg.ny, cfg.nv, cfg.ax, cfg.bx, cfg.ay, cfg.by, cfg.av, cfg.bv)


def knudsen(cfg: ScenarioConfig, xgrid: SpatialGrid):
    if cfg.eps_mode == "constant":
        return cfg.eps
    if cfg.eps_mode == "reynolds":
        return reynolds_to_eps(cfg.Re, cfg.v0)
    return epsilon_field(xgrid, cfg.eps0).eps


def initial_state(cfg: ScenarioConfig, xgrid: SpatialGrid, vgrid: VelocityGrid):
    s = cfg.scenario
    if s == "shear-flow":
        return shear_flow_init(xgrid, vgrid, cfg.rank, cfg.v0, cfg.Delta, cfg.delta)
    if s == "explosion":
        return explosion_init(xgrid, vgrid, cfg.rank, cfg.R)
    if s in ("beam", "beam-varying-eps"):
        return beam_init(xgrid, vgrid, cfg.rank, cfg.n_b, cfg.v_b, cfg.w_b, cfg.T_b)
    # custom: standing density wave at rest in equilibrium
    X, Y = xgrid.mesh()
    Lx, Ly = xgrid.lengths()
    rho = 1.0 + cfg.amplitude * np.sin(2 * np.pi * (X - xgrid.ax) / Lx) * np.sin(2 * np.pi * (Y - xgrid.ay) / Ly)
    if not np.all(rho > 0):
        raise ConfigError("custom amplitude makes the initial density non-positive")
    return MomentState(rho, np.zeros((2,) + xgrid.shape)), constant_state(cfg.rank, xgrid, vgrid)


def _totals(mom: MomentState, xgrid: SpatialGrid):
    w = xgrid.weight
    m = mom.momentum
    return float(np.sum(mom.rho) * w), float(np.sum(m[0]) * w), float(np.sum(m[1]) * w)


def _check_finite(mom: MomentState, state, step):
    ok = np.all(np.isfinite(mom.rho)) and np.all(np.isfinite(mom.u))
    if state is not None:
        ok = ok and np.all(np.isfinite(state.S))
    if not ok:
        raise NumericalError(f"non-finite values after step {step}")


def _snapshot_steps(cfg: ScenarioConfig):
    steps = {int(round(t / cfg.dt)) for t in cfg.snapshot_times if 0 < t <= cfg.t_end + 0.5 * cfg.dt}
    steps.add(cfg.n_steps)
    return steps


def run(cfg: ScenarioConfig) -> RunResult:
    """Execute a configured run and write diagnostics, snapshots and figures."""
    out = output_dir(cfg)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.txt").write_text(cfg.to_text())
    xgrid, vgrid = grids(cfg)
    eps = knudsen(cfg, xgrid)
    mom, state = initial_state(cfg, xgrid, vgrid)
    fluid = None
    if cfg.solver == "fluid":
        if np.ndim(eps):
            raise ConfigError("the fluid solver needs a constant Knudsen number")
        fluid = FluidState.from_primitive(mom.rho, mom.u)
        state = None
        log.info("CFL number at start: %.3f", cfl_number(fluid, cfg.dt, xgrid))
    else:
        log.info("advisory CFL max|v| dt / dx = %.3f", max(abs(cfg.av), abs(cfg.bv)) * cfg.dt / min(xgrid.dx, xgrid.dy))

    reference = io.read_snapshot(cfg.reference) if cfg.reference else None
    result = RunResult(cfg, out, out / "diagnostics.csv")
    snap_steps = _snapshot_steps(cfg)
    n_steps = cfg.n_steps

    with io.CsvLog(result.diagnostics, DIAG_COLUMNS) as diag:

        def record(step, mom, state):
            t = step * cfg.dt
            mass, mx, my = _totals(mom, xgrid)
            row = dict(time=t, step=step, mass=mass, mom_x=mx, mom_y=my, min_rho=float(np.min(mom.rho)))
            if state is not None:
                row["max_dev"] = deviation_from_equilibrium(state)
                if cfg.stress_diag:
                    table = build_conv_tables(state.V, vgrid)
                    kind = "spectral" if cfg.disc == "spectral" else "central"
                    P1 = stress_tensor_P1(state, mom, table, eps)
                    row["stress_error"] = float(np.max(np.abs(P1 - sigma_u(mom.u, xgrid, kind))))
            if reference is not None and abs(reference.time - t) <= 0.5 * cfg.dt:
                snap = io.Snapshot(t, step, xgrid, {"rho": mom.rho, "u": mom.u})
                row["moment_error"] = io.moment_differences(snap, reference)["moment_error"]
            diag.write(row)

        record(0, mom, state)
        for step in range(1, n_steps + 1):
            if fluid is not None:
                fluid = maccormack_step(fluid, eps, cfg.dt, xgrid, step - 1)
                mom = MomentState(fluid.rho, fluid.u)
            else:
                state, mom = full_step(state, mom, eps, cfg.dt, cfg.disc, cfg.limiter)
            _check_finite(mom, state, step)
            if step % cfg.diag_every == 0 or step == n_steps:
                record(step, mom, state)
            if step in snap_steps:
                path = io.write_snapshot(out / f"snap_{step:07d}", step * cfg.dt, step, mom, xgrid, state,
                                         meta={"scenario": cfg.scenario, "solver": cfg.solver})
                result.snapshots.append(path)

    result.moments, result.state = mom, state
    if cfg.figures:
        result.figures = render_figures(result, xgrid, vgrid)
    return result


def render_figures(result: RunResult, xgrid: SpatialGrid, vgrid: VelocityGrid):
    out = result.output_dir
    figs = []
    header, rows = io.read_csv(result.diagnostics)
    figs.append(plotting.diagnostics(out / "diagnostics.png", header, rows))
    mom = result.moments
    kind = "spectral" if result.config.disc == "spectral" else "central"
    panels = {"rho": mom.rho, "u1": mom.u[0], "u2": mom.u[1], "vorticity": vorticity(mom.u, xgrid, kind)}
    t_end = result.config.n_steps * result.config.dt
    figs.append(plotting.field_panels(out / "fields_final.png", xgrid, panels, f"t = {t_end:g}"))
    if result.state is not None:
        g = evaluate_g(result.state, 0, 0)
        figs.append(plotting.velocity_slice(out / "g_slice_final.png", vgrid, g, f"g(x0, y0, v, w), t = {t_end:g}"))
    return figs
