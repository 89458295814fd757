# run.py
"""The simulation run loop: stepping, monitoring, and persistence."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import diagnostics as diag
from .config import RunConfig, build_scenario, initial_fields
from .grid import Field2D, l1_norm
from .io import (
    NdjsonWriter,
    snapshot_name,
    write_outflow_csv,
    write_snapshot_binary,
    write_snapshot_csv,
)
from .kernels import kernel_norms
from .scheme import CflPolicy, Simulator
from .velocity import verify_kernel_bounds


@dataclass
class SnapshotArchive:
    """In-memory result of one run: snapshots, diagnostics, outflow, failures."""

    times: list = dc_field(default_factory=list)
    snapshots: list = dc_field(default_factory=list)  # list of per-class Field2D
    records: list = dc_field(default_factory=list)  # DiagnosticsRecord per step
    outflow_times: list = dc_field(default_factory=list)
    outflow: list = dc_field(default_factory=list)  # rows of U per class
    failures: list = dc_field(default_factory=list)
    j_evaluations: int = 0
    steps: int = 0


def run(config: RunConfig, progress: bool = False) -> SnapshotArchive:
    """Run a configured simulation to t_end.

    Snapshots are stored every numerics.snapshot_every steps (plus the
    initial and final states); light diagnostics run every step, heavy ones
    (entropy, kernel bounds, boundary invariance) every diagnostics.every
    steps (0 disables them).  Hard bound violations are recorded in
    archive.failures; outputs are still flushed.
    """
    v = config.values
    scenario = build_scenario(config)
    fields = initial_fields(config, scenario)
    policy = CflPolicy(v["numerics.cfl_mode"], v["numerics.cfl_safety"])
    sim = Simulator(
        scenario,
        policy,
        cutoff_stddevs=v["kernel.cutoff_stddevs"],
        method=v["numerics.method"],
    )
    constants = diag.compute_constants(
        scenario,
        fields,
        cutoff_stddevs=v["kernel.cutoff_stddevs"],
        mollify_vstat=v["diagnostics.mollify_vstat"],
    )
    norms = {c.id: kernel_norms(c.sigma) for c in scenario.classes}
    state = sim.initial_state(fields)
    bvxt = diag.BvxtAccumulator(scenario.grid)
    m0 = {c.id: l1_norm(f) for c, f in zip(scenario.classes, fields)}
    obstacle_mask = scenario.obstacle_cell_mask()

    out_dir = Path(v["output.dir"]) if v["output.dir"] else None
    formats = [f.strip() for f in v["output.formats"].split(",")]
    ndjson = None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        ndjson = NdjsonWriter(out_dir / "diagnostics.ndjson")

    archive = SnapshotArchive()

    def snapshot(st):
        archive.times.append(st.t)
        archive.snapshots.append([f.copy() for f in st.fields])
        if out_dir is not None:
            if "csv" in formats:
                write_snapshot_csv(st.t, st.fields, out_dir / snapshot_name(st.n, "csv"))
            if "bin" in formats:
                write_snapshot_binary(st.fields, out_dir / snapshot_name(st.n, "bin"))

    def record_step(st, info, heavy: bool):
        rec = diag.DiagnosticsRecord(
            t=st.t, n=st.n,
            mass={}, min_value={}, max_value={}, linf_ratio={},
            bv_value={}, bv_ratio={}, bvxt_ratio={}, outflow={},
        )
        for c, f in zip(scenario.classes, st.fields):
            cid = c.id
            rec.mass[cid] = l1_norm(f)
            rec.min_value[cid] = float(f.values.min())
            rec.max_value[cid] = float(f.values.max())
            ratio, ok = diag.linf_check(f, constants, cid, st.t)
            rec.linf_ratio[cid] = ratio
            if not ok:
                archive.failures.append(f"linf ratio {ratio:.3e} (class {cid}, n={st.n})")
            rec.bv_value[cid] = diag.bv_seminorm(f)
            ratio, ok = diag.bv_check(f, constants, cid, st.t)
            rec.bv_ratio[cid] = ratio
            if not ok:
                archive.failures.append(f"bv ratio {ratio:.3e} (class {cid}, n={st.n})")
            ratio, ok = bvxt.check(constants, cid, st.t)
            rec.bvxt_ratio[cid] = ratio
            if not ok:
                archive.failures.append(f"bvxt ratio {ratio:.3e} (class {cid}, n={st.n})")
            rec.outflow[cid] = rec.mass[cid] / m0[cid] if m0[cid] > 0 else 0.0
        if heavy and info is not None:
            kappas = diag.kappa_samples(st.fields, scenario.r_max)
            worst = 0.0
            for f_prev, mid, f_new, J in zip(
                prev_fields, info.mids, st.fields, info.velocities
            ):
                scaled, _raw, _arg = diag.entropy_residual(
                    f_prev, mid, f_new.values, sim.v1, sim.v2,
                    J.J1.values, J.J2.values, sim.lam_x, sim.lam_y,
                    kappas, scenario.open_right,
                )
                worst = max(worst, scaled)
            rec.entropy_residual = worst
            if worst > diag.ENTROPY_TOL:
                archive.failures.append(f"entropy residual {worst:.3e} (n={st.n})")
            kmax = 0.0
            for c, J in zip(scenario.classes, info.velocities):
                rep = verify_kernel_bounds(
                    J, info.r, c, norms[c.id], constants.grad_tilde,
                    constants.L_H, scenario.grid,
                )
                kmax = max(kmax, rep.max_ratio())
            rec.kernel_ratio_max = kmax
            if kmax > 1.0 + diag.RATIO_TOL:
                archive.failures.append(f"kernel bound ratio {kmax:.3e} (n={st.n})")
            rec.boundary_violations = diag.boundary_invariance_check(
                scenario, info.velocities
            )
            rec.obstacle_mass = {
                c.id: float(
                    scenario.grid.cell_area * f.values[obstacle_mask].sum()
                )
                for c, f in zip(scenario.classes, st.fields)
            }
        archive.records.append(rec)
        archive.outflow_times.append(st.t)
        archive.outflow.append([rec.outflow[c.id] for c in scenario.classes])
        if ndjson is not None:
            ndjson.write(rec.to_dict())

    every = v["diagnostics.every"]
    n_steps = math.floor(scenario.t_end / sim.dt + 1e-12)
    try:
        snapshot(state)
        record_step(state, None, heavy=False)
        for n in range(1, n_steps + 1):
            prev_fields = [f.values for f in state.fields]
            state, info = sim.step(state)
            for c, before, after, f_new in zip(
                scenario.classes, prev_fields, (f.values for f in state.fields),
                state.fields,
            ):
                bvxt.add(c.id, before, after, f_new, sim.dt)
            heavy = every > 0 and (n % every == 0)
            record_step(state, info, heavy)
            if n % v["numerics.snapshot_every"] == 0 or n == n_steps:
                snapshot(state)
            if progress and n % 200 == 0:
                print(f"step {n}/{n_steps}  t={state.t:.4f}", flush=True)
    finally:
        if out_dir is not None:
            if archive.outflow:
                write_outflow_csv(
                    archive.outflow_times, archive.outflow, out_dir / "outflow.csv"
                )
            if ndjson is not None:
                ndjson.close()
    archive.j_evaluations = sim.j_evaluations
    archive.steps = n_steps
    return archive
