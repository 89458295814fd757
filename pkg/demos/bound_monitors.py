"""Evaluate the analytic growth constants and watch the runtime monitors.

The scheme carries sup-norm and total-variation growth estimates whose
constants are computed from the kernel norms, the smoothed-threshold Lipschitz
constant, and discrete norms of the static field and initial data.  This demo
prints those constants for the bound-monitoring configuration and then runs a
short horizon, reporting the observed/bound ratios (in log space the bounds
are astronomically large, so healthy ratios are far below one).
"""

from pathlib import Path

from beltflow.config import parse_config
from beltflow.diagnostics import compute_constants
from beltflow.config import build_scenario, initial_fields
from beltflow.run import run

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def main():
    text = (CONFIG_DIR / "bounds.cfg").read_text()
    text = "\n".join(l for l in text.splitlines() if not l.startswith("output.dir"))
    text = text.replace("t_end = 6", "t_end = 0.5")
    cfg = parse_config(text)

    scenario = build_scenario(cfg)
    fields = initial_fields(cfg, scenario)
    bc = compute_constants(scenario, fields)
    print(f"L_H = {bc.L_H:.4f}   ||v||_inf = {bc.v_inf}   ||r0||_L1 = {bc.r_omega0_l1:.4f}")
    for cid, cc in sorted(bc.per_class.items()):
        print(
            f"class {cid}: eps={cc.epsilon}  C_inf={cc.c_inf:.4e}  "
            f"K1={cc.k1:.4e}  K2={cc.k2:.4e}  TV0={cc.tv0:.4e}"
        )
        print(
            f"          log C_x(t_end)={bc.log_cx(scenario.t_end, cid):.1f}  "
            f"log C_xt(t_end)={bc.log_cxt(scenario.t_end, cid):.1f}"
        )

    print("\nrunning the monitored simulation...")
    archive = run(cfg)
    worst_linf = max(max(r.linf_ratio.values()) for r in archive.records)
    worst_bv = max(max(r.bv_ratio.values()) for r in archive.records)
    worst_bvxt = max(max(r.bvxt_ratio.values()) for r in archive.records)
    print(f"{archive.steps} steps, {len(archive.failures)} failures")
    print(f"worst sup-norm ratio:          {worst_linf:.3e}")
    print(f"worst spatial-variation ratio: {worst_bv:.3e}")
    print(f"worst space-time ratio:        {worst_bvxt:.3e}")


if __name__ == "__main__":
    main()
