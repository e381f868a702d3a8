"""Timing comparison between the compiled kernels and the pure-Python reference.

Runs three stages:

  fresnel      bulk Fresnel-integral evaluation on a large argument grid
  barrier      one warm barrier solve on the baseline scenario's subproblem
  end-to-end   full SCA solve in a subprocess pinned to each backend

The first two call both kernel modules side by side in this process and
check that they produce the same answer before timing them.  The last one
respects the MFSWIPT_KERNELS import switch, which is only read once per
process, hence the subprocesses.
"""

import argparse
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from mfswipt._kernels import _ref
from mfswipt.config import load_config
from mfswipt.sca import _tight_slacks, initialize
from mfswipt.subproblem import SolverOptions, _interior_start, _scale

try:
    from mfswipt._kernels import _fast
except ImportError:
    _fast = None

REPO = Path(__file__).resolve().parent.parent
BASELINE = REPO / "configs" / "baseline.json"

END_TO_END_SNIPPET = """
import time
from mfswipt import kernel_backend
from mfswipt.config import load_config
from mfswipt.sca import sca_solve

cfg = load_config({config!r})
cp = cfg.build_compact(rate_requirement=8.0)
sca_solve(cp, cfg.sca)  # warmup
t0 = time.perf_counter()
for _ in range({repeats}):
    sca_solve(cp, cfg.sca)
dt = (time.perf_counter() - t0) / {repeats}
print(f"{{kernel_backend}} {{dt * 1e3:.2f}}")
"""


def timed(fn, repeats):
    fn()  # warmup
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def backends():
    out = [("ref", _ref)]
    if _fast is not None:
        out.append(("fast", _fast))
    return out


def bench_fresnel(repeats):
    x = np.linspace(-40.0, 40.0, 200_000)
    results = {name: mod.fresnel_cs(x) for name, mod in backends()}
    if "fast" in results:
        for ref_part, fast_part in zip(results["ref"], results["fast"]):
            worst = np.max(np.abs(ref_part - fast_part))
            assert worst < 1e-12, f"backend mismatch {worst:.3e}"
    print(f"fresnel_cs on {x.size} points:")
    for name, mod in backends():
        dt = timed(lambda m=mod: m.fresnel_cs(x), repeats)
        print(f"  {name:5s} {dt * 1e3:8.2f} ms")


def subproblem_inputs():
    cfg = load_config(str(BASELINE))
    cp = cfg.build_compact(rate_requirement=8.0)
    rp = cp.full_restriction()
    opts = SolverOptions()
    y0 = initialize(rp, opts)
    s0, i0 = _tight_slacks(rp, y0)
    sd = _scale(rp, s0, i0, opts)
    x0 = _interior_start(y0 / rp.power_budget, sd)
    return sd, x0, opts


def bench_barrier(repeats):
    sd, x0, opts = subproblem_inputs()

    def solve(mod):
        return mod.barrier_solve(
            sd.q, sd.id_cols, sd.a_rows, sd.noise_hat, sd.c_s, sd.c_i,
            sd.rate_bound, sd.has_rate, sd.s_max, sd.i_max, x0,
            t0=opts.t_start_warm, mu=opts.barrier_growth,
            gap_tol=opts.gap_tolerance,
        )

    results = {name: solve(mod) for name, mod in backends()}
    if "fast" in results:
        x_ref, x_fast = results["ref"][0], results["fast"][0]
        worst = np.max(np.abs(x_ref - x_fast) / np.maximum(np.abs(x_ref), 1e-30))
        assert worst < 1e-9, f"backend mismatch {worst:.3e}"
    print("barrier_solve on the baseline subproblem (5 beams, 2 ID, R=8):")
    for name, mod in backends():
        dt = timed(lambda m=mod: solve(m), repeats)
        print(f"  {name:5s} {dt * 1e3:8.2f} ms")


def bench_end_to_end(repeats):
    print(f"full SCA solve, per-backend subprocess ({repeats} repeats):")
    for name, _ in backends():
        env = dict(os.environ, MFSWIPT_KERNELS=name)
        snippet = END_TO_END_SNIPPET.format(config=str(BASELINE), repeats=repeats)
        proc = subprocess.run(
            [sys.executable, "-c", snippet],
            capture_output=True, text=True, env=env, check=True,
        )
        picked, ms = proc.stdout.split()
        assert picked == name, f"backend switch ignored: wanted {name}, got {picked}"
        print(f"  {name:5s} {float(ms):8.2f} ms")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=20,
                        help="timing repeats per measurement (default 20)")
    args = parser.parse_args()

    if _fast is None:
        print("compiled kernels not importable; timing the reference only")
    bench_fresnel(max(3, args.repeats // 4))
    bench_barrier(args.repeats)
    bench_end_to_end(max(3, args.repeats // 4))


if __name__ == "__main__":
    main()
