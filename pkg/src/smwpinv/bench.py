"""Update-versus-recompute timing.

For each ``(m, n, r, seed)`` a conditioned instance is generated and
``A^+`` is computed up front (untimed).  The update path is
:func:`schur_factors` plus :func:`smw_pinv` without the Penrose check;
the recompute path forms ``A + U V^*`` and runs :func:`oracle_pinv`.
The divide-and-conquer :func:`smwpinv.linalg.pinv` is timed as well for
reference.  A row only reports a speedup once the two results agree to
``gate``.
"""

import os
import statistics
import time

from .errors import PreconditionError
from .generate import GenSpec, gen_conditioned, oracle_pinv
from .linalg import pinv, relative_error
from .smw import schur_factors, smw_pinv

__all__ = ["MEMORY_ENV", "bench_instance", "estimate_bytes", "run_bench"]

MEMORY_ENV = "SMWPINV_MEMORY_BUDGET_MB"
DEFAULT_BUDGET_MB = 4096
GATE = 1e-9


def estimate_bytes(m, n, r):
    """Rough peak footprint of one benchmark row."""
    # A, A^+, A + UV^*, SVD factors, two results, workspace
    return 16 * (10 * m * n + 4 * (m + n) * r)


def memory_budget():
    return int(os.environ.get(MEMORY_ENV, DEFAULT_BUDGET_MB)) * 2**20


def _median_time(fn, repeats):
    times, out = [], None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), out


def bench_instance(inst, repeats=3, gate=GATE, reference=True):
    """Time the update path against full recomputation for ``inst``."""
    def update():
        return smw_pinv(inst, schur_factors(inst), check=False).pinv

    def recompute():
        return oracle_pinv(inst.updated())

    t_update, z = _median_time(update, repeats)
    # correctness first: a wrong fast answer has no speedup
    err = relative_error(z, recompute())
    row = {"update_s": t_update, "error": err, "gate_passed": err <= gate}
    if not row["gate_passed"]:
        row.update(oracle_s=None, speedup=None)
        return row
    t_oracle, _ = _median_time(recompute, repeats)
    row.update(oracle_s=t_oracle, speedup=t_oracle / t_update)
    if reference:
        t_svd, _ = _median_time(lambda: pinv(inst.updated(), check=False), repeats)
        row.update(gesdd_s=t_svd, speedup_vs_gesdd=t_svd / t_update)
    return row


def run_bench(m, n, r_list, seeds, repeats=3, gate=GATE, reference=True,
              scale=0.5):
    """Benchmark rows ordered by ``(r, seed)``.

    Raises
    ------
    PreconditionError
        If a configuration would exceed the memory budget (set through
        the ``SMWPINV_MEMORY_BUDGET_MB`` environment variable).
    """
    budget = memory_budget()
    rows = []
    for r in r_list:
        need = estimate_bytes(m, n, r)
        if need > budget:
            raise PreconditionError(
                f"m={m}, n={n}, r={r} needs ~{need / 2**20:.0f} MiB, budget is "
                f"{budget / 2**20:.0f} MiB (set {MEMORY_ENV})",
                {"needed_bytes": need, "budget_bytes": budget})
        for seed in seeds:
            inst = gen_conditioned(GenSpec(m=m, n=n, r=r, seed=seed, scale=scale))
            row = {"m": m, "n": n, "r": r, "seed": seed}
            row.update(bench_instance(inst, repeats, gate, reference))
            rows.append(row)
    return rows
