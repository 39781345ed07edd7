"""
How much time does the update save?
===================================

With A^+ cached, the update costs a few passes of thin panels over A^+.
Recomputing means a full SVD of A + U V^*.  Absolute times depend on the
machine, so only ratios are printed.  Pass a size on the command line
(default 400).
"""

# %%
import sys

from smwpinv.bench import run_bench

size = int(sys.argv[1]) if len(sys.argv) > 1 else 400

# %%
# Each row is checked against the SVD answer before its timing counts.

rows = run_bench(size, size, r_list=[0, 1, 5, 20], seeds=[0], repeats=3)
print(f"{'r':>4} {'update (s)':>11} {'gesvd (s)':>10} {'ratio':>8} {'gesdd ratio':>12}")
for row in rows:
    print(f"{row['r']:>4} {row['update_s']:>11.4f} {row['oracle_s']:>10.3f} "
          f"{row['speedup']:>7.0f}x {row['speedup_vs_gesdd']:>11.0f}x")
