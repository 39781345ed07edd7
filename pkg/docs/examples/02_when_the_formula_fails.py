"""
When the update formula is not the pseudoinverse
================================================

The formula can be evaluated for any instance, but it only returns the
Moore-Penrose inverse under conditions that the checker tests.  Here we
look at the smallest counterexample and a few found by random search.
"""

# %%
import numpy as np

from smwpinv import check_conditions, oracle_pinv, relative_error, smw_pinv
from smwpinv.generate import GenSpec, curated_negative, gen_negative

# %%
# A = diag(1, 0), U = e1, V = -e1.  The update cancels A exactly, so
# A + U V^* = 0 and its pseudoinverse is zero.

inst = curated_negative()
print("A + U V^* =\n", inst.updated().real)

report = check_conditions(inst)
print("S_A =", (np.eye(1) + inst.v.conj().T @ inst.a_pinv @ inst.u).real)
print(f"hermitian residuals: {report.herm_ue:.1f} {report.herm_uf:.1f}")
print(f"zero-middle residual: {report.zero_middle:.1f}")
print("formula is the MP inverse?", report.verdict_thm37)

# %%
# The formula still produces a matrix, and it is wrong: it returns
# diag(1/4, 0) where the answer is 0.  It does satisfy B Z B = B, which
# is all that survives when only the range conditions hold.

result = smw_pinv(inst, report=report)
print("formula output:\n", result.pinv.real)
print("oracle:\n", oracle_pinv(inst.updated()).real)
print(result.penrose)

# %%
# Random failures come from a search over small integer and half-integer
# entries, where a singular S_A can be hit exactly.

for seed in range(4):
    spec = GenSpec(m=4, n=3, r=2, rank=2, regime="thm37-negative", seed=seed)
    neg = gen_negative(spec)
    rep = check_conditions(neg)
    res = smw_pinv(neg, report=rep)
    err = relative_error(res.pinv, oracle_pinv(neg.updated()))
    print(f"seed {seed}: verdict {rep.verdict_thm37}, "
          f"first Penrose residual {res.penrose.residuals[0]:.1e}, "
          f"oracle error {err:.2f}")
