"""
Two more routes: block matrices and factored products
=====================================================

The update problem can be embedded in a larger structured matrix.  This
script computes the same pseudoinverse three ways and shows that they
agree.
"""

# %%
import numpy as np

from smwpinv import BlockMatrix, block_pinv, relative_error, smw_pinv, xny_pinv
from smwpinv.block import update_as_xny
from smwpinv.generate import GenSpec, gen_block, gen_conditioned, oracle_pinv

# %%
# Block pseudoinverse via the generalized Schur complement D - B A^+ C.
# It needs R(C) inside R(A) and R(B^*) inside R(A^*); the generator
# builds B and C that way.

m = gen_block(GenSpec(m=6, n=5, r=3, s=2, rank=3, regime="block", seed=0))
res = block_pinv(m)
print("assembled M is", m.assemble().shape)
print(res.penrose)
print(f"error vs SVD: {relative_error(res.pinv, oracle_pinv(m.assemble())):.2e}")

# %%
# The update A + U V^* is the top-left block of X N Y with
# X = [[I, -U], [0, I]], N = [[A, U], [-V^*, I]], Y = [[I, 0], [V^*, I]].

inst = gen_conditioned(GenSpec(m=7, n=5, r=2, rank=4, seed=3))
x, big_n, y = update_as_xny(inst.a, inst.u, inst.v)
print("X N Y =\n", np.round(np.abs(x @ big_n @ y), 2))

# %%
# Route 1: the update formula.  Route 2: the factored formula applied to
# X, N, Y.  Route 3: the block formula applied to N alone, then read off.

n_rows, n_cols = inst.a.shape
z1 = smw_pinv(inst).pinv
z2 = xny_pinv(x, big_n, y).pinv
print(f"factored route, top-left gap: {relative_error(z2[:n_cols, :n_rows], z1):.2e}")
print(f"off-diagonal norms: {np.linalg.norm(z2[:n_cols, n_rows:]):.1e}, "
      f"{np.linalg.norm(z2[n_cols:, :n_rows]):.1e}")

blocks = BlockMatrix.create(inst.a, -inst.v.conj().T, inst.u, np.eye(2))
z3 = block_pinv(blocks).pinv
print(f"block route on N agrees with SVD of N: "
      f"{relative_error(z3, oracle_pinv(big_n)):.2e}")
