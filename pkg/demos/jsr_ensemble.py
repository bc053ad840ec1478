"""
Joint spectral radius brackets vs the windowed upper bound
==========================================================

"""

import numpy as np

from lenspec.jsl import BochiConstants, bochi_rhs, jsr_profile

rng = np.random.default_rng(1)

consts = BochiConstants.for_dim(2)
print(f"dim 2 constants: c = {consts.c_m:.4f}, window cap d = {consts.d_m}")

# random unit-determinant pairs; the certified bracket must sit under the
# c + window upper bound every time
print(f"{'jsr lo':>9} {'jsr hi':>9} {'bound':>9}  margin")
for _ in range(8):
    pair = []
    while len(pair) < 2:
        m = rng.standard_normal((2, 2))
        d = abs(np.linalg.det(m))
        if d > 1e-12:
            pair.append(m / d ** 0.5)
    prof = jsr_profile(pair, 8)
    rhs = bochi_rhs(pair)
    print(f"{prof.bracket.lo:9.5f} {prof.bracket.hi:9.5f} {rhs.value:9.5f}"
          f"  {rhs.value - prof.bracket.hi:8.5f}")

# a commuting diagonal pair: the bracket collapses to the exact value
diag = [np.diag([2.0, 0.5]), np.diag([1.5, 1 / 1.5])]
prof = jsr_profile(diag, 8)
print("diagonal pair bracket:", prof.bracket.lo, prof.bracket.hi,
      "(log 2 =", float(np.log(2)), ")")
