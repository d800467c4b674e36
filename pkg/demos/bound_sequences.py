#!/usr/bin/env python3
"""Upper and lower bound sequences on a family with a known answer.

The rank-one pair has joint spectral radius exactly 2, reached by the
lower sequence at length 1, while the Euclidean upper values are
2^(1 + 1/2n): the generic upper bound closes only like 1/n.
"""

import jsrkit as jk
from jsrkit.gallery import rank_one_pair

mset = rank_one_pair()
report = jk.sandwich(mset, 12)

print("n   rho_plus_n        rho_minus_n   best enclosure        gap")
for row in report.rows:
    print(
        "%-3d %.12f  %.12f  [%.10f, %.10f]  %.3e"
        % (row.n, row.rho_plus, row.rho_minus, row.best_lower, row.best_upper, row.gap)
    )

print()
print("closed form for the upper values: 2^(1 + 1/(2n))")
for row in report.rows[:4]:
    print("  n=%d: %.15f vs %.15f" % (row.n, row.rho_plus, 2 ** (1 + 1 / (2 * row.n))))

fit = jk.fit_rate(report, tail_fraction=0.5)
print()
print("fitted gap decay exponent: %.3f (R^2 %.5f)" % (fit.r_hat, fit.r_squared))
print("the lower bound is exact from n = 1; the upper gap carries the 1/n rate")
