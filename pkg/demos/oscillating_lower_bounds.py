#!/usr/bin/env python3
"""A lower sequence whose limit superior is not a limit.

For the antidiagonal pair the alternating length-2 product is
diag(2, 1/2), so even lengths certify sqrt(2) while every odd-length
product has spectral radius 1.  The running maximum is what converges,
and a pruned branch-and-bound closes the enclosure without full
enumeration.
"""

import math

import jsrkit as jk
from jsrkit.gallery import antidiagonal_pair

mset = antidiagonal_pair()

print("n   rho_minus_n      best certified lower")
best = 0.0
for n in range(1, 11):
    value = jk.rho_minus_n(mset, n)
    best = max(best, value.value)
    print("%-3d %.12f   %.12f   (argmax word %s)" % (n, value.value, best, value.word))

print()
print("target: sqrt(2) = %.12f" % math.sqrt(2))

pruned = jk.pruned_bounds(mset, delta=0.02)
print(
    "pruned search: [%.10f, %.10f] after expanding %d words (depth %d)"
    % (pruned.lower, pruned.upper, pruned.expanded, pruned.deepest)
)

cert = jk.certify_lower(mset, (1, 0))
print("certificate from the alternating word %s: %.12f" % (cert.word, cert.value))
print("Gelfand cross-check ||P^k||^(1/2k):", ["%.6f" % g for g in cert.gelfand[:5]])
