"""
Expanding a radial field on a ball in Bessel RBF modes.

The damped parabola (1 - r^2) exp(-r^2) vanishes on the unit sphere, so it
sits naturally in the span of modes that vanish there. The coefficients from
the closed-form projection agree with a brute-force least-squares oracle,
and the reconstruction error falls quickly with the mode count.
"""
import numpy as np

from besselrbf import (BesselRBFBasis, default_rule, expand, fields, gram, l2_error, project_oracle,
                       reconstruct)

for n in (1, 2, 3):
    f = fields.damped_parabola(np.zeros(n), 1.0)
    print(f"n = {n}")
    for J in (2, 4, 8, 16, 32):
        basis = BesselRBFBasis(n, 1.0, np.zeros((1, n)), J)
        rule = default_rule(basis, np.zeros(n))
        exp = expand(f, basis, [rule], alpha0_rule=rule)
        err = l2_error(f, reconstruct(exp, rule.nodes), rule)
        oracle_gap = np.max(np.abs(exp.alpha - project_oracle(f, basis, rule)))
        print(f"  J = {J:2d}: L2 error {err:.3e}, |formula - oracle| {oracle_gap:.1e}")
    print(f"  max |G - I| at J = 32: {np.max(np.abs(gram(basis, rule) - np.eye(32))):.1e}")

# As printed, the n = 1 coefficient of mode m picks up (lambda_m / 2 pi)^(1/2).
basis = BesselRBFBasis(1, 1.0, [[0.0]], 6, weight_mode="as_printed")
rule = default_rule(basis, [0.0])
diag = [expand(fields.cosine_mode(basis, m), basis, [rule], alpha0_rule=rule).alpha[m - 1, 0] for m in range(1, 7)]
print("as-printed self coefficients:", np.round(diag, 6))
print("(lambda_m / 2 pi)^(1/2):      ", np.round(np.sqrt(basis.lambdas / (2 * np.pi)), 6))
