"""
Causal space-time wavelets on the forward light cone of one center.

Each mode is the spatial mode evaluated at the time-space distance and
switched off outside the cone. The modes are no longer orthogonal over the
cone, so the closed-form coefficients differ from the least-squares ones.
With one center every mode depends on rhat alone, so only fields of rhat
lie in the span; such a field is fitted closely by least squares.
"""
import numpy as np

from besselrbf import (BallDomain, SpaceTimeBasis, SpaceTimeExpansion, SpaceTimePoint, WaveContext, cone_rule,
                       integrate, st_basis_eval, st_expand, st_gram, st_project_oracle, st_reconstruct)

ctx = WaveContext(1.0)
basis = SpaceTimeBasis(1, 1.0, ctx, [[0.0, 0.0]], 8)
rule = cone_rule(BallDomain([0.0], 1.0), (0.0, 1.0), SpaceTimePoint([0.0], 0.0), ctx, time_order=48, space_order=48)

G = st_gram(basis, rule)
print("cone Gram condition number:", np.linalg.cond(G))



def f(z):
    rhat2 = np.clip(z[:, 1] ** 2 - z[:, 0] ** 2, 0.0, None)
    return (1.0 - rhat2) * np.exp(-rhat2)

formula = st_expand(f, basis, [rule]).alpha[:, 0]
oracle = st_project_oracle(f, basis, rule)
print("closed-form coefficients:", np.round(formula, 4))
print("least-squares coefficients:", np.round(oracle[:, 0], 4))
for name, coef in (("closed form", formula[:, None]), ("least squares", oracle)):
    rec = st_reconstruct(SpaceTimeExpansion(basis, 0.0, coef), rule.nodes)
    fv = f(rule.nodes)
    print(f"{name}: relative L2 error over the cone {np.sqrt(integrate((fv - rec) ** 2, rule) / integrate(fv**2, rule)):.2e}")

# The gate is closed: on the cone surface a mode takes its finite value at rhat = 0, just outside it is 0.
print("on the surface:", st_basis_eval(basis, 1, 1, SpaceTimePoint([0.5], 0.5)),
      " just outside:", st_basis_eval(basis, 1, 1, SpaceTimePoint([0.5], 0.5 - 1e-12)))
