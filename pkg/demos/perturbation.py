"""Move a nearly optimal decomposition onto an exactly attaining one.

Run: python demos/perturbation.py
"""

import math

import numpy as np

from pitensor import banach
from pitensor.attain import perturb_to_attaining
from pitensor.projnorm import proj_norm
from pitensor.tensor import Decomposition, Tensor, assemble

rng = np.random.default_rng(4)
X, Y = banach.lp(math.inf, 3), banach.lp(1, 3)
r = proj_norm(Tensor(X, Y, rng.standard_normal((3, 3))))
d, G = r.decomposition, r.dual
print(f"optimal value {r.upper:.6f} with {len(d)} atoms, dual status {r.op_norm_status}")

# nudge every factor off the optimal face, then renormalise
eta, eps = 1e-2, 1e-2
xs = [x + 1e-3 * rng.standard_normal(3) for x in d.xs]
ys = [y + 1e-3 * rng.standard_normal(3) for y in d.ys]
xs = [x / banach.norm_eval(X, x) for x in xs]
ys = [y / banach.norm_eval(Y, y) for y in ys]
near = Decomposition(d.lambdas, xs, ys)
print("pairings before:", np.round([G(x, y) for x, y in zip(xs, ys)], 6))

out, rep = perturb_to_attaining(near, G, eta, eps)
print("pairings after: ", np.round(rep.certificate.pairings, 12))
print("verdict:", rep.certificate.verdict)
moved = Tensor(X, Y, assemble(out, X, Y).Z - assemble(near, X, Y).Z)
print(f"projective distance moved {proj_norm(moved).upper:.3e} <= bound {rep.distance_bound:.3e}")
