"""Projective norms of one matrix under several pairs of factor norms.

Run: python demos/projective_norms.py
"""

import math

import numpy as np

from pitensor import banach
from pitensor.projnorm import proj_norm
from pitensor.tensor import Tensor, injective_norm

Z = np.array([[1.0, 2.0, 0.0], [0.0, 1.0, -1.0], [2.0, 0.0, 1.0]])
pairs = {
    "l2 (x) l2": (banach.lp(2, 3), banach.lp(2, 3)),
    "l1 (x) l2": (banach.lp(1, 3), banach.lp(2, 3)),
    "linf (x) l1": (banach.lp(math.inf, 3), banach.lp(1, 3)),
    "linf (x) linf": (banach.lp(math.inf, 3), banach.lp(math.inf, 3)),
    "l3 (x) l1.5": (banach.lp(3, 3), banach.lp(1.5, 3)),
}

print(f"{'pair':<15}{'method':<16}{'status':<16}{'lower':>12}{'upper':>12}{'injective':>12}")
for name, (X, Y) in pairs.items():
    t = Tensor(X, Y, Z)
    r = proj_norm(t)
    eps = injective_norm(t)
    print(f"{name:<15}{r.method:<16}{r.op_norm_status:<16}{r.lower:12.6f}{r.upper:12.6f}{eps.value:12.6f}")
print("nuclear norm (singular values):", np.linalg.svd(Z, compute_uv=False).sum())
