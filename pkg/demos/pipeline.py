"""Approximate a geometric diagonal series by an attaining finite-rank tensor.

Run: python demos/pipeline.py
"""

from pitensor import banach
from pitensor.pi_property import approx_pipeline, geometric_diagonal

u = geometric_diagonal(banach.lp(2, 12), banach.lp(2, 12), 12, tail_bound=2.0 ** -12)
for eps in (0.1, 0.01, 0.001):
    r = approx_pipeline(u, eps)
    print(f"eps={eps:<6g} k={r.k:<3d} range={r.range_dims} verdict={r.certificate.verdict:<10}"
          f" bound={r.distance_bound:.3e}")
