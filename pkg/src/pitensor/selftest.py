"""Quick oracle-equivalence and invariant checks behind the ``selftest`` command."""

import numpy as np

from . import banach
from .attain import caratheodory_reduce, certify_attainment
from .config import DEFAULT
from .projnorm import (
    proj_norm_colgen,
    proj_norm_exact_polyhedral,
    proj_norm_oracle_hilbert,
    proj_norm_oracle_l1,
)
from .tensor import Decomposition, Tensor, assemble, injective_norm, normalize_atoms


def _check(name, fn):
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed check, reported by name
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return {"name": name, "ok": bool(ok), "detail": detail}


def run_selftest(config=DEFAULT):
    rng = np.random.default_rng(config.seed)
    l2a, l2b = banach.lp(2, 4), banach.lp(2, 3)
    l1, li = banach.lp(1, 4), banach.lp(np.inf, 3)
    checks = []

    def hilbert():
        Z = rng.standard_normal((4, 3))
        t = Tensor(l2a, l2b, Z)
        s = np.linalg.svd(Z, compute_uv=False).sum()
        r = proj_norm_colgen(t, config)
        rel = abs(r.upper - s) / s
        return rel <= 1e-5, f"relative error {rel:.3e}"

    def l1_rows():
        Z = rng.standard_normal((4, 3))
        t = Tensor(l1, li, Z)
        rows = np.abs(Z).max(axis=1).sum()
        r = proj_norm_colgen(t, config)
        o = proj_norm_oracle_l1(t)
        return abs(r.upper - rows) <= 1e-6 * rows and abs(o.upper - rows) <= 1e-12 * rows, \
            f"colgen {r.upper:.12g}, rows {rows:.12g}"

    def polyhedral_identity():
        l2inf = banach.lp(np.inf, 2)
        r = proj_norm_exact_polyhedral(Tensor(l2inf, l2inf, np.eye(2)), config)
        return abs(r.upper - 1) <= 1e-8 and r.gap <= 1e-8, f"value {r.upper:.12g}"

    def certificate():
        Z = rng.standard_normal((4, 3))
        t = Tensor(l2a, l2b, Z)
        r = proj_norm_oracle_hilbert(t)
        c = certify_attainment(t, r.decomposition, r.dual, 1e-6, config)
        return c.verdict == "certified", c.verdict

    def rank_one():
        x, y = rng.standard_normal(4), rng.standard_normal(3)
        X, Y = banach.lp(3, 4), banach.lp(1.5, 3)
        t = Tensor(X, Y, np.outer(x, y))
        want = banach.norm_eval(X, x) * banach.norm_eval(Y, y)
        r = proj_norm_colgen(t, config)
        e = injective_norm(t, config)
        return abs(r.upper - want) <= 1e-8 * want and e.value <= r.upper + 1e-8, \
            f"{r.upper:.12g} vs {want:.12g}"

    def caratheodory():
        X, Y = banach.lp(2, 3), banach.lp(1, 3)
        raw = [(rng.random(), rng.standard_normal(3), rng.standard_normal(3)) for _ in range(20)]
        d = normalize_atoms(raw, X, Y)
        r = caratheodory_reduce(d, X, Y)
        res = np.abs(assemble(r, X, Y).Z - assemble(d, X, Y).Z).max()
        return len(r) <= 10 and res <= 1e-9 and abs(r.value() - d.value()) <= 1e-9, \
            f"{len(d)} -> {len(r)} atoms, residual {res:.2e}"

    def weak_duality():
        Z = rng.standard_normal((4, 3))
        t = Tensor(banach.lp(3, 4), banach.lp(np.inf, 3), Z)
        r = proj_norm_colgen(t, config)
        d = Decomposition.from_atoms(list(r.decomposition))
        return r.lower <= d.value() + 1e-9, f"lower {r.lower:.12g}, upper {r.upper:.12g}"

    for name, fn in [("hilbert_oracle", hilbert), ("l1_oracle", l1_rows),
                     ("polyhedral_identity", polyhedral_identity), ("certificate", certificate),
                     ("rank_one_law", rank_one), ("caratheodory", caratheodory),
                     ("weak_duality", weak_duality)]:
        checks.append(_check(name, fn))
    passed = sum(c["ok"] for c in checks)
    return {"passed": passed, "failed": len(checks) - passed, "checks": checks}
