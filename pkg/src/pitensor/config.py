from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from .errors import SchemaError


@dataclass(frozen=True)
class SolverConfig:
    """Knobs shared by the iterative solvers.

    ``tol`` is the pricing / certification tolerance, ``multistarts`` the
    number of random starts of every alternating local search, and
    ``vertex_cap`` the largest dimension in which an ell_inf ball is
    enumerated (``2**dim`` vertices).
    """

    tol: float = 1e-8
    seed: int = 0
    max_atoms: int = 5000
    max_iters: int = 500
    multistarts: int = 16
    vertex_cap: int = 12
    svd_warm_start: bool = True
    local_iters: int = 200

    def with_(self, **kw):
        return replace(self, **kw)

    def to_json(self):
        return asdict(self)

    @classmethod
    def from_json(cls, obj):
        obj = dict(obj or {})
        names = {f.name for f in fields(cls)}
        extra = set(obj) - names
        if extra:
            raise SchemaError(f"unknown config fields: {sorted(extra)}")
        return cls(**obj)


DEFAULT = SolverConfig()


def start_streams(seed, n):
    """Independent generators, one per multistart, derived from ``seed``.

    ``seed`` may be an int or a tuple of ints (e.g. ``(seed, iteration)``).
    """
    entropy = list(seed) if isinstance(seed, (tuple, list)) else seed
    return [np.random.default_rng(s) for s in np.random.SeedSequence(entropy).spawn(n)]
