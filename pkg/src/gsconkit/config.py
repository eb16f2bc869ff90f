"""Run configuration and the single table of numerical tolerances.

Library functions read the active configuration through :func:`current`.
The CLI (and tests) swap it with :func:`use`, which is scoped to the
calling context, so concurrent callers do not see each other's settings.
"""
from __future__ import annotations

import contextlib
import contextvars
import dataclasses
import os
from dataclasses import dataclass, field

ENV_PREFIX = "GSCONKIT_"


@dataclass(frozen=True)
class Tolerances:
    norm: float = 1e-12          # unit-norm check on states
    hermitian: float = 1e-12     # entrywise H - H^dagger
    unitary: float = 1e-12       # entrywise U U^dagger - I
    pulse: float = 1e-10         # gate matrix vs exp(i t P)
    reconstruct: float = 1e-10   # Pauli expansion reconstruction
    exact_product: float = 1e-10  # recursive decomposition product error
    depth4: float = 1e-12        # depth-4 product error
    eig_residual: float = 1e-9   # relative residual of eigenpairs
    energy: float = 1e-9         # slack on energy thresholds
    rotation: float = 1e-10      # rotation_between endpoint check
    projector: float = 1e-10     # idempotency of emitted projectors
    lipschitz: float = 1e-9      # sampled Lipschitz check slack
    psd: float = 1e-10           # negative-eigenvalue slack
    convergence: float = 1e-9    # alternating minimisation stop rule


TOL_NAMES = tuple(f.name for f in dataclasses.fields(Tolerances))


@dataclass(frozen=True)
class Config:
    seed: int = 0
    tol: Tolerances = field(default_factory=Tolerances)
    dense_limit: int = 14        # max qubits for dense operators
    dense_eig_limit: int = 10    # full eigh up to 2**this, iterative above
    restarts: int = 32           # separable optimisation restarts
    subdivision_cap: int = 2 ** 24
    stconn_max_vars: int = 20
    energy_sample_cap: int = 10 ** 5

    def with_tol(self, **kw) -> "Config":
        return dataclasses.replace(self, tol=dataclasses.replace(self.tol, **kw))

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


_CURRENT: contextvars.ContextVar[Config] = contextvars.ContextVar("gsconkit_config", default=Config())


def current() -> Config:
    return _CURRENT.get()


@contextlib.contextmanager
def use(cfg: Config):
    token = _CURRENT.set(cfg)
    try:
        yield cfg
    finally:
        _CURRENT.reset(token)


def parse_tol(items) -> dict:
    """Parse ``name=value`` strings into a tolerance override dict."""
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or name not in TOL_NAMES:
            raise ValueError(f"bad tolerance override {item!r}; known names: {', '.join(TOL_NAMES)}")
        out[name] = float(value)
    return out


def from_env(base: Config | None = None, environ=None) -> Config:
    """Apply ``GSCONKIT_*`` environment overrides on top of ``base``."""
    env = os.environ if environ is None else environ
    cfg = base or Config()
    ints = {"SEED": "seed", "DENSE_LIMIT": "dense_limit", "RESTARTS": "restarts"}
    for key, attr in ints.items():
        if ENV_PREFIX + key in env:
            cfg = dataclasses.replace(cfg, **{attr: int(env[ENV_PREFIX + key])})
    tol = {}
    for name in TOL_NAMES:
        key = ENV_PREFIX + "TOL_" + name.upper()
        if key in env:
            tol[name] = float(env[key])
    return cfg.with_tol(**tol) if tol else cfg
