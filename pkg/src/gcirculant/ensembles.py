"""Random entry families indexed by group elements.

Pair entries are built as Y = s1*X1 + i*s2*X2 with s1 = sqrt((1+alpha)/2),
s2 = sqrt((1-alpha)/2), which gives E|Y|^2 = 1 and E Y^2 = alpha exactly for
any standardized base distribution.  Under the Hermitian constraint,
involution entries are real with variance beta and each {a, a^-1} pair
carries one draw plus its exact conjugate.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np

from .groups import GroupSpec, inverse_permutation

BASE_DISTRIBUTIONS = ("gaussian", "rademacher", "uniform")

# stream purposes keep entry sampling and moment checks on disjoint substreams
_ENTRY_STREAM = 0
_MOMENT_STREAM = 1


@dataclass(frozen=True)
class EnsembleConfig:
    """Entry-law parameters: base distribution, (alpha, beta), symmetry, seed."""

    base: str = "gaussian"
    alpha: float = 0.0
    beta: float = 1.0
    hermitian: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        if self.base not in BASE_DISTRIBUTIONS:
            raise ValueError(
                f"base must be one of {BASE_DISTRIBUTIONS}, got {self.base!r}"
            )
        if isinstance(self.alpha, complex):
            raise ValueError("complex alpha is not supported")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not self.beta > 0.0:
            raise ValueError(f"beta must be > 0, got {self.beta}")

    def to_dict(self) -> dict:
        return {
            "base": self.base,
            "alpha": self.alpha,
            "beta": self.beta,
            "hermitian": self.hermitian,
            "seed": self.seed,
        }

    def digest(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass
class EntryTable:
    """A realized family {Y_a}, indexed by element index."""

    group: GroupSpec
    values: np.ndarray
    hermitian: bool
    cfg: EnsembleConfig | None = None
    trial: int = 0

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != (self.group.size,):
            raise ValueError(
                f"expected {self.group.size} entries, got shape {self.values.shape}"
            )


def stream(seed: int, purpose: int, index: int) -> np.random.Generator:
    """Counter-based substream for (seed, purpose, index); order-independent."""
    ss = np.random.SeedSequence((int(seed), int(purpose), int(index)))
    return np.random.Generator(np.random.Philox(ss))


def _base_draws(rng: np.random.Generator, base: str, shape: tuple[int, ...]) -> np.ndarray:
    """Mean-0 variance-1 draws from the configured base distribution."""
    if base == "gaussian":
        return rng.standard_normal(shape)
    if base == "rademacher":
        return rng.integers(0, 2, shape).astype(np.float64) * 2.0 - 1.0
    return rng.uniform(-math.sqrt(3.0), math.sqrt(3.0), shape)


def sample_entries(g: GroupSpec, cfg: EnsembleConfig, trial: int = 0) -> EntryTable:
    """Sample {Y_a} for one trial of the configured ensemble.

    The full (N, 2) block of base draws is generated in element-index order
    regardless of which entries end up used, so the table depends only on
    (group, cfg, trial) and never on iteration order.
    """
    n = g.size
    rng = stream(cfg.seed, _ENTRY_STREAM, trial)
    x = _base_draws(rng, cfg.base, (n, 2))
    s1 = math.sqrt((1.0 + cfg.alpha) / 2.0)
    s2 = math.sqrt((1.0 - cfg.alpha) / 2.0)
    if not cfg.hermitian:
        values = s1 * x[:, 0] + 1j * s2 * x[:, 1]
        return EntryTable(g, values, hermitian=False, cfg=cfg, trial=trial)

    invp = inverse_permutation(g)
    idx = np.arange(n)
    values = np.zeros(n, dtype=np.complex128)
    invol = invp == idx
    values[invol] = math.sqrt(cfg.beta) * x[invol, 0]
    rep = idx < invp
    values[rep] = s1 * x[rep, 0] + 1j * s2 * x[rep, 1]
    values[invp[rep]] = np.conj(values[rep])
    return EntryTable(g, values, hermitian=True, cfg=cfg, trial=trial)


def lindeberg_statistic(t: EntryTable, epsilon: float) -> float:
    """(1/N) * sum |Y_a|^2 over entries with |Y_a| >= epsilon*sqrt(N)."""
    if not epsilon > 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    n = t.group.size
    mags = np.abs(t.values)
    big = mags >= epsilon * math.sqrt(n)
    return float(np.sum(mags[big] ** 2) / n)


@dataclass
class MomentReport:
    """Empirical entry moments with standard errors, against (0, 1, alpha, beta)."""

    trials: int
    mean: complex
    mean_se: float
    abs_square_mean: float
    abs_square_se: float
    square_mean: complex
    square_se: float
    involution_square_mean: float | None = None
    involution_square_se: float | None = None


def moment_check(cfg: EnsembleConfig, trials: int) -> MomentReport:
    """Monte Carlo estimates of E Y, E|Y|^2, E Y^2 over scalar pair-entry draws.

    For Hermitian configs the involution entry's second moment (target beta)
    is estimated as well.
    """
    if trials < 1000:
        raise ValueError(f"trials must be >= 1000, got {trials}")
    rng = stream(cfg.seed, _MOMENT_STREAM, 0)
    x = _base_draws(rng, cfg.base, (trials, 2))
    s1 = math.sqrt((1.0 + cfg.alpha) / 2.0)
    s2 = math.sqrt((1.0 - cfg.alpha) / 2.0)
    y = s1 * x[:, 0] + 1j * s2 * x[:, 1]

    def _se(values: np.ndarray) -> float:
        return float(np.std(values) / math.sqrt(trials))

    report = MomentReport(
        trials=trials,
        mean=complex(np.mean(y)),
        mean_se=max(_se(y.real), _se(y.imag)),
        abs_square_mean=float(np.mean(np.abs(y) ** 2)),
        abs_square_se=_se(np.abs(y) ** 2),
        square_mean=complex(np.mean(y**2)),
        square_se=max(_se((y**2).real), _se((y**2).imag)),
    )
    if cfg.hermitian:
        z = math.sqrt(cfg.beta) * _base_draws(rng, cfg.base, (trials,))
        report.involution_square_mean = float(np.mean(z**2))
        report.involution_square_se = _se(z**2)
    return report
