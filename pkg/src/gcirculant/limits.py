"""Limiting spectral laws and distances from empirical spectra to them.

Limits are one- or two-component Gaussian mixtures, on the real line for
Hermitian ensembles and on the plane (with diagonal covariances) otherwise.
Weak convergence is measured by marginal Kolmogorov-Smirnov distances plus
a real/imaginary correlation diagnostic; degenerate N(0, 0) components are
point masses at 0 and the KS statistic accounts for their jumps exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .ensembles import EnsembleConfig
from .groups import (
    Character,
    GroupSpec,
    conjugate_character,
    is_real_character,
    restrict_to_involutions,
)
from .spectra import Spectrum


def _erfc_rational(x: np.ndarray) -> np.ndarray:
    """Complementary error function by rational approximation.

    Max absolute error below 1.2e-7 on the whole line, which puts the
    derived normal CDF within 1e-7 of the true value.
    """
    z = np.abs(x)
    t = 1.0 / (1.0 + 0.5 * z)
    poly = t * np.exp(
        -z * z
        - 1.26551223
        + t
        * (
            1.00002368
            + t
            * (
                0.37409196
                + t
                * (
                    0.09678418
                    + t
                    * (
                        -0.18628806
                        + t
                        * (
                            0.27886807
                            + t
                            * (
                                -1.13520398
                                + t * (1.48851587 + t * (-0.82215223 + t * 0.17087277))
                            )
                        )
                    )
                )
            )
        )
    )
    return np.where(x >= 0.0, poly, 2.0 - poly)


def normal_cdf(x, variance: float = 1.0):
    """CDF of N(0, variance); variance 0 is the point mass at 0."""
    arr = np.asarray(x, dtype=np.float64)
    if variance < 0:
        raise ValueError(f"variance must be >= 0, got {variance}")
    if variance == 0.0:
        out = (arr >= 0.0).astype(np.float64)
    else:
        out = 0.5 * _erfc_rational(-arr / math.sqrt(2.0 * variance))
    return out if isinstance(x, np.ndarray) else float(out)


def _mixture_cdf(x, weights, variances, *, left: bool = False):
    arr = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(arr)
    for w, v in zip(weights, variances):
        if v == 0.0:
            out = out + w * ((arr > 0.0) if left else (arr >= 0.0))
        else:
            out = out + w * normal_cdf(arr, v)
    return out


@dataclass(frozen=True)
class LimitLaw:
    """Gaussian mixture limit; "real" lives on the line, "complex" on the plane.

    Components are stored as weights plus per-component variances of the
    real and imaginary parts (imaginary variances are all 0 for real kind).
    """

    kind: str
    weights: tuple[float, ...]
    re_variances: tuple[float, ...]
    im_variances: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.kind not in ("real", "complex"):
            raise ValueError(f"kind must be 'real' or 'complex', got {self.kind!r}")
        if not self.weights:
            raise ValueError("mixture needs at least one component")
        if len({len(self.weights), len(self.re_variances), len(self.im_variances)}) != 1:
            raise ValueError("component sequences must have equal length")
        if any(w < 0 or w > 1 for w in self.weights):
            raise ValueError(f"weights must lie in [0, 1], got {self.weights}")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {sum(self.weights)}")
        if any(v < 0 for v in self.re_variances + self.im_variances):
            raise ValueError("variances must be >= 0")
        if self.kind == "real" and any(v != 0.0 for v in self.im_variances):
            raise ValueError("real-kind law must put no mass off the real axis")

    def cdf_real(self, x):
        """Marginal CDF of the real part (the full CDF for real kind)."""
        return _mixture_cdf(x, self.weights, self.re_variances)

    def cdf_real_left(self, x):
        return _mixture_cdf(x, self.weights, self.re_variances, left=True)

    def cdf_imag(self, x):
        return _mixture_cdf(x, self.weights, self.im_variances)

    def cdf_imag_left(self, x):
        return _mixture_cdf(x, self.weights, self.im_variances, left=True)

    def real_atom_mass(self) -> float:
        return sum(w for w, v in zip(self.weights, self.re_variances) if v == 0.0)

    def imag_atom_mass(self) -> float:
        return sum(w for w, v in zip(self.weights, self.im_variances) if v == 0.0)

    def second_moments(self) -> tuple[float, float]:
        """(E Re^2, E Im^2) of the mixture."""
        re2 = sum(w * v for w, v in zip(self.weights, self.re_variances))
        im2 = sum(w * v for w, v in zip(self.weights, self.im_variances))
        return re2, im2

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "weights": list(self.weights),
            "re_variances": list(self.re_variances),
            "im_variances": list(self.im_variances),
        }


def _normalized(kind: str, comps: list[tuple[float, float, float]]) -> LimitLaw:
    """Drop zero-weight components, merge identical ones, sort by variance."""
    merged: dict[tuple[float, float], float] = {}
    for w, rv, iv in comps:
        if w == 0.0:
            continue
        merged[(rv, iv)] = merged.get((rv, iv), 0.0) + w
    if not merged:
        raise ValueError("mixture has no mass")
    items = sorted(merged.items())
    return LimitLaw(
        kind,
        weights=tuple(w for _, w in items),
        re_variances=tuple(rv for (rv, _), _ in items),
        im_variances=tuple(iv for (_, iv), _ in items),
    )


def real_mixture(components: Sequence[tuple[float, float]]) -> LimitLaw:
    """Mixture of N(0, v) on the line from (weight, variance) pairs."""
    return _normalized("real", [(w, v, 0.0) for w, v in components])


def complex_mixture(components: Sequence[tuple[float, float]]) -> LimitLaw:
    """Mixture over (weight, alpha): covariance diag((1+alpha)/2, (1-alpha)/2)."""
    return _normalized(
        "complex", [(w, (1.0 + a) / 2.0, (1.0 - a) / 2.0) for w, a in components]
    )


def std_complex_gaussian() -> LimitLaw:
    return complex_mixture([(1.0, 0.0)])


def std_real_gaussian() -> LimitLaw:
    return real_mixture([(1.0, 1.0)])


def limit_for(cfg: EnsembleConfig, p: Fraction | float) -> LimitLaw:
    """Limiting spectral law for an ensemble whose involution fraction tends to p.

    Non-Hermitian: (1-p) x standard complex Gaussian + p x the correlated
    complex Gaussian with parameter alpha.  Hermitian: the two-component
    real mixture with variances 1 + p*(beta-alpha-1) and
    1 + alpha + p*(beta-alpha-1), collapsing to N(0, beta) at p = 1.
    """
    if not 0 <= p <= 1:
        raise ValueError(f"p must be in [0, 1], got {p}")
    pf = float(p)
    if not cfg.hermitian:
        return complex_mixture([(1.0 - pf, 0.0), (pf, cfg.alpha)])
    if 0.5 < pf < 1.0:
        raise ValueError(
            f"hermitian limit rejects p = {p}: the involution fraction is the "
            "reciprocal of an integer, so p in (1/2, 1) cannot occur"
        )
    if pf == 1.0:
        return real_mixture([(1.0, cfg.beta)])
    shift = pf * (cfg.beta - cfg.alpha - 1.0)
    comps = [(1.0 - pf, 1.0 + shift), (pf, 1.0 + cfg.alpha + shift)]
    for _, v in comps:
        if v <= 0:
            raise ValueError(f"nonpositive mixture variance {v}; invalid parameters")
    return real_mixture(comps)


def predicted_covariance(
    chi_real: bool,
    *,
    alpha: float,
    beta: float,
    p2: Fraction | float,
    hermitian: bool,
):
    """Second moments of a single eigenvalue.

    Non-Hermitian: the 2x2 covariance of (Re, Im), equal to
    (1/2) * diag(1 + alpha*[chi real], 1 - alpha*[chi real]).
    Hermitian: the scalar variance 1 + alpha*[chi real] + p2*(beta-alpha-1).
    """
    r = 1.0 if chi_real else 0.0
    if hermitian:
        return 1.0 + alpha * r + float(p2) * (beta - alpha - 1.0)
    return np.diag([(1.0 + alpha * r) / 2.0, (1.0 - alpha * r) / 2.0])


def predicted_pair_moment(
    *,
    same: bool,
    conjugate: bool,
    same_on_involutions: bool,
    alpha: float,
    beta: float,
    p2: Fraction | float,
    hermitian: bool,
):
    """Cross second moments of a pair of eigenvalues.

    Hermitian: the scalar E lambda1*lambda2 =
    [chi1=chi2] + alpha*[chi1=conj(chi2)] + p2*(beta-alpha-1)*[restrictions
    to the involution subgroup agree].  Non-Hermitian: the 2x2 block
    E[(Re1, Im1)^T (Re2, Im2)] = (1/2)*diag(s + alpha*c, s - alpha*c).
    """
    s = 1.0 if same else 0.0
    c = 1.0 if conjugate else 0.0
    if hermitian:
        a = 1.0 if same_on_involutions else 0.0
        return s + alpha * c + float(p2) * (beta - alpha - 1.0) * a
    return np.diag([(s + alpha * c) / 2.0, (s - alpha * c) / 2.0])


@dataclass(frozen=True)
class CharacterPairFlags:
    chi1_real: bool
    chi2_real: bool
    same: bool
    conjugate: bool
    same_on_involutions: bool


def character_relation(g: GroupSpec, chi1: Character, chi2: Character) -> CharacterPairFlags:
    """The indicator flags the covariance predictions depend on."""
    return CharacterPairFlags(
        chi1_real=is_real_character(g, chi1),
        chi2_real=is_real_character(g, chi2),
        same=chi1.coords == chi2.coords,
        conjugate=conjugate_character(g, chi2).coords == chi1.coords,
        same_on_involutions=(
            restrict_to_involutions(g, chi1) == restrict_to_involutions(g, chi2)
        ),
    )


def _ks_statistic(samples: np.ndarray, cdf, cdf_left, atom_points=()) -> float:
    x = np.sort(np.asarray(samples, dtype=np.float64))
    n = x.size
    if n == 0:
        raise ValueError("empty sample")
    vals, counts = np.unique(x, return_counts=True)
    upto = np.cumsum(counts)
    below = upto - counts
    d = max(
        float(np.max(np.abs(upto / n - cdf(vals)))),
        float(np.max(np.abs(below / n - cdf_left(vals)))),
    )
    for p in atom_points:
        ecdf_at = np.searchsorted(x, p, side="right") / n
        ecdf_below = np.searchsorted(x, p, side="left") / n
        d = max(d, abs(ecdf_at - float(cdf(p))), abs(ecdf_below - float(cdf_left(p))))
    return d


def ks_distance_real(samples, law: LimitLaw) -> float:
    """sup-distance between the empirical CDF and the law's CDF on the line."""
    if law.kind != "real":
        raise ValueError("ks_distance_real needs a real-kind law")
    atoms = (0.0,) if law.real_atom_mass() > 0 else ()
    return _ks_statistic(samples, law.cdf_real, law.cdf_real_left, atoms)


@dataclass
class ComplexDistanceReport:
    """Marginal KS distances plus the |correlation| of (Re, Im)."""

    ks_re: float
    ks_im: float
    corr_re_im: float


def distance_complex(samples, law: LimitLaw) -> ComplexDistanceReport:
    """Marginal distances of complex samples to a plane law.

    The limit laws here all have diagonal covariances, so the empirical
    Re/Im correlation should vanish along with the marginal distances.
    """
    if law.kind != "complex":
        raise ValueError("distance_complex needs a complex-kind law")
    z = np.asarray(samples, dtype=np.complex128)
    if z.size == 0:
        raise ValueError("empty sample")
    re_atoms = (0.0,) if law.real_atom_mass() > 0 else ()
    im_atoms = (0.0,) if law.imag_atom_mass() > 0 else ()
    ks_re = _ks_statistic(z.real, law.cdf_real, law.cdf_real_left, re_atoms)
    ks_im = _ks_statistic(z.imag, law.cdf_imag, law.cdf_imag_left, im_atoms)
    sr, si = np.std(z.real), np.std(z.imag)
    if sr == 0.0 or si == 0.0:
        corr = 0.0
    else:
        corr = float(
            abs(np.mean((z.real - z.real.mean()) * (z.imag - z.imag.mean())) / (sr * si))
        )
    return ComplexDistanceReport(ks_re=ks_re, ks_im=ks_im, corr_re_im=corr)


@dataclass
class CovarianceEstimate:
    """Monte Carlo second-moment estimate with entrywise standard errors."""

    estimate: np.ndarray | float
    stderr: np.ndarray | float
    trials: int


def empirical_eigen_covariance(
    spectra: Sequence[Spectrum], chi1_index: int, chi2_index: int
) -> CovarianceEstimate:
    """Estimate eigenvalue second moments across independent trials.

    Hermitian spectra give the scalar E lambda1*lambda2; non-Hermitian give
    the 2x2 matrix of E[(Re1, Im1)^T (Re2, Im2)].
    """
    if len(spectra) < 1000:
        raise ValueError(f"need >= 1000 spectra, got {len(spectra)}")
    a1 = np.array([s.values[chi1_index] for s in spectra])
    a2 = np.array([s.values[chi2_index] for s in spectra])
    t = len(spectra)
    if all(s.hermitian for s in spectra):
        prod = a1.real * a2.real
        return CovarianceEstimate(
            estimate=float(prod.mean()),
            stderr=float(prod.std(ddof=1) / math.sqrt(t)),
            trials=t,
        )
    comps1 = (a1.real, a1.imag)
    comps2 = (a2.real, a2.imag)
    est = np.empty((2, 2))
    se = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            prod = comps1[i] * comps2[j]
            est[i, j] = prod.mean()
            se[i, j] = prod.std(ddof=1) / math.sqrt(t)
    return CovarianceEstimate(estimate=est, stderr=se, trials=t)
