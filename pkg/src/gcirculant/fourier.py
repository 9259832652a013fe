"""Fourier transform on a finite abelian group: naive oracle and fast path.

The forward transform is the unnormalized sum fhat(chi) = sum_a f(a) chi(a);
the 1/sqrt(N) isometry factor is applied downstream where the spectra are
formed.  The fast path applies a 1-D transform along each cyclic factor in
turn: a single butterfly for order 2, radix-2 recursion for other powers of
two, and a dense cached kernel otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .groups import (
    GroupSpec,
    character_column,
    character_from_index,
    coords_matrix,
    phasor_array,
    _ravel_coords,
)


@dataclass
class GroupFunction:
    """A complex-valued function on a group (or its dual), indexed by index."""

    group: GroupSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != (self.group.size,):
            raise ValueError(
                f"expected {self.group.size} values, got shape {self.values.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("function values must be finite")


def _pow2_twiddles(d: int) -> np.ndarray:
    # exp(2*pi*i*k/d) for k in [0, d/2); quarter turns exact
    return phasor_array(np.arange(d // 2, dtype=np.int64), d)


def _dense_kernel(d: int) -> np.ndarray:
    # K[t, a] = exp(2*pi*i * t*a/d)
    t = np.arange(d, dtype=np.int64)
    return phasor_array(np.outer(t, t), d)


class TransformPlan:
    """Per-group transform with cached per-axis twiddles; immutable once built.

    A plan may be shared across threads: transforms allocate their own
    working arrays and never mutate plan state.
    """

    def __init__(self, group: GroupSpec):
        self.group = group
        self._kernels: list[tuple[str, np.ndarray | None]] = []
        for d in group.orders:
            if d == 2:
                self._kernels.append(("butterfly", None))
            elif d & (d - 1) == 0:
                self._kernels.append(("pow2", _pow2_twiddles(d)))
            else:
                self._kernels.append(("dense", _dense_kernel(d)))

    def forward(self, values: np.ndarray) -> np.ndarray:
        """fhat[t] = sum_a values[a] * chi_t(a), both sides index-encoded."""
        g = self.group
        x = np.ascontiguousarray(values, dtype=np.complex128)
        if x.shape != (g.size,):
            raise ValueError(f"expected {g.size} values, got shape {x.shape}")
        post = g.size
        pre = 1
        for d, (kind, table) in zip(g.orders, self._kernels):
            post //= d
            x3 = x.reshape(pre, d, post)
            if kind == "butterfly":
                a, b = x3[:, 0, :], x3[:, 1, :]
                x = np.stack((a + b, a - b), axis=1)
            elif kind == "pow2":
                x = _pow2_axis(x3, table)
            else:
                x = np.einsum("ts,psq->ptq", table, x3)
            x = x.reshape(-1)
            pre *= d
        return x

    def inverse(self, values: np.ndarray) -> np.ndarray:
        """Inverse of forward: (1/N) * conjugate-transform."""
        x = np.asarray(values, dtype=np.complex128)
        return np.conj(self.forward(np.conj(x))) / self.group.size


def _pow2_axis(x3: np.ndarray, twiddles: np.ndarray) -> np.ndarray:
    d = x3.shape[1]
    if d == 1:
        return x3
    even = _pow2_axis(x3[:, 0::2, :], twiddles[::2])
    odd = _pow2_axis(x3[:, 1::2, :], twiddles[::2])
    t = twiddles[None, :, None] * odd
    return np.concatenate((even + t, even - t), axis=1)


@lru_cache(maxsize=64)
def get_plan(group: GroupSpec) -> TransformPlan:
    return TransformPlan(group)


def dft_naive(f: GroupFunction) -> GroupFunction:
    """O(N^2) transform straight from the definition; the correctness oracle."""
    g = f.group
    out = np.empty(g.size, dtype=np.complex128)
    for t in range(g.size):
        chi = character_column(g, character_from_index(g, t))
        out[t] = np.dot(chi, f.values)
    return GroupFunction(g, out)


def fft_fast(f: GroupFunction) -> GroupFunction:
    """Fast axis-wise transform; agrees with dft_naive to rounding error."""
    return GroupFunction(f.group, get_plan(f.group).forward(f.values))


def inverse_fft(fhat: GroupFunction) -> GroupFunction:
    """Inverse transform: inverse_fft(fft_fast(f)) recovers f."""
    return GroupFunction(fhat.group, get_plan(fhat.group).inverse(fhat.values))


@lru_cache(maxsize=8)
def _difference_table(g: GroupSpec) -> np.ndarray:
    """(N, N) int64 table of index(a * b^-1); cached, read-only."""
    coords = coords_matrix(g)
    orders = np.array(g.orders, dtype=np.int64)
    diff = np.mod(coords[:, None, :] - coords[None, :, :], orders)
    out = _ravel_coords(g, diff)
    out.setflags(write=False)
    return out


def convolve(f: GroupFunction, h: GroupFunction) -> GroupFunction:
    """(f * h)(a) = sum_b f(a b^-1) h(b), computed directly for oracle use."""
    if f.group != h.group:
        raise ValueError("convolution operands must live on the same group")
    g = f.group
    table = _difference_table(g)
    out = f.values[table] @ h.values
    return GroupFunction(g, out)
