"""Periodic grid, transform conventions, and Fourier multipliers.

Everything downstream lives on the torus ``[0, 2*pi)^n`` sampled at ``N``
points per axis, so frequencies form the integer lattice
``{-N/2, ..., N/2-1}^n`` and no second length scale enters. The transform
pair is the Riemann-sum analogue of the non-unitary convention

    coeffs(k) = sum_j f(x_j) exp(-i k.x_j) * (2*pi/N)^n
    f(x_j)    = (2*pi)^{-n} sum_k coeffs(k) exp(i k.x_j)

so frequency-side formulas transcribe directly into lattice sums.
Frequency tables are kept in natural (unshifted) DFT order; the
index -> integer-frequency map is :func:`lattice_axes`.

All values are immutable after construction and all reductions use
numpy's pairwise summation, so results do not depend on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

TWO_PI = 2.0 * np.pi


class GridMismatchError(ValueError):
    """Operands defined on different grids."""


def _as_readonly(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Grid:
    """Cubic periodic grid of period 2*pi with a power-of-two resolution.

    Attributes:
      n: spatial dimension, 2 or 3.
      N: points per axis; power of two, at least 8.
    """

    n: int
    N: int

    def __post_init__(self):
        if self.n not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {self.n}")
        if self.N < 8 or (self.N & (self.N - 1)) != 0:
            raise ValueError(f"N must be a power of two >= 8, got {self.N}")

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.n

    @property
    def npoints(self) -> int:
        return self.N ** self.n

    @property
    def dx(self) -> float:
        return TWO_PI / self.N

    @property
    def cell_volume(self) -> float:
        return (TWO_PI / self.N) ** self.n


@lru_cache(maxsize=64)
def lattice_axes(grid: Grid) -> tuple:
    """Integer frequency per DFT index, one array per axis."""
    ax = np.fft.fftfreq(grid.N, d=1.0 / grid.N)
    return tuple(_as_readonly(ax) for _ in range(grid.n))


@lru_cache(maxsize=64)
def frequency_grid(grid: Grid) -> np.ndarray:
    """Stacked integer frequencies, shape ``(n,) + grid.shape``."""
    axes = lattice_axes(grid)
    mesh = np.meshgrid(*axes, indexing="ij")
    return _as_readonly(np.stack(mesh))


@lru_cache(maxsize=64)
def radius_grid(grid: Grid) -> np.ndarray:
    """Euclidean frequency radius |k|, shape ``grid.shape``."""
    k = frequency_grid(grid)
    return _as_readonly(np.sqrt(np.sum(k * k, axis=0)))


@lru_cache(maxsize=64)
def direction_grid(grid: Grid) -> np.ndarray:
    """Unit directions k/|k| (zero vector at k=0), shape ``(n,)+shape``."""
    k = frequency_grid(grid)
    rho = radius_grid(grid)
    safe = np.where(rho > 0, rho, 1.0)
    return _as_readonly(k / safe)


@lru_cache(maxsize=64)
def x_axes(grid: Grid) -> tuple:
    ax = TWO_PI * np.arange(grid.N) / grid.N
    return tuple(_as_readonly(ax) for _ in range(grid.n))


@dataclass(frozen=True)
class GridFunction:
    """Complex samples f(x_j) on the grid, row-major."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != self.grid.shape:
            raise ValueError(f"values shape {vals.shape} != grid shape {self.grid.shape}")
        object.__setattr__(self, "values", _as_readonly(vals))


@dataclass(frozen=True)
class Spectrum:
    """Fourier coefficients per lattice frequency, unshifted DFT order."""

    grid: Grid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != self.grid.shape:
            raise ValueError(f"coeffs shape {c.shape} != grid shape {self.grid.shape}")
        object.__setattr__(self, "coeffs", _as_readonly(c))


@dataclass(frozen=True)
class Multiplier:
    """Frequency-indexed complex weight table m(k)."""

    grid: Grid
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.complex128)
        if w.shape != self.grid.shape:
            raise ValueError(f"weights shape {w.shape} != grid shape {self.grid.shape}")
        object.__setattr__(self, "weights", _as_readonly(w))

    def __mul__(self, other: "Multiplier") -> "Multiplier":
        _check_same_grid(self.grid, other.grid)
        return Multiplier(self.grid, self.weights * other.weights)


def _check_same_grid(a: Grid, b: Grid):
    if a != b:
        raise GridMismatchError(f"grid mismatch: {a} vs {b}")


def forward_dft(f: GridFunction) -> Spectrum:
    """Riemann-sum forward transform, coeffs(k) = sum f(x) e^{-ikx} dx^n."""
    coeffs = np.fft.fftn(f.values) * f.grid.cell_volume
    return Spectrum(f.grid, coeffs)


def inverse_dft(spec: Spectrum) -> GridFunction:
    """Inverse of :func:`forward_dft`: f(x) = (2 pi)^{-n} sum coeffs(k) e^{ikx}."""
    scale = (spec.grid.N / TWO_PI) ** spec.grid.n
    values = np.fft.ifftn(spec.coeffs) * scale
    return GridFunction(spec.grid, values)


def apply_multiplier(m: Multiplier, f: GridFunction) -> GridFunction:
    """m(D) f: multiply the spectrum of f pointwise by the weight table.

    The forward/inverse scalings cancel, so this is a bare fftn/ifftn pair.
    """
    _check_same_grid(m.grid, f.grid)
    out = np.fft.ifftn(m.weights * np.fft.fftn(f.values))
    return GridFunction(f.grid, out)


def multiplier_weights_applied(weights: np.ndarray, values: np.ndarray,
                               n_axes: int | None = None) -> np.ndarray:
    """Raw-array version of :func:`apply_multiplier` for batched hot paths.

    Either operand may carry leading batch axes; the transform runs over the
    trailing ``n_axes`` axes (default: the smaller of the two ranks, which is
    right whenever at most one operand is batched).
    """
    if n_axes is None:
        n_axes = min(weights.ndim, values.ndim)
    axes = tuple(range(-n_axes, 0))
    return np.fft.ifftn(weights * np.fft.fftn(values, axes=axes), axes=axes)


def sobolev_weight(grid: Grid, s: complex) -> Multiplier:
    """Bessel weight table <k>^s = exp(s log(1+|k|^2)^{1/2}); s may be complex."""
    log_jap = 0.5 * np.log1p(radius_grid(grid) ** 2)
    return Multiplier(grid, np.exp(complex(s) * log_jap))


def japanese_bracket(grid: Grid, s: complex) -> np.ndarray:
    """Raw ``<k>^s`` table (no Multiplier wrapper)."""
    return np.exp(complex(s) * 0.5 * np.log1p(radius_grid(grid) ** 2))


def l2_inner(f: GridFunction, g: GridFunction) -> complex:
    """Riemann inner product <f, g> = sum f conj(g) dx^n."""
    _check_same_grid(f.grid, g.grid)
    return complex(np.sum(f.values * np.conj(g.values)) * f.grid.cell_volume)


def constant_function(grid: Grid, value: complex = 1.0) -> GridFunction:
    return GridFunction(grid, np.full(grid.shape, value, dtype=np.complex128))


def plane_wave(grid: Grid, k: tuple) -> GridFunction:
    """exp(i k.x) for an integer lattice frequency k."""
    if len(k) != grid.n:
        raise ValueError("frequency dimension mismatch")
    axes = x_axes(grid)
    phase = np.zeros(grid.shape)
    for i, ki in enumerate(k):
        shape = [1] * grid.n
        shape[i] = grid.N
        phase = phase + ki * axes[i].reshape(shape)
    return GridFunction(grid, np.exp(1j * phase))
