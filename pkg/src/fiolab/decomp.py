"""Frequency-localization building blocks.

This module constructs every cutoff used downstream:

* a smooth radial bump with a flat plateau (exponential-glue transition),
* the dyadic shell family ``psi_j`` summing to one on the whole lattice,
* a square-normalized annular profile ``Psi`` with scale-invariant mass,
* parabolic cap localizers ``phi_omega`` concentrated on frequency
  paraboloids of angular width ``|k|^{-1/2}`` around a direction omega,
* quadrature rules on the unit sphere and the derived square-function
  weight.

Localizer tables are expensive; :func:`localizer_bank` memoizes them per
(grid, quadrature, bump) configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .grid import (
    Grid,
    Multiplier,
    direction_grid,
    inverse_dft,
    japanese_bracket,
    radius_grid,
    Spectrum,
)


class CapResolutionError(ValueError):
    """Sphere quadrature too coarse to resolve the requested cap."""


# ---------------------------------------------------------------------------
# bump profile


def _glue(t: np.ndarray) -> np.ndarray:
    # g(t) = exp(-1/t) for t > 0, else 0; smooth at 0 from the right
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


@dataclass(frozen=True)
class BumpProfile:
    """Radial profile with value 1 on [0, plateau] and 0 on [support, inf).

    The transition is the standard exponential glue
    ``h(u) = g(1-u) / (g(1-u) + g(u))`` with ``g(t) = exp(-1/t)`` on t > 0,
    rescaled to [plateau, support]. Monotone nonincreasing, C-infinity.
    """

    plateau: float = 0.5
    support: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.plateau < self.support):
            raise ValueError("need 0 < plateau < support")

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        u = (t - self.plateau) / (self.support - self.plateau)
        out = np.where(u <= 0.0, 1.0, 0.0)
        mid = (u > 0.0) & (u < 1.0)
        if np.any(mid):
            um = u[mid] if u.ndim else u.reshape(1)
            g1 = np.exp(-1.0 / (1.0 - um))
            g0 = np.exp(-1.0 / um)
            if u.ndim:
                out[mid] = g1 / (g1 + g0)
            else:
                out = np.asarray((g1 / (g1 + g0))[0])
        return out if out.ndim else float(out)

    def derivative(self, t, order: int = 1):
        """Central finite differences; adequate for diagnostics."""
        t = np.asarray(t, dtype=np.float64)
        h = 1e-4 * (self.support - self.plateau)
        if order == 1:
            return (self(t - 2 * h) - 8 * self(t - h) + 8 * self(t + h) - self(t + 2 * h)) / (12 * h)
        if order == 2:
            return (-self(t - 2 * h) + 16 * self(t - h) - 30 * self(t)
                    + 16 * self(t + h) - self(t + 2 * h)) / (12 * h * h)
        raise ValueError("orders 1 and 2 only")

    def scaled(self, factor: float) -> "BumpProfile":
        return BumpProfile(self.plateau * factor, self.support * factor)


STANDARD_BUMP = BumpProfile(0.5, 1.0)


# ---------------------------------------------------------------------------
# dyadic shell family


def shell_profile(j: int, rho, bump: BumpProfile = STANDARD_BUMP):
    """Radial profile of the j-th dyadic shell cutoff.

    psi_0 = bump(|.|), psi_j = bump(2^-j |.|) - bump(2^-j+1 |.|) for j >= 1;
    psi_j is supported in [2^{j-2}, 2^j] for the standard bump. j < 0 gives 0.
    """
    rho = np.asarray(rho, dtype=np.float64)
    if j < 0:
        return np.zeros_like(rho)
    if j == 0:
        return bump(rho)
    return bump(rho / 2.0 ** j) - bump(rho / 2.0 ** (j - 1))


@dataclass(frozen=True)
class LPFamily:
    """Dyadic shell multipliers summing to exactly 1 on the lattice.

    ``shells[j]`` for j <= j_max are the plain dyadic cutoffs; the final
    entry (index j_max + 1) is the closure tail ``1 - sum of the others``,
    absorbing everything above the top representable shell.
    """

    grid: Grid
    bump: BumpProfile
    j_max: int
    shells: tuple = field(repr=False)  # (j_max + 2) float tables

    @property
    def n_shells(self) -> int:
        return self.j_max + 2

    @property
    def tail_index(self) -> int:
        return self.j_max + 1

    def profile(self, j: int, rho):
        return shell_profile(j, rho, self.bump)

    def multiplier(self, j: int) -> Multiplier:
        return Multiplier(self.grid, self.shells[j].astype(np.complex128))

    def stacked(self) -> np.ndarray:
        """All shell tables stacked, shape (n_shells,) + grid.shape."""
        return np.stack(self.shells)


def dyadic_depth(N: int) -> int:
    """Largest plain shell index kept on an N-point axis: log2(N/2) - 1."""
    return int(np.log2(N // 2)) - 1


@lru_cache(maxsize=32)
def make_lp_family(grid: Grid, bump: BumpProfile = STANDARD_BUMP) -> LPFamily:
    """Build the shell family; the top entry absorbs the super-Nyquist tail."""
    if grid.N < 8:
        raise ValueError("grid too small for a dyadic family (N >= 8)")
    j_max = dyadic_depth(grid.N)
    rho = radius_grid(grid)
    shells = [shell_profile(j, rho, bump) for j in range(j_max + 1)]
    # telescoping: sum_{j<=J} psi_j = bump(2^-J rho); the closure tail tops it up
    tail = 1.0 - bump(rho / 2.0 ** j_max)
    shells.append(tail)
    total = np.sum(np.stack(shells), axis=0)
    shells[-1] = shells[-1] + (1.0 - total)  # absorb rounding so the sum is exact
    shells = tuple(np.ascontiguousarray(sh) for sh in shells)
    for sh in shells:
        sh.flags.writeable = False
    return LPFamily(grid, bump, j_max, shells)


# ---------------------------------------------------------------------------
# annular profile


def _log_trapezoid_nodes(lo: float, hi: float, nodes_per_octave: int):
    octaves = np.log2(hi / lo)
    count = max(2, int(np.ceil(octaves * nodes_per_octave)) + 1)
    v = np.linspace(np.log(lo), np.log(hi), count)
    w = np.full(count, v[1] - v[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    return np.exp(v), w


@dataclass(frozen=True)
class AnnularProfile:
    """Radial annular window with unit scale-invariant square mass.

    ``Psi = h / sqrt(c)`` where ``h(rho) = bump(rho/2) - bump(rho)`` and
    ``c = int h(u)^2 du/u``, so ``int Psi(sigma rho)^2 dsigma/sigma = 1``
    for every rho > 0. Supported in [plateau, 2 * support].
    """

    bump: BumpProfile
    norm_constant: float

    @property
    def lo(self) -> float:
        return self.bump.plateau

    @property
    def hi(self) -> float:
        return 2.0 * self.bump.support

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=np.float64)
        h = self.bump(rho / 2.0) - self.bump(rho)
        return h / np.sqrt(self.norm_constant)

    def square_mass(self, rho: float, nodes_per_octave: int = 64) -> float:
        """Quadrature check of int Psi(sigma rho)^2 dsigma/sigma at one rho."""
        if rho <= 0:
            raise ValueError("rho must be positive")
        sig, w = _log_trapezoid_nodes(self.lo / rho, self.hi / rho, nodes_per_octave)
        vals = self(sig * rho)
        return float(np.sum(w * vals * vals))


@lru_cache(maxsize=16)
def make_annular_profile(bump: BumpProfile = STANDARD_BUMP,
                         nodes_per_octave: int = 512) -> AnnularProfile:
    u, w = _log_trapezoid_nodes(bump.plateau, 2.0 * bump.support, nodes_per_octave)
    h = bump(u / 2.0) - bump(u)
    c = float(np.sum(w * h * h))
    return AnnularProfile(bump, c)


# ---------------------------------------------------------------------------
# sphere quadrature


@dataclass(frozen=True)
class SphereQuadrature:
    """Nodes and positive weights integrating over the unit sphere.

    n = 2: M uniform angles, weight 2*pi/M each (exact for trig degree < M).
    n = 3: Gauss-Legendre in the polar cosine times uniform azimuth.
    """

    n: int
    nodes: np.ndarray = field(repr=False)    # (M, n)
    weights: np.ndarray = field(repr=False)  # (M,)
    exact_degree: int = 0

    def __post_init__(self):
        object.__setattr__(self, "nodes", np.ascontiguousarray(self.nodes))
        object.__setattr__(self, "weights", np.ascontiguousarray(self.weights))
        self.nodes.flags.writeable = False
        self.weights.flags.writeable = False

    @property
    def count(self) -> int:
        return self.nodes.shape[0]

    def __hash__(self):
        return hash((self.n, self.count, self.exact_degree,
                     self.nodes.tobytes(), self.weights.tobytes()))

    def __eq__(self, other):
        return (isinstance(other, SphereQuadrature)
                and self.n == other.n
                and np.array_equal(self.nodes, other.nodes)
                and np.array_equal(self.weights, other.weights))


def make_sphere_quadrature(n: int, m_nodes: int = 256,
                           azimuth_nodes: int | None = None) -> SphereQuadrature:
    if n == 2:
        theta = 2.0 * np.pi * np.arange(m_nodes) / m_nodes
        nodes = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        weights = np.full(m_nodes, 2.0 * np.pi / m_nodes)
        return SphereQuadrature(2, nodes, weights, exact_degree=m_nodes - 1)
    if n == 3:
        n_pol = m_nodes
        n_az = azimuth_nodes if azimuth_nodes is not None else 2 * m_nodes
        mu, wmu = np.polynomial.legendre.leggauss(n_pol)
        phi = 2.0 * np.pi * np.arange(n_az) / n_az
        sin_t = np.sqrt(1.0 - mu ** 2)
        nodes = np.stack([
            np.repeat(sin_t, n_az) * np.tile(np.cos(phi), n_pol),
            np.repeat(sin_t, n_az) * np.tile(np.sin(phi), n_pol),
            np.repeat(mu, n_az),
        ], axis=1)
        weights = np.repeat(wmu, n_az) * (2.0 * np.pi / n_az)
        return SphereQuadrature(3, nodes, weights,
                                exact_degree=min(2 * n_pol - 1, n_az - 1))
    raise ValueError("sphere quadrature implemented for n in {2, 3}")


DEFAULT_QUAD_NODES = {2: 256, 3: 26}


@lru_cache(maxsize=16)
def default_quadrature(n: int) -> SphereQuadrature:
    if n == 3:
        return make_sphere_quadrature(3, 26, 52)
    return make_sphere_quadrature(2, DEFAULT_QUAD_NODES[2])


# ---------------------------------------------------------------------------
# cap normalization


def cap_normalizer(sigma: float, quad: SphereQuadrature,
                   bump: BumpProfile = STANDARD_BUMP) -> float:
    """Normalizing constant of the angular cap at scale sigma.

    Returns ``ces = (int_{S^{n-1}} bump(|e1 - nu| / sqrt(sigma))^2 dnu)^{-1/2}``
    evaluated with the given quadrature. Refuses when fewer than 8 nodes land
    inside the cap, since the integral is then unresolved.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    e1 = np.zeros(quad.n)
    e1[0] = 1.0
    dist = np.linalg.norm(quad.nodes - e1, axis=1)
    vals = bump(dist / np.sqrt(sigma))
    inside = int(np.count_nonzero(vals > 0))
    if inside < 8:
        raise CapResolutionError(
            f"cap at sigma={sigma:g} holds only {inside} quadrature nodes (< 8)")
    integral = float(np.sum(quad.weights * vals * vals))
    return integral ** -0.5


def cap_normalizer_exact(sigma, n: int, bump: BumpProfile = STANDARD_BUMP,
                         gl_nodes: int = 96):
    """Cap constant via the azimuthally reduced 1-D integral.

    The cap integrand depends only on the polar angle away from e1, so for
    any dimension the sphere integral collapses to one dimension:
    n=2: 2 int_0^pi f(theta) dtheta; n=3: 2 pi int_0^pi f(theta) sin(theta) dtheta
    with f(theta) = bump(2 sin(theta/2)/sqrt(sigma))^2. Accurate at every
    sigma, which the node-based rule is not; used inside localizer tables.
    """
    sigma_arr = np.atleast_1d(np.asarray(sigma, dtype=np.float64))
    if np.any(sigma_arr <= 0):
        raise ValueError("sigma must be positive")
    mu, wmu = np.polynomial.legendre.leggauss(gl_nodes)
    out = np.empty_like(sigma_arr)
    for i, s in enumerate(sigma_arr):
        half_chord = min(1.0, bump.support * np.sqrt(s) / 2.0)
        theta_star = 2.0 * np.arcsin(half_chord)
        theta = 0.5 * theta_star * (mu + 1.0)
        w = 0.5 * theta_star * wmu
        f = bump(2.0 * np.sin(theta / 2.0) / np.sqrt(s)) ** 2
        if n == 2:
            integral = 2.0 * np.sum(w * f)
        elif n == 3:
            integral = 2.0 * np.pi * np.sum(w * f * np.sin(theta))
        else:
            raise ValueError("n in {2, 3}")
        out[i] = integral ** -0.5
    return out if np.ndim(sigma) else float(out[0])


# ---------------------------------------------------------------------------
# parabolic localizers


SIGMA_TOP = 4.0  # upper truncation of the scale integral


@lru_cache(maxsize=32)
def _sigma_quadrature(grid: Grid, bump: BumpProfile, nodes_per_octave: int):
    """Shared log-scale quadrature covering every window on the lattice.

    Nodes run from SIGMA_TOP down far enough that sigma * rho_max reaches
    below the annular support for the largest lattice radius, at the stated
    density per octave. Per-node cap constants ride along.
    """
    rho_max = float(np.max(radius_grid(grid)))
    annulus = make_annular_profile(bump)
    sigma_min = annulus.lo / rho_max / 2.0
    sig, w = _log_trapezoid_nodes(sigma_min, SIGMA_TOP, nodes_per_octave)
    caps = cap_normalizer_exact(sig, grid.n, bump)
    psi_lo, psi_hi = annulus.lo, annulus.hi
    return sig, w, caps, annulus, psi_lo, psi_hi


@dataclass(frozen=True)
class ParabolicLocalizer:
    """Cap localizer table phi_omega(k) for one direction omega.

    Vanishes for |k| < 1/8 and for |khat - omega| > 2 |k|^{-1/2}; built by a
    log-trapezoid scale integral of annulus x cap at >= 64 nodes per octave.
    """

    grid: Grid
    omega: tuple
    table: np.ndarray = field(repr=False)

    def multiplier(self) -> Multiplier:
        return Multiplier(self.grid, self.table.astype(np.complex128))


def _localizer_tables(grid: Grid, omegas: np.ndarray,
                      bump: BumpProfile, nodes_per_octave: int) -> np.ndarray:
    """Tables for a batch of directions, shape (n_omega,) + grid.shape.

    The scale integral is summed node by node over all directions at once;
    each node only touches its active annulus, so the total work is
    (window octaves) * (nodes/octave) * N^n per direction.
    """
    sig, w, caps, annulus, psi_lo, psi_hi = _sigma_quadrature(grid, bump, nodes_per_octave)
    rho = radius_grid(grid).ravel()
    khat = direction_grid(grid).reshape(grid.n, -1)
    npts = rho.size
    nomega = omegas.shape[0]

    dist = np.sqrt(np.maximum(0.0, 2.0 - 2.0 * (omegas @ khat)))  # (nomega, npts)
    out = np.zeros((nomega, npts))
    sqrt_sig = np.sqrt(sig)
    for m in range(sig.size):
        lo, hi = psi_lo / sig[m], psi_hi / sig[m]
        idx = np.nonzero((rho >= lo) & (rho <= hi))[0]
        if idx.size == 0:
            continue
        radial = w[m] * caps[m] * annulus(sig[m] * rho[idx])
        cap_vals = bump(dist[:, idx] / sqrt_sig[m])
        out[:, idx] += radial[None, :] * cap_vals
    # enforce the support facts exactly (they already hold up to rounding)
    with np.errstate(divide="ignore"):
        angular_ok = dist <= 2.0 / np.sqrt(np.where(rho > 0, rho, np.inf))[None, :]
    out[~angular_ok] = 0.0
    out[:, rho < 0.125] = 0.0
    return out.reshape((nomega,) + grid.shape)


def make_parabolic_localizer(grid: Grid, omega, bump: BumpProfile = STANDARD_BUMP,
                             nodes_per_octave: int = 64) -> ParabolicLocalizer:
    omega = np.asarray(omega, dtype=np.float64)
    if omega.shape != (grid.n,):
        raise ValueError("omega dimension mismatch")
    if abs(np.linalg.norm(omega) - 1.0) > 1e-12:
        raise ValueError("omega must be a unit vector")
    table = _localizer_tables(grid, omega[None, :], bump, nodes_per_octave)[0]
    return ParabolicLocalizer(grid, tuple(omega.tolist()), table)


@lru_cache(maxsize=16)
def localizer_bank(grid: Grid, quad: SphereQuadrature,
                   bump: BumpProfile = STANDARD_BUMP,
                   nodes_per_octave: int = 64) -> np.ndarray:
    """Localizer tables for every quadrature direction, memoized.

    Shape ``(quad.count,) + grid.shape``; read-only.
    """
    tables = _localizer_tables(grid, quad.nodes, bump, nodes_per_octave)
    tables.flags.writeable = False
    return tables


def square_function_weight(quad: SphereQuadrature, grid: Grid,
                           bump: BumpProfile = STANDARD_BUMP) -> Multiplier:
    """Multiplier G with G(k)^2 = sum_i w_i phi_{omega_i}(k)^2.

    At p = 2 the directional part of the parabolic norm equals ||G(D) f||_2
    by Parseval, which gives an independent cross-check path.
    """
    bank = localizer_bank(grid, quad, bump)
    g2 = np.tensordot(quad.weights, bank * bank, axes=(0, 0))
    return Multiplier(grid, np.sqrt(g2).astype(np.complex128))


def low_frequency_cutoff(grid: Grid, bump: BumpProfile = STANDARD_BUMP) -> Multiplier:
    """Low cutoff q(k) = bump(|k|/4): equals 1 for |k| <= 4*plateau."""
    return Multiplier(grid, bump(radius_grid(grid) / 4.0).astype(np.complex128))


def localizer_kernel_l1(grid: Grid, omega, bump: BumpProfile = STANDARD_BUMP) -> float:
    """l1 norm of the space-side kernel of <D>^{-2n} phi_omega(D)."""
    loc = make_parabolic_localizer(grid, omega, bump)
    weights = japanese_bracket(grid, -2 * grid.n) * loc.table
    kernel = inverse_dft(Spectrum(grid, weights.astype(np.complex128)))
    return float(np.sum(np.abs(kernel.values)) * grid.cell_volume)
