"""Rough symbols a(x, eta): representations, seminorms, smoothing, and the
analytic interpolation family.

A symbol is stored either densely (full x-by-eta table, memory-guarded) or
separably as a rank-K sum ``a(x, eta) = sum_m b_m(x) e_m(eta)`` of grid
functions times frequency profiles. Frequency profiles carry their own
eta-derivatives: closed-form for bracket powers, radial chain rule for
shell windows, Leibniz for products, and finite differences (with the two
outermost rings excluded) for bare tables and dense symbols.

The class seminorm measured here is the smallest M bounding both

* ``|d_eta^alpha a(x, eta)| <= M <eta>^{m - |alpha|}`` and
* ``|| d_eta^alpha a(., eta) ||_{dyadic-sup, r} <= M <eta>^{m - |alpha| + r delta}``

over all |alpha| <= l.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .decomp import BumpProfile, LPFamily, STANDARD_BUMP, make_lp_family, shell_profile
from .grid import (
    Grid,
    GridFunction,
    Spectrum,
    constant_function,
    frequency_grid,
    inverse_dft,
    japanese_bracket,
    multiplier_weights_applied,
    radius_grid,
)
from .prng import complex_normal, derive_seed, uniform

DENSE_MAX_N = 48  # dense tables are N^{2n}; ~85 MB at n=2, N=48


# ---------------------------------------------------------------------------
# frequency profiles with derivatives


class EtaProfile:
    """Frequency-side factor of a separable symbol term."""

    def table(self, grid: Grid) -> np.ndarray:
        vals, _ = self.dtable(grid, (0,) * grid.n)
        return vals

    def dtable(self, grid: Grid, alpha: tuple):
        """(values of d^alpha, validity mask or None). |alpha| <= 2."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


def _check_alpha(alpha, n):
    if len(alpha) != n or any(a < 0 for a in alpha):
        raise ValueError(f"bad multi-index {alpha}")
    if sum(alpha) > 2:
        raise ValueError("eta-derivatives are available up to total order 2")


@dataclass(frozen=True)
class ConstantProfile(EtaProfile):
    value: complex = 1.0

    def dtable(self, grid, alpha):
        _check_alpha(alpha, grid.n)
        if sum(alpha) == 0:
            return np.full(grid.shape, complex(self.value), dtype=np.complex128), None
        return np.zeros(grid.shape, dtype=np.complex128), None

    def to_dict(self):
        v = complex(self.value)
        return {"type": "constant", "value": [v.real, v.imag]}


@dataclass(frozen=True)
class SobolevProfile(EtaProfile):
    """<eta>^s with exact derivatives; s may be complex."""

    s: complex

    def dtable(self, grid, alpha):
        _check_alpha(alpha, grid.n)
        s = complex(self.s)
        order = sum(alpha)
        base = japanese_bracket(grid, s)
        if order == 0:
            return base, None
        k = frequency_grid(grid)
        if order == 1:
            i = alpha.index(1)
            return s * k[i] * japanese_bracket(grid, s - 2), None
        if 2 in alpha:
            i = alpha.index(2)
            vals = s * japanese_bracket(grid, s - 2) + s * (s - 2) * k[i] ** 2 * japanese_bracket(grid, s - 4)
            return vals, None
        i, j = [ix for ix, a in enumerate(alpha) if a == 1]
        return s * (s - 2) * k[i] * k[j] * japanese_bracket(grid, s - 4), None

    def to_dict(self):
        s = complex(self.s)
        return {"type": "sobolev", "s": [s.real, s.imag]}


class _Radial(EtaProfile):
    """Radial profile P(|eta|) with chain-rule derivatives.

    Subclasses supply ``_p(rho, order)``; the chain rule through |eta| uses
    d_i P = P' etahat_i and
    d_ij P = P'' etahat_i etahat_j + P' (delta_ij - etahat_i etahat_j)/rho,
    with the origin handled by flatness of every profile used here.
    """

    def _p(self, rho, order: int):
        raise NotImplementedError

    def dtable(self, grid, alpha):
        _check_alpha(alpha, grid.n)
        rho = radius_grid(grid)
        order = sum(alpha)
        if order == 0:
            return self._p(rho, 0).astype(np.complex128), None
        k = frequency_grid(grid)
        safe = np.where(rho > 0, rho, 1.0)
        hat = k / safe
        p1 = self._p(rho, 1)
        if order == 1:
            i = alpha.index(1)
            vals = p1 * hat[i]
        else:
            p2 = self._p(rho, 2)
            radial_part = np.where(rho > 0, p1 / safe, 0.0)
            if 2 in alpha:
                i = alpha.index(2)
                vals = p2 * hat[i] ** 2 + radial_part * (1.0 - hat[i] ** 2)
            else:
                i, j = [ix for ix, a in enumerate(alpha) if a == 1]
                vals = (p2 - radial_part) * hat[i] * hat[j]
        vals = np.where(rho > 0, vals, 0.0)  # profiles are flat at the origin
        return vals.astype(np.complex128), None


@dataclass(frozen=True)
class ShellProfile(_Radial):
    """Dyadic shell window psi_j(|eta|)."""

    j: int
    bump: BumpProfile = STANDARD_BUMP

    def _p(self, rho, order):
        if order == 0:
            return shell_profile(self.j, rho, self.bump)
        if self.j == 0:
            return self.bump.derivative(rho, order)
        sj, sj1 = 2.0 ** self.j, 2.0 ** (self.j - 1)
        return (self.bump.derivative(rho / sj, order) / sj ** order
                - self.bump.derivative(rho / sj1, order) / sj1 ** order)

    def to_dict(self):
        return {"type": "shell", "j": self.j,
                "plateau": self.bump.plateau, "support": self.bump.support}


@dataclass(frozen=True)
class TailProfile(_Radial):
    """Closure tail 1 - bump(|eta| / 2^j_max) absorbing the top shells."""

    j_max: int
    bump: BumpProfile = STANDARD_BUMP

    def _p(self, rho, order):
        s = 2.0 ** self.j_max
        if order == 0:
            return 1.0 - self.bump(rho / s)
        return -self.bump.derivative(rho / s, order) / s ** order

    def to_dict(self):
        return {"type": "tail", "j_max": self.j_max,
                "plateau": self.bump.plateau, "support": self.bump.support}


@dataclass(frozen=True)
class ProductProfile(EtaProfile):
    left: EtaProfile
    right: EtaProfile

    def dtable(self, grid, alpha):
        _check_alpha(alpha, grid.n)
        order = sum(alpha)
        f0, mf = self.left.dtable(grid, (0,) * grid.n)
        g0, mg = self.right.dtable(grid, (0,) * grid.n)
        mask = _and_masks(mf, mg)
        if order == 0:
            return f0 * g0, mask
        units = [tuple(1 if ix == i else 0 for ix in range(grid.n))
                 for i in range(grid.n)]
        if order == 1:
            i = alpha.index(1)
            f1, m1 = self.left.dtable(grid, units[i])
            g1, m2 = self.right.dtable(grid, units[i])
            return f1 * g0 + f0 * g1, _and_masks(mask, _and_masks(m1, m2))
        idx = [ix for ix, a in enumerate(alpha) for _ in range(a)]
        i, j = idx[0], idx[1]
        fi, ma = self.left.dtable(grid, units[i])
        fj, mb = self.left.dtable(grid, units[j])
        gi, mc = self.right.dtable(grid, units[i])
        gj, md = self.right.dtable(grid, units[j])
        fij, me = self.left.dtable(grid, alpha)
        gij, mf2 = self.right.dtable(grid, alpha)
        vals = fij * g0 + fi * gj + fj * gi + f0 * gij
        for m in (ma, mb, mc, md, me, mf2):
            mask = _and_masks(mask, m)
        return vals, mask

    def to_dict(self):
        return {"type": "product",
                "factors": [self.left.to_dict(), self.right.to_dict()]}


@dataclass(frozen=True)
class TableProfile(EtaProfile):
    """Arbitrary weight table; derivatives by 4th-order differences.

    Differences run along monotone (shifted) frequency axes; the two
    outermost rings per axis end are invalid and masked out of suprema.
    """

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.values, dtype=np.complex128))
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __hash__(self):
        return hash(self.values.tobytes())

    def __eq__(self, other):
        return isinstance(other, TableProfile) and np.array_equal(self.values, other.values)

    def dtable(self, grid, alpha):
        _check_alpha(alpha, grid.n)
        if self.values.shape != grid.shape:
            raise ValueError("table shape does not match grid")
        if sum(alpha) == 0:
            return self.values, None
        vals, mask = _fd_derivative(self.values, alpha)
        return vals, mask

    def to_dict(self):
        return {"type": "table"}


def _and_masks(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a & b


_FD1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_FD2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


def _fd_axis(arr: np.ndarray, axis: int, order: int):
    """4th-order centered difference along one axis of a shifted-frequency
    array (unit spacing). Returns (derivative, valid mask)."""
    shifted = np.fft.fftshift(arr, axes=axis)
    coeffs = _FD1 if order == 1 else _FD2
    out = np.zeros_like(shifted)
    for offset, c in zip(range(-2, 3), coeffs):
        if c != 0.0:
            out += c * np.roll(shifted, -offset, axis=axis)
    out = np.fft.ifftshift(out, axes=axis)
    # the stencil wraps around the shifted array, so two entries at each end
    # of the axis are invalid
    shifted_mask = np.ones(arr.shape, dtype=bool)
    sl = [slice(None)] * arr.ndim
    sl[axis] = slice(0, 2)
    shifted_mask[tuple(sl)] = False
    sl[axis] = slice(arr.shape[axis] - 2, arr.shape[axis])
    shifted_mask[tuple(sl)] = False
    mask = np.fft.ifftshift(shifted_mask, axes=axis)
    return out, mask


def _fd_derivative(table: np.ndarray, alpha: tuple, axis_offset: int = 0):
    """Apply the multi-index stencil; axes are alpha-index + axis_offset."""
    vals = table
    mask = None
    for i, a in enumerate(alpha):
        if a == 0:
            continue
        vals, m = _fd_axis(vals, axis_offset + i, a)
        full = np.ones(table.shape, dtype=bool) & m
        mask = _and_masks(mask, full)
    return vals, mask


def profile_from_dict(d: dict, payload: np.ndarray | None = None,
                      bump: BumpProfile = STANDARD_BUMP) -> EtaProfile:
    t = d["type"]
    if t == "constant":
        re, im = d["value"]
        return ConstantProfile(complex(re, im))
    if t == "sobolev":
        re, im = d["s"]
        return SobolevProfile(complex(re, im))
    if t == "shell":
        return ShellProfile(d["j"], BumpProfile(d["plateau"], d["support"]))
    if t == "tail":
        return TailProfile(d["j_max"], BumpProfile(d["plateau"], d["support"]))
    if t == "product":
        f0 = profile_from_dict(d["factors"][0], payload, bump)
        f1 = profile_from_dict(d["factors"][1], payload, bump)
        return ProductProfile(f0, f1)
    if t == "table":
        if payload is None:
            raise ValueError("table profile needs its payload block")
        return TableProfile(payload)
    raise ValueError(f"unknown profile type {t!r}")


# ---------------------------------------------------------------------------
# symbol container


@dataclass(frozen=True)
class RoughSymbol:
    """a(x, eta), dense or separable, on a shared grid for x and eta."""

    grid: Grid
    rep: str                      # "dense" | "separable"
    dense_table: np.ndarray | None = field(default=None, repr=False)
    terms: tuple = field(default=(), repr=False)  # ((GridFunction, EtaProfile), ...)

    def __post_init__(self):
        if self.rep == "dense":
            if self.grid.n != 2 or self.grid.N > DENSE_MAX_N:
                raise ValueError(
                    f"dense symbols are limited to n=2, N <= {DENSE_MAX_N}")
            tab = np.ascontiguousarray(np.asarray(self.dense_table, dtype=np.complex128))
            if tab.shape != self.grid.shape * 2:
                raise ValueError("dense table must have shape x-shape + eta-shape")
            tab.flags.writeable = False
            object.__setattr__(self, "dense_table", tab)
        elif self.rep == "separable":
            if not self.terms:
                raise ValueError("separable symbol needs at least one term")
            for b, e in self.terms:
                if b.grid != self.grid:
                    raise ValueError("term grid mismatch")
                if not isinstance(e, EtaProfile):
                    raise ValueError("eta factor must be an EtaProfile")
        else:
            raise ValueError(f"unknown representation {self.rep!r}")

    @property
    def rank(self) -> int:
        return len(self.terms) if self.rep == "separable" else 0

    def x_matrix(self) -> np.ndarray:
        """(npoints, K) matrix stacking the x-factors (separable only)."""
        return np.stack([b.values.ravel() for b, _ in self.terms], axis=1)

    def profile_tables(self, alpha=None):
        """(K, npoints) stacked eta factors (or their derivatives), + mask."""
        alpha = alpha or (0,) * self.grid.n
        rows, mask = [], None
        for _, e in self.terms:
            vals, m = e.dtable(self.grid, tuple(alpha))
            rows.append(vals.ravel())
            mask = _and_masks(mask, m)
        return np.stack(rows, axis=0), (None if mask is None else mask.ravel())

    def columns(self, eta_flat_idx: np.ndarray) -> np.ndarray:
        """a(., eta) for the requested flattened eta indices: (npoints, c)."""
        if self.rep == "dense":
            flat = self.dense_table.reshape(self.grid.npoints, self.grid.npoints)
            return flat[:, eta_flat_idx]
        profs, _ = self.profile_tables()
        return self.x_matrix() @ profs[:, eta_flat_idx]

    def as_dense(self) -> "RoughSymbol":
        if self.rep == "dense":
            return self
        cols = self.columns(np.arange(self.grid.npoints))
        # (x-points, eta-points) row-major on both sides is exactly the
        # x-axes + eta-axes dense layout
        table = cols.reshape(self.grid.shape * 2)
        return RoughSymbol(self.grid, "dense", dense_table=table)

    def scaled(self, c: complex) -> "RoughSymbol":
        if self.rep == "dense":
            return RoughSymbol(self.grid, "dense", dense_table=c * self.dense_table)
        terms = tuple((GridFunction(self.grid, c * b.values), e) for b, e in self.terms)
        return RoughSymbol(self.grid, "separable", terms=terms)


def dense_symbol(grid: Grid, table: np.ndarray) -> RoughSymbol:
    return RoughSymbol(grid, "dense", dense_table=table)


def separable_symbol(grid: Grid, terms) -> RoughSymbol:
    return RoughSymbol(grid, "separable", terms=tuple(terms))


def symbol_add(a: RoughSymbol, b: RoughSymbol) -> RoughSymbol:
    if a.grid != b.grid:
        raise ValueError("grid mismatch")
    if a.rep == "dense" and b.rep == "dense":
        return dense_symbol(a.grid, a.dense_table + b.dense_table)
    if a.rep == "separable" and b.rep == "separable":
        return separable_symbol(a.grid, a.terms + b.terms)
    raise ValueError("cannot add mixed representations")


def symbol_sub(a: RoughSymbol, b: RoughSymbol) -> RoughSymbol:
    return symbol_add(a, b.scaled(-1.0))


def max_abs_diff(a: RoughSymbol, b: RoughSymbol, chunk: int = 512) -> float:
    """max over the full (x, eta) table of |a - b|, chunked over eta."""
    if a.grid != b.grid:
        raise ValueError("grid mismatch")
    npts = a.grid.npoints
    worst = 0.0
    for start in range(0, npts, chunk):
        idx = np.arange(start, min(start + chunk, npts))
        worst = max(worst, float(np.max(np.abs(a.columns(idx) - b.columns(idx)))))
    return worst


def max_abs(a: RoughSymbol, chunk: int = 512) -> float:
    npts = a.grid.npoints
    worst = 0.0
    for start in range(0, npts, chunk):
        idx = np.arange(start, min(start + chunk, npts))
        worst = max(worst, float(np.max(np.abs(a.columns(idx)))))
    return worst


# ---------------------------------------------------------------------------
# seminorm


@dataclass
class SymbolSeminorm:
    """Smallest bound found for the two derivative families up to order l."""

    value: float
    per_alpha: list
    params: dict = field(default_factory=dict)

    def to_dict(self):
        return {"value": self.value, "per_alpha": list(self.per_alpha),
                "params": dict(self.params)}


def _multi_indices(n: int, l: int):
    out = []
    if n == 2:
        for total in range(l + 1):
            for a1 in range(total + 1):
                out.append((total - a1, a1))
    else:
        for total in range(l + 1):
            for a1 in range(total + 1):
                for a2 in range(total - a1 + 1):
                    out.append((a1, a2, total - a1 - a2))
    return out


def _masked_max(values: np.ndarray, mask) -> float:
    if mask is not None:
        if not np.any(mask):
            return 0.0
        values = values[mask]
    return float(np.max(values)) if values.size else 0.0


def seminorm(a: RoughSymbol, r: float, m: float, delta: float, l: int,
             lp: LPFamily | None = None, chunk: int = 1024) -> SymbolSeminorm:
    """Measure the class seminorm of ``a`` at parameters (r, m, delta, l).

    Dense symbols take eta-derivatives by finite differences and allow
    l <= 2; separable symbols use their profiles' derivative tables (also
    capped at order 2, which covers every reported configuration).
    """
    if l > 2:
        raise ValueError("seminorm derivative order is capped at l = 2")
    grid = a.grid
    lp = lp or make_lp_family(grid)
    rho = radius_grid(grid).ravel()
    bracket = np.sqrt(1.0 + rho * rho)
    shell_weights = 2.0 ** (r * np.arange(lp.n_shells))
    lp_stack = lp.stacked().reshape(lp.n_shells, -1)

    per_alpha = []
    overall = 0.0
    for alpha in _multi_indices(grid.n, l):
        aa = sum(alpha)
        eta_exp = bracket ** (m - aa)
        x_exp = bracket ** (m - aa + r * delta)
        if a.rep == "dense":
            dvals, dmask = _fd_derivative(a.dense_table, alpha, axis_offset=grid.n)
            flat = dvals.reshape(grid.npoints, grid.npoints)  # (x, eta)
            maskf = None if dmask is None else dmask.reshape(grid.npoints, grid.npoints)[0]
            sup_x = np.max(np.abs(flat), axis=0)
            sup_eta_family = _masked_max(sup_x / eta_exp, maskf)
            spec_x = np.fft.fftn(dvals, axes=tuple(range(grid.n)))
            zyg = np.zeros(grid.npoints)
            for i in range(lp.n_shells):
                w = lp.shells[i].reshape(grid.shape + (1,) * grid.n)
                fld = np.fft.ifftn(w * spec_x, axes=tuple(range(grid.n)))
                zyg = np.maximum(
                    zyg, shell_weights[i] * np.max(
                        np.abs(fld.reshape(grid.npoints, grid.npoints)), axis=0))
            x_family = _masked_max(zyg / x_exp, maskf)
        else:
            profs, pmask = a.profile_tables(alpha)
            xmat = a.x_matrix()
            filtered = _shell_filtered_terms(a, lp)
            term_alive = np.array(
                [[np.max(np.abs(filtered[i][:, mm])) > 0 for mm in range(a.rank)]
                 for i in range(lp.n_shells)])
            sup_eta_family = 0.0
            x_family = 0.0
            for start in range(0, grid.npoints, chunk):
                sl = slice(start, min(start + chunk, grid.npoints))
                cmask = None if pmask is None else pmask[sl]
                cols = profs[:, sl]
                active = np.nonzero(np.max(np.abs(cols), axis=1) > 0)[0]
                if active.size == 0:
                    continue
                v = np.abs(xmat[:, active] @ cols[active]).max(axis=0)
                sup_eta_family = max(
                    sup_eta_family, _masked_max(v / eta_exp[sl], cmask))
                zyg = np.zeros(cols.shape[1])
                for i in range(lp.n_shells):
                    act_i = active[term_alive[i][active]]
                    if act_i.size == 0:
                        continue
                    vi = np.abs(filtered[i][:, act_i] @ cols[act_i]).max(axis=0)
                    zyg = np.maximum(zyg, shell_weights[i] * vi)
                x_family = max(x_family, _masked_max(zyg / x_exp[sl], cmask))
        bound = max(sup_eta_family, x_family)
        overall = max(overall, bound)
        per_alpha.append({"alpha": list(alpha), "eta_bound": sup_eta_family,
                          "x_bound": x_family})
    return SymbolSeminorm(overall, per_alpha,
                          params={"r": r, "m": m, "delta": delta, "l": l})


def _shell_filtered_terms(a: RoughSymbol, lp: LPFamily):
    """psi_i(D) applied to every x-factor: list over shells of (npts, K)."""
    stack = np.stack([b.values for b, _ in a.terms])  # (K,) + shape
    out = []
    for i in range(lp.n_shells):
        fld = multiplier_weights_applied(lp.shells[i][None], stack, n_axes=a.grid.n)
        out.append(fld.reshape(a.rank, -1).T.copy())
    return out


# ---------------------------------------------------------------------------
# symbol smoothing


@dataclass(frozen=True)
class SmoothingSplit:
    """Paradifferential split a = sharp + flat at cutback exponent beta."""

    sharp: RoughSymbol
    flat: RoughSymbol
    beta: float


def _lowpass_weights(grid: Grid, scale: float, bump: BumpProfile) -> np.ndarray:
    return bump(radius_grid(grid) / scale)


def smooth_split(a: RoughSymbol, beta: float,
                 smoothing_bump: BumpProfile = STANDARD_BUMP,
                 lp: LPFamily | None = None) -> SmoothingSplit:
    """Split a into a spatially smoothed part and the rough remainder.

    On the shell |eta| ~ 2^k the x-variable is low-passed at radius
    2^{beta k}; the flat part keeps the complement. Both parts are built by
    independent shell sums (the flat part is not computed as a difference),
    and they recombine exactly because the shell family sums to one.
    """
    if not (0.0 <= beta <= 1.0):
        raise ValueError("beta must lie in [0, 1]")
    grid = a.grid
    lp = lp or make_lp_family(grid)
    rho_x = radius_grid(grid)
    if a.rep == "separable":
        sharp_terms, flat_terms = [], []
        for b, e in a.terms:
            spec_b = np.fft.fftn(b.values)
            for k in range(lp.n_shells):
                w = smoothing_bump(rho_x / 2.0 ** (beta * k))
                low = np.fft.ifftn(w * spec_b)
                high = np.fft.ifftn((1.0 - w) * spec_b)
                prof = _shell_eta_profile(lp, k)
                prof = prof if isinstance(e, ConstantProfile) and e.value == 1.0 \
                    else ProductProfile(prof, e)
                sharp_terms.append((GridFunction(grid, low), prof))
                flat_terms.append((GridFunction(grid, high), prof))
        return SmoothingSplit(separable_symbol(grid, sharp_terms),
                              separable_symbol(grid, flat_terms), beta)
    # dense path: filter the whole eta-shell block at once
    x_axes = tuple(range(grid.n))
    spec_x = np.fft.fftn(a.dense_table, axes=x_axes)
    sharp = np.zeros_like(a.dense_table)
    flat = np.zeros_like(a.dense_table)
    for k in range(lp.n_shells):
        w = smoothing_bump(rho_x / 2.0 ** (beta * k)).reshape(grid.shape + (1,) * grid.n)
        psi_eta = lp.shells[k].reshape((1,) * grid.n + grid.shape)
        sharp += np.fft.ifftn(w * spec_x, axes=x_axes) * psi_eta
        flat += np.fft.ifftn((1.0 - w) * spec_x, axes=x_axes) * psi_eta
    return SmoothingSplit(dense_symbol(grid, sharp), dense_symbol(grid, flat), beta)


def _shell_eta_profile(lp: LPFamily, k: int) -> EtaProfile:
    if k == lp.tail_index:
        return TailProfile(lp.j_max, lp.bump)
    return ShellProfile(k, lp.bump)


# ---------------------------------------------------------------------------
# analytic interpolation family


def interp_family(a: RoughSymbol, kappa: float, lam: float, delta: float,
                  z: complex) -> RoughSymbol:
    """Regularity-interpolated symbol

    ``a_z(x, eta) = e^{(kappa z + lam)^2} <eta>^{-delta (kappa z + lam)}
    (<D>^{kappa z + lam} a(., eta))(x)``

    for z in the closed unit strip. At kappa z + lam = 0 this is the
    identity. The Gaussian prefactor damps large imaginary parts.
    """
    z = complex(z)
    if not (0.0 <= z.real <= 1.0):
        raise ValueError("z must lie in the closed strip 0 <= Re z <= 1")
    w = kappa * z + lam
    scale = np.exp(w * w)
    grid = a.grid
    if a.rep == "separable":
        xw = japanese_bracket(grid, w)
        terms = []
        for b, e in a.terms:
            b2 = GridFunction(grid, scale * multiplier_weights_applied(xw, b.values))
            prof = e if w == 0 else ProductProfile(SobolevProfile(-delta * w), e)
            terms.append((b2, prof))
        return separable_symbol(grid, terms)
    x_axes = tuple(range(grid.n))
    xw = japanese_bracket(grid, w).reshape(grid.shape + (1,) * grid.n)
    table = np.fft.ifftn(xw * np.fft.fftn(a.dense_table, axes=x_axes), axes=x_axes)
    eta_w = japanese_bracket(grid, -delta * w).reshape((1,) * grid.n + grid.shape)
    return dense_symbol(grid, scale * eta_w * table)


# ---------------------------------------------------------------------------
# support window predicate


@dataclass
class WindowReport:
    ok: bool
    max_rel_outside: float
    violations: list
    params: dict = field(default_factory=dict)

    def to_dict(self):
        return {"ok": self.ok, "max_rel_outside": self.max_rel_outside,
                "violations": list(self.violations), "params": dict(self.params)}


def support_window_check(a: RoughSymbol, c: float, exponent: float,
                         rel_tol: float = 1e-10, chunk: int = 512,
                         max_violations: int = 32) -> WindowReport:
    """Check that the x-spectrum of every eta-column sits in the window

    ``c |eta|^{1/2} <= |xi| <= (1/16) (1 + |eta|)^exponent``.

    A column passes when the spectral mass outside the window is at most
    ``rel_tol`` of its total mass (empty columns pass vacuously).
    """
    grid = a.grid
    rho_eta = radius_grid(grid).ravel()
    rho_xi = radius_grid(grid).ravel()
    k_eta = frequency_grid(grid).reshape(grid.n, -1)
    k_xi = frequency_grid(grid).reshape(grid.n, -1)
    lo = c * np.sqrt(rho_eta)
    hi = (1.0 / 16.0) * (1.0 + rho_eta) ** exponent
    worst = 0.0
    violations = []
    if a.rep == "separable":
        bhat = np.stack([np.fft.fftn(b.values).ravel() for b, _ in a.terms], axis=1)
        profs, _ = a.profile_tables()
    for start in range(0, grid.npoints, chunk):
        idx = np.arange(start, min(start + chunk, grid.npoints))
        if a.rep == "separable":
            spec = bhat @ profs[:, idx]          # (xi, eta-chunk)
        else:
            cols = a.columns(idx).reshape(grid.shape + (idx.size,))
            spec = np.fft.fftn(cols, axes=tuple(range(grid.n))).reshape(-1, idx.size)
        power = np.abs(spec) ** 2
        total = np.sum(power, axis=0)
        outside = (rho_xi[:, None] < lo[None, idx]) | (rho_xi[:, None] > hi[None, idx])
        out_mass = np.sum(np.where(outside, power, 0.0), axis=0)
        with np.errstate(invalid="ignore", divide="ignore"):
            rel = np.where(total > 0, out_mass / np.maximum(total, 1e-300), 0.0)
        worst = max(worst, float(np.max(rel)) if rel.size else 0.0)
        bad = np.nonzero(rel > rel_tol)[0]
        for b_i in bad[: max(0, max_violations - len(violations))]:
            col = idx[b_i]
            xi_bad = int(np.argmax(np.where(outside[:, b_i], power[:, b_i], -1.0)))
            violations.append({
                "eta": [int(v) for v in k_eta[:, col]],
                "xi": [int(v) for v in k_xi[:, xi_bad]],
                "rel_outside": float(rel[b_i]),
            })
    ok = worst <= rel_tol
    return WindowReport(ok, worst, violations,
                        params={"c": c, "exponent": exponent, "rel_tol": rel_tol})


# ---------------------------------------------------------------------------
# generators


def lacunary_field(grid: Grid, r: float, J: int, seed: int) -> GridFunction:
    """Random lacunary cosine sum with dyadic-sup regularity around r.

    ``b = sum_{j=2}^{J} 2^{-j r} cos(v_j . x + theta_j)`` where v_j is a
    random direction scaled to radius 2^{j-1} and snapped to the lattice.
    Deterministic in (seed, r, J); band-limited by construction.
    """
    if 2 ** (J - 1) >= grid.N // 2:
        raise ValueError(f"J={J} too large for N={grid.N} (need 2^(J-1) < N/2)")
    if J < 2:
        raise ValueError("J must be at least 2")
    count = J - 1
    angles = uniform(derive_seed(seed, 0xA11), count) * 2.0 * np.pi
    phases = uniform(derive_seed(seed, 0xB22), count) * 2.0 * np.pi
    zs = 2.0 * uniform(derive_seed(seed, 0xC33), count) - 1.0  # n=3 polar
    coeffs = np.zeros(grid.shape, dtype=np.complex128)
    scale = (2.0 * np.pi) ** grid.n
    for idx, j in enumerate(range(2, J + 1)):
        radius = 2.0 ** (j - 1)
        if grid.n == 2:
            u = np.array([np.cos(angles[idx]), np.sin(angles[idx])])
        else:
            st = np.sqrt(1.0 - zs[idx] ** 2)
            u = np.array([st * np.cos(angles[idx]), st * np.sin(angles[idx]), zs[idx]])
        v = np.rint(radius * u).astype(int)
        if not np.any(v):
            v[0] = int(radius)
        amp = 2.0 ** (-j * r)
        pos = tuple(v % grid.N)
        neg = tuple((-v) % grid.N)
        coeffs[pos] += scale * amp * np.exp(1j * phases[idx]) / 2.0
        coeffs[neg] += scale * amp * np.exp(-1j * phases[idx]) / 2.0
    return inverse_dft(Spectrum(grid, coeffs))


def make_test_symbol(grid: Grid, kind: str, *, b: GridFunction | None = None,
                     profile: EtaProfile | None = None, delta: float = 0.5,
                     smoothing_bump: BumpProfile = STANDARD_BUMP,
                     lp: LPFamily | None = None) -> RoughSymbol:
    """Canonical test symbols.

    kinds: ``multiplier`` (a = w(eta)), ``multiplication`` (a = b(x)),
    ``tensor`` (b(x) w(eta)), ``flat-of-b`` (the rough part of the smoothing
    split of the multiplication symbol at exponent delta).
    """
    if kind == "multiplier":
        if profile is None:
            raise ValueError("multiplier kind needs a profile")
        return separable_symbol(grid, [(constant_function(grid), profile)])
    if kind == "multiplication":
        if b is None:
            raise ValueError("multiplication kind needs b")
        return separable_symbol(grid, [(b, ConstantProfile(1.0))])
    if kind == "tensor":
        if b is None or profile is None:
            raise ValueError("tensor kind needs b and a profile")
        return separable_symbol(grid, [(b, profile)])
    if kind == "flat-of-b":
        if b is None:
            raise ValueError("flat-of-b kind needs b")
        base = separable_symbol(grid, [(b, ConstantProfile(1.0))])
        return smooth_split(base, delta, smoothing_bump=smoothing_bump, lp=lp).flat
    raise ValueError(f"unknown test-symbol kind {kind!r}")


def random_dense_symbol(grid: Grid, seed: int, decay: float = 0.0) -> RoughSymbol:
    """Dense complex-normal table, optionally with <eta>^{-decay} columns."""
    vals = complex_normal(derive_seed(seed, 0xD44), grid.npoints ** 2)
    table = vals.reshape(grid.shape * 2)
    if decay:
        table = table * japanese_bracket(grid, -decay).reshape((1,) * grid.n + grid.shape)
    return dense_symbol(grid, table)


def random_separable_symbol(grid: Grid, seed: int, rank: int = 3) -> RoughSymbol:
    """Random band-limited x-factors times random smooth eta-profiles."""
    terms = []
    for m in range(rank):
        coeffs = complex_normal(derive_seed(seed, 0xE55, m), grid.npoints).reshape(grid.shape)
        rho = radius_grid(grid)
        coeffs = coeffs * (rho <= grid.N / 4) * (2.0 * np.pi) ** grid.n
        bfun = inverse_dft(Spectrum(grid, coeffs))
        s = -1.0 + 0.5 * float(uniform(derive_seed(seed, 0xF66, m), 1)[0])
        terms.append((bfun, SobolevProfile(s)))
    return separable_symbol(grid, terms)
