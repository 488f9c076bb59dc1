"""Norm evaluators: Lebesgue, Sobolev, dyadic-sup (Zygmund), and the
parabolic frequency-localized norm with its two equivalent forms.

All norms are Riemann sums over the grid; the sup norm is the grid max,
which is faithful for band-limited inputs. Integration over directions is
the quadrature sum of p-th powers of cap-localized fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .decomp import (
    BumpProfile,
    LPFamily,
    SphereQuadrature,
    STANDARD_BUMP,
    localizer_bank,
    low_frequency_cutoff,
    make_lp_family,
    square_function_weight,
)
from .grid import (
    Grid,
    GridFunction,
    apply_multiplier,
    japanese_bracket,
    multiplier_weights_applied,
)


@dataclass
class NormReport:
    """A norm value with its per-term breakdown and echoed parameters."""

    space: str
    value: float
    params: dict = field(default_factory=dict)
    terms: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"space": self.space, "value": self.value,
                "params": dict(self.params), "terms": dict(self.terms)}


def _validate_p(p: float):
    if not (1.0 < p < np.inf) or not np.isfinite(p):
        raise ValueError(f"p must lie in (1, inf), got {p}")


def lp_norm(f: GridFunction, p: float) -> float:
    """(sum |f(x)|^p dx^n)^(1/p); endpoints p<=1, p=inf are out of scope."""
    _validate_p(p)
    mags = np.abs(f.values.ravel())
    return float((np.sum(mags ** p) * f.grid.cell_volume) ** (1.0 / p))


def _lp_of_values(values: np.ndarray, p: float, cell: float) -> float:
    return float((np.sum(np.abs(values) ** p) * cell) ** (1.0 / p))


def sobolev_norm(f: GridFunction, s: float, p: float) -> float:
    """|| <D>^s f ||_p. For s == 0 this takes the identical lp_norm path."""
    _validate_p(p)
    if s == 0:
        return lp_norm(f, p)
    weighted = multiplier_weights_applied(japanese_bracket(f.grid, s), f.values)
    return _lp_of_values(weighted, p, f.grid.cell_volume)


def _shell_maxima(f: GridFunction, lp: LPFamily) -> np.ndarray:
    """max_x |psi_j(D) f| for every shell j, one batched transform pair."""
    fields = multiplier_weights_applied(lp.stacked(), f.values, n_axes=f.grid.n)
    return np.max(np.abs(fields.reshape(lp.n_shells, -1)), axis=1)


def zygmund_norm(f: GridFunction, r: float, lp: LPFamily | None = None) -> float:
    """sup_j 2^(j r) max_x |psi_j(D) f| over the representable shells."""
    lp = lp or make_lp_family(f.grid)
    maxima = _shell_maxima(f, lp)
    weights = 2.0 ** (r * np.arange(lp.n_shells))
    return float(np.max(weights * maxima))


def zygmund_report(f: GridFunction, r: float, lp: LPFamily | None = None) -> NormReport:
    lp = lp or make_lp_family(f.grid)
    maxima = _shell_maxima(f, lp)
    weighted = 2.0 ** (r * np.arange(lp.n_shells)) * maxima
    arg = int(np.argmax(weighted))
    return NormReport(
        space="zygmund",
        value=float(weighted[arg]),
        params={"r": r},
        terms={"shell_terms": weighted.tolist(), "argmax_shell": arg,
               "shell_maxima": maxima.tolist()},
    )


def zygmund_from_maxima(maxima: np.ndarray, r: float) -> float:
    """Norm from precomputed shell maxima (lets one field serve many r)."""
    return float(np.max(2.0 ** (r * np.arange(maxima.size)) * maxima))


def _directional_terms(f_values: np.ndarray, grid: Grid, s, p: float,
                       quad: SphereQuadrature, bump: BumpProfile,
                       chunk: int = 64) -> np.ndarray:
    """|| phi_omega(D) <D>^s f ||_p for every quadrature direction."""
    bank = localizer_bank(grid, quad, bump)
    spec = np.fft.fftn(f_values)
    if s != 0:
        spec = spec * japanese_bracket(grid, s)
    cell = grid.cell_volume
    terms = np.empty(quad.count)
    axes = tuple(range(-grid.n, 0))
    for start in range(0, quad.count, chunk):
        blk = bank[start:start + chunk]
        fields = np.fft.ifftn(blk * spec[None], axes=axes)
        mags = np.abs(fields.reshape(blk.shape[0], -1))
        terms[start:start + chunk] = (np.sum(mags ** p, axis=1) * cell) ** (1.0 / p)
    return terms


def hfio_norm(f: GridFunction, s: float, p: float, quad: SphereQuadrature,
              bump: BumpProfile = STANDARD_BUMP) -> NormReport:
    """Parabolic-decomposition norm, canonical form.

    ``|| q(D) <D>^s f ||_p + (sum_i w_i || phi_{omega_i}(D) <D>^s f ||_p^p)^{1/p}``
    with q the low cutoff equal to 1 for |k| <= 2.
    """
    _validate_p(p)
    grid = f.grid
    q = low_frequency_cutoff(grid, bump).weights.real
    spec_weights = q * japanese_bracket(grid, s) if s != 0 else q.astype(np.complex128)
    low_field = multiplier_weights_applied(spec_weights, f.values)
    low = _lp_of_values(low_field, p, grid.cell_volume)
    terms = _directional_terms(f.values, grid, s, p, quad, bump)
    quad_term = float(np.sum(quad.weights * terms ** p) ** (1.0 / p))
    return NormReport(
        space="hfio",
        value=low + quad_term,
        params={"s": s, "p": p, "quad_nodes": quad.count},
        terms={"low": low, "directional": quad_term,
               "directional_max": float(np.max(terms)),
               "directional_argmax": int(np.argmax(terms))},
    )


def hfio_norm_alt(f: GridFunction, s: float, p: float, quad: SphereQuadrature,
                  bump: BumpProfile = STANDARD_BUMP) -> NormReport:
    """Equivalent form: the Sobolev weight sits inside the directional terms
    but not in the low-frequency term.

    Since <D>^s commutes with every multiplier the directional part agrees
    with the canonical form exactly; only the low term differs.
    """
    _validate_p(p)
    grid = f.grid
    q = low_frequency_cutoff(grid, bump).weights.real
    low_field = multiplier_weights_applied(q, f.values)
    low = _lp_of_values(low_field, p, grid.cell_volume)
    terms = _directional_terms(f.values, grid, s, p, quad, bump)
    quad_term = float(np.sum(quad.weights * terms ** p) ** (1.0 / p))
    return NormReport(
        space="hfio-alt",
        value=low + quad_term,
        params={"s": s, "p": p, "quad_nodes": quad.count},
        terms={"low": low, "directional": quad_term},
    )


def hfio_quad_term_via_square_function(f: GridFunction, quad: SphereQuadrature,
                                       bump: BumpProfile = STANDARD_BUMP) -> float:
    """p=2, s=0 directional term through the square-function weight G(D)."""
    g = square_function_weight(quad, f.grid, bump)
    return lp_norm(apply_multiplier(g, f), 2.0)


def norm_report(space: str, f: GridFunction, *, p: float = 2.0, s: float = 0.0,
                r: float = 0.0, quad: SphereQuadrature | None = None,
                bump: BumpProfile = STANDARD_BUMP) -> NormReport:
    """Uniform entry point used by the command line."""
    if space == "lp":
        return NormReport("lp", lp_norm(f, p), params={"p": p})
    if space == "sobolev":
        return NormReport("sobolev", sobolev_norm(f, s, p), params={"p": p, "s": s})
    if space == "zygmund":
        return zygmund_report(f, r)
    if space in ("hfio", "hfio-alt"):
        if quad is None:
            raise ValueError("hfio norms need a sphere quadrature")
        fn = hfio_norm if space == "hfio" else hfio_norm_alt
        return fn(f, s, p, quad, bump)
    raise ValueError(f"unknown space {space!r}")
