"""Experiment driver: dyadic-sup sandwich suites, strip interpolation
(three-lines) experiments, boundedness ratio sweeps, the double smoothing
pipeline, and embedding diagnostics.

Every experiment is a pure function of its config dict: ensembles, ascent
restarts and symbols are all derived from counter-based seeds, so re-running
a config reproduces every reported statistic bit for bit. Wall-clock time
and environment echo live outside the canonical payload.
"""

from __future__ import annotations

import json
import platform
import sys
import time
from dataclasses import dataclass, field
from itertools import product as iter_product

import numpy as np

from .decomp import (
    BumpProfile,
    STANDARD_BUMP,
    localizer_bank,
    low_frequency_cutoff,
    make_lp_family,
    make_sphere_quadrature,
)
from .exponents import (
    exponent_sheet,
    interp_params,
    s_of_p,
    sigma_exponent,
    sobolev_interval,
    tau_gamma,
)
from .grid import (
    Grid,
    GridFunction,
    Spectrum,
    inverse_dft,
    japanese_bracket,
    multiplier_weights_applied,
    radius_grid,
)
from .prng import complex_normal, derive_seed
from .pseudo import ZeroDenominatorError, bound_ratio, opnorm_l2
from .spaces import hfio_norm, lp_norm, sobolev_norm, zygmund_from_maxima, _shell_maxima
from .symbols import (
    interp_family,
    lacunary_field,
    make_test_symbol,
    max_abs,
    max_abs_diff,
    smooth_split,
    support_window_check,
    symbol_add,
)


class ExperimentFailure(AssertionError):
    """An experiment's hard assertion did not hold."""


class AscentError(RuntimeError):
    """Ratio ascent failed to converge within the doubled restart budget."""


# ---------------------------------------------------------------------------
# ensembles


@dataclass(frozen=True)
class Ensemble:
    """Deterministic batch of band-limited random fields.

    Member spectra are drawn on an absolute integer-frequency set (sorted
    lattice points), so the same (seed, spec) yields the *same trigonometric
    polynomials* on every grid that can carry them; only the sampling
    resolution differs. Members are band-limited below half-Nyquist.
    """

    seed: int
    count: int
    spec: dict
    members: tuple = field(repr=False)


def _spec_points(grid: Grid, spec: dict) -> list:
    kind = spec.get("kind", "ball")
    n = grid.n
    if kind == "ball":
        R = spec["radius"]
        rng = range(-int(R), int(R) + 1)
        pts = [p for p in iter_product(rng, repeat=n)
               if sum(c * c for c in p) <= R * R]
    elif kind == "shell":
        j = spec["j"]
        lo, hi = 2.0 ** (j - 2), 2.0 ** j
        R = int(hi)
        rng = range(-R, R + 1)
        pts = [p for p in iter_product(rng, repeat=n)
               if lo ** 2 <= sum(c * c for c in p) <= hi ** 2]
    elif kind == "cap":
        j = spec["j"]
        omega = np.asarray(spec["direction"], dtype=float)
        omega = omega / np.linalg.norm(omega)
        lo, hi = 2.0 ** (j - 2), 2.0 ** j
        R = int(hi)
        rng = range(-R, R + 1)
        pts = []
        for p in iter_product(rng, repeat=n):
            q2 = sum(c * c for c in p)
            if not (lo ** 2 <= q2 <= hi ** 2):
                continue
            khat = np.asarray(p, dtype=float) / np.sqrt(q2)
            if np.linalg.norm(khat - omega) <= 2.0 * q2 ** -0.25:
                pts.append(p)
    else:
        raise ValueError(f"unknown ensemble kind {kind!r}")
    pts.sort()
    return pts


def make_ensemble(grid: Grid, spec: dict, seed: int, count: int) -> Ensemble:
    pts = _spec_points(grid, spec)
    if not pts:
        raise ValueError("ensemble frequency set is empty")
    max_rho = max(np.sqrt(sum(c * c for c in p)) for p in pts)
    if max_rho > grid.N / 4:
        raise ValueError(
            f"ensemble band (radius {max_rho:.1f}) exceeds half-Nyquist {grid.N // 4}")
    decay = spec.get("decay", 0.0)
    scale = (2.0 * np.pi) ** grid.n
    members = []
    for m in range(count):
        z = complex_normal(derive_seed(seed, 0xE25, m), len(pts))
        coeffs = np.zeros(grid.shape, dtype=np.complex128)
        for idx, p in enumerate(pts):
            w = (1.0 + sum(c * c for c in p)) ** (-decay / 2.0)
            coeffs[tuple(c % grid.N for c in p)] = scale * w * z[idx]
        members.append(inverse_dft(Spectrum(grid, coeffs)))
    return Ensemble(seed, count, dict(spec), tuple(members))


# ---------------------------------------------------------------------------
# reports


@dataclass
class ExperimentReport:
    experiment: str
    config: dict
    stats: dict
    samples: list
    passed: bool
    runtime_s: float
    environment: dict

    def canonical_lines(self) -> list:
        """Deterministic JSONL payload (meta/runtime excluded)."""
        dump = lambda obj: json.dumps(obj, sort_keys=True, separators=(",", ":"))
        lines = [dump({"experiment": self.experiment, "config": self.config})]
        lines += [dump({"sample": s}) for s in self.samples]
        lines.append(dump({"summary": self.stats, "passed": self.passed}))
        return lines

    def to_jsonl(self) -> str:
        meta = json.dumps({"meta": {"runtime_s": self.runtime_s,
                                    "environment": self.environment}},
                          sort_keys=True, separators=(",", ":"))
        return "\n".join(self.canonical_lines() + [meta]) + "\n"

    def csv_rows(self):
        keys = sorted({k for s in self.samples for k in s
                       if isinstance(s[k], (int, float, str, bool))})
        yield keys
        for s in self.samples:
            yield [s.get(k, "") for k in keys]

    def to_csv(self) -> str:
        out = []
        for row in self.csv_rows():
            out.append(",".join(str(v) for v in row))
        return "\n".join(out) + "\n"


def _environment(threads: int | None = None) -> dict:
    return {
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "platform": platform.platform(),
        "threads": threads if threads is not None else 1,
    }


# ---------------------------------------------------------------------------
# dyadic-sup sandwich


def shell_pure_samples(grid: Grid, j: int, count: int, seed: int, lp=None):
    """Random fields whose spectrum carries the shell-j cutoff as envelope."""
    lp = lp or make_lp_family(grid)
    envelope = lp.shells[j]
    idx = np.nonzero(envelope.ravel() > 0)[0]
    out = []
    scale = (2.0 * np.pi) ** grid.n
    for m in range(count):
        z = complex_normal(derive_seed(seed, 0x5A11, j, m), idx.size)
        coeffs = np.zeros(grid.npoints, dtype=np.complex128)
        coeffs[idx] = scale * envelope.ravel()[idx] * z
        out.append(inverse_dft(Spectrum(grid, coeffs.reshape(grid.shape))))
    return out


def zygmund_sandwich_suite(config: dict, threads: int | None = None) -> ExperimentReport:
    """Verify the two-sided dyadic-sup comparison on shell-pure fields.

    Hard check: the lower bound (1/3) 2^{(j-1) rho} ||g||_inf never exceeds
    the weighted dyadic-sup norm. The upper constant is measured (the
    smallest M with norm <= M 2^{(j+1) rho} ||g||_inf over the batch) and
    compared against 3 sup_i ||kernel(psi_i)||_1.
    """
    t0 = time.perf_counter()
    grid = Grid(config.get("n", 2), config["N"])
    lp = make_lp_family(grid)
    shells = config["shells"]
    rhos = config["rho"]
    count = config["samples"]
    seed = config["seed"]

    kernel_l1 = []
    for i in range(lp.n_shells):
        k = inverse_dft(Spectrum(grid, lp.shells[i].astype(np.complex128)))
        kernel_l1.append(float(np.sum(np.abs(k.values)) * grid.cell_volume))
    kernel_bound = 3.0 * max(kernel_l1)

    samples = []
    lower_ok_all = True
    measured_upper = {}
    for j in shells:
        if j >= lp.n_shells - 1:
            raise ValueError(f"shell {j} not representable below the tail at N={grid.N}")
        fields = shell_pure_samples(grid, j, count, seed, lp)
        for m, g in enumerate(fields):
            maxima = _shell_maxima(g, lp)
            ginf = float(np.max(np.abs(g.values)))
            if ginf == 0.0:
                continue
            for rho in rhos:
                norm = zygmund_from_maxima(maxima, rho)
                lower = (1.0 / 3.0) * 2.0 ** ((j - 1) * rho) * ginf
                upper_const = norm / (2.0 ** ((j + 1) * rho) * ginf)
                ok = lower <= norm * (1.0 + 1e-12)
                lower_ok_all &= ok
                key = (j, rho)
                measured_upper[key] = max(measured_upper.get(key, 0.0), upper_const)
                samples.append({
                    "shell": j, "rho": rho, "member": m,
                    "norm": norm, "sup": ginf,
                    "lower_bound": lower, "lower_ok": bool(ok),
                    "upper_const": upper_const,
                })
    m_measured = max(measured_upper.values())
    stats = {
        "lower_ok_all": bool(lower_ok_all),
        "measured_upper_const": m_measured,
        "kernel_bound": kernel_bound,
        "upper_within_kernel_bound": bool(m_measured <= kernel_bound),
        "per_shell_upper": {f"{j}:{rho}": v for (j, rho), v in sorted(measured_upper.items())},
    }
    passed = bool(lower_ok_all and m_measured <= kernel_bound)
    return ExperimentReport("sandwich", config, stats, samples, passed,
                            time.perf_counter() - t0, _environment(threads))


# ---------------------------------------------------------------------------
# norm engine + batched ratio ascent


class _NormEngine:
    """Batched parabolic-norm values and gradients on one grid."""

    def __init__(self, grid: Grid, p: float, quad, bump: BumpProfile = STANDARD_BUMP):
        self.grid = grid
        self.p = p
        self.quad = quad
        self.bump = bump
        bank = localizer_bank(grid, quad, bump)
        q = low_frequency_cutoff(grid, bump).weights.real
        self._stack0 = np.concatenate([q[None], bank])  # (M+1,) + shape
        self._wq = quad.weights
        self._cell = grid.cell_volume
        self._weight_cache: dict = {}

    def _weights(self, s: float) -> np.ndarray:
        key = float(s)
        if key not in self._weight_cache:
            brk = japanese_bracket(self.grid, s).real if s else None
            w = self._stack0 if brk is None else self._stack0 * brk[None]
            self._weight_cache[key] = w
        return self._weight_cache[key]

    def value(self, vals: np.ndarray, s: float) -> np.ndarray:
        """Norms of a batch: vals (R,)+shape -> (R,)."""
        v, _ = self._value_fields(vals, s)
        return v

    def _value_fields(self, vals, s):
        grid = self.grid
        W = self._weights(s)  # (M+1,)+shape
        ghat = np.fft.fftn(vals, axes=tuple(range(-grid.n, 0)))
        fields = np.fft.ifftn(ghat[:, None] * W[None], axes=tuple(range(-grid.n, 0)))
        p = self.p
        mags = np.abs(fields.reshape(fields.shape[0], fields.shape[1], -1))
        powers = np.sum(mags ** p, axis=2) * self._cell  # (R, M+1)
        low = powers[:, 0] ** (1.0 / p)
        dirn = np.sum(self._wq[None] * powers[:, 1:], axis=1) ** (1.0 / p)
        return low + dirn, (fields, low, dirn)

    def value_grad(self, vals: np.ndarray, s: float):
        """(values (R,), conj-gradients (R,)+shape) of the norm."""
        grid = self.grid
        p = self.p
        W = self._weights(s)
        axes = tuple(range(-grid.n, 0))
        ghat = np.fft.fftn(vals, axes=axes)
        fields = np.fft.ifftn(ghat[:, None] * W[None], axes=axes)
        mags = np.abs(fields)
        flat = mags.reshape(mags.shape[0], mags.shape[1], -1)
        powers = np.sum(flat ** p, axis=2) * self._cell
        low = powers[:, 0] ** (1.0 / p)
        dirn = np.sum(self._wq[None] * powers[:, 1:], axis=1) ** (1.0 / p)
        value = low + dirn

        with np.errstate(invalid="ignore", divide="ignore"):
            z = np.where(mags > 0, mags ** (p - 2), 0.0) * fields
        zhat = np.fft.fftn(z, axes=axes)
        shape1 = (-1,) + (1,) * grid.n
        low_coef = np.where(low > 0, low ** (1.0 - p), 0.0).reshape(shape1)
        dir_coef = np.where(dirn > 0, dirn ** (1.0 - p), 0.0).reshape(shape1)
        acc = low_coef * np.conj(W[0])[None] * zhat[:, 0]
        wq_shaped = self._wq.reshape((1, -1) + (1,) * grid.n)
        acc = acc + dir_coef * np.sum(
            wq_shaped * np.conj(W[1:])[None] * zhat[:, 1:], axis=1)
        # Wirtinger derivative w.r.t. conj(g) of the Riemann p-norm sum
        grad = np.fft.ifftn(acc, axes=axes) * (self._cell / 2.0)
        return value, grad


def _batched_apply(symbol, vals: np.ndarray) -> np.ndarray:
    """apply(symbol, .) over a batch (R,)+shape (separable symbols)."""
    grid = symbol.grid
    out = np.zeros_like(vals)
    for b, e in symbol.terms:
        out += b.values[None] * multiplier_weights_applied(
            e.table(grid)[None], vals, n_axes=grid.n)
    return out


def _batched_adjoint(symbol, vals: np.ndarray) -> np.ndarray:
    grid = symbol.grid
    out = np.zeros_like(vals)
    for b, e in symbol.terms:
        out += multiplier_weights_applied(
            np.conj(e.table(grid))[None], np.conj(b.values)[None] * vals, n_axes=grid.n)
    return out


def ascent_operator_norm(symbol, engine: _NormEngine, s_in: float, s_out: float,
                         restarts: int, seed: int, max_iters: int = 250,
                         rel_tol: float = 1e-9):
    """Lower-bound estimate of the operator norm between weighted parabolic
    norms by batched projected gradient ascent on the log ratio.

    Returns (best_ratio, converged_count, restarts_run).
    """
    grid = engine.grid
    shape1 = (-1,) + (1,) * grid.n
    R = restarts
    f = complex_normal(derive_seed(seed, 0xA5C), R * grid.npoints).reshape((R,) + grid.shape)
    f = f / np.linalg.norm(f.reshape(R, -1), axis=1).reshape(shape1)

    def objective(fv):
        tf = _batched_apply(symbol, fv)
        num, gnum = engine.value_grad(tf, s_out)
        den, gden = engine.value_grad(fv, s_in)
        num = np.maximum(num, 1e-300)
        den = np.maximum(den, 1e-300)
        grad = (_batched_adjoint(symbol, gnum) / num.reshape(shape1)
                - gden / den.reshape(shape1))
        return np.log(num) - np.log(den), grad

    J, G = objective(f)
    step = np.full(R, 0.25)
    active = np.ones(R, dtype=bool)
    converged = np.zeros(R, dtype=bool)
    for _ in range(max_iters):
        if not np.any(active):
            break
        trial = f + step.reshape(shape1) * G
        nrm = np.linalg.norm(trial.reshape(R, -1), axis=1)
        trial = trial / np.maximum(nrm, 1e-300).reshape(shape1)
        Jt, Gt = objective(trial)
        better = (Jt > J) & active
        improve = np.where(better, Jt - J, 0.0)
        f = np.where(better.reshape(shape1), trial, f)
        G = np.where(better.reshape(shape1), Gt, G)
        J = np.where(better, Jt, J)
        step = np.where(better, step * 1.25, step * 0.5)
        done = (better & (improve < rel_tol * (1.0 + np.abs(J)))) | (step < 1e-14)
        converged |= done & active
        active &= ~done
    return float(np.exp(np.max(J))), int(np.count_nonzero(converged)), R


# ---------------------------------------------------------------------------
# three-lines experiment


def three_lines_experiment(config: dict, threads: int | None = None) -> ExperimentReport:
    """Strip-interpolation bound check for the symbol regularity family.

    Builds a rough symbol with prescribed spatial regularity, forms the
    analytic family a_z, measures boundary-line operator norms (ratio ascent
    on the off-2 line, power iteration at p=2) over the imaginary-part
    samples, and asserts the interior norm against the geometric mean with
    the configured tolerance. Boundary norms must decay monotonically for
    |t| >= 10 thanks to the Gaussian damping of the family.
    """
    t0 = time.perf_counter()
    n = config.get("n", 2)
    p = config["p"]
    r = config["r"]
    dp = config["delta_prime"]
    eps = config["eps"]
    s = config.get("s", 0.0)
    tol = config["tol"]
    t_samples = config["t_samples"]
    restarts = config["restarts"]
    seed = config["seed"]

    ip = interp_params(n, p, r, dp, eps)
    theta = float(ip.theta)
    kappa, lam = float(ip.kappa), float(ip.lam)
    p0 = 1.0 + dp
    tau0 = float(tau_gamma(n, p0, float(ip.r0), eps)[0])
    t_int = s / (1.0 - theta)
    s_src_theta = s + (1.0 - theta) * tau0

    samples = []
    passed = True
    stats_by_n = {}
    for idx_n, N in enumerate(config["N_list"]):
        grid = Grid(n, N)
        quad = make_sphere_quadrature(n, config["quad_nodes"][idx_n])
        sym_seed = derive_seed(seed, 0x3175, N)
        J = int(np.log2(N // 2))
        b = lacunary_field(grid, config["symbol"]["r"], J, sym_seed)
        a = make_test_symbol(grid, "flat-of-b", b=b, delta=0.5)

        ident = max_abs_diff(interp_family(a, kappa, lam, 0.5, theta), a)
        scale_a = max(max_abs(a), 1e-300)

        engine0 = _NormEngine(grid, p0, quad)
        engine_t = _NormEngine(grid, p, quad)

        line0, line1 = [], []
        for ti, t in enumerate(t_samples):
            az0 = interp_family(a, kappa, lam, 0.5, complex(0.0, t))
            val0, conv, run = ascent_operator_norm(
                az0, engine0, t_int + tau0, t_int, restarts,
                derive_seed(seed, 0x10, N, ti))
            if conv < run / 2:
                val0, conv, run = ascent_operator_norm(
                    az0, engine0, t_int + tau0, t_int, 2 * restarts,
                    derive_seed(seed, 0x11, N, ti))
                if conv < run / 2:
                    raise AscentError(
                        f"line-0 ascent at t={t} converged only {conv}/{run}")
            line0.append(val0)
            az1 = interp_family(a, kappa, lam, 0.5, complex(1.0, t))
            # under this parametrization the p=2 line carries plain indices;
            # the weight hooks of opnorm_l2 cover shifted-index variants
            val1 = opnorm_l2(az1, seed=derive_seed(seed, 0x12, N, ti))
            line1.append(val1)
            samples.append({"N": N, "t": t, "line0_norm": val0, "line1_norm": val1})

        m0, m1 = max(line0), max(line1)
        m_theta, conv_t, run_t = ascent_operator_norm(
            a, engine_t, s_src_theta, s, restarts, derive_seed(seed, 0x13, N))
        if conv_t < run_t / 2:
            m_theta, conv_t, run_t = ascent_operator_norm(
                a, engine_t, s_src_theta, s, 2 * restarts, derive_seed(seed, 0x14, N))
            if conv_t < run_t / 2:
                raise AscentError("interior ascent failed to converge")
        bound = m0 ** (1.0 - theta) * m1 ** theta
        ok_bound = m_theta <= (1.0 + tol) * bound

        def _mono(vals):
            by_t = dict(zip(t_samples, vals))
            checks = []
            for sgn in (1, -1):
                far = [by_t[sgn * t] for t in (10, 20) if sgn * t in by_t]
                if len(far) == 2:
                    checks.append(far[1] <= far[0] * (1 + 1e-12))
            return all(checks) if checks else True

        ok_decay = _mono(line0) and _mono(line1)
        passed &= bool(ok_bound and ok_decay and ident <= 1e-12 * (1.0 + scale_a))
        stats_by_n[str(N)] = {
            "M0": m0, "M1": m1, "M_theta": m_theta,
            "geometric_mean": bound,
            "bound_ok": bool(ok_bound),
            "decay_ok": bool(ok_decay),
            "family_identity_error": ident,
        }

    stats = {
        "theta": theta, "kappa": kappa, "lambda": lam, "tau_line0": tau0,
        "tolerance": tol, "by_N": stats_by_n,
    }
    return ExperimentReport("three-lines", config, stats, samples, bool(passed),
                            time.perf_counter() - t0, _environment(threads))


# ---------------------------------------------------------------------------
# boundedness sweep


def bound_sweep(config: dict, threads: int | None = None) -> ExperimentReport:
    """Measured boundedness ratios across (p, s, N) with two loss routes.

    For each admissible point the max ratio over the ensemble is recorded
    with the interpolated loss (sigma) and the direct-route loss (tau); the
    sweep checks refinement stability (max-ratio growth between the two
    grids at most the configured factor) and the per-sample ordering implied
    by monotonicity of the reference norm in the loss exponent.
    """
    t0 = time.perf_counter()
    n = config.get("n", 2)
    r = config["r"]
    eps = config["eps"]
    quad = make_sphere_quadrature(n, config["quad_nodes"])
    growth_tol = config["growth_tol"]

    samples = []
    skipped = []
    passed = True
    max_ratio = {}
    for p in config["p_list"]:
        lo, hi, flags = sobolev_interval(n, p, r, 0.5, eps)
        if not flags["nonempty"]:
            skipped.append({"p": p, "reason": "empty Sobolev interval"})
            continue
        s = float(lo + hi) / 2.0 if config.get("s_mode", "midpoint") == "midpoint" else config["s"]
        sigma = float(sigma_exponent(n, p, r, eps))
        tau = float(tau_gamma(n, p, r, eps)[0])
        for N in config["N_pair"]:
            grid = Grid(n, N)
            b = lacunary_field(grid, r, config["symbol"]["J"], config["symbol"]["seed"])
            a = make_test_symbol(grid, "flat-of-b", b=b, delta=0.5)
            ens = make_ensemble(grid, config["ensemble"],
                                config["ensemble"]["seed"], config["ensemble"]["count"])
            ratios_sigma, ratios_tau = [], []
            for mi, f in enumerate(ens.members):
                try:
                    rs = bound_ratio(a, f, s, p, 0.0, sigma, quad)
                    rt = bound_ratio(a, f, s, p, 0.0, tau, quad)
                except ZeroDenominatorError:
                    samples.append({"p": p, "N": N, "member": mi, "flag": "skipped"})
                    continue
                ordering_ok = rt <= rs * (1.0 + 1e-9)
                passed &= bool(ordering_ok)
                ratios_sigma.append(rs)
                ratios_tau.append(rt)
                samples.append({
                    "p": p, "N": N, "s": s, "member": mi,
                    "ratio_sigma": rs, "ratio_tau": rt,
                    "ordering_ok": bool(ordering_ok),
                })
            if ratios_sigma:
                max_ratio[(p, N, "sigma")] = max(ratios_sigma)
                max_ratio[(p, N, "tau")] = max(ratios_tau)

    growth = {}
    n_lo, n_hi = config["N_pair"]
    for p in config["p_list"]:
        if (p, n_lo, "sigma") not in max_ratio:
            continue
        g = max_ratio[(p, n_hi, "sigma")] / max_ratio[(p, n_lo, "sigma")]
        growth[str(p)] = g
        passed &= bool(g <= growth_tol)

    stats = {
        "max_ratio": {f"{p}:{N}:{route}": v for (p, N, route), v in sorted(max_ratio.items())},
        "growth_factor_sigma": growth,
        "growth_tol": growth_tol,
        "skipped_points": skipped,
        "route_comparison": {
            str(p): {
                "sigma": float(sigma_exponent(n, p, r, eps)),
                "tau": float(tau_gamma(n, p, r, eps)[0]),
                "max_ratio_sigma": max_ratio.get((p, n_hi, "sigma")),
                "max_ratio_tau": max_ratio.get((p, n_hi, "tau")),
            } for p in config["p_list"] if (p, n_hi, "sigma") in max_ratio
        },
    }
    return ExperimentReport("bound-sweep", config, stats, samples, bool(passed),
                            time.perf_counter() - t0, _environment(threads))


# ---------------------------------------------------------------------------
# double smoothing pipeline


def smoothing_pipeline(a, n: int, p, r, eps, pipeline_bump: BumpProfile | None = None,
                       lp=None, window_tol: float = 1e-10):
    """Split a symbol twice: first at exponent 1/2, then the rough remainder
    again at the derived exponent beta, and check the middle term's spectral
    window.

    Returns ((smooth part, middle part, remainder), report dict). On a window
    failure the report carries the largest plateau radius (found by
    bisection over scaled-down cutoffs) at which the middle term passes.
    """
    bump = pipeline_bump or STANDARD_BUMP
    sigma = float(sigma_exponent(n, p, r, eps))
    beta = 0.5 + (2.0 * float(s_of_p(n, p)) - sigma) / float(r)

    def build(bmp):
        s1 = smooth_split(a, 0.5, smoothing_bump=bmp, lp=lp)
        s2 = smooth_split(s1.flat, beta, smoothing_bump=bmp, lp=lp)
        return s1, s2

    s1, s2 = build(bump)
    triple = (s1.sharp, s2.sharp, s2.flat)
    recon = max_abs_diff(symbol_add(symbol_add(s1.sharp, s2.sharp), s2.flat), a)
    window = support_window_check(s2.sharp, c=bump.plateau, exponent=beta,
                                  rel_tol=window_tol)
    admissible = None
    if not window.ok:
        lo_scale, hi_scale = 0.0, 1.0
        for _ in range(20):
            mid = 0.5 * (lo_scale + hi_scale)
            if mid <= 0:
                break
            bm = bump.scaled(mid)
            _, s2m = build(bm)
            wr = support_window_check(s2m.sharp, c=bm.plateau, exponent=beta,
                                      rel_tol=window_tol)
            if wr.ok:
                lo_scale = mid
            else:
                hi_scale = mid
        admissible = bump.plateau * lo_scale if lo_scale > 0 else None
    report = {
        "beta": beta,
        "sigma": sigma,
        "reconstruction_error": recon,
        "middle_max_abs": max_abs(s2.sharp),
        "window_ok": window.ok,
        "window_max_rel_outside": window.max_rel_outside,
        "window_c": bump.plateau,
        "admissible_plateau": admissible,
    }
    return triple, report


def pipeline_experiment(config: dict, threads: int | None = None) -> ExperimentReport:
    t0 = time.perf_counter()
    n = config.get("n", 2)
    grid = Grid(n, config["N"])
    b = lacunary_field(grid, config["b"]["r"], config["b"]["J"], config["b"]["seed"])
    a = make_test_symbol(grid, "multiplication", b=b)
    bump = BumpProfile(config["bump"]["plateau"], config["bump"]["support"])
    triple, rep = smoothing_pipeline(a, n, config["p"], config["r"], config["eps"],
                                     pipeline_bump=bump)
    scale = max(max_abs(a), 1e-300)
    passed = bool(rep["reconstruction_error"] <= 1e-12 * (1.0 + scale) and rep["window_ok"])
    samples = [dict(rep)]
    return ExperimentReport("pipeline", config, rep, samples, passed,
                            time.perf_counter() - t0, _environment(threads))


# ---------------------------------------------------------------------------
# embedding diagnostics


def sobolev_embedding_suite(config: dict, threads: int | None = None) -> ExperimentReport:
    """Measure both embedding constants between the parabolic norm and the
    loss-shifted Sobolev norms over an ensemble, and their refinement
    stability."""
    t0 = time.perf_counter()
    n = config.get("n", 2)
    quad = make_sphere_quadrature(n, config["quad_nodes"])
    samples = []
    consts = {}
    for p in config["p_list"]:
        sp = float(s_of_p(n, p))
        for N in config["N_pair"]:
            grid = Grid(n, N)
            ens = make_ensemble(grid, config["ensemble"],
                                config["ensemble"]["seed"], config["ensemble"]["count"])
            up, dn, comp2 = 0.0, 0.0, []
            for mi, f in enumerate(ens.members):
                h = hfio_norm(f, 0.0, p, quad).value
                sob_hi = sobolev_norm(f, sp, p)
                sob_lo = sobolev_norm(f, -sp, p)
                if h <= 1e-13 or sob_hi <= 1e-13:
                    continue
                up = max(up, h / sob_hi)
                dn = max(dn, sob_lo / h)
                if p == 2:
                    comp2.append(h / lp_norm(f, 2.0))
                samples.append({"p": p, "N": N, "member": mi,
                                "hfio": h, "sobolev_up": sob_hi, "sobolev_dn": sob_lo})
            consts[(p, N)] = {"upper": up, "lower": dn,
                              "p2_band": [min(comp2), max(comp2)] if comp2 else None}
    passed = True
    stability = {}
    n_lo, n_hi = config["N_pair"]
    for p in config["p_list"]:
        for side in ("upper", "lower"):
            ratio = consts[(p, n_hi)][side] / consts[(p, n_lo)][side]
            stability[f"{p}:{side}"] = ratio
            passed &= bool(1.0 / config["stability_tol"] <= ratio <= config["stability_tol"])
    stats = {
        "constants": {f"{p}:{N}": v for (p, N), v in sorted(consts.items())},
        "stability": stability,
        "stability_tol": config["stability_tol"],
    }
    return ExperimentReport("embedding", config, stats, samples, bool(passed),
                            time.perf_counter() - t0, _environment(threads))


# ---------------------------------------------------------------------------
# shipped configurations


def default_config(experiment: str) -> dict:
    if experiment == "sandwich":
        return {
            "n": 2, "N": 256,
            "shells": [0, 1, 2, 3, 4, 5, 6],
            "rho": [-1.0, 0.0, 0.5, 1.0],
            "samples": 32,
            "seed": 1337,
        }
    if experiment == "three-lines":
        return {
            "n": 2, "N_list": [8, 16], "quad_nodes": [96, 128],
            "p": 1.5, "r": 1.0, "delta_prime": 0.2, "eps": 0.01, "s": 0.0,
            "symbol": {"kind": "flat-of-lacunary", "r": 1.0},
            "t_samples": [0, 1, -1, 2, -2, 5, -5, 10, -10, 20, -20],
            "restarts": 64, "tol": 0.10, "seed": 9910,
        }
    if experiment == "bound-sweep":
        return {
            "n": 2, "N_pair": [64, 128],
            "p_list": [4.0 / 3.0, 1.5, 2.0, 3.0],
            "r": 1.0, "eps": 0.01, "quad_nodes": 256,
            "symbol": {"J": 5, "seed": 4242},
            "ensemble": {"kind": "ball", "radius": 12, "decay": 1.0,
                         "seed": 7042, "count": 12},
            "s_mode": "midpoint", "growth_tol": 1.2,
        }
    if experiment == "pipeline":
        return {
            "n": 2, "N": 64, "p": 1.5, "r": 1.0, "eps": 0.01,
            "b": {"r": 1.0, "J": 5, "seed": 4242},
            "bump": {"plateau": 0.03125, "support": 0.0625},
        }
    if experiment == "embedding":
        return {
            "n": 2, "N_pair": [64, 128],
            "p_list": [4.0 / 3.0, 2.0, 4.0],
            "quad_nodes": 256,
            "ensemble": {"kind": "ball", "radius": 16, "decay": 1.0,
                         "seed": 7042, "count": 64},
            "stability_tol": 1.2,
        }
    raise ValueError(f"unknown experiment {experiment!r}")


EXPERIMENTS = {
    "sandwich": zygmund_sandwich_suite,
    "three-lines": three_lines_experiment,
    "bound-sweep": bound_sweep,
    "pipeline": pipeline_experiment,
    "embedding": sobolev_embedding_suite,
}


def run_experiment(name: str, config: dict | None = None,
                   threads: int | None = None) -> ExperimentReport:
    cfg = default_config(name)
    if config:
        cfg = _deep_merge(cfg, config)
    return EXPERIMENTS[name](cfg, threads)


def _deep_merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _deep_merge(out[k], v)
        else:
            out[k] = v
    return out
