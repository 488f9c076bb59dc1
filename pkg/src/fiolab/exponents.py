"""Scalar exponent calculus for the frequency-loss bookkeeping.

Every function here is exact arithmetic on the numeric tower: feed it
:class:`fractions.Fraction` inputs and the outputs stay rational, so the
hand-derived table values can be asserted with ``==``. Floats work too.

Conventions (n = dimension, p = Lebesgue exponent, r = spatial regularity):

* ``s_of_p``: the parabolic Sobolev-loss exponent (n-1)/2 * |1/2 - 1/p|.
* ``sigma_exponent``: loss needed by the interpolated route.
* ``tau_gamma``: loss and window exponent of the direct (support-restricted)
  route.
* ``rho_exponent``: loss for symbols of type (1, delta), delta <= 1/2.
* ``interp_params``: the strip parameters (theta, r0, r1, kappa, lambda)
  tying the regularity interpolation family together.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

_HALF = Fraction(1, 2)


def _exactify(x):
    """Ints and Fractions stay exact; floats stay floats."""
    if isinstance(x, Rational):
        return Fraction(x)
    return x


def _inv(p):
    """1/p, with p = inf giving exact 0."""
    if p == float("inf"):
        return Fraction(0)
    p = _exactify(p)
    return 1 / p if isinstance(p, Fraction) else 1.0 / p


def _absval(x):
    return -x if x < 0 else x


def s_of_p(n: int, p):
    """(n-1)/2 * |1/2 - 1/p| for p in [1, inf]."""
    if n < 2:
        raise ValueError("dimension must be at least 2")
    if p != float("inf") and p < 1:
        raise ValueError("p must lie in [1, inf]")
    return Fraction(n - 1, 2) * _absval(_HALF - _inv(p))


def conjugate_exponent(p):
    if p == 1:
        return float("inf")
    if p == float("inf"):
        return 1
    p = _exactify(p)
    return p / (p - 1)


def sigma_exponent(n: int, p, r, eps):
    """0 when 2 s(p) < r/2, else 2 s(p) - r/2 + eps; eps in (0, r/2]."""
    r, eps = _exactify(r), _exactify(eps)
    if r <= 0:
        raise ValueError("r must be positive")
    if not (0 < eps <= r / 2):
        raise ValueError("eps must lie in (0, r/2]")
    two_sp = 2 * s_of_p(n, p)
    if two_sp < r / 2:
        return 0 * r
    return two_sp - r / 2 + eps


def tau_gamma(n: int, p, r, eps):
    """The (tau, gamma) pair of the direct route.

    tau: 0 for r > n-1, eps at r = n-1, 2 s(p) (1 - r/(n-1)) below;
    gamma: 1/2 + 2 s(p) / max(r, n-1).
    """
    r, eps = _exactify(r), _exactify(eps)
    if r <= 0 or eps <= 0:
        raise ValueError("need r > 0 and eps > 0")
    if p != float("inf") and not (1 < p):
        raise ValueError("p must lie in (1, inf)")
    two_sp = 2 * s_of_p(n, p)
    if r > n - 1:
        tau = 0 * r
    elif r == n - 1:
        tau = eps
    else:
        tau = two_sp * (1 - r / (n - 1))
    gamma = _HALF + (two_sp / r if r >= n - 1 else two_sp / (n - 1))
    return tau, gamma


def rho_exponent(n: int, p, r, delta, eps):
    """Loss for (1, delta) symbol types, delta in [0, 1/2].

    Case table: 0 when 2 s(p) < (1-delta) r, else 2 s(p) - (1-delta) r + eps.
    Always equals max(0, sigma - (1/2 - delta) r); both are computed and
    cross-checked.
    """
    r, delta, eps = _exactify(r), _exactify(delta), _exactify(eps)
    if not (0 <= delta <= _HALF):
        raise ValueError("delta must lie in [0, 1/2]")
    two_sp = 2 * s_of_p(n, p)
    if two_sp < (1 - delta) * r:
        by_cases = 0 * r
    else:
        by_cases = two_sp - (1 - delta) * r + eps
    sigma = sigma_exponent(n, p, r, eps)
    by_max = max(0 * r, sigma - (_HALF - delta) * r)
    if abs(by_cases - by_max) > 1e-12:
        raise AssertionError(
            f"rho case table {by_cases} disagrees with max-formula {by_max}")
    return by_cases


@dataclass
class InterpParams:
    theta: object
    r0: object
    r1: object
    kappa: object
    lam: object
    beta: object
    flags: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {k: _num(v) for k, v in
             [("theta", self.theta), ("r0", self.r0), ("r1", self.r1),
              ("kappa", self.kappa), ("lambda", self.lam), ("beta", self.beta)]}
        d["flags"] = dict(self.flags)
        return d


def _num(x):
    return float(x) if isinstance(x, Fraction) else x


def interp_params(n: int, p, r, delta_prime, eps=None) -> InterpParams:
    """Strip parameters for the regularity interpolation family.

    For p in (1,2): theta solves 1/p = (1-theta)/(1+delta') + theta/2;
    r1 = delta', r0 = (r - theta delta')/(1-theta), kappa = r0 - r1,
    lambda = r - r0. For p in (2, inf) the same solve runs against the
    conjugate exponent (the reflected line); p = 2 is degenerate and
    rejected. Identities r = (1-theta) r0 + theta r1 and
    kappa*theta + lambda = 0 hold by construction.
    """
    r, dp = _exactify(r), _exactify(delta_prime)
    if p == 2:
        raise ValueError("p = 2 needs no interpolation (theta would be 1)")
    p_eff = p if p < 2 else conjugate_exponent(p)
    p_eff = _exactify(p_eff)
    if not (1 < p_eff < 2):
        raise ValueError("p must lie in (1, 2) or (2, inf)")
    if not (0 < dp < min(r, p_eff - 1)):
        raise ValueError(
            f"delta_prime must lie in (0, min(r, p-1)) = (0, {min(r, p_eff - 1)})"
            f"; got {delta_prime}")
    inv_line0 = 1 / (1 + dp)
    theta = (inv_line0 - _inv(p_eff)) / (inv_line0 - _HALF)
    r1 = dp
    r0 = (r - theta * dp) / (1 - theta)
    kappa = r0 - r1
    lam = r - r0
    eps = eps if eps is not None else r / 100
    eps = _exactify(eps)
    sigma = sigma_exponent(n, p, r, eps)
    beta = _HALF + (2 * s_of_p(n, p) - sigma) / r
    _, gamma0 = tau_gamma(n, 1 + dp, r0, eps)
    flags = {
        "strip_valid": bool(1 + dp < p_eff),
        "beta_le_gamma": bool(beta <= gamma0),
        "thm_small_loss_applicable": bool(4 * s_of_p(n, p) < r),
    }
    return InterpParams(theta, r0, r1, kappa, lam, beta, flags)


def default_delta_prime(n: int, p, r, eps=None):
    """Feasible strip offset: half the largest value keeping beta <= gamma.

    Found by bisection on (0, min(r, p-1)); the constraint region is an
    interval shrinking to 0, so bisection on the indicator is valid.
    """
    p_eff = p if p < 2 else conjugate_exponent(p)
    hi = float(min(r, _exactify(p_eff) - 1))
    lo = 0.0

    def feasible(d):
        try:
            return interp_params(n, p, r, d, eps).flags["beta_le_gamma"]
        except ValueError:
            return False

    # largest feasible delta' by bisection; start from an interior probe
    probe = hi * 0.5
    if not feasible(probe):
        hi_search, lo_search = probe, 0.0
    else:
        lo_search, hi_search = probe, hi
    for _ in range(60):
        mid = 0.5 * (lo_search + hi_search)
        if mid <= 0 or mid >= hi:
            break
        if feasible(mid):
            lo_search = mid
        else:
            hi_search = mid
    largest = lo_search if lo_search > 0 else probe * 0.5
    return 0.5 * largest


def sobolev_interval(n: int, p, r, delta, eps):
    """Open Sobolev range (-r/2 + s(p) - sigma, r - s(p)) with endpoint flags.

    Flags name the extra symbol regularity that unlocks each endpoint:
    the upper endpoint under bmo-type spatial regularity, the lower one for
    symbols produced by the rough-part construction.
    """
    sp = s_of_p(n, p)
    sigma = sigma_exponent(n, p, r, eps)
    r = _exactify(r)
    lo = -r / 2 + sp - sigma
    hi = r - sp
    flags = {
        "nonempty": bool(lo < hi),
        "upper_endpoint_with_bmo_regularity": True,
        "lower_endpoint_with_flat_form": True,
        "thm_small_loss_applicable": bool(4 * sp < r),
    }
    return lo, hi, flags


def comparison_report(n: int, p, r, eps) -> dict:
    """tau - sigma in closed form, cross-checked against the definitions.

    r > n-1 gives 0 (both losses vanish); r = n-1 gives eps; r < n-1 gives
    (n-1-r)|1/2 - 1/p| when 2 s(p) < r/2 and r(1/2 - |1/2 - 1/p|) - eps
    otherwise.
    """
    r, eps = _exactify(r), _exactify(eps)
    tau, _ = tau_gamma(n, p, r, eps)
    sigma = sigma_exponent(n, p, r, eps)
    diff = tau - sigma
    dev = _absval(_HALF - _inv(p))
    if r > n - 1:
        closed = 0 * r
        case = "r > n-1"
    elif r == n - 1:
        closed = eps
        case = "r = n-1"
    elif 2 * s_of_p(n, p) < r / 2:
        closed = (n - 1 - r) * dev
        case = "r < n-1, small deviation"
    else:
        closed = r * (_HALF - dev) - eps
        case = "r < n-1, large deviation"
    if abs(closed - diff) > 1e-12:
        raise AssertionError(f"closed form {closed} != tau - sigma = {diff}")
    return {"tau": tau, "sigma": sigma, "tau_minus_sigma": diff, "case": case}


@dataclass
class ExponentSheet:
    """Every scalar exponent at one parameter point, with validity flags."""

    n: int
    p: object
    r: object
    delta: object
    eps: object
    delta_prime: object
    s_p: object
    sigma: object
    tau: object
    gamma: object
    beta: object
    rho: object
    theta: object
    r0: object
    r1: object
    kappa: object
    lam: object
    sobolev_lo: object
    sobolev_hi: object
    flags: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {}
        for k, v in self.__dict__.items():
            if k == "flags":
                out[k] = dict(v)
            elif k == "p" and v == float("inf"):
                out[k] = "inf"
            else:
                out[k] = _num(v) if v is not None else None
        return out


def exponent_sheet(n: int, p, r, delta, eps=None, delta_prime=None) -> ExponentSheet:
    """Assemble the full sheet; interpolation entries are None at p = 2."""
    r = _exactify(r)
    eps = eps if eps is not None else r / 100
    eps, delta = _exactify(eps), _exactify(delta)
    sp = s_of_p(n, p)
    sigma = sigma_exponent(n, p, r, eps)
    tau, gamma = tau_gamma(n, p, r, eps)
    rho = rho_exponent(n, p, r, delta, eps)
    lo, hi, iflags = sobolev_interval(n, p, r, delta, eps)
    flags = dict(iflags)
    if p == 2:
        theta = r0 = r1 = kappa = lam = beta = None
        flags["strip_valid"] = True
    else:
        if delta_prime is None:
            delta_prime = default_delta_prime(n, p, r, eps)
        ip = interp_params(n, p, r, delta_prime, eps)
        theta, r0, r1 = ip.theta, ip.r0, ip.r1
        kappa, lam, beta = ip.kappa, ip.lam, ip.beta
        flags.update(ip.flags)
    return ExponentSheet(
        n=n, p=p, r=r, delta=delta, eps=eps, delta_prime=delta_prime,
        s_p=sp, sigma=sigma, tau=tau, gamma=gamma, beta=beta, rho=rho,
        theta=theta, r0=r0, r1=r1, kappa=kappa, lam=lam,
        sobolev_lo=lo, sobolev_hi=hi, flags=flags,
    )
