"""Exact piecewise generalized integral-means spectrum and its phase diagram.

The (p, q) exponent plane splits into four regions whose spectra are the
tip, bulk, linear and mixed formulas; the separatrices are two parabolas
(red, green), a quartic branch (blue) and three straight lines.  The
module also provides the m-fold pullback of the diagram, the conic (x, y)
coordinates in which the separatrices become straight lines and a
hyperbola, and the conjectured universal-spectrum partition.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .flow import DomainError

__all__ = [
    "SpectrumPoint",
    "SpecialPoints",
    "beta_tip",
    "beta_0",
    "beta_lin",
    "beta_1",
    "special_points",
    "curve_eval",
    "cartesian_residual",
    "lower_boundary_q",
    "classify",
    "mfold_map",
    "mfold_map_inv",
    "classify_mfold",
    "beta_m",
    "xy_forward",
    "xy_inverse",
    "xy_spectra",
    "quartic_hyperbola_residual",
    "quartic_asymptotes",
    "universal_B",
    "universal_partition",
    "feng_mcgregor_domain",
    "koebe_limit_partition",
]

BOUNDARY_TOL = 1e-10

CURVE_IDS = ("redParabola", "greenParabola", "blueQuartic",
             "D0", "D1", "D0prime", "Delta0", "Delta1")


# ---------------------------------------------------------------------------
# the four spectrum functions


def _disc0(p, kappa):
    d = (4 + kappa) ** 2 - 8 * kappa * p
    if d < 0:
        raise DomainError(
            f"p={p} lies right of Delta_0 (p = (4+kappa)^2/8kappa); bulk/tip spectra undefined"
        )
    return np.sqrt(d)


def beta_tip(p, kappa):
    """Tip spectrum -p - 1 + (4 + kappa - sqrt((4+kappa)^2 - 8 kappa p))/4."""
    return -p - 1 + (4 + kappa - _disc0(p, kappa)) / 4


def beta_0(p, kappa):
    """Bulk spectrum -p + (4+kappa)(4 + kappa - sqrt((4+kappa)^2 - 8 kappa p))/(4 kappa)."""
    return -p + (4 + kappa) * (4 + kappa - _disc0(p, kappa)) / (4 * kappa)


def beta_lin(p, kappa):
    """Linear spectrum p - (4+kappa)^2 / (16 kappa)."""
    return p - (4 + kappa) ** 2 / (16 * kappa)


def beta_1(p, q, kappa):
    """Mixed spectrum 3p - 2q - 1/2 - sqrt(1 + 2 kappa (p - q))/2."""
    d = 1 + 2 * kappa * (p - q)
    if d < 0:
        raise DomainError(
            f"(p, q)=({p}, {q}) lies above Delta_1 (q = p + 1/2kappa); mixed spectrum undefined"
        )
    return 3 * p - 2 * q - 0.5 - 0.5 * np.sqrt(d)


# ---------------------------------------------------------------------------
# special points and curves


@dataclass(frozen=True)
class SpecialPoints:
    P0: tuple
    P1: tuple
    Q0: tuple
    Q1: tuple
    T0: tuple
    T1: tuple
    T2: tuple
    p_star: float
    p0: float
    p0prime: float
    p0dblprime: float


def _red(kappa, g):
    p = (2 + kappa / 2) * g - (kappa / 2) * g**2
    q = (3 + kappa / 2) * g - kappa * g**2
    return p, q


def _green(kappa, g):
    v = (4 + kappa) ** 2 / (8 * kappa)
    p = v - (kappa / 2) * g**2
    q = v + g - kappa * g**2
    return p, q


def _quartic_disc(kappa, g):
    return 4 * kappa**2 * g**2 - 2 * kappa * (4 + kappa) * g + (8 + kappa) ** 2 / 4 + 4 * kappa


def _quartic(kappa, g):
    p = kappa / 16 + (1 + kappa / 4) * g - (kappa / 2) * g**2 - np.sqrt(_quartic_disc(kappa, g)) / 8
    q = p + g - (kappa / 2) * g**2
    return p, q


def p0_of(kappa):
    return 3 * (4 + kappa) ** 2 / (32 * kappa)


def p0prime_of(kappa):
    return -1 - 3 * kappa / 8


def d1_offset(kappa):
    return (16 - kappa**2) / (32 * kappa)


def special_points(kappa) -> SpecialPoints:
    """All named points of the kappa phase diagram."""
    p0 = p0_of(kappa)
    q0 = (4 + kappa) * (8 + kappa) / (16 * kappa)
    p1 = (8 + kappa) * (8 + 3 * kappa) / (32 * kappa)
    p0p = p0prime_of(kappa)
    s = np.sqrt(2 * (4 + kappa) ** 2 + 4)
    p_star = (s - 6) * (s + 2) / (32 * kappa)
    return SpecialPoints(
        P0=(p0, q0),
        P1=(p1, q0),
        Q0=(p0p, -2 - 7 * kappa / 8),
        Q1=(p0p, -(3 + kappa) / 2),
        T0=_red(kappa, 2 / kappa + 0.5),
        T1=_red(kappa, 1 / kappa),
        T2=_green(kappa, 1 / kappa),
        p_star=p_star,
        p0=p0,
        p0prime=p0p,
        p0dblprime=-((4 + kappa) ** 2) * (8 + kappa) / 128,
    )


def curve_eval(curve_id, kappa, param):
    """Point of a separatrix curve at the given parameter value."""
    if curve_id == "redParabola":
        return _red(kappa, param)
    if curve_id == "greenParabola":
        return _green(kappa, param)
    if curve_id == "blueQuartic":
        return _quartic(kappa, param)
    if curve_id == "D0":
        return p0_of(kappa), param
    if curve_id == "D1":
        return param, param + d1_offset(kappa)
    if curve_id == "D0prime":
        return p0prime_of(kappa), param
    if curve_id == "Delta0":
        return (4 + kappa) ** 2 / (8 * kappa), param
    if curve_id == "Delta1":
        return param, param + 1 / (2 * kappa)
    raise DomainError(f"unknown curve id {curve_id!r}")


def cartesian_residual(curve_id, kappa, p, q):
    """Residual of the curve's Cartesian equation at (p, q)."""
    if curve_id == "redParabola":
        u = (2 * p - q) / (2 + kappa)
        return 2 * kappa * u**2 - (4 + kappa) * u + p
    if curve_id == "greenParabola":
        u = 2 * p - q
        return (kappa / 2) * u**2 - (4 + kappa) ** 2 * u / 8 + p \
            + (4 + kappa) ** 2 * (8 + kappa) / 128
    if curve_id == "blueQuartic":
        u = 2 * p - q
        c = (8 + kappa) ** 2 / 64 + kappa / 4
        return (u**2 - kappa / 8 * u + kappa**2 / 256 - c / 4) * (u - 1 - kappa / 8) * u \
            - (kappa / 2) * (p - q) * (u - 0.25 - kappa / 8) ** 2
    if curve_id == "D0":
        return p - p0_of(kappa)
    if curve_id == "D1":
        return q - p - d1_offset(kappa)
    if curve_id == "D0prime":
        return p - p0prime_of(kappa)
    if curve_id == "Delta0":
        return p - (4 + kappa) ** 2 / (8 * kappa)
    if curve_id == "Delta1":
        return q - p - 1 / (2 * kappa)
    raise DomainError(f"unknown curve id {curve_id!r}")


# ---------------------------------------------------------------------------
# region classification


@lru_cache(maxsize=64)
def _check_monotone(kappa):
    # the lower boundary inverts p(parameter) by bisection; both parametric
    # abscissae must be monotone on their intervals
    g = np.linspace(0.25 + 1 / kappa, 1 + 2 / kappa, 200)
    pg = _green(kappa, g)[0]
    assert np.all(np.diff(pg) < 1e-12), "green arc abscissa not monotone"
    g = np.linspace(1 + 2 / kappa, 1 + 2 / kappa + 50, 400)
    pq = _quartic(kappa, g)[0]
    assert np.all(np.diff(pq) < 1e-12), "quartic branch abscissa not monotone"
    return True


def lower_boundary_q(p, kappa):
    """Ordinate of the composite lower boundary (quartic / green arc / D1)."""
    _check_monotone(kappa)
    p0 = p0_of(kappa)
    p0p = p0prime_of(kappa)
    if p >= p0:
        return p + d1_offset(kappa)
    eps = 1e-9   # bracket slack absorbing roundoff at the segment corners
    if p >= p0p:
        g = brentq(lambda t: _green(kappa, t)[0] - p,
                   0.25 + 1 / kappa - eps, 1 + 2 / kappa + eps, xtol=1e-14)
        return _green(kappa, g)[1]
    hi = 1 + 2 / kappa + 1.0
    while _quartic(kappa, hi)[0] > p:
        hi = 1 + 2 / kappa + 2 * (hi - 1 - 2 / kappa)
    g = brentq(lambda t: _quartic(kappa, t)[0] - p, 1 + 2 / kappa - eps, hi, xtol=1e-14)
    return _quartic(kappa, g)[1]


@dataclass(frozen=True)
class SpectrumPoint:
    p: float
    q: float
    kappa: float
    region: str
    beta: float
    m: int = 1
    boundary: bool = False
    regions: tuple = ()    # adjacent regions when on a separatrix


def classify(p, q, kappa) -> SpectrumPoint:
    """Region label and spectrum value at (p, q)."""
    qb = lower_boundary_q(p, kappa)
    p0 = p0_of(kappa)
    p0p = p0prime_of(kappa)

    if p <= p0p:
        upper, upper_beta = "I", beta_tip
    elif p <= p0:
        upper, upper_beta = "II", beta_0
    else:
        upper, upper_beta = "III", lambda pp, kk: beta_lin(pp, kk)

    on_lower = abs(q - qb) < BOUNDARY_TOL
    on_d0p = abs(p - p0p) < BOUNDARY_TOL and q > qb
    on_d0 = abs(p - p0) < BOUNDARY_TOL and q > qb

    if on_lower:
        b = beta_1(p, q, kappa)
        return SpectrumPoint(p, q, kappa, region="IV", beta=b,
                             boundary=True, regions=("IV", upper))
    if q < qb:
        return SpectrumPoint(p, q, kappa, region="IV", beta=beta_1(p, q, kappa))
    if on_d0p:
        b = beta_tip(p, kappa)
        return SpectrumPoint(p, q, kappa, region="I", beta=b,
                             boundary=True, regions=("I", "II"))
    if on_d0:
        b = beta_0(p, kappa)
        return SpectrumPoint(p, q, kappa, region="II", beta=b,
                             boundary=True, regions=("II", "III"))
    return SpectrumPoint(p, q, kappa, region=upper, beta=float(upper_beta(p, kappa)))


# ---------------------------------------------------------------------------
# m-fold pullback


def mfold_map(m):
    """Linear map (p, q) -> (p, q_m) with q_m = (1 - 1/m) p + q/m."""
    if m == 0:
        raise DomainError("m must be a nonzero integer")

    def T(p, q):
        return p, (1 - 1 / m) * p + q / m

    return T


def mfold_map_inv(m):
    if m == 0:
        raise DomainError("m must be a nonzero integer")

    def Tinv(p, q):
        return p, (1 - m) * p + m * q

    return Tinv


def beta_m(p, q, kappa, m):
    """Region-IV spectrum of the m-fold transform."""
    d = 1 + (2 * kappa / m) * (p - q)
    if d < 0:
        raise DomainError("m-fold mixed spectrum undefined here")
    return (1 + 2 / m) * p - (2 / m) * q - 0.5 - 0.5 * np.sqrt(d)


def classify_mfold(p, q, kappa, m) -> SpectrumPoint:
    """Phase diagram of the m-fold transform: classify at (p, q_m)."""
    pm, qm = mfold_map(m)(p, q)
    res = classify(pm, qm, kappa)
    return SpectrumPoint(p, q, kappa, region=res.region, beta=res.beta, m=m,
                         boundary=res.boundary, regions=res.regions)


# ---------------------------------------------------------------------------
# conic (x, y) coordinates


def xy_forward(p, q, kappa):
    """x = sqrt((4+kappa)^2 - 8 kappa p), y = sqrt(1 + 2 kappa (p - q))."""
    dx = (4 + kappa) ** 2 - 8 * kappa * p
    dy = 1 + 2 * kappa * (p - q)
    if dx <= 0 or dy <= 0:
        raise DomainError(f"(p, q)=({p}, {q}) outside the sector S_kappa")
    return np.sqrt(dx), np.sqrt(dy)


def xy_inverse(x, y, kappa):
    p = ((4 + kappa) ** 2 - x**2) / (8 * kappa)
    q = (4 + (4 + kappa) ** 2 - x**2 - 4 * y**2) / (8 * kappa)
    return p, q


def xy_spectra(x, y, kappa):
    """(beta_1, beta_0, beta_tip, beta_lin) in conic coordinates."""
    v = (4 + kappa) ** 2 / (8 * kappa)
    b1 = -(x**2) / (8 * kappa) + y**2 / kappa - y / 2 + v - 0.5 - 1 / kappa
    b0 = x**2 / (8 * kappa) - (4 + kappa) * x / (4 * kappa) + v
    btip = x**2 / (8 * kappa) - x / 4 - v + kappa / 4
    blin = -(x**2) / (8 * kappa) + v / 2
    return b1, b0, btip, blin


def quartic_hyperbola_residual(x, y, kappa):
    """4 kappa (beta_1 - beta_tip) = 4(y - kappa/4)^2 - (x - kappa/2)^2 + 6(kappa + 2)."""
    return 4 * (y - kappa / 4) ** 2 - (x - kappa / 2) ** 2 + 6 * (kappa + 2)


def quartic_asymptotes(kappa):
    """Asymptote descriptors of the quartic, in both coordinate systems."""
    return {
        "xy_lines": (
            {"coeffs": (1.0, -2.0, 0.0), "label": "x - 2y = 0"},
            {"coeffs": (1.0, 2.0, -kappa), "label": "x + 2y - kappa = 0"},
        ),
        # asymptote between the two quartic components in the (p, q) plane
        "pq_line": {"q_of_p": lambda p: 2 * p + (kappa + 2) / 8,
                    "label": "q = 2p + (kappa+2)/8"},
        # parabola family (2p - q - 1/4)^2 - kappa (p - q)/2 = c
        "pq_parabola_c": 5 / 8 + 3 * kappa / 16,
    }


# ---------------------------------------------------------------------------
# universal spectrum


def _b0_kraetzer(p):
    return p * p / 4.0


def _resolve_b0(b0_model):
    if b0_model == "kraetzer":
        return _b0_kraetzer
    if callable(b0_model):
        return b0_model
    raise DomainError(f"unknown B0 model {b0_model!r}")


def universal_bounded(p, b0_model="kraetzer", p_dagger=-2.0):
    """Universal spectrum B(p) of bounded univalent maps (B0 pluggable)."""
    b0 = _resolve_b0(b0_model)
    if p <= p_dagger:
        return -p - 1.0
    if p >= 2:
        return p - 1.0
    return float(b0(p))


def universal_B(p, q, b0_model="kraetzer", p_dagger=-2.0):
    """Conjectured universal generalized spectrum max{B(p), 3p - 2q - 1}."""
    return max(universal_bounded(p, b0_model, p_dagger), 3 * p - 2 * q - 1)


def universal_partition(b0_model="kraetzer", p_dagger=-2.0):
    """Separatrix curves of the universal phase diagram."""
    b0 = _resolve_b0(b0_model)
    return {
        "tip": {"p_range": (-np.inf, p_dagger), "q_of_p": lambda p: 2 * p},
        "bulk": {"p_range": (p_dagger, 2.0),
                 "q_of_p": lambda p: (3 * p - 1 - b0(p)) / 2},
        "lin": {"p_range": (2.0, np.inf), "q_of_p": lambda p: p},
    }


def feng_mcgregor_domain(p, q):
    """Domain where the universal bound 3p - 2q - 1 is proven."""
    return p >= 0 and q < min(2.0, 1.25 * p - 0.5)


def koebe_limit_partition():
    """kappa -> 0 limit: three regions with piecewise-linear separatrices."""
    return {
        "red": {"residual": lambda p, q: 3 * p - 2 * q},
        "green": {"residual": lambda p, q: 3 * p - 2 * q - 1},
        "quartic_lower": {"q_of_p": lambda p: 2 * p},
        "Q0": (-1.0, -2.0),
        "spectra": {
            "I": lambda p, q: -p - 1,
            "II": lambda p, q: 0.0,
            "IV": lambda p, q: 3 * p - 2 * q - 1,
        },
    }
