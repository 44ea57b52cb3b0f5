"""Mixed moments of the whole-plane map: closed forms and estimators.

Closed forms exist on an integrability parabola in the (p, q) exponent
plane; Monte Carlo estimators built on the tracked logarithms of
:mod:`slelab.flow` samples are compared against them.  Also provides
logarithmic-coefficient extraction by FFT on a circle, the m-fold
per-sample identities, and integral-means slope fits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .flow import DomainError, WholePlaneSample

__all__ = [
    "MomentSpec",
    "MomentEstimate",
    "LogCoeffStats",
    "parabola_point",
    "parabola_gamma",
    "parabola_gamma_from_pq",
    "closed_one_point",
    "closed_two_point",
    "closed_moduli",
    "estimate_one_point",
    "estimate_moduli",
    "estimate_two_point",
    "extract_log_coeffs",
    "log_coeff_sq_expectation",
    "log_coeff_cross_expectation",
    "milin_expectation",
    "mfold_identity_check",
    "integral_means_scan",
]


@dataclass(frozen=True)
class MomentSpec:
    """Exponent pair with the derived sigma = q/p - 1 and, when the pair
    lies on the integrability parabola, its parameter gamma."""

    p: float
    q: float
    gamma: float | None = None

    @property
    def sigma(self):
        if self.p == 0:
            raise DomainError("sigma undefined for p = 0")
        return self.q / self.p - 1.0

    def check(self, kappa, tol=1e-12):
        if self.gamma is not None:
            p, q = parabola_point(kappa, self.gamma)
            if abs(p - self.p) > tol or abs(q - self.q) > tol:
                raise DomainError("gamma inconsistent with (p, q) on the parabola")
        return self


@dataclass(frozen=True)
class MomentEstimate:
    value: complex
    stderr: float
    n_samples: int
    p: float = 0.0
    q: float = 0.0
    z: complex = 0.0
    median_of_means: float | None = None


def parabola_point(kappa, gamma):
    """Parametric point of the integrability parabola."""
    p = -(kappa / 2) * gamma**2 + (2 + kappa / 2) * gamma
    q = 2 * p - (1 + kappa / 2) * gamma
    return p, q


def parabola_cartesian_residual(kappa, p, q):
    u = (2 * p - q) / (2 + kappa)
    return 2 * kappa * u**2 - (4 + kappa) * u + p


def parabola_gamma(kappa, p, branch="-"):
    """Invert the parabola's p(gamma); two branches meet at the vertex."""
    disc = (4 + kappa) ** 2 - 8 * kappa * p
    if disc < -1e-12:
        raise DomainError(f"p={p} beyond the parabola vertex (4+kappa)^2/(8 kappa)")
    root = np.sqrt(max(disc, 0.0))
    sign = {"+": 1.0, "-": -1.0}[branch]
    return (4 + kappa + sign * root) / (2 * kappa)


def parabola_gamma_from_pq(kappa, p, q):
    """gamma of an on-parabola pair, from the linear relation 2p - q."""
    gamma = (2 * p - q) / (1 + kappa / 2)
    if abs(parabola_cartesian_residual(kappa, p, q)) > 1e-9:
        raise DomainError(f"(p, q)=({p}, {q}) does not lie on the parabola")
    return gamma


def closed_one_point(z, kappa, gamma):
    """E(f'^{p/2} / (f/z)^{q/2}) on the parabola: (1 - z)^gamma."""
    return np.power(1.0 - np.asarray(z, dtype=complex), gamma)


def closed_two_point(z1, z2bar, kappa, gamma):
    """(1-z1)^g (1-z2bar)^g / (1 - z1 z2bar)^{kappa g^2 / 2}."""
    z1 = np.asarray(z1, dtype=complex)
    z2bar = np.asarray(z2bar, dtype=complex)
    beta = kappa * gamma**2 / 2
    return (
        np.power(1.0 - z1, gamma)
        * np.power(1.0 - z2bar, gamma)
        * np.power(1.0 - z1 * z2bar, -beta)
    )


def closed_moduli(z, kappa, gamma):
    """E(|z|^q |f'|^p / |f|^q) on the parabola (two-point diagonal)."""
    return closed_two_point(z, np.conj(z), kappa, gamma).real


def _log_ratio(sample, j, z):
    """log(f(z)/z) per sample; exactly zero at the origin where f'(0) = 1."""
    if z == 0:
        return np.zeros(sample.n_samples, dtype=complex)
    return sample.logf[:, j] - np.log(complex(z))


def _weights_one_point(sample, p, q, z):
    j = sample.point_index(z)
    return np.exp((p / 2) * sample.logfp[:, j] - (q / 2) * _log_ratio(sample, j, z))


def _estimate(x, p, q, z, median_blocks=0):
    n = len(x)
    value = complex(np.mean(x))
    stderr = float(np.std(x) / np.sqrt(n)) if n > 1 else 0.0
    mom = None
    if median_blocks and n >= median_blocks:
        blocks = np.array_split(np.real(x), median_blocks)
        mom = float(np.median([np.mean(b) for b in blocks]))
    return MomentEstimate(value=value, stderr=stderr, n_samples=n, p=p, q=q,
                          z=complex(z), median_of_means=mom)


def estimate_one_point(sample: WholePlaneSample, p, q, z) -> MomentEstimate:
    """Monte Carlo estimate of E(z^{q/2} f'^{p/2} / f^{q/2}) at z."""
    x = _weights_one_point(sample, p, q, z)
    return _estimate(x, p, q, z)


def estimate_moduli(sample: WholePlaneSample, p, q, z) -> MomentEstimate:
    """Monte Carlo estimate of E(|z|^q |f'|^p / |f|^q) at z.

    Reports a 16-block median-of-means alongside the plain mean; moduli
    weights can be heavy tailed for large |q|.
    """
    j = sample.point_index(z)
    x = np.exp(p * sample.logfp[:, j].real - q * _log_ratio(sample, j, z).real)
    return _estimate(x, p, q, z, median_blocks=16)


def estimate_two_point(sample: WholePlaneSample, p, q, z1, z2) -> MomentEstimate:
    """Monte Carlo estimate of E(X(z1) conj(X(z2))) under common drivers."""
    x1 = _weights_one_point(sample, p, q, z1)
    if z2 == 0:
        x = x1
    else:
        x = x1 * np.conj(_weights_one_point(sample, p, q, z2))
    return _estimate(x, p, q, z1)


@dataclass(frozen=True)
class LogCoeffStats:
    n_max: int
    mean_gamma: np.ndarray    # E gamma_n, n = 1..n_max
    mean_sq: np.ndarray       # E |gamma_n|^2
    cross: np.ndarray         # E gamma_n conj(gamma_{n+1}), n = 1..n_max-1
    stderr_gamma: np.ndarray  # rms standard error of mean_gamma
    stderr_sq: np.ndarray     # standard error of mean_sq
    stderr_cross: np.ndarray  # rms standard error of cross
    radius: float
    fft_size: int
    n_samples: int
    noise_floor: np.ndarray   # r^{-2n} times machine-level per-sample noise


def circle_points(r, M):
    return r * np.exp(2j * np.pi * np.arange(M) / M)


def extract_log_coeffs(sample: WholePlaneSample, n_max: int, M: int | None = None) -> LogCoeffStats:
    """Logarithmic coefficients gamma_n of log(f(z)/z) = 2 sum gamma_n z^n.

    The sample must be evaluated at the M-th roots of unity scaled by a
    common radius r; gamma_n is half the n-th discrete Fourier coefficient
    of log(f/z) on that circle, rescaled by r^{-n}.
    """
    M = M if M is not None else len(sample.z)
    if len(sample.z) != M:
        raise DomainError("sample points do not match the requested FFT size")
    r = abs(sample.z[0])
    if not np.allclose(sample.z, circle_points(r, M), atol=1e-10):
        raise DomainError("sample points must be a uniform circle r * exp(2 pi i j / M)")
    if not n_max < M / 2:
        raise DomainError(f"aliasing guard: need n_max < M/2, got n_max={n_max}, M={M}")

    with np.errstate(divide="ignore"):
        vals = (sample.logf - np.log(sample.z)) / 2.0   # sum_n gamma_n z^n per sample
    coeffs = np.fft.fft(vals, axis=1) / M               # (n_samples, M)
    n = np.arange(1, n_max + 2)
    gam = coeffs[:, 1 : n_max + 2] * r ** (-n.astype(float))
    N = sample.n_samples
    sqrtN = np.sqrt(max(N, 1))

    def mean_and_err(x):
        mu = x.mean(axis=0)
        err = np.sqrt((np.abs(x - mu) ** 2).mean(axis=0)) / sqrtN if N > 1 \
            else np.zeros(x.shape[1])
        return mu, err

    mean_gamma, stderr_gamma = mean_and_err(gam[:, :n_max])
    mean_sq, stderr_sq = mean_and_err(np.abs(gam[:, :n_max]) ** 2)
    cross, stderr_cross = mean_and_err(gam[:, : n_max - 1] * np.conj(gam[:, 1:n_max]))
    noise = np.finfo(float).eps * r ** (-2.0 * np.arange(1, n_max + 1))
    return LogCoeffStats(
        n_max=n_max, mean_gamma=mean_gamma, mean_sq=mean_sq, cross=cross,
        stderr_gamma=stderr_gamma, stderr_sq=stderr_sq.real, stderr_cross=stderr_cross,
        radius=r, fft_size=M, n_samples=N, noise_floor=noise,
    )


def log_coeff_sq_expectation(n: int) -> float:
    """E|gamma_n|^2 = 1/(2 n^2) for the kappa = 2 ensemble."""
    if n < 1:
        raise DomainError("n must be >= 1")
    return 1.0 / (2.0 * n * n)


def log_coeff_cross_expectation(n: int) -> float:
    """E(gamma_n conj(gamma_{n+1})) = -1/(4 n (n+1)) for kappa = 2.

    Follows by expanding E|z f'/f|^2 = (1-z)(1-zbar)/(1-z zbar) with
    z f'/f = 1 + 2 sum n gamma_n z^n and matching the z^{n+1} zbar^n
    coefficient: 4 n (n+1) E(gamma_{n+1} conj(gamma_n)) = -1.  (The same
    matching on the diagonal gives E|gamma_n|^2 = 1/(2 n^2).)
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    return -1.0 / (4.0 * n * (n + 1))


def milin_expectation(n: int) -> float:
    """Expected Milin functional for the kappa = 2 ensemble:
    -((n+1)/2) * sum_{k=2}^{n+1} 1/k."""
    if n < 1:
        raise DomainError("n must be >= 1")
    return -(n + 1) / 2.0 * sum(1.0 / k for k in range(2, n + 2))


def mfold_identity_check(sample: WholePlaneSample, m: int, z, p, q) -> float:
    """Per-sample residual of the m-fold moment identity.

    The m-fold transform satisfies, per sample and exactly,
    |z|^q |(f^[m])'(z)|^p / |f^[m](z)|^q  =  |zeta|^{q_m} |f'(zeta)|^p / |f(zeta)|^{q_m},
    with zeta = z^m and q_m = p + (q - p)/m.  For m < 0 the exterior
    convention f^[m](z) = 1 / f^[-m](1/z) applies, with |z| > 1.
    Both sides are evaluated from the tracked logs; returns max |LHS - RHS|.
    """
    if m == 0:
        raise DomainError("m must be a nonzero integer")
    z = complex(z)
    zeta = z**m
    j = sample.point_index(zeta)
    relogf = sample.logf[:, j].real
    relogfp = sample.logfp[:, j].real

    qm = p + (q - p) / m
    rhs = np.exp(p * relogfp - qm * (relogf - np.log(abs(zeta))))

    mm = abs(m)
    u = z if m > 0 else 1.0 / z           # argument fed to the positive-fold map
    # log |f^[mm](u)| and log |(f^[mm])'(u)| from the tracked logs at u^mm = zeta
    log_fm = np.log(abs(u)) + (relogf - np.log(abs(zeta))) / mm
    log_fmp = (mm - 1) * np.log(abs(u)) + relogfp + (1.0 / mm - 1.0) * relogf
    if m > 0:
        lhs = np.exp(q * np.log(abs(z)) + p * log_fmp - q * log_fm)
    else:
        # f^[m](z) = 1/f^[mm](1/z); chain rule brings in -2 log|z| - 2 log|f^[mm](1/z)|
        log_outer = -log_fm
        log_outer_p = log_fmp - 2 * np.log(abs(z)) - 2 * log_fm
        lhs = np.exp(q * np.log(abs(z)) + p * log_outer_p - q * log_outer)
    return float(np.max(np.abs(lhs - rhs)))


@dataclass(frozen=True)
class MeansScan:
    r_grid: np.ndarray
    integrals: np.ndarray
    beta: float | None
    tip_dominated: bool = False


def integral_means_scan(integrand, p, q, kappa, r_grid, angular_M=512) -> MeansScan:
    """Angular integrals of a moment integrand over circles, with a slope fit.

    ``integrand`` is either the string ``"closed"`` (usable when (p, q)
    lies on the integrability parabola) or a callable z -> E-values.
    The growth exponent beta is fitted by least squares of log(integral)
    against -log(1 - r^2) over the top half of ``r_grid``.
    """
    r_grid = np.asarray(r_grid, dtype=float)
    if np.any(np.diff(r_grid) <= 0) or np.any(r_grid <= 0) or np.any(r_grid >= 1):
        raise DomainError("r_grid must be increasing and inside (0, 1)")

    if isinstance(integrand, str) and integrand == "closed":
        gamma = parabola_gamma_from_pq(kappa, p, q)
        if 2 * gamma <= -1:
            return MeansScan(r_grid=r_grid, integrals=np.full_like(r_grid, np.nan),
                             beta=None, tip_dominated=True)

        def func(zz):
            return closed_moduli(zz, kappa, gamma) / np.abs(zz) ** q
    else:
        func = integrand

    def one_ring(r):
        # resolve the angular feature of width ~(1 - r) near theta = 0
        M = max(angular_M, int(16.0 / (1.0 - r)))
        ring = np.exp(2j * np.pi * np.arange(M) / M)
        return r * np.sum(func(r * ring).real) * (2 * np.pi / M)

    integrals = np.array([one_ring(r) for r in r_grid])
    top = slice(len(r_grid) // 2, None)
    x = -np.log(1.0 - r_grid[top] ** 2)
    y = np.log(integrals[top])
    beta = float(np.polyfit(x, y, 1)[0])
    return MeansScan(r_grid=r_grid, integrals=integrals, beta=beta)
