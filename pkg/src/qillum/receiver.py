"""Phase-conjugate receiver statistics and benchmark error probabilities.

The receiver conjugates each return mode, mixes it with the retained idler
on a balanced beamsplitter, and thresholds the photon-number difference
between the two output ports. Summed over M pulse pairs the decision
statistic is Gaussian to excellent approximation, so the error probability
is (1/2)erfc(sqrt(M*SNR)) with a per-pair SNR that has a closed form.

Also provides the coherent-probe homodyne benchmark and the leading-order
large-background limits of the SNR for the standard configurations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import erfc as _sp_erfc, log_ndtr as _sp_log_ndtr

from .errors import NumericFailure
from .optimize import golden_section
from .states import ChannelParams, GaussianState, NoiseParams, SourceParams, c_quantum
from .symplectic import CovMatrix

LN_HALF = math.log(0.5)
_SQRT2 = math.sqrt(2.0)


def erfc(x: float) -> float:
    """Complementary error function."""
    if not math.isfinite(x):
        raise ValueError(f"erfc argument must be finite, got {x}")
    return float(_sp_erfc(x))


def log_erfc(x: float) -> float:
    """ln(erfc(x)), finite far beyond the point where erfc underflows."""
    if not math.isfinite(x):
        raise ValueError(f"log_erfc argument must be finite, got {x}")
    # erfc(x) = 2*Phi(-sqrt(2)*x) with Phi the normal CDF
    return math.log(2.0) + float(_sp_log_ndtr(-_SQRT2 * x))


def half_erfc(x: float) -> float:
    """(1/2)erfc(x) evaluated through the log domain to dodge underflow."""
    return math.exp(LN_HALF + log_erfc(x))


def _validate_pulses(m) -> int:
    m_int = int(m)
    if m_int != m or m_int < 1:
        raise ValueError(f"pulse count m must be a positive integer, got {m!r}")
    return m_int


@dataclass(frozen=True)
class BeamsplitterMoments:
    """Second moments of the two beamsplitter output modes.

    alpha_plus/alpha_minus describe the target-absent hypothesis: the common
    quadrature variance of both output modes and their cross covariance,
    (omega+1+-mu)/4. beta_plus/beta_minus are the +/- output quadrature
    variances under target-present, (gamma+1+mu+-2*sqrt(kappa)*c)/4, and
    gamma_star = (gamma+1-mu)/4 is the corresponding cross covariance.
    """

    alpha_plus: float
    alpha_minus: float
    beta_plus: float
    beta_minus: float
    gamma_star: float

    def __post_init__(self) -> None:
        vals = (self.alpha_plus, self.alpha_minus, self.beta_plus,
                self.beta_minus, self.gamma_star)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("beamsplitter moments must be finite")
        if not self.alpha_plus > 0:
            raise ValueError(f"alpha_plus must be positive, got {self.alpha_plus}")
        if self.beta_plus < self.beta_minus:
            raise ValueError("beta_plus must be >= beta_minus")


@dataclass(frozen=True)
class ReceiverStats:
    """Per-pulse-pair mean and variance of the difference count, plus SNR.

    snr must equal (mean_h1-mean_h0)^2 / (2*(sqrt(var_h1)+sqrt(var_h0))^2),
    the deflection form that the closed-form expression specializes.
    """

    mean_h0: float
    mean_h1: float
    var_h0: float
    var_h1: float
    snr: float

    def __post_init__(self) -> None:
        vals = (self.mean_h0, self.mean_h1, self.var_h0, self.var_h1, self.snr)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("receiver statistics must be finite")
        if self.var_h0 < 0 or self.var_h1 < 0:
            raise ValueError("variances must be non-negative")
        if self.snr < 0:
            raise ValueError(f"snr must be non-negative, got {self.snr}")
        diff_sq = (self.mean_h1 - self.mean_h0) ** 2
        denom = 2.0 * (math.sqrt(self.var_h1) + math.sqrt(self.var_h0)) ** 2
        if denom == 0.0:
            expected = 0.0 if diff_sq == 0.0 else math.inf
        else:
            expected = diff_sq / denom
        if not abs(self.snr - expected) <= 1e-12 * max(abs(self.snr), abs(expected)) + 1e-300:
            raise ValueError(
                f"snr {self.snr!r} inconsistent with moments (expected {expected!r})"
            )


@dataclass(frozen=True)
class ErrorProbabilities:
    """False-alarm and missed-detection probabilities with their equal-prior mean."""

    p_false_alarm: float
    p_missed_detection: float
    p_error: float

    def __post_init__(self) -> None:
        for name in ("p_false_alarm", "p_missed_detection", "p_error"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        mean = 0.5 * (self.p_false_alarm + self.p_missed_detection)
        if not abs(self.p_error - mean) <= 1e-15:
            raise ValueError("p_error must be the equal-prior average of fa and md")


@dataclass(frozen=True)
class HomodyneOptimum:
    """Minimum homodyne error probability and the threshold achieving it."""

    p_error: float
    threshold: float
    log_p_error: float


def pc_transform(states: tuple[GaussianState, GaussianState]) -> tuple[GaussianState, GaussianState]:
    """Phase-conjugate the return mode of each two-mode state.

    Conjugation flips the sign of the return p quadrature and adds one vacuum
    unit of noise, so a thermal block (omega/2)*I becomes ((omega+1)/2)*I and
    a cross block proportional to Z = diag(1,-1) is mapped to the identity
    structure with the same magnitude.
    """
    t = np.diag([1.0, -1.0, 1.0, 1.0])
    added = np.diag([0.5, 0.5, 0.0, 0.0])
    out = []
    for state in states:
        if state.n_modes != 2:
            raise ValueError(f"expected two-mode states, got {state.n_modes} modes")
        v = t @ state.cov.entries @ t + added
        out.append(GaussianState(t @ state.mean, CovMatrix(v)))
    return (out[0], out[1])


def beamsplitter_moments(src: SourceParams, ch: ChannelParams,
                         noise: NoiseParams = NoiseParams()) -> BeamsplitterMoments:
    """Output-mode second moments after conjugation and balanced mixing.

    Added noise enters through the replacements mu -> mu + eps_idler and
    omega, gamma -> omega + eps_return, gamma + eps_return.
    """
    mu = src.mu + noise.eps_idler
    omega = ch.omega + noise.eps_return
    gamma = ch.gamma(src.n_signal) + noise.eps_return
    root = 2.0 * math.sqrt(ch.reflectivity) * src.corr
    return BeamsplitterMoments(
        alpha_plus=(omega + 1.0 + mu) / 4.0,
        alpha_minus=(omega + 1.0 - mu) / 4.0,
        beta_plus=(gamma + 1.0 + mu + root) / 4.0,
        beta_minus=(gamma + 1.0 + mu - root) / 4.0,
        gamma_star=(gamma + 1.0 - mu) / 4.0,
    )


def snr_from_moments(moments: BeamsplitterMoments) -> ReceiverStats:
    """Receiver statistics assembled directly from the beamsplitter moments.

    The mean difference count is beta_plus - beta_minus and the variances
    follow from Gaussian fourth-moment factorization. This route re-derives
    snr_pc but loses precision when the correlation is tiny against the
    thermal scale (the subtraction cancels); prefer snr_pc in production.
    """
    mean1 = moments.beta_plus - moments.beta_minus
    var0 = 2.0 * (moments.alpha_plus ** 2 - moments.alpha_minus ** 2)
    var1 = (moments.beta_plus ** 2 + moments.beta_minus ** 2
            - 2.0 * moments.gamma_star ** 2)
    snr = mean1 ** 2 / (2.0 * (math.sqrt(var1) + math.sqrt(var0)) ** 2)
    return ReceiverStats(mean_h0=0.0, mean_h1=mean1, var_h0=var0, var_h1=var1, snr=snr)


def snr_pc(src: SourceParams, ch: ChannelParams,
           noise: NoiseParams = NoiseParams()) -> ReceiverStats:
    """Closed-form per-pulse-pair SNR of the difference-count receiver.

    snr = kappa*c^2 / (sqrt(kappa*c^2 + mu*(1+gamma)) + sqrt(mu*(1+omega)))^2
    with the noise replacements applied. All terms are sums of non-negative
    quantities, so the result is accurate to a few ulp at any scale.
    """
    mu = src.mu + noise.eps_idler
    omega = ch.omega + noise.eps_return
    gamma = ch.gamma(src.n_signal) + noise.eps_return
    kc2 = ch.reflectivity * src.corr * src.corr
    a1 = kc2 + mu * (1.0 + gamma)
    a0 = mu * (1.0 + omega)
    snr = kc2 / (math.sqrt(a1) + math.sqrt(a0)) ** 2
    return ReceiverStats(
        mean_h0=0.0,
        mean_h1=math.sqrt(ch.reflectivity) * src.corr,
        var_h0=a0 / 2.0,
        var_h1=a1 / 2.0,
        snr=snr,
    )


def log_error_prob_pc(stats: ReceiverStats, m) -> float:
    """ln of the error probability after m pulse pairs."""
    m = _validate_pulses(m)
    return LN_HALF + log_erfc(math.sqrt(m * stats.snr))


def error_prob_pc(stats: ReceiverStats, m) -> float:
    """(1/2)erfc(sqrt(m*snr)); representable for m*snr up to about 700."""
    return math.exp(log_error_prob_pc(stats, m))


def homodyne_errors(n_signal: float, ch: ChannelParams, m, threshold: float) -> ErrorProbabilities:
    """Error probabilities of a thresholded homodyne receiver on a coherent probe.

    The summed q-quadrature record over m pulses is Gaussian with variance
    m*(2*N_B+1) and mean 0 (target absent) or m*sqrt(2*kappa*N_S) (present);
    declaring "present" above the threshold gives the two erfc expressions.
    """
    m = _validate_pulses(m)
    if not (n_signal >= 0 and math.isfinite(n_signal)):
        raise ValueError(f"n_signal must be >= 0, got {n_signal}")
    if not math.isfinite(threshold):
        raise ValueError(f"threshold must be finite, got {threshold}")
    sigma = math.sqrt(m * (2.0 * ch.n_background + 1.0))
    shift = m * math.sqrt(2.0 * ch.reflectivity * n_signal)
    fa = half_erfc(threshold / sigma)
    md = half_erfc((shift - threshold) / sigma)
    return ErrorProbabilities(fa, md, 0.5 * (fa + md))


def homodyne_min_error(n_signal: float, ch: ChannelParams, m) -> HomodyneOptimum:
    """Minimum equal-prior homodyne error (1/2)erfc(sqrt(m*kappa*N_S/(4*N_B+2))).

    The optimal threshold sits midway between the conditional means,
    x* = m*sqrt(2*kappa*N_S)/2. Every call cross-checks the closed form
    against a golden-section minimization of (fa+md)/2 in the log domain and
    raises NumericFailure if the two disagree beyond 1e-12.
    """
    m = _validate_pulses(m)
    if not (n_signal >= 0 and math.isfinite(n_signal)):
        raise ValueError(f"n_signal must be >= 0, got {n_signal}")
    log_p = LN_HALF + log_erfc(math.sqrt(m * ch.reflectivity * n_signal
                                         / (4.0 * ch.n_background + 2.0)))
    shift = m * math.sqrt(2.0 * ch.reflectivity * n_signal)
    x_star = 0.5 * shift
    if shift > 0.0:
        sigma = math.sqrt(m * (2.0 * ch.n_background + 1.0))

        def objective(x: float) -> float:
            lfa = LN_HALF + log_erfc(x / sigma)
            lmd = LN_HALF + log_erfc((shift - x) / sigma)
            return float(np.logaddexp(lfa, lmd)) + LN_HALF

        x_num = golden_section(objective, 0.0, shift,
                               xtol=1e-11 * max(shift, sigma))
        log_num = objective(x_num)
        if not abs(log_num - log_p) <= 1e-12 * max(1.0, abs(log_p)):
            raise NumericFailure(
                "numeric threshold optimization disagrees with the closed form: "
                f"log p {log_num!r} vs {log_p!r}"
            )
    return HomodyneOptimum(p_error=math.exp(log_p), threshold=x_star, log_p_error=log_p)


class ReceiverConfig(Enum):
    QI_PC = "QI+PC"
    QI_CAL_PC = "QI+Cal+PC"
    QI_HET_PC = "QI+Het+PC"
    CS_HOM = "CS+Hom"


def asymptotic_snr(config: ReceiverConfig, src: SourceParams, ch: ChannelParams) -> float:
    """Leading-order per-pulse SNR in the bright-background regime.

    QI_PC and QI_Cal_PC share (1+N_I)*kappa*N_S/(2*N_B*(1+2*N_I)); QI_Het_PC
    degrades to the coherent-homodyne rate kappa*N_S/(4*N_B). The entangled
    configurations assume the source sits at the quantum correlation bound.
    """
    if not isinstance(config, ReceiverConfig):
        raise ValueError(f"unknown receiver configuration: {config!r}")
    if ch.n_background <= 0:
        raise ValueError("asymptotic forms require n_background > 0")
    if config is not ReceiverConfig.CS_HOM:
        cq = c_quantum(src)
        if not math.isclose(src.corr, cq, rel_tol=1e-9, abs_tol=0.0):
            raise ValueError(
                f"{config.value} asymptotics assume corr at the quantum bound "
                f"{cq:.12g}, got {src.corr:.12g}"
            )
    ks = ch.reflectivity * src.n_signal
    if config in (ReceiverConfig.QI_PC, ReceiverConfig.QI_CAL_PC):
        return (1.0 + src.n_idler) * ks / (2.0 * ch.n_background * (1.0 + 2.0 * src.n_idler))
    return ks / (4.0 * ch.n_background)
