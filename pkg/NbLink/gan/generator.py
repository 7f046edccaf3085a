# generator.py - Generator RNN: noise, marks, hidden recurrence, intensity and likelihood
"""
Time inside the model is in seconds. Between events the conditional
intensity is exp(W_g.h_l + c_g (t - t_l) + b_g) with the exponent
clamped to +-50, so the compensator integral has a closed form on each
segment (piecewise where the clamp is active).
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit
from scipy.stats import norm, poisson

from NbLink.utils.errors import DomainError, NumericError

EXPONENT_CLAMP = 50.0
SMALL_SLOPE = 1e-9
SERIES_CUTOFF = 1e-3


# Input layer

def sample_noise(mu, rng):
    """eta ~ Poisson(mu), returned as a float"""
    if mu < 0:
        raise DomainError(f"mu must be >= 0, got {mu}")
    return float(rng.poisson(mu))


def alpha_probability(h_prev, w_alpha):
    """xi = sigmoid(w_alpha . h_prev)"""
    return float(expit(np.dot(w_alpha, h_prev)))


def gamma_from_noise(eta):
    """Standard normal density at eta"""
    return float(norm.pdf(eta))


def truncated_exp_icdf(u, beta):
    """Inverse CDF of Exp(beta) truncated to [0, 1]"""
    return -math.log1p(u * math.expm1(-beta)) / beta


def clamped_exp_icdf(u, beta):
    """Inverse CDF of Exp(beta), clamped to 1"""
    if u >= 1.0:
        return 1.0
    return min(1.0, -math.log1p(-u) / beta)


class MarkStream:
    """
    Counter-based uniforms for the MCS/repetition marks. The pair for an
    event is a pure function of (seed, event index, eta), so the noise
    drives the draw while sampling stays replayable.
    """

    def __init__(self, seed):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF

    def uniforms(self, eta, index):
        key = np.random.SeedSequence([self.seed, int(index), int(round(eta))])
        return np.random.Generator(np.random.Philox(key)).random(2)


def sample_mcs_rep(eta, beta, alpha, marks, index=0):
    """(m_norm, r_norm); (0, 0) when the event is not scheduled"""
    if not beta > 0:
        raise DomainError(f"beta must be > 0, got {beta}")
    if not alpha:
        return 0.0, 0.0
    u_m, u_r = marks.uniforms(eta, index)
    return truncated_exp_icdf(u_m, beta), clamped_exp_icdf(u_r, beta)


# Expected marks, used as point predictions

def expected_gamma(mu):
    """E[phi(eta)] for eta ~ Poisson(mu)"""
    if mu == 0:
        return gamma_from_noise(0.0)
    k = np.arange(0, int(poisson.ppf(1.0 - 1e-12, mu)) + 1)
    return float(np.sum(poisson.pmf(k, mu) * norm.pdf(k)))


def expected_mcs(beta):
    """Mean of Exp(beta) truncated to [0, 1]"""
    return 1.0 / beta - 1.0 / math.expm1(beta)


def expected_repetition(beta):
    """Mean of min(1, Exp(beta))"""
    return -math.expm1(-beta) / beta


# Recurrence and intensity

def generator_input(alpha, gamma, delta):
    m, r = delta
    return np.array([alpha * gamma, alpha * m, alpha * r])


def step_hidden(h_prev, t_l, eta, alpha, gamma, delta, params):
    """h_l = ReLU(W1 h_prev + W2 [a.g, a.m, a.r] + W3 (1 - a) t_l eta + b_h), t_l in seconds"""
    time_term = (1.0 - alpha) * t_l * eta
    z = params.W1 @ h_prev + params.W2 @ generator_input(alpha, gamma, delta) + params.W3[:, 0] * time_term + params.b_h
    if not np.all(np.isfinite(z)):
        raise NumericError(f"Non-finite hidden pre-activation at t={t_l}")
    return np.maximum(z, 0.0)


def _clamp(exponent):
    return min(max(exponent, -EXPONENT_CLAMP), EXPONENT_CLAMP)


def intensity(t, t_l, h_l, params):
    """lambda(t) = exp(W_g . h_l + c_g (t - t_l) + b_g), exponent clamped to +-50"""
    if t < t_l:
        raise DomainError(f"t={t} precedes the last event {t_l}")
    return math.exp(_clamp(float(np.dot(params.W_g, h_l)) + params.c_g * (t - t_l) + params.b_g))


def _exp_integral(c, length):
    """(int_0^L e^{cs} ds, int_0^L s e^{cs} ds)"""
    x = c * length
    if abs(c) < SMALL_SLOPE:
        return length, 0.5 * length * length
    if abs(x) < SERIES_CUTOFF:
        value = length * (1.0 + x / 2.0 + x * x / 6.0 + x ** 3 / 24.0)
        moment = length * length * (0.5 + x / 3.0 + x * x / 8.0 + x ** 3 / 30.0)
        return value, moment
    value = math.expm1(x) / c
    moment = (length * math.exp(x) - value) / c
    return value, moment


def segment_integral(a, c, length):
    """
    int_0^L exp(clamp(a + c s)) ds with its partial derivatives.

    Returns (value, d/da, d/dc). Clamped stretches contribute a constant
    e^{+-50} per second and nothing to the derivatives.
    """
    if length <= 0:
        return 0.0, 0.0, 0.0
    if abs(c) < SMALL_SLOPE:
        clamped = _clamp(a)
        value = math.exp(clamped) * length
        return value, (value if clamped == a else 0.0), 0.5 * length * length * math.exp(clamped) * (clamped == a)

    # s range on which -50 <= a + c s <= 50
    s_low, s_high = sorted(((-EXPONENT_CLAMP - a) / c, (EXPONENT_CLAMP - a) / c))
    s1 = min(max(s_low, 0.0), length)
    s2 = min(max(s_high, 0.0), length)
    value = 0.0
    if s1 > 0.0:
        value += math.exp(_clamp(a + c * s1 / 2.0)) * s1
    if s2 < length:
        value += math.exp(_clamp(a + c * (s2 + length) / 2.0)) * (length - s2)
    d_a = d_c = 0.0
    if s2 > s1:
        base = math.exp(a + c * s1)
        inner, moment = _exp_integral(c, s2 - s1)
        part = base * inner
        value += part
        d_a = part
        d_c = s1 * part + base * moment
    return value, d_a, d_c


@dataclass
class GeneratorTrace:
    """Forward pass of the generator over one history"""
    h: np.ndarray        # (n + 1, H), h[0] = 0
    z: np.ndarray        # (n, H) pre-activations
    x: np.ndarray        # (n, 3) mark inputs
    s: np.ndarray        # (n,) time inputs (1 - a) t eta
    heads: np.ndarray    # (n + 1,) W_g . h_k + b_g
    gaps: np.ndarray     # (n + 1,) segment lengths, last one ends at the horizon
    xi: np.ndarray       # (n,) sigmoid(w_alpha . h_{l-1})


def generator_forward(history, params):
    n = len(history)
    hidden = params.hidden
    h = np.zeros((n + 1, hidden))
    z = np.zeros((n, hidden))
    x = np.zeros((n, 3))
    s = np.zeros(n)
    xi = np.zeros(n)
    for l in range(n):
        a = history.alpha[l]
        x[l] = (a * history.gamma[l], a * history.m[l], a * history.r[l])
        s[l] = (1.0 - a) * history.times[l] * history.eta[l]
        xi[l] = expit(np.dot(params.w_alpha, h[l]))
        z[l] = params.W1 @ h[l] + params.W2 @ x[l] + params.W3[:, 0] * s[l] + params.b_h
        h[l + 1] = np.maximum(z[l], 0.0)
    if not np.all(np.isfinite(h)):
        raise NumericError("Non-finite hidden state in generator rollout")
    heads = h @ params.W_g + params.b_g
    edges = np.concatenate(([0.0], history.times, [history.horizon]))
    return GeneratorTrace(h, z, x, s, heads, np.diff(edges), xi)


def log_likelihood(history, params, horizon=None, trace=None):
    """sum_l log lambda(t_l) - int_0^T lambda(t) dt"""
    if horizon is not None and abs(horizon - history.horizon) > 1e-12:
        raise DomainError(f"Horizon {horizon} differs from the history horizon {history.horizon}")
    trace = trace or generator_forward(history, params)
    n = len(history)
    total = 0.0
    for k in range(n + 1):
        if k < n:
            total += _clamp(trace.heads[k] + params.c_g * trace.gaps[k])
        total -= segment_integral(trace.heads[k], params.c_g, trace.gaps[k])[0]
    return total


def recurrence_backward(trace, params, dh, grads):
    """
    Push per-state gradients dh (n + 1, H) back through the recurrence,
    accumulating W1, W2, W3, b_h into `grads`. h_0 is a constant.
    """
    n = trace.z.shape[0]
    carry = np.zeros(params.hidden)
    for l in range(n, 0, -1):
        dz = (dh[l] + carry) * (trace.z[l - 1] > 0)
        grads["W1"] += np.outer(dz, trace.h[l - 1])
        grads["W2"] += np.outer(dz, trace.x[l - 1])
        grads["W3"][:, 0] += dz * trace.s[l - 1]
        grads["b_h"] += dz
        carry = params.W1.T @ dz


def zero_generator_grads(params):
    return {name: np.zeros_like(value) if isinstance(value, np.ndarray) else 0.0
            for name, value in params.tensors().items()}


def log_likelihood_grad(history, params, trace=None):
    """(log-likelihood, gradient dict over the generator tensors)"""
    trace = trace or generator_forward(history, params)
    n = len(history)
    grads = zero_generator_grads(params)
    dh = np.zeros_like(trace.h)
    total = 0.0
    for k in range(n + 1):
        d_head = 0.0
        d_c = 0.0
        if k < n:
            exponent = trace.heads[k] + params.c_g * trace.gaps[k]
            total += _clamp(exponent)
            if abs(exponent) < EXPONENT_CLAMP:
                d_head += 1.0
                d_c += trace.gaps[k]
        value, d_a, dc_int = segment_integral(trace.heads[k], params.c_g, trace.gaps[k])
        total -= value
        d_head -= d_a
        d_c -= dc_int
        grads["b_g"] += d_head
        grads["c_g"] += d_c
        grads["W_g"] += d_head * trace.h[k]
        dh[k] += d_head * params.W_g
    recurrence_backward(trace, params, dh, grads)
    return total, grads
