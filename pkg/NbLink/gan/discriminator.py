# discriminator.py - Discriminator RNN scoring label sequences as real or generated
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

LOG_FLOOR = 1e-12


def discriminator_input(alpha, gamma, delta):
    """(a, a.g.m, a.g.r); exactly zero when a = 0"""
    m, r = delta
    return np.array([alpha, alpha * gamma * m, alpha * gamma * r])


@dataclass
class DiscriminatorTrace:
    phi: np.ndarray      # (n + 1, H), phi[0] = 0
    y: np.ndarray        # (n, 3)
    logits: np.ndarray   # (n,)
    scores: np.ndarray   # (n,) D_l


def discriminator_forward(inputs, params):
    """Run the recurrence over per-step inputs y (n, 3)"""
    y = np.asarray(inputs, dtype=float).reshape(-1, 3)
    n = y.shape[0]
    phi = np.zeros((n + 1, params.hidden))
    logits = np.zeros(n)
    for l in range(n):
        phi[l + 1] = expit(params.W4 @ phi[l] + params.W5 @ y[l] + params.b_d)
        logits[l] = np.dot(params.w_out, phi[l + 1])
    return DiscriminatorTrace(phi, y, logits, expit(logits))


def sequence_inputs(alpha, gamma, m, r):
    """Discriminator inputs for column arrays of one history"""
    alpha = np.asarray(alpha, dtype=float)
    return np.column_stack((alpha, alpha * gamma * m, alpha * gamma * r)) if alpha.size else np.zeros((0, 3))


def discriminator_score(sequence, params):
    """
    Per-step probabilities D_l that the sequence is real. `sequence` is
    an iterable of (alpha, gamma, (m, r)).
    """
    inputs = [discriminator_input(a, g, d) for a, g, d in sequence]
    return discriminator_forward(np.array(inputs) if inputs else np.zeros((0, 3)), params).scores


def log_real(logits):
    """log D with D = sigmoid(logit), floored"""
    return np.log(np.maximum(expit(logits), LOG_FLOOR))


def log_fake(logits):
    """log(1 - D) = log sigmoid(-logit), floored"""
    return np.log(np.maximum(expit(-logits), LOG_FLOOR))


def d_log_real(logits):
    d = expit(logits)
    return np.where(d > LOG_FLOOR, 1.0 - d, 0.0)


def d_log_fake(logits):
    d = expit(logits)
    return np.where(expit(-logits) > LOG_FLOOR, -d, 0.0)


def zero_discriminator_grads(params):
    return {name: np.zeros_like(value) for name, value in params.tensors().items()}


def discriminator_backward(trace, params, d_logits, grads=None):
    """
    Backpropagate d objective / d logit_l through the recurrence.

    Accumulates parameter gradients into `grads` and returns the
    gradient with respect to the inputs y (n, 3).
    """
    grads = grads if grads is not None else zero_discriminator_grads(params)
    n = trace.y.shape[0]
    dy = np.zeros_like(trace.y)
    carry = np.zeros(params.hidden)
    for l in range(n, 0, -1):
        grads["w_out"] += d_logits[l - 1] * trace.phi[l]
        d_phi = d_logits[l - 1] * params.w_out + carry
        du = d_phi * trace.phi[l] * (1.0 - trace.phi[l])
        grads["W4"] += np.outer(du, trace.phi[l - 1])
        grads["W5"] += np.outer(du, trace.y[l - 1])
        grads["b_d"] += du
        dy[l - 1] = params.W5.T @ du
        carry = params.W4.T @ du
    return dy
