# gradcheck.py - Central finite-difference check of the backpropagated gradients
from dataclasses import dataclass, field

import numpy as np

from NbLink.gan.generator import generator_forward
from NbLink.gan.history import EventHistory
from NbLink.gan.params import (
    DISCRIMINATOR_TENSORS, GENERATOR_TENSORS, DiscriminatorParams, GeneratorParams, tensor_shape)
from NbLink.gan.trainer import discriminator_objective_grad, gan_loss, generator_loss_grad
from NbLink.utils.rng import SeedStreams

KINK_MARGIN = 1e-3
CHECK_SCALE = 0.5


def relative_error(analytic, numeric):
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-5)


def numeric_gradient(fn, params, name, eps=1e-5):
    """Central differences of fn(params) over every entry of one tensor"""
    value = params.tensors()[name]
    if not isinstance(value, np.ndarray):
        return (fn(params.with_tensors(**{name: value + eps}))
                - fn(params.with_tensors(**{name: value - eps}))) / (2 * eps)
    grad = np.zeros_like(value)
    for idx in np.ndindex(value.shape):
        plus, minus = value.copy(), value.copy()
        plus[idx] += eps
        minus[idx] -= eps
        grad[idx] = (fn(params.with_tensors(**{name: plus}))
                     - fn(params.with_tensors(**{name: minus}))) / (2 * eps)
    return grad


def random_history(rng, alphas, horizon=3.0, eta=None, mu=1.0):
    """Sorted random times with random marks on the scheduled events"""
    n = len(alphas)
    alphas = np.asarray(alphas, dtype=float)
    marks = rng.uniform(0.05, 1.0, size=(n, 3)) * alphas[:, None]
    times = np.sort(rng.uniform(0.0, horizon, size=n))
    etas = np.full(n, mu) if eta is None else np.asarray(eta, dtype=float)
    return EventHistory(times, alphas, marks[:, 0], marks[:, 1], marks[:, 2], etas, horizon)


def _random_params(rng, hidden, names):
    return {name: (rng.uniform(-CHECK_SCALE, CHECK_SCALE, size=tensor_shape(name, hidden))
                   if tensor_shape(name, hidden) else float(rng.uniform(-CHECK_SCALE, CHECK_SCALE)))
            for name in names}


def _near_kink(real, fake, gen):
    pre = [generator_forward(h, gen).z for h in (real, fake) if len(h)]
    return any(np.min(np.abs(z)) < KINK_MARGIN for z in pre if z.size)


def draw_case(rng, hidden=4, events=3):
    """Random (real, fake, generator, discriminator) away from ReLU kinks"""
    while True:
        gen = GeneratorParams(**_random_params(rng, hidden, GENERATOR_TENSORS), mu=1.0, beta=2.0)
        disc = DiscriminatorParams(**_random_params(rng, hidden, DISCRIMINATOR_TENSORS))
        real_alphas = [1, 0] * events
        fake_alphas = [0, 1] * events
        real = random_history(rng, real_alphas[:events], mu=gen.mu)
        fake = random_history(rng, fake_alphas[:events], eta=rng.poisson(gen.mu, size=events) + 1.0)
        if not _near_kink(real, fake, gen):
            return real, fake, gen, disc


@dataclass
class GradCheckReport:
    seeds: int
    tolerance: float
    max_error: dict = field(default_factory=dict)

    @property
    def worst(self):
        return max(self.max_error.values()) if self.max_error else 0.0

    @property
    def passed(self):
        return self.worst < self.tolerance


def check_grads(seed=0, seeds=20, hidden=4, events=3, eps=1e-5, tolerance=1e-4):
    """
    Compare backpropagated gradients of both objectives with central
    differences over every tensor entry, for `seeds` random cases.
    """
    report = GradCheckReport(seeds, tolerance)
    streams = SeedStreams(seed)
    for case in range(seeds):
        real, fake, gen, disc = draw_case(streams.generator("gan", 9, case), hidden, events)

        _, g_grads = generator_loss_grad(real, fake, gen, disc)
        for name in GENERATOR_TENSORS:
            numeric = numeric_gradient(lambda g: gan_loss(real, fake, g, disc)[0], gen, name, eps)
            _record(report, f"generator.{name}", g_grads[name], numeric)

        _, d_grads = discriminator_objective_grad(real, fake, disc)
        for name in DISCRIMINATOR_TENSORS:
            numeric = numeric_gradient(lambda d: gan_loss(real, fake, gen, d)[1], disc, name, eps)
            _record(report, f"discriminator.{name}", d_grads[name], numeric)
    return report


def _record(report, key, analytic, numeric):
    errors = [relative_error(a, n) for a, n in zip(np.ravel(analytic), np.ravel(numeric))]
    report.max_error[key] = max(report.max_error.get(key, 0.0), max(errors))
