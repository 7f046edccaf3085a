# trainer.py - Adversarial training of the point-process generator
"""
Per-sequence stochastic gradient training. For each observed sequence
a fake sequence is sampled from the current generator, the
discriminator takes one ascent step on

    sum_real log D + sum_fake log(1 - D)

and the generator takes one descent step on

    -log L(real) + sum_fake log(1 - D)

where the generator's fake term feeds the Bernoulli mean xi to the
discriminator so that w_alpha and the recurrence receive gradient.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from tqdm import tqdm

from NbLink.core.link_model import (
    UPLINK, denormalize_mcs, denormalize_prb, denormalize_repetition, repetition_set)
from NbLink.core.metrics import mape_avg
from NbLink.gan.discriminator import (
    d_log_fake, d_log_real, discriminator_backward, discriminator_forward, log_fake, log_real,
    sequence_inputs, zero_discriminator_grads)
from NbLink.gan.generator import (
    MarkStream, expected_gamma, expected_mcs, expected_repetition, generator_forward,
    log_likelihood, log_likelihood_grad, recurrence_backward, zero_generator_grads)
from NbLink.gan.history import sequences_from_records, split_sequences
from NbLink.gan.params import SmartConModel
from NbLink.gan.sampler import OGATA_WINDOW_S, rollout
from NbLink.utils.errors import DatasetError, DomainError, NumericError
from NbLink.utils.log_service import LoggingService
from NbLink.utils.rng import SeedStreams

GRAD_CLIP = 5.0


# Losses

def _soft_fake_inputs(fake, trace):
    xi = trace.xi
    return np.column_stack((xi, xi * fake.gamma * fake.m, xi * fake.gamma * fake.r))


def _history_inputs(history):
    return sequence_inputs(history.alpha, history.gamma, history.m, history.r)


def gan_loss(real, fake, gen_params, disc_params, horizon=None):
    """(generator loss, discriminator objective) for one real/fake pair"""
    gen_loss = -log_likelihood(real, gen_params, horizon)
    disc_objective = 0.0
    if len(real):
        disc_objective += float(np.sum(log_real(discriminator_forward(_history_inputs(real), disc_params).logits)))
    if len(fake):
        hard = discriminator_forward(_history_inputs(fake), disc_params)
        disc_objective += float(np.sum(log_fake(hard.logits)))
        soft = discriminator_forward(_soft_fake_inputs(fake, generator_forward(fake, gen_params)), disc_params)
        gen_loss += float(np.sum(log_fake(soft.logits)))
    return gen_loss, disc_objective


def generator_loss_grad(real, fake, gen_params, disc_params):
    """(generator loss, gradient over the generator tensors)"""
    log_lik, ll_grads = log_likelihood_grad(real, gen_params)
    loss = -log_lik
    grads = {name: -value for name, value in ll_grads.items()}
    if not len(fake):
        return loss, grads

    trace = generator_forward(fake, gen_params)
    d_trace = discriminator_forward(_soft_fake_inputs(fake, trace), disc_params)
    loss += float(np.sum(log_fake(d_trace.logits)))
    dy = discriminator_backward(d_trace, disc_params, d_log_fake(d_trace.logits),
                                zero_discriminator_grads(disc_params))
    xi = trace.xi
    d_xi = dy[:, 0] + dy[:, 1] * fake.gamma * fake.m + dy[:, 2] * fake.gamma * fake.r
    d_logit = d_xi * xi * (1.0 - xi)

    adversarial = zero_generator_grads(gen_params)
    adversarial["w_alpha"] += d_logit @ trace.h[:-1]
    dh = np.zeros_like(trace.h)
    dh[:-1] = np.outer(d_logit, gen_params.w_alpha)
    recurrence_backward(trace, gen_params, dh, adversarial)
    for name, value in adversarial.items():
        grads[name] = grads[name] + value
    return loss, grads


def discriminator_objective_grad(real, fake, disc_params):
    """(discriminator objective, gradient over the discriminator tensors)"""
    grads = zero_discriminator_grads(disc_params)
    total = 0.0
    for history, value_fn, grad_fn in ((real, log_real, d_log_real), (fake, log_fake, d_log_fake)):
        if not len(history):
            continue
        trace = discriminator_forward(_history_inputs(history), disc_params)
        total += float(np.sum(value_fn(trace.logits)))
        discriminator_backward(trace, disc_params, grad_fn(trace.logits), grads)
    return total, grads


def sgd_step(params, gradient, learning_rate, ascend=False, clip=GRAD_CLIP):
    """
    One clipped SGD step. Descends by default; the discriminator ascends.
    Raises NumericError, leaving `params` untouched, on a non-finite gradient.
    """
    for name, value in gradient.items():
        if not np.all(np.isfinite(value)):
            raise NumericError(f"Non-finite gradient for {name}")
    sign = 1.0 if ascend else -1.0
    updates = {}
    for name, value in params.tensors().items():
        step = np.clip(gradient[name], -clip, clip)
        if isinstance(value, np.ndarray):
            updates[name] = value + sign * learning_rate * step
        else:
            updates[name] = float(value + sign * learning_rate * step)
    return params.with_tensors(**updates)


# Training

@dataclass(frozen=True)
class GanSettings:
    hidden: int = 32
    mu: float = 1.0
    beta: float = 2.0
    learning_rate: float = 1e-3
    sequence_window_ms: int = 10_000
    ogata_window_s: float = OGATA_WINDOW_S
    grad_clip: float = GRAD_CLIP
    max_prb: int = 6
    show_progress: bool = True

    def __post_init__(self):
        if self.hidden < 1:
            raise DomainError(f"hidden width must be >= 1, got {self.hidden}")
        if not self.learning_rate > 0:
            raise DomainError(f"learning rate must be > 0, got {self.learning_rate}")
        if self.sequence_window_ms < 1:
            raise DomainError(f"sequence window must be >= 1 ms, got {self.sequence_window_ms}")


@dataclass
class TrainResult:
    model: SmartConModel
    generator_losses: list = field(default_factory=list)
    discriminator_objectives: list = field(default_factory=list)
    skipped_steps: int = 0
    train_size: int = 0
    test_size: int = 0
    validation_size: int = 0
    validation_log_likelihood: Optional[float] = None
    test_mape: Optional[float] = None


def split_dataset(dataset, window_ms, mu, seed):
    """
    (train, test, validation) sequences of a dataset as training with
    `seed` draws them, so the held-out part can be rebuilt after the fact
    """
    sequences = sequences_from_records(dataset, window_ms, mu)
    return split_sequences(sequences, SeedStreams(seed).generator("gan", 1))


class GanTrainer:
    """Trains a SmartConModel on observed scheduling sequences"""

    def __init__(self, settings=None, logger=None):
        self.settings = settings or GanSettings()

        self._logger = logger or LoggingService(__name__)
        self.log = self._logger.info

    def initial_model(self, seed):
        s = self.settings
        return SmartConModel.initialize(s.hidden, SeedStreams(seed).generator("gan", 0), s.mu, s.beta)

    def train(self, dataset, epochs, lr=None, seed=0):
        """Cut DatasetRecords into sequences, split them and train"""
        if not dataset:
            raise DatasetError("Cannot train on an empty dataset")
        train, test, validation = split_dataset(dataset, self.settings.sequence_window_ms, self.settings.mu, seed)
        self.log(f"{len(dataset)} records in {len(train) + len(test) + len(validation)} sequences: "
                 f"train={len(train)} test={len(test)} validation={len(validation)}")
        result = self.train_sequences(train, epochs, lr, seed)
        result.test_size, result.validation_size = len(test), len(validation)
        if validation:
            result.validation_log_likelihood = float(np.mean(
                [log_likelihood(seq, result.model.generator) for seq in validation]))
        if test:
            result.test_mape = prediction_mape(result.model, test, self.settings.max_prb)
        self.log(f"Validation log-likelihood {result.validation_log_likelihood}, test MAPE {result.test_mape}")
        return result

    def train_sequences(self, sequences, epochs, lr=None, seed=0):
        if not sequences:
            raise DatasetError("Cannot train without sequences")
        if epochs < 0:
            raise DomainError(f"epochs must be >= 0, got {epochs}")
        s = self.settings
        lr = s.learning_rate if lr is None else lr
        streams = SeedStreams(seed)
        model = self.initial_model(seed)
        gen, disc = model.generator, model.discriminator
        result = TrainResult(model, train_size=len(sequences))

        for epoch in tqdm(range(epochs), desc="Training", unit="epoch", disable=not s.show_progress):
            rng = streams.generator("gan", 2, epoch)
            gen_losses, disc_objectives = [], []
            for index, real in enumerate(sequences):
                marks = MarkStream(streams.child_seed("gan", 3, epoch, index))
                try:
                    fake = rollout(gen, real.horizon, rng, marks, s.ogata_window_s,
                                   max_events=max(10 * len(real), 1000))
                    objective, d_grad = discriminator_objective_grad(real, fake, disc)
                    disc = sgd_step(disc, d_grad, lr, ascend=True, clip=s.grad_clip)
                    disc_objectives.append(objective)
                except NumericError as e:
                    result.skipped_steps += 1
                    self._logger.debug(f"Epoch {epoch} sequence {index}: discriminator step skipped ({e})")
                    continue
                try:
                    loss, g_grad = generator_loss_grad(real, fake, gen, disc)
                    gen = sgd_step(gen, g_grad, lr, clip=s.grad_clip)
                    gen_losses.append(loss)
                except NumericError as e:
                    result.skipped_steps += 1
                    self._logger.debug(f"Epoch {epoch} sequence {index}: generator step skipped ({e})")

            result.generator_losses.append(float(np.mean(gen_losses)) if gen_losses else float("nan"))
            result.discriminator_objectives.append(
                float(np.mean(disc_objectives)) if disc_objectives else float("nan"))
            self.log(f"Epoch {epoch + 1}/{epochs}: generator loss {result.generator_losses[-1]:.6g}, "
                     f"discriminator objective {result.discriminator_objectives[-1]:.6g}, "
                     f"skipped {result.skipped_steps}")

        result.model = SmartConModel(gen, disc)
        return result


def train(dataset, epochs, lr=None, seed=0, settings=None, logger=None):
    return GanTrainer(settings, logger).train(dataset, epochs, lr, seed)


def prediction_mape(model, sequences, max_prb):
    """
    Average MAPE of the model's point predictions over held-out
    sequences: scheduling probability xi against alpha, and the expected
    PRB count, MCS and repetition against the recorded configuration of
    each scheduled event. None when no scheduled event is present.
    """
    gen = model.generator
    predicted_prb = denormalize_prb(expected_gamma(gen.mu), max_prb)
    predicted_mcs = denormalize_mcs(expected_mcs(gen.beta))
    series = {key: ([], []) for key in ("prb", "mcs", "rep", "alpha")}
    for history in sequences:
        trace = generator_forward(history, gen)
        directions = history.directions if history.directions is not None else [UPLINK] * len(history)
        for l in range(len(history)):
            series["alpha"][0].append(history.alpha[l])
            series["alpha"][1].append(trace.xi[l])
            if not history.alpha[l]:
                continue
            rep_set = repetition_set(directions[l])
            series["prb"][0].append(denormalize_prb(history.gamma[l], max_prb))
            series["prb"][1].append(predicted_prb)
            series["mcs"][0].append(denormalize_mcs(history.m[l]))
            series["mcs"][1].append(predicted_mcs)
            series["rep"][0].append(denormalize_repetition(history.r[l], rep_set))
            series["rep"][1].append(denormalize_repetition(expected_repetition(gen.beta), rep_set))
    if not series["prb"][0]:
        return None
    return mape_avg(*series.values())
