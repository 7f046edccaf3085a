# test_trainer.py
import math
import os
import sys

# Calculate the project's root directory
script_dir = os.path.dirname(os.path.abspath(__file__))
project_root = os.path.dirname(os.path.dirname(script_dir))  # Go up two levels
sys.path.append(project_root)

import numpy as np

from NbLink.core.file_system import DatasetRecord
from NbLink.gan.generator import MarkStream, zero_generator_grads
from NbLink.gan.history import EventHistory
from NbLink.gan.params import DiscriminatorParams, GeneratorParams
from NbLink.gan.sampler import rollout
from NbLink.gan.trainer import GanSettings, GanTrainer, gan_loss, prediction_mape, sgd_step
from NbLink.utils.errors import DatasetError, DomainError, NumericError

REAL = EventHistory([1.0], [1], [0.2], [0.3], [0.4], [1.0], 2.0)
FAKE = EventHistory([0.5], [0], [0.0], [0.0], [0.0], [1.0], 2.0)


def test_loss_with_neutral_discriminator():
    gen_loss, disc_objective = gan_loss(REAL, FAKE, GeneratorParams.zeros(2), DiscriminatorParams.zeros(2), 2.0)
    assert abs(disc_objective - 2 * math.log(0.5)) < 1e-12
    assert abs(disc_objective + 1.38629) < 1e-5
    assert abs(gen_loss - 1.30685) < 1e-5


def test_loss_with_perfect_discriminator():
    # unit 0 fires on scheduled steps, unit 1 on unscheduled ones
    disc = DiscriminatorParams.zeros(2).with_tensors(
        W5=np.array([[50.0, 0.0, 0.0], [-50.0, 0.0, 0.0]]), b_d=np.array([-25.0, 25.0]),
        w_out=np.array([60.0, -60.0]))
    _, disc_objective = gan_loss(REAL, FAKE, GeneratorParams.zeros(2), disc)
    assert -1e-6 < disc_objective <= 0.0


def _scalar_step(gradient, lr=0.1, ascend=False):
    params = GeneratorParams.zeros(1).with_tensors(b_g=1.0)
    grads = zero_generator_grads(params)
    grads["b_g"] = gradient
    return sgd_step(params, grads, lr, ascend=ascend).b_g


def test_sgd_step():
    assert abs(_scalar_step(0.5) - 0.95) < 1e-15
    assert abs(_scalar_step(0.5, ascend=True) - 1.05) < 1e-15
    assert abs(_scalar_step(100.0) - 0.5) < 1e-15
    assert _scalar_step(0.0) == 1.0

    params = GeneratorParams.initialize(3, np.random.default_rng(0))
    unchanged = sgd_step(params, zero_generator_grads(params), 0.1)
    assert all(np.array_equal(v, unchanged.tensors()[k]) for k, v in params.tensors().items())


def test_non_finite_gradient_is_rejected():
    params = GeneratorParams.zeros(2)
    grads = zero_generator_grads(params)
    grads["W1"][0, 1] = np.nan
    try:
        sgd_step(params, grads, 0.1)
        assert False, "NaN gradient applied"
    except NumericError:
        pass
    assert not params.W1.any()


def _settings(**overrides):
    values = dict(hidden=4, mu=1.0, beta=2.0, learning_rate=1e-3, sequence_window_ms=10_000, show_progress=False)
    values.update(overrides)
    return GanSettings(**values)


def _poisson_sequences(rate, count, horizon, seed, eta):
    rng = np.random.default_rng(seed)
    sequences = []
    for _ in range(count):
        n = int(rng.poisson(rate * horizon))
        times = np.sort(rng.uniform(0.0, horizon, size=n))
        marks = rng.random((n, 3))
        sequences.append(EventHistory(times, np.ones(n), marks[:, 0], marks[:, 1], marks[:, 2],
                                      np.full(n, eta), horizon))
    return sequences


def test_zero_epochs_returns_initialization():
    trainer = GanTrainer(_settings())
    result = trainer.train_sequences(_poisson_sequences(2.0, 3, 5.0, 0, 1.0), epochs=0, seed=11)
    initial = trainer.initial_model(11)
    for got, expected in ((result.model.generator, initial.generator),
                          (result.model.discriminator, initial.discriminator)):
        for name, value in expected.tensors().items():
            assert np.array_equal(got.tensors()[name], value), name
    assert result.generator_losses == [] and result.train_size == 3


def test_training_rejects_bad_input():
    trainer = GanTrainer(_settings())
    for call, error in ((lambda: trainer.train([], 1), DatasetError),
                        (lambda: trainer.train_sequences([], 1), DatasetError),
                        (lambda: trainer.train_sequences([EventHistory.empty(1.0)], -1), DomainError),
                        (lambda: _settings(hidden=0), DomainError),
                        (lambda: _settings(learning_rate=0.0), DomainError)):
        try:
            call()
            assert False, "bad input accepted"
        except error:
            pass


def test_training_is_deterministic():
    sequences = _poisson_sequences(2.0, 4, 5.0, 1, 1.0)
    first = GanTrainer(_settings()).train_sequences(sequences, epochs=3, lr=1e-2, seed=5)
    second = GanTrainer(_settings()).train_sequences(sequences, epochs=3, lr=1e-2, seed=5)
    assert len(first.generator_losses) == 3
    assert first.generator_losses == second.generator_losses
    assert first.discriminator_objectives == second.discriminator_objectives
    assert np.array_equal(first.model.generator.W1, second.model.generator.W1)
    third = GanTrainer(_settings()).train_sequences(sequences, epochs=3, lr=1e-2, seed=6)
    assert third.generator_losses != first.generator_losses


def test_learns_poisson_rate():
    # noise prior off so the rate is the only thing learned
    settings = _settings(hidden=8, mu=0.0)
    sequences = _poisson_sequences(2.0, 40, 10.0, 2, 0.0)
    result = GanTrainer(settings).train_sequences(sequences, epochs=200, lr=1e-3, seed=0)
    rng = np.random.default_rng(99)
    counts = [len(rollout(result.model.generator, 10.0, rng, MarkStream(k))) for k in range(100)]
    rate = float(np.mean(counts)) / 10.0
    print(f"generated rate {rate:.3f} events/s")
    assert 1.7 <= rate <= 2.3
    assert result.skipped_steps == 0


def _dataset(seed, seconds=60):
    rng = np.random.default_rng(seed)
    records = []
    t = 0.0
    while True:
        t += float(rng.exponential(200.0))
        if t >= seconds * 1000.0:
            return records
        if rng.random() < 0.7:
            prb = int(rng.integers(1, 7))
            records.append(DatasetRecord(round(t, 3), "U", 1, (prb - 1) / 5, int(rng.integers(0, 13)) / 12,
                                         int(rng.integers(0, 8)) / 7, 10.0, 0.1))
        else:
            records.append(DatasetRecord(round(t, 3), "U", 0, 0.0, 0.0, 0.0, 0.0, 0.0))


def test_train_from_records():
    result = GanTrainer(_settings(sequence_window_ms=5000)).train(_dataset(3), epochs=2, seed=1)
    assert (result.train_size, result.test_size, result.validation_size) == (7, 2, 3)
    assert len(result.discriminator_objectives) == 2
    assert math.isfinite(result.validation_log_likelihood)
    assert result.test_mape is not None and result.test_mape >= 0.0


def test_prediction_mape():
    settings = _settings()
    model = GanTrainer(settings).initial_model(0)
    unscheduled = EventHistory([0.5, 1.5], [0, 0], [0, 0], [0, 0], [0, 0], [1, 1], 2.0)
    assert prediction_mape(model, [unscheduled], settings.max_prb) is None
    scheduled = EventHistory([0.5, 1.5], [1, 0], [0.4, 0], [0.5, 0], [3 / 7, 0], [1, 1], 2.0,
                             directions=["U", "U"])
    value = prediction_mape(model, [scheduled], settings.max_prb)
    assert value is not None and value >= 0.0


if __name__ == "__main__":
    for name, func in list(globals().items()):
        if name.startswith("test_") and callable(func):
            func()
            print(f"{name}: ok")
