# test_discriminator.py
import math
import os
import sys

# Calculate the project's root directory
script_dir = os.path.dirname(os.path.abspath(__file__))
project_root = os.path.dirname(os.path.dirname(script_dir))  # Go up two levels
sys.path.append(project_root)

import numpy as np

from NbLink.gan.discriminator import (
    LOG_FLOOR, discriminator_forward, discriminator_input, discriminator_score, log_fake, log_real, sequence_inputs)
from NbLink.gan.params import DiscriminatorParams


def test_zero_params_score_half():
    scores = discriminator_score([(1, 0.4, (0.5, 0.2)), (0, 0.0, (0.0, 0.0)), (1, 1.0, (1.0, 1.0))],
                                 DiscriminatorParams.zeros(3))
    assert np.array_equal(scores, np.full(3, 0.5))
    assert discriminator_score([], DiscriminatorParams.zeros(3)).size == 0


def test_unscheduled_input_is_zero():
    assert not discriminator_input(0, 0.7, (0.3, 0.9)).any()
    assert np.array_equal(discriminator_input(1, 0.5, (0.4, 0.2)), [1.0, 0.2, 0.1])
    columns = sequence_inputs([1, 0], np.array([0.5, 0.7]), np.array([0.4, 0.3]), np.array([0.2, 0.9]))
    assert np.array_equal(columns[1], [0.0, 0.0, 0.0]) and np.allclose(columns[0], [1.0, 0.2, 0.1])


def test_single_unit_example():
    params = DiscriminatorParams.zeros(1).with_tensors(W5=np.array([[1.0, 0.0, 0.0]]), w_out=np.array([2.0]))
    (score,) = discriminator_score([(1, 0.0, (0.0, 0.0))], params)
    # sigma(2 * sigma(1)) = sigma(1.4621172)
    assert abs(score - 0.8118562) < 1e-6
    inner = 1.0 / (1.0 + math.exp(-1.0))
    assert abs(score - 1.0 / (1.0 + math.exp(-2.0 * inner))) < 1e-12


def test_state_carries_over_steps():
    params = DiscriminatorParams.zeros(2).with_tensors(
        W4=np.eye(2), W5=np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]), w_out=np.array([1.0, 0.0]))
    trace = discriminator_forward(np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]), params)
    assert trace.phi.shape == (3, 2) and not trace.phi[0].any()
    # second step has no input but still remembers the first
    assert abs(trace.phi[2][0] - 1.0 / (1.0 + math.exp(-trace.phi[1][0]))) < 1e-12
    assert trace.scores[1] > 0.5


def test_log_terms_are_floored():
    assert log_real(np.array([-1000.0]))[0] == math.log(LOG_FLOOR)
    assert log_fake(np.array([1000.0]))[0] == math.log(LOG_FLOOR)
    assert abs(log_real(np.array([0.0]))[0] - math.log(0.5)) < 1e-15
    assert log_fake(np.array([-50.0]))[0] > -1e-20


if __name__ == "__main__":
    for name, func in list(globals().items()):
        if name.startswith("test_") and callable(func):
            func()
            print(f"{name}: ok")
