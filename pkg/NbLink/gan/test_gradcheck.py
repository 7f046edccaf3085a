# test_gradcheck.py
import os
import sys

# Calculate the project's root directory
script_dir = os.path.dirname(os.path.abspath(__file__))
project_root = os.path.dirname(os.path.dirname(script_dir))  # Go up two levels
sys.path.append(project_root)

import numpy as np

from NbLink.gan.gradcheck import GradCheckReport, check_grads, draw_case, numeric_gradient, relative_error
from NbLink.gan.params import DISCRIMINATOR_TENSORS, GENERATOR_TENSORS, GeneratorParams


def test_relative_error():
    assert relative_error(2.0, 2.0) == 0.0
    assert abs(relative_error(1.0, 1.1) - 0.1 / 1.1) < 1e-15
    # tiny values are measured against the floor
    assert abs(relative_error(1e-8, 0.0) - 1e-3) < 1e-15


def test_numeric_gradient():
    params = GeneratorParams.zeros(2).with_tensors(b_g=0.7, W_g=np.array([0.2, -0.4]))
    square = lambda p: p.b_g ** 2 + float(np.sum(p.W_g ** 3))
    assert abs(numeric_gradient(square, params, "b_g") - 1.4) < 1e-8
    assert np.allclose(numeric_gradient(square, params, "W_g"), 3 * params.W_g ** 2, atol=1e-8)


def test_cases_mix_scheduled_and_idle_events():
    real, fake, gen, disc = draw_case(np.random.default_rng(0), hidden=4, events=3)
    assert list(real.alpha) == [1, 0, 1] and list(fake.alpha) == [0, 1, 0]
    assert gen.hidden == disc.hidden == 4
    assert np.all(fake.eta >= 1.0)


def test_report():
    report = GradCheckReport(seeds=1, tolerance=1e-4, max_error={"generator.W1": 2e-5, "generator.b_g": 3e-4})
    assert report.worst == 3e-4 and not report.passed
    assert GradCheckReport(seeds=0, tolerance=1e-4).passed


def test_backprop_matches_finite_differences():
    report = check_grads(seed=0, seeds=20)
    expected = {f"generator.{n}" for n in GENERATOR_TENSORS} | {f"discriminator.{n}" for n in DISCRIMINATOR_TENSORS}
    assert set(report.max_error) == expected
    print(f"worst relative error {report.worst:.3e}")
    assert report.passed, report.max_error


if __name__ == "__main__":
    for name, func in list(globals().items()):
        if name.startswith("test_") and callable(func):
            func()
            print(f"{name}: ok")
