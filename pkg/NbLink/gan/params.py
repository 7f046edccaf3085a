# params.py - Trainable tensors of the generator and discriminator RNNs
from dataclasses import dataclass, field, replace

import numpy as np

from NbLink.utils.errors import DomainError, NumericError

GENERATOR_TENSORS = ("W1", "W2", "W3", "b_h", "w_alpha", "W_g", "c_g", "b_g")
DISCRIMINATOR_TENSORS = ("W4", "W5", "b_d", "w_out")

# Mark inputs per event: (gamma, m, r) for the generator, (alpha, alpha*gamma*m, alpha*gamma*r) for the discriminator
MARK_WIDTH = 3
INIT_SCALE = 0.1


def _tensor_shapes(hidden):
    return {
        "W1": (hidden, hidden), "W2": (hidden, MARK_WIDTH), "W3": (hidden, 1), "b_h": (hidden,),
        "w_alpha": (hidden,), "W_g": (hidden,), "c_g": (), "b_g": (),
        "W4": (hidden, hidden), "W5": (hidden, MARK_WIDTH), "b_d": (hidden,), "w_out": (hidden,),
    }


def tensor_shape(name, hidden):
    return _tensor_shapes(hidden)[name]


class _ParamsMixin:
    """Shared tensor access for the two parameter sets"""

    NAMES = ()

    def tensors(self):
        """Name -> value, scalars as Python floats"""
        return {name: getattr(self, name) for name in self.NAMES}

    def with_tensors(self, **updates):
        return replace(self, **updates)

    def copy(self):
        return replace(self, **{name: np.array(v, copy=True) if isinstance(v, np.ndarray) else float(v)
                                for name, v in self.tensors().items()})

    def check_finite(self):
        for name, value in self.tensors().items():
            if not np.all(np.isfinite(value)):
                raise NumericError(f"Parameter {name} holds non-finite values")
        return self

    def _check_shapes(self):
        hidden = self.hidden
        for name, value in self.tensors().items():
            expected = tensor_shape(name, hidden)
            if np.shape(value) != expected:
                raise DomainError(f"{name} has shape {np.shape(value)}, expected {expected}")


@dataclass(eq=False)
class GeneratorParams(_ParamsMixin):
    W1: np.ndarray
    W2: np.ndarray
    W3: np.ndarray
    b_h: np.ndarray
    w_alpha: np.ndarray
    W_g: np.ndarray
    c_g: float = 0.0
    b_g: float = 0.0
    mu: float = 1.0
    beta: float = 2.0

    NAMES = GENERATOR_TENSORS

    def __post_init__(self):
        self.c_g = float(self.c_g)
        self.b_g = float(self.b_g)
        if self.mu < 0:
            raise DomainError(f"mu must be >= 0, got {self.mu}")
        if not self.beta > 0:
            raise DomainError(f"beta must be > 0, got {self.beta}")
        self._check_shapes()

    @property
    def hidden(self):
        return int(np.shape(self.W1)[0])

    @classmethod
    def zeros(cls, hidden, mu=1.0, beta=2.0):
        if hidden < 1:
            raise DomainError(f"hidden width must be >= 1, got {hidden}")
        shapes = _tensor_shapes(hidden)
        return cls(**{n: np.zeros(shapes[n]) for n in GENERATOR_TENSORS if shapes[n]}, mu=mu, beta=beta)

    @classmethod
    def initialize(cls, hidden, rng, mu=1.0, beta=2.0):
        """Weights ~ Uniform(-0.1, 0.1), biases 0"""
        params = cls.zeros(hidden, mu, beta)
        for name in ("W1", "W2", "W3", "w_alpha", "W_g"):
            setattr(params, name, rng.uniform(-INIT_SCALE, INIT_SCALE, size=tensor_shape(name, hidden)))
        params.c_g = float(rng.uniform(-INIT_SCALE, INIT_SCALE))
        return params


@dataclass(eq=False)
class DiscriminatorParams(_ParamsMixin):
    W4: np.ndarray
    W5: np.ndarray
    b_d: np.ndarray
    w_out: np.ndarray

    NAMES = DISCRIMINATOR_TENSORS

    def __post_init__(self):
        self._check_shapes()

    @property
    def hidden(self):
        return int(np.shape(self.W4)[0])

    @classmethod
    def zeros(cls, hidden):
        if hidden < 1:
            raise DomainError(f"hidden width must be >= 1, got {hidden}")
        shapes = _tensor_shapes(hidden)
        return cls(**{n: np.zeros(shapes[n]) for n in DISCRIMINATOR_TENSORS})

    @classmethod
    def initialize(cls, hidden, rng):
        params = cls.zeros(hidden)
        for name in ("W4", "W5", "w_out"):
            setattr(params, name, rng.uniform(-INIT_SCALE, INIT_SCALE, size=tensor_shape(name, hidden)))
        return params


@dataclass(eq=False)
class SmartConModel:
    """Generator and discriminator trained together; what a checkpoint holds"""
    generator: GeneratorParams
    discriminator: DiscriminatorParams = field(default=None)

    def __post_init__(self):
        if self.discriminator is None:
            self.discriminator = DiscriminatorParams.zeros(self.generator.hidden)
        if self.discriminator.hidden != self.generator.hidden:
            raise DomainError(f"Hidden widths differ: generator {self.generator.hidden}, "
                              f"discriminator {self.discriminator.hidden}")

    @property
    def hidden(self):
        return self.generator.hidden

    @classmethod
    def initialize(cls, hidden, rng, mu=1.0, beta=2.0):
        return cls(GeneratorParams.initialize(hidden, rng, mu, beta), DiscriminatorParams.initialize(hidden, rng))

    def copy(self):
        return SmartConModel(self.generator.copy(), self.discriminator.copy())
