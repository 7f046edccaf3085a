# sampler.py - Ogata thinning over the generator intensity and schedule prediction
from dataclasses import dataclass

import numpy as np

from NbLink.core.link_model import LinkConfig, LinkSpace, repetition_set
from NbLink.gan.generator import (
    alpha_probability, gamma_from_noise, intensity, sample_mcs_rep, sample_noise, step_hidden, MarkStream)
from NbLink.gan.history import EventHistory, EventRecord
from NbLink.utils.errors import DomainError

OGATA_WINDOW_S = 1.0
MAX_EVENTS = 100_000


@dataclass
class GeneratorState:
    """Hidden state after the last accepted event"""
    h: np.ndarray
    t_last: float = 0.0
    index: int = 0

    @classmethod
    def fresh(cls, hidden):
        return cls(np.zeros(hidden))


@dataclass
class SampledEvent:
    t: float
    alpha: int
    xi: float
    gamma: float
    m: float
    r: float
    eta: float

    def record(self, offset_ms=0.0):
        return EventRecord(offset_ms + 1000.0 * self.t, self.alpha, self.gamma, (self.m, self.r))


def _upper_bound(t, window_end, state, params):
    # exponential-affine in t: the maximum sits at an end of the window
    if params.c_g >= 0:
        return intensity(window_end, state.t_last, state.h, params)
    return intensity(t, state.t_last, state.h, params)


def sample_next_event(t_now, state, params, rng, horizon, marks=None, window_s=OGATA_WINDOW_S):
    """
    Next event after t_now by Ogata thinning, or None once the horizon is
    reached. On acceptance the marks are drawn and `state` advances.
    """
    if horizon <= t_now:
        return None
    if t_now < state.t_last:
        raise DomainError(f"t_now={t_now} precedes the last event {state.t_last}")
    marks = marks or MarkStream(0)
    t = t_now
    while t < horizon:
        window_end = min(t + window_s, horizon) if params.c_g > 0 else horizon
        bound = _upper_bound(t, window_end, state, params)
        if not bound > 0 or not np.isfinite(bound):
            return None
        t_candidate = t + rng.exponential(1.0 / bound)
        if t_candidate >= window_end:
            t = window_end
            continue
        t = t_candidate
        if rng.random() * bound <= intensity(t, state.t_last, state.h, params):
            return _accept(t, state, params, rng, marks)
    return None


def _accept(t, state, params, rng, marks):
    eta = sample_noise(params.mu, rng)
    xi = alpha_probability(state.h, params.w_alpha)
    alpha = int(rng.random() < xi)
    gamma = gamma_from_noise(eta) if alpha else 0.0
    m, r = sample_mcs_rep(eta, params.beta, alpha, marks, state.index)
    state.h = step_hidden(state.h, t, eta, alpha, gamma, (m, r), params)
    state.t_last = t
    state.index += 1
    return SampledEvent(t, alpha, xi, gamma, m, r, eta)


def sample_sequence(params, horizon, rng, marks=None, window_s=OGATA_WINDOW_S, max_events=MAX_EVENTS):
    """Events of one rollout over [0, horizon) from a fresh hidden state"""
    state = GeneratorState.fresh(params.hidden)
    events = []
    t = 0.0
    while len(events) < max_events:
        event = sample_next_event(t, state, params, rng, horizon, marks, window_s)
        if event is None:
            break
        events.append(event)
        t = event.t
    return events


def rollout(params, horizon, rng, marks=None, window_s=OGATA_WINDOW_S, max_events=MAX_EVENTS):
    """A generated EventHistory carrying its sampled noise"""
    events = sample_sequence(params, horizon, rng, marks, window_s, max_events)
    if not events:
        return EventHistory.empty(horizon)
    columns = np.array([(e.t, e.alpha, e.gamma, e.m, e.r, e.eta) for e in events])
    return EventHistory(*columns.T, horizon)


@dataclass
class PredictedEvent:
    t_ms: float
    xi: float
    alpha: int
    prb_count: int
    config: LinkConfig
    gamma: float = 0.0
    m_norm: float = 0.0
    r_norm: float = 0.0


def predict_schedule(model, t_now_ms, horizon_ms, direction, link_space=None, seed=0,
                     segment_ms=None, window_s=OGATA_WINDOW_S):
    """
    Generated scheduling events in [t_now_ms, t_now_ms + horizon_ms),
    each with its scheduling probability and the denormalized PRB count
    and (MCS, repetition) for `direction`. Rollouts restart from a fresh
    hidden state every `segment_ms` (the training sequence length).
    """
    if horizon_ms <= 0:
        return []
    generator = getattr(model, "generator", model)
    link_space = link_space or LinkSpace()
    rep_set = repetition_set(direction)
    segment_ms = segment_ms or horizon_ms
    predicted = []
    start = 0.0
    segment = 0
    while start < horizon_ms:
        span = min(segment_ms, horizon_ms - start)
        event_seq, mark_seq = np.random.SeedSequence(int(seed), spawn_key=(int(t_now_ms), segment)).spawn(2)
        rng = np.random.default_rng(event_seq)
        marks = MarkStream(int(mark_seq.generate_state(1, dtype=np.uint64)[0]))
        segment += 1
        for event in sample_sequence(generator, span / 1000.0, rng, marks, window_s):
            config = link_space.denormalize(event.gamma, event.m, event.r, rep_set.direction)
            predicted.append(PredictedEvent(t_now_ms + start + 1000.0 * event.t, event.xi, event.alpha,
                                            config.prb_count, config, event.gamma, event.m, event.r))
        start += span
    return predicted
