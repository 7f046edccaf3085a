"""Link-adaptation policies the simulator can drive, and a factory building them from a RunConfig."""
from NbLink.core.mab_engine import MabEngine
from NbLink.core.retrain import RetrainMonitor
from NbLink.policies.base import Policy
from NbLink.policies.mab import MabPolicy, ObservationWindow
from NbLink.policies.smartcon import SmartConPolicy
from NbLink.policies.static import STATIC_CONFIG, StaticPolicy
from NbLink.policies.threshold import ThresholdPolicy, threshold_config
from NbLink.utils.errors import DomainError
from NbLink.utils.rng import SeedStreams

POLICY_NAMES = ("static", "threshold", "mab", "smartcon")


def make_policy(name, run_config, model=None, seed=0, training_plr=None, warm_records=None, logger=None):
    """
    Build the named policy. "smartcon" needs a trained model; when a
    training PLR column is given it also watches for retraining. "mab"
    replays `warm_records` (a dataset trace) into its table first.
    """
    streams = SeedStreams(seed)
    if name == "static":
        return StaticPolicy(logger=logger)
    if name == "threshold":
        return ThresholdPolicy(run_config.threshold_margin_db, logger=logger)
    if name == "mab":
        engine = MabEngine(run_config.mab_params(), run_config.link_space(), streams.generator("mab"), logger=logger)
        if warm_records:
            engine.warm_start(warm_records)
        return MabPolicy(engine, logger=logger)
    if name == "smartcon":
        monitor = None
        if training_plr is not None and len(training_plr) >= 2:
            monitor = RetrainMonitor(training_plr, streams.generator("gan", 5), run_config.correlation_threshold,
                                     window_ms=run_config.rho_ms, record_threshold=run_config.retrain_record_threshold,
                                     logger=logger)
        return SmartConPolicy(model, seed=seed, rho_ms=run_config.rho_ms, segment_ms=run_config.sequence_window_ms,
                              window_s=run_config.ogata_window_s,
                              fallback=ThresholdPolicy(run_config.threshold_margin_db, logger=logger),
                              monitor=monitor, logger=logger)
    raise DomainError(f"Unknown policy {name!r}; expected one of {', '.join(POLICY_NAMES)}")


__all__ = ['Policy', 'StaticPolicy', 'STATIC_CONFIG', 'ThresholdPolicy', 'threshold_config', 'MabPolicy',
           'ObservationWindow', 'SmartConPolicy', 'POLICY_NAMES', 'make_policy']
