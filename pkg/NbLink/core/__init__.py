"""Core functionality for the NbLink package: link model, bandit, simulator, metrics and file formats."""
import os
import sys
sys.path.append(os.path.abspath(os.path.dirname(os.path.dirname(os.path.dirname(__file__)))))

from NbLink.core.link_model import LinkConfig, LinkSpace, ChannelModelParams, UPLINK, DOWNLINK
from NbLink.core.mab_engine import MabEngine, MabParams, StatisticTable, generate_dataset
from NbLink.core.metrics import MetricsReport, delay_cdf, mape, mape_avg
from NbLink.core.simulator import SimConfig, Simulator, run_policy
from NbLink.core.retrain import RetrainMonitor, should_retrain
from NbLink.core.file_system import FileSystem, DatasetRecord

__all__ = ['LinkConfig', 'LinkSpace', 'ChannelModelParams', 'UPLINK', 'DOWNLINK', 'MabEngine', 'MabParams',
           'StatisticTable', 'generate_dataset', 'MetricsReport', 'delay_cdf', 'mape', 'mape_avg', 'SimConfig',
           'Simulator', 'run_policy', 'RetrainMonitor', 'should_retrain', 'FileSystem', 'DatasetRecord']
