"""Adversarial temporal point-process model: generator, discriminator, training and sampling."""
from NbLink.gan.params import GeneratorParams, DiscriminatorParams, SmartConModel
from NbLink.gan.history import EventRecord, EventHistory, sequences_from_records, split_sequences
from NbLink.gan.sampler import predict_schedule, sample_next_event, GeneratorState
from NbLink.gan.trainer import (
    GanSettings, GanTrainer, TrainResult, gan_loss, sgd_step, train, prediction_mape, split_dataset)
from NbLink.gan.gradcheck import check_grads

__all__ = ['GeneratorParams', 'DiscriminatorParams', 'SmartConModel', 'EventRecord', 'EventHistory',
           'sequences_from_records', 'split_sequences', 'predict_schedule', 'sample_next_event',
           'GeneratorState', 'GanSettings', 'GanTrainer', 'TrainResult', 'gan_loss', 'sgd_step', 'train',
           'prediction_mape', 'split_dataset', 'check_grads']
