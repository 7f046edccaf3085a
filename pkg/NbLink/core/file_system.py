# file_system.py - File formats and atomic file operations
import math
import os
import tempfile
from dataclasses import dataclass

import numpy as np
from openpyxl import Workbook
from openpyxl.styles import Font, PatternFill

from NbLink.core.link_model import CODE_DIRECTIONS
from NbLink.gan.params import (
    DISCRIMINATOR_TENSORS, GENERATOR_TENSORS, DiscriminatorParams, GeneratorParams, SmartConModel, tensor_shape)
from NbLink.utils.errors import CheckpointError, DatasetError, DomainError
from NbLink.utils.log_service import LoggingService
from NbLink.utils.regex import RegexPatterns


@dataclass(frozen=True)
class DatasetRecord:
    """Wire form of one event: label plus the SINR and PLR context it was observed in"""
    t_ms: float
    direction: str
    alpha: int
    gamma: float
    m_norm: float
    r_norm: float
    sinr_db: float
    plr: float

    def __post_init__(self):
        if self.direction not in CODE_DIRECTIONS:
            raise DomainError(f"direction must be U or D, got {self.direction!r}")
        if self.alpha not in (0, 1):
            raise DomainError(f"alpha must be 0 or 1, got {self.alpha}")
        for name in ("gamma", "m_norm", "r_norm", "plr"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise DomainError(f"{name}={getattr(self, name)} outside [0, 1]")
        if self.alpha == 0 and (self.gamma, self.m_norm, self.r_norm) != (0.0, 0.0, 0.0):
            raise DomainError("alpha=0 record carries a nonzero configuration")
        if not math.isfinite(self.t_ms) or not math.isfinite(self.sinr_db):
            raise DomainError("t_ms and sinr_db must be finite")

    def to_line(self, digits=10):
        return ",".join([_num(self.t_ms, digits), self.direction, str(self.alpha),
                         _num(self.gamma, digits), _num(self.m_norm, digits), _num(self.r_norm, digits),
                         _num(self.sinr_db, digits), _num(self.plr, digits)])


def _num(value, digits):
    return f"{value:.{digits}g}"


class FileSystem:
    """
    Reads and writes every NbLink file format.

    Every write goes to a temporary file next to the target and is
    renamed into place only once complete, so an output file is either
    whole or absent.
    """

    def __init__(self, config, logger=None):
        """Initialize with configuration"""
        self.config = config
        self.regex = RegexPatterns()

        # Set up logging
        self._logger = logger or LoggingService(__name__)
        self.log = self._logger.info

    # Directory Operations
    def create_folder_if_not_exists(self, path):
        """Create folder if it doesn't exist"""
        if path and not os.path.exists(path):
            os.makedirs(path)
            self.log(f"Created folder: {path}")
        return path

    # Atomic writes
    def atomic_write(self, path, writer, binary=False):
        """
        Call writer(file_object) on a temp file, then rename it to `path`.
        The temp file is removed if writer raises.
        """
        folder = os.path.dirname(os.path.abspath(path))
        self.create_folder_if_not_exists(folder)
        fd, temp_path = tempfile.mkstemp(prefix=os.path.basename(path) + ".",
                                         suffix=self.config.TEMP_SUFFIX, dir=folder)
        try:
            with os.fdopen(fd, "wb" if binary else "w", **({} if binary else {"encoding": "utf-8", "newline": "\n"})) as f:
                writer(f)
            os.replace(temp_path, path)
        except BaseException:
            if os.path.exists(temp_path):
                os.remove(temp_path)
            raise
        return path

    def atomic_write_text(self, path, text):
        return self.atomic_write(path, lambda f: f.write(text))

    def read_text(self, path):
        with open(path, "r", encoding="utf-8") as f:
            return f.read()

    # Dataset
    def dataset_text(self, records):
        lines = [self.config.DATASET_HEADER]
        lines.extend(rec.to_line(self.config.SIGNIFICANT_DIGITS) for rec in records)
        return "\n".join(lines) + "\n"

    def write_dataset(self, path, records):
        self.atomic_write_text(path, self.dataset_text(records))
        self.log(f"Wrote {len(records)} records to {path}")
        return path

    def parse_dataset(self, text, source="<dataset>"):
        lines = text.splitlines()
        if not lines or lines[0].strip() != self.config.DATASET_HEADER:
            raise DatasetError(f"{source}:1: expected header {self.config.DATASET_HEADER!r}")
        records = []
        last_t = None
        for number, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            fields = line.strip().split(",")
            if len(fields) != 8:
                raise DatasetError(f"{source}:{number}: expected 8 fields, got {len(fields)}")
            try:
                record = DatasetRecord(float(fields[0]), fields[1], int(fields[2]), float(fields[3]),
                                       float(fields[4]), float(fields[5]), float(fields[6]), float(fields[7]))
            except (ValueError, DomainError) as e:
                raise DatasetError(f"{source}:{number}: {e}") from None
            if last_t is not None and record.t_ms <= last_t:
                raise DatasetError(f"{source}:{number}: time {record.t_ms} does not increase")
            last_t = record.t_ms
            records.append(record)
        return records

    def read_dataset(self, path):
        try:
            text = self.read_text(path)
        except OSError as e:
            raise DatasetError(f"cannot read dataset {path}: {e.strerror or e}") from None
        records = self.parse_dataset(text, source=path)
        self.log(f"Read {len(records)} records from {path}")
        return records

    # Checkpoint
    def checkpoint_text(self, model):
        gen, disc = model.generator, model.discriminator
        lines = [self.config.CHECKPOINT_TAG, f"H={model.hidden} mu={float(gen.mu)!r} beta={float(gen.beta)!r}"]
        tensors = list(gen.tensors().items()) + list(disc.tensors().items())
        for name, value in tensors:
            matrix = np.asarray(value, dtype=float).reshape(_stored_shape(name, model.hidden))
            if not np.all(np.isfinite(matrix)):
                raise CheckpointError(f"{name} holds non-finite values; refusing to write")
            lines.append(f"{name} {matrix.shape[0]} {matrix.shape[1]}")
            lines.extend(" ".join(repr(float(v)) for v in row) for row in matrix)
        return "\n".join(lines) + "\n"

    def write_checkpoint(self, path, model):
        self.atomic_write_text(path, self.checkpoint_text(model))
        self.log(f"Wrote H={model.hidden} checkpoint to {path}")
        return path

    def parse_checkpoint(self, text, expected_hidden=None, source="<checkpoint>"):
        lines = text.splitlines()
        if not lines:
            raise CheckpointError(f"{source}: empty checkpoint")
        version = self.regex.extract('ckpt_version', lines[0].strip())
        if version is None:
            raise CheckpointError(f"{source}: not a checkpoint (first line {lines[0][:40]!r})")
        if int(version) != self.config.CHECKPOINT_VERSION:
            raise CheckpointError(f"{source}: checkpoint version {version}, expected {self.config.CHECKPOINT_VERSION}")
        if len(lines) < 2:
            raise CheckpointError(f"{source}: truncated after the version line")
        dims = self.regex.match('ckpt_dims', lines[1].strip())
        if dims is None:
            raise CheckpointError(f"{source}:2: malformed dimension line")
        hidden = int(dims.group(1))
        try:
            mu, beta = float(dims.group(2)), float(dims.group(3))
        except ValueError:
            raise CheckpointError(f"{source}:2: malformed mu/beta") from None
        if expected_hidden is not None and hidden != expected_hidden:
            raise CheckpointError(f"{source}: dimension mismatch, checkpoint H={hidden}, configured H={expected_hidden}")

        values = {}
        cursor = 2
        for name in GENERATOR_TENSORS + DISCRIMINATOR_TENSORS:
            if cursor >= len(lines):
                raise CheckpointError(f"{source}: truncated before tensor {name}")
            header = self.regex.match('tensor_header', lines[cursor].strip())
            rows, cols = _stored_shape(name, hidden)
            if header is None or header.group(1) != name:
                raise CheckpointError(f"{source}:{cursor + 1}: expected header for {name}")
            if (int(header.group(2)), int(header.group(3))) != (rows, cols):
                raise CheckpointError(f"{source}:{cursor + 1}: dimension mismatch for {name}: "
                                      f"{header.group(2)}x{header.group(3)}, expected {rows}x{cols}")
            body = lines[cursor + 1:cursor + 1 + rows]
            if len(body) < rows:
                raise CheckpointError(f"{source}: truncated inside tensor {name}")
            try:
                matrix = np.array([[float(v) for v in row.split()] for row in body], dtype=float)
            except ValueError:
                raise CheckpointError(f"{source}: unparsable value in tensor {name}") from None
            if matrix.shape != (rows, cols):
                raise CheckpointError(f"{source}: tensor {name} rows do not hold {cols} values each")
            if not np.all(np.isfinite(matrix)):
                raise CheckpointError(f"{source}: tensor {name} holds non-finite values")
            shape = tensor_shape(name, hidden)
            values[name] = float(matrix[0, 0]) if shape == () else matrix.reshape(shape)
            cursor += 1 + rows
        if any(line.strip() for line in lines[cursor:]):
            raise CheckpointError(f"{source}:{cursor + 1}: unexpected content after the last tensor")

        try:
            gen = GeneratorParams(**{n: values[n] for n in GENERATOR_TENSORS}, mu=mu, beta=beta)
            disc = DiscriminatorParams(**{n: values[n] for n in DISCRIMINATOR_TENSORS})
        except DomainError as e:
            raise CheckpointError(f"{source}: {e}") from None
        return SmartConModel(gen, disc)

    def read_checkpoint(self, path, expected_hidden=None):
        try:
            text = self.read_text(path)
        except OSError as e:
            raise CheckpointError(f"cannot read checkpoint {path}: {e.strerror or e}") from None
        model = self.parse_checkpoint(text, expected_hidden, source=path)
        self.log(f"Loaded H={model.hidden} checkpoint from {path}")
        return model

    # Metrics
    def metrics_text(self, reports):
        lines = [",".join(self.config.METRICS_COLUMNS)]
        lines.extend(",".join(report.csv_row()) for report in reports)
        return "\n".join(lines) + "\n"

    def write_metrics(self, path, reports):
        self.atomic_write_text(path, self.metrics_text(reports))
        self.log(f"Wrote {len(reports)} metrics rows to {path}")
        return path

    def write_workbook(self, path, reports):
        """
        Sweep summary workbook: one row per run, header shaded, and per UE
        count the best throughput green and the worst red.
        """
        styles = self.config.EXCEL_STYLES
        wb = Workbook()
        ws = wb.active
        ws.title = "Sweep"
        columns = list(self.config.METRICS_COLUMNS) + ["decision_time_us", "retrain_signals"]
        ws.append(columns)
        header_fill = PatternFill(start_color=styles["header"], end_color=styles["header"], fill_type="solid")
        for cell in ws[1]:
            cell.fill = header_fill
            cell.font = Font(bold=True)

        by_ues = {}
        for row_index, report in enumerate(reports, start=2):
            ws.append([report.policy, report.n_ues, report.seed, report.throughput_bps, report.avg_plr,
                       report.avg_delay_ms, report.delay_quantile(0.5), report.delay_quantile(0.95),
                       report.consumed_subframes, report.mape_avg, report.decision_time_us,
                       report.retrain_signals])
            by_ues.setdefault(report.n_ues, []).append((report.throughput_bps, row_index))

        throughput_col = columns.index("throughput_bps") + 1
        for rows in by_ues.values():
            if len(rows) < 2:
                continue
            for key, (_, row_index) in (("best", max(rows)), ("worst", min(rows))):
                fill = PatternFill(start_color=styles[key], end_color=styles[key], fill_type="solid")
                ws.cell(row=row_index, column=throughput_col).fill = fill

        self.atomic_write(path, wb.save, binary=True)
        self.log(f"Wrote sweep workbook with {len(reports)} rows to {path}")
        return path


def _stored_shape(name, hidden):
    """Checkpoint layout: matrices as-is, vectors as H x 1, scalars as 1 x 1"""
    shape = tensor_shape(name, hidden)
    if shape == ():
        return 1, 1
    if len(shape) == 1:
        return shape[0], 1
    return shape
