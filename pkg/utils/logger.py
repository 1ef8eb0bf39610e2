"""Logging utilities with file output and pipeline stage/report logging."""

import datetime
import json
import logging
import os
from pathlib import Path

from config import settings


class Logger:
    """Logger with file output and DSP stage/report logging."""

    dir_path = Path(__file__).parent.parent
    file_name = f"log_{datetime.datetime.now().strftime('%Y-%m-%d_%H-%M-%S')}.log"
    file_path = dir_path / settings.log_dir / file_name

    _logger = None

    @classmethod
    def _get_logger(cls):
        """Get or create the shared lab logger."""
        if cls._logger is None:
            cls._logger = logging.getLogger("iq_skew_lab")
            if cls._logger.level == logging.NOTSET:
                cls._logger.setLevel(getattr(logging, settings.log_level.upper(), logging.INFO))
            cls._logger.propagate = True
        return cls._logger

    @classmethod
    def _ensure_logs_dir(cls):
        """Ensure logs directory exists."""
        cls.file_path.parent.mkdir(parents=True, exist_ok=True)

    @classmethod
    def write_log_to_file(cls, data: str):
        """Write log data to file."""
        try:
            cls._ensure_logs_dir()
            with open(cls.file_path, "a", encoding="utf-8") as logger_file:
                logger_file.write(data)
        except OSError:
            pass

    @classmethod
    def log(cls, message: str, level=logging.INFO):
        """Log message to both the live logger and file."""
        logger = cls._get_logger()
        logger.log(level, message)
        if logger.isEnabledFor(level):
            cls.write_log_to_file(message + "\n")

    @classmethod
    def add_stage(cls, stage: str, samples, sample_rate_hz: float, **details):
        """Log one pipeline stage: trace length, rate and mean power."""
        logger = cls._get_logger()
        if not logger.isEnabledFor(logging.DEBUG):
            return
        power = float((abs(samples) ** 2).mean()) if len(samples) else 0.0
        message = f"[{stage}] n={len(samples)} rate={sample_rate_hz / 1e9:.3f} GSa/s power={power:.4g}"
        if details:
            message += " " + " ".join(f"{key}={value}" for key, value in details.items())
        cls.log(message, level=logging.DEBUG)

    @classmethod
    def add_report(cls, report, label: str | None = None):
        """Log an estimate report summary and write its finals to the log file."""
        test_name = os.environ.get("PYTEST_CURRENT_TEST", label or "cli")
        finals = report.finals()

        data_to_add = "\n-----\n"
        data_to_add += f"Run: {test_name}\n"
        data_to_add += f"Time: {datetime.datetime.now()}\n"
        data_to_add += f"Subcarrier: SC-{report.sc_index}, blocks: {report.n_blocks_used}\n"
        data_to_add += f"Finals: {json.dumps(finals, indent=2)}\n"
        cls.write_log_to_file(data_to_add)

        summary = "━━━ ESTIMATE ━━━\n"
        summary += "\n".join(f"{key}: {value:+.3f}" for key, value in finals.items())
        cls._get_logger().info(summary)


LOG_FORMAT = "%(asctime)s [%(levelname)8s] %(name)s: %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def get_logger(name: str, level: str | None = None) -> logging.Logger:
    """Module logger writing to stderr and to the run's shared lab log file.

    The format matches the pytest live log; ``level`` falls back to
    ``settings.log_level``.
    """
    logger = logging.getLogger(name)

    if not logger.handlers:
        formatter = logging.Formatter(LOG_FORMAT, datefmt=LOG_DATE_FORMAT)
        console_handler = logging.StreamHandler()
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

        Logger._ensure_logs_dir()
        file_handler = logging.FileHandler(Logger.file_path, encoding="utf-8", delay=True)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    logger.setLevel(getattr(logging, (level or settings.log_level).upper(), logging.INFO))
    return logger
