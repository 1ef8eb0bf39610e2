"""Utilities module."""

from utils.assertions import assert_close, assert_sweep_within, assert_traces_close
from utils.logger import Logger, get_logger

__all__ = ["Logger", "assert_close", "assert_sweep_within", "assert_traces_close", "get_logger"]
