"""Test data module."""

from data.factories import ImpairmentFactory, TraceFactory

__all__ = ["ImpairmentFactory", "TraceFactory"]
