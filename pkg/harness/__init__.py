"""Experiment harness: detection, pipeline, sweeps and result files."""
