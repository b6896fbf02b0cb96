"""Batch array boundary for the augmentation core.

Exposes batch augmentation and vital-phase detection over plain
contiguous arrays so dataloader pipelines can call the core without
touching its domain types. Inputs are converted at the boundary only
when their layout or dtype mismatches (that conversion is the single
place a copy can happen); results are bitwise identical to per-sample
calls into the core with substreams derived from (seed, index).
"""

from .batch import py_detect_vital, py_vipaug_batch, validate_config

__version__ = "0.1.0"

__all__ = ["py_detect_vital", "py_vipaug_batch", "validate_config"]
