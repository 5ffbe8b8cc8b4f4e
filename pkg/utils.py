"""
Utility functions shared by the extractors, loaders and command line.
"""
import hashlib
import json
import logging
import math
import os

import numpy as np

logger = logging.getLogger(__name__)


def ensure_directory(directory_path):
    """Ensure a directory exists, creating it if necessary."""
    if directory_path and not os.path.exists(directory_path):
        os.makedirs(directory_path)
        logger.info(f"Created directory: {directory_path}")


def to_jsonable(value):
    """
    Convert numpy scalars and arrays to plain Python and non-finite floats to
    the strings "inf", "-inf" and "nan", so the output is strict JSON.
    """
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return value


def canonical_json(payload):
    """Compact JSON with sorted keys; equal payloads give equal strings."""
    return json.dumps(to_jsonable(payload), sort_keys=True, separators=(",", ":"))


def config_hash(payload):
    """SHA-256 hex digest of the canonical JSON of a configuration."""
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()
