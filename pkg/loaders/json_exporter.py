"""
Module for exporting results and run metadata to JSON files.
"""
import os
import json
import logging

from utils import ensure_directory, to_jsonable

logger = logging.getLogger(__name__)


def export_to_json(payload, file_path):
    """
    Export a JSON-serializable payload with sorted keys.

    Non-finite floats are written as the strings "inf", "-inf" and "nan".

    Args:
        payload (dict or list): Data to write
        file_path (str): Path to the output JSON file

    Returns:
        str: Path to the created JSON file
    """
    ensure_directory(os.path.dirname(file_path))
    with open(file_path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(to_jsonable(payload), f, indent=2, sort_keys=True, allow_nan=False)
        f.write("\n")
    logger.info(f"Successfully exported JSON: {file_path}")
    return file_path
