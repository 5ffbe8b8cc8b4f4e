"""
Module for extracting run and scenario configurations from JSON files.
"""
import os
import json
import logging

from core.exceptions import ConfigError

logger = logging.getLogger(__name__)


def extract_config_from_json(file_path):
    """
    Extract a configuration object from a JSON file.

    Args:
        file_path (str): Path to the JSON file

    Returns:
        dict: Parsed configuration

    Raises:
        ConfigError: if the file is absent, not valid JSON or not an object
    """
    logger.info(f"Extracting configuration from JSON file: {file_path}")

    if not os.path.exists(file_path):
        raise ConfigError(f"JSON file not found: {file_path}")

    try:
        with open(file_path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        logger.error(f"Error parsing JSON file {file_path}: {e}")
        raise ConfigError(f"Invalid JSON in {file_path}: {e}") from e
    except OSError as e:
        # Directories and unreadable files
        logger.error(f"Error opening JSON file {file_path}: {e}")
        raise ConfigError(f"Cannot read {file_path}: {e}") from e

    if not isinstance(data, dict):
        raise ConfigError(f"Expected a JSON object in {file_path}, got {type(data).__name__}")

    logger.debug(f"Configuration keys: {sorted(data)}")
    return data
