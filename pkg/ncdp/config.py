"""
Global configuration for ncdp.

Process-wide settings come from environment variables; library-wide
constants sit next to them so that every module reads the same values.
"""

import os
from pathlib import Path
from typing import Any, Dict

# Logging
LOG_LEVEL = os.getenv("NCDP_LOG_LEVEL", "INFO")
LOG_FILE = os.getenv("NCDP_LOG_FILE") or None

# Execution
WORKERS = int(os.getenv("NCDP_WORKERS", "1"))
output_dir_env = os.getenv("NCDP_OUTPUT_DIR")
DEFAULT_OUTPUT_DIR = Path(output_dir_env) if output_dir_env else Path.cwd()
DEFAULT_MASTER_SEED = int(os.getenv("NCDP_MASTER_SEED", "20120601"))
SHOW_PROGRESS = os.getenv("NCDP_PROGRESS", "true").lower() == "true"

# Physical layer constants
PREAMBLE_LENGTH = 128
LLR_CLAMP = 50.0
MAX_COLLISION_SIZE = 8
DEFAULT_ROLLOFF = 0.35
DEFAULT_OVERSAMPLING = 8
DEFAULT_SPAN = 12
DEFAULT_MAX_FREQ_OFFSET = 0.01  # cycles per symbol, 1% of the symbol rate

# MAC layer constants
COEFFICIENT_GENERATOR = "splitmix64"
DEFAULT_FIELD_BITS = 8

# Debug mode
debug = False


def set_debug(value: bool = True) -> None:
    """
    Set debug mode. If True, the CLI prints full tracebacks.
    """
    global debug
    debug = value


def is_debug() -> bool:
    return debug


def get_config() -> Dict[str, Any]:
    """Get all configuration as a dict."""
    return {
        "debug": debug,
        "log_level": LOG_LEVEL,
        "log_file": LOG_FILE,
        "workers": WORKERS,
        "output_dir": str(DEFAULT_OUTPUT_DIR),
        "master_seed": DEFAULT_MASTER_SEED,
        "show_progress": SHOW_PROGRESS,
        "preamble_length": PREAMBLE_LENGTH,
        "llr_clamp": LLR_CLAMP,
        "max_collision_size": MAX_COLLISION_SIZE,
        "coefficient_generator": COEFFICIENT_GENERATOR,
    }
