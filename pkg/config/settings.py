"""Application configuration and settings."""
import os
from typing import Optional

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Level structure used when --levels is absent: nat, omega1 or omega-omega
DEFAULT_LEVELS = os.getenv("TTFL_LEVELS", "nat")

# Worker threads for checking several files at once
try:
    DEFAULT_WORKERS = max(1, int(os.getenv("TTFL_WORKERS", "4")))
except ValueError:
    DEFAULT_WORKERS = 4

# Level of the ``ttfl`` logger; --verbose lowers it to DEBUG
LOG_LEVEL = os.getenv("TTFL_LOG_LEVEL", "WARNING")

# Source files
SOURCE_EXTENSION = ".ttfl"
MAX_SOURCE_BYTES = 64 * 1024 * 1024

# Corpus conventions
EXPECT_PREFIX = "-- expect:"
LEVELS_PREFIX = "-- levels:"
CORPUS_ACCEPT_DIR = "accept"
CORPUS_REJECT_DIR = "reject"

# Exit codes
EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2


def get_color_setting(flag: Optional[bool] = None) -> Optional[bool]:
    """
    Resolve whether output should be coloured.

    Args:
        flag: Value of --color/--no-color, None when neither was given

    Returns:
        True or False when forced by the flag or TTFL_COLOR, None to let rich detect the terminal
    """
    if flag is not None:
        return flag
    value = os.getenv("TTFL_COLOR", "").strip()
    if value == "1":
        return True
    if value == "0":
        return False
    return None
