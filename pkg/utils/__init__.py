"""
Utility Functions

This package contains utility functions and classes:
- Configuration management
- Error types
- Input and output file formats
"""

from .config import Config, get_config, load_config
from .errors import CubistError

__all__ = ["Config", "get_config", "load_config", "CubistError"]
