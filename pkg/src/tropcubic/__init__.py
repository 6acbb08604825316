"""Exact honeycomb cubics over cyclotomic Puiseux series."""

from .config import DEFAULT_CONFIG, SessionConfig
from .cyclotomic import CycloRat, field_roots

__all__ = [
    "CycloRat",
    "DEFAULT_CONFIG",
    "SessionConfig",
    "field_roots",
]
