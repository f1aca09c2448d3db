"""Entire area-minimizing t-graphs in the first Heisenberg group.

Constructions of graphs with a singular line or several singular
halflines, their horizontal area, and numerical minimality checks.
"""

from __future__ import annotations

__version__ = "0.1.0"
