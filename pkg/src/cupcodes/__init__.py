"""Chain complexes over GF(2), cup products and constant-depth logical gates for CSS codes."""

from __future__ import annotations

__version__ = "0.1.0"
