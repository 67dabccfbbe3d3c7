"""Geometry helpers."""

from .plane import Circle, Square

__all__ = ["Circle", "Square"]
