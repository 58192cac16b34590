"""Figure rendering for wedgewh pipeline outputs."""

from .render import KINDS, render

__all__ = ["KINDS", "render"]
__version__ = "0.1.0"
