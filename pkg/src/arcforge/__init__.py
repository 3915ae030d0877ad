"""arcforge: jet schemes, arc spaces and their invariants in exact arithmetic."""

__version__ = "0.1.0"
