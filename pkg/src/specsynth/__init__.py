"""Contract synthesis with a ladder of contract logics, checked by fuzzing."""

__version__ = "0.1.0"
