"""Self-similar graph systems and their groupoid invariants."""

__version__ = "0.1.0"
