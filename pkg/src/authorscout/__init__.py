"""Author-centric literature discovery engine."""

__version__ = "0.1.0"
