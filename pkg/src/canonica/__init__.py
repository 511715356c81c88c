"""Linear canonical transforms, short-time transforms and phaseless sampling."""

__version__ = "0.1.0"
