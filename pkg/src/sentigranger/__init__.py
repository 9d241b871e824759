"""Headline sentiment scoring and Granger causality tests against close prices."""

__version__ = "0.1.0"
