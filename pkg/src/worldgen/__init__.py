"""Deterministic indoor world and scenario generation engine."""

__version__ = "0.1.0"
