"""Argumentative dialogues as labelled transition systems."""

__version__ = "0.1.0"
