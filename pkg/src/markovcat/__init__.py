"""Markov categories: exact matrix backends, a Gaussian backend, and statistics on top."""

from . import core, diagram, finprob, gauss, io, linalg, matcat, stats

__all__ = ["core", "diagram", "finprob", "gauss", "io", "linalg", "matcat", "stats"]
