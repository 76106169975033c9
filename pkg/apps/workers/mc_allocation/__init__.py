"""Optimal allocation of a Monte-Carlo sample budget across Bonferroni-tested hypotheses."""

__version__ = "0.1.0"
