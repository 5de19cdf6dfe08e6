"""Ensemble Markov-chain level generation for tile-based Mega Man levels."""

__version__ = "0.1.0"
