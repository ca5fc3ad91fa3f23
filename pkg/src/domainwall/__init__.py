"""Disorder-averaged domain-wall statistics on frustrated Ising chains."""

__version__ = "0.1.0"
