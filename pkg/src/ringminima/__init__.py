"""Rings from binary forms, order-lattice minima, and box experiments."""

__version__ = "0.1.0"
