"""ctx-sim - contextuality, simulations and games for measurement scenarios."""

__version__ = "1.0.0"
__author__ = "Diogo Lucas"
