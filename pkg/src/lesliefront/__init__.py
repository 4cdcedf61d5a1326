"""Leslie-Gower predator-prey dynamics on a habitat with a free boundary."""

__version__ = "0.1.0"
