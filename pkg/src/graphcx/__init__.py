"""Graph complexes of cyclic operads, universal cycles and state sums."""

__version__ = "0.1.0"
