"""Cusp loci of plane curves: resolutions, Mordell-Weil ranks and sequence bounds."""

__version__ = "0.1.0"
