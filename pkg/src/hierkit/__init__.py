"""Difference hierarchies, approximation relations, and Choquet games.

Working kit for computing with level-indexed set algebras on finite
posets (Scott topology) and on symbolic presentations of a few infinite
spaces (powerset-of-N style spaces, cylinder spaces).
"""

from hierkit.ordinals import Ordinal

__all__ = ["Ordinal"]
