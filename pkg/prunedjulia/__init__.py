"""
Pruned Julia sets of real interval maps.

Computes and verifies pruned Julia sets, external circle maps, conjugacy
invariants and their transversality formulas at desk scale.
"""

__version__ = "1.0.0"
