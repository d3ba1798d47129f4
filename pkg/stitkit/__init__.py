"""stitkit — strategic stit logic toolkit.

Parsing, neighbourhood and branching-time model checking, frame conditions, the
ability-to-stit translation, bounded core morphisms and bounded validity search.
"""

__version__ = "0.1.0"
