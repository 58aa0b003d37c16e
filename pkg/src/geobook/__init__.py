"""geobook: a geometry-textbook knowledge engine.

Typed knowledge objects and relations, a formal geometry language with
definition expansion, real-time textbook consistency checking, document
generation, algebraic theorem proving, and numeric dynamic figures.
"""

__version__ = "0.1.0"
