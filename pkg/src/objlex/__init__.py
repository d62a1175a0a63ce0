"""Read-only, index-accelerated object lexicon with a categorial generator."""

__version__ = "0.1.0"
