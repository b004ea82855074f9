"""Compression-complexity causal discovery between raga composition corpora."""
__version__ = "0.1.0"
