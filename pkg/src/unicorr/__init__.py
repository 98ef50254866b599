"""Classification, correspondence and translation tools for LE-logics."""

from .signature import builtin, expand_signature, parse_signature
from .syntax import parse_inequality, parse_quasi, parse_term
from .classify import search_classification
from .alba import run_alba

__all__ = ["builtin", "expand_signature", "parse_signature", "parse_inequality", "parse_quasi",
           "parse_term", "search_classification", "run_alba"]
