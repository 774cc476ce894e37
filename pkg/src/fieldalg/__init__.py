"""Exact verification of field-algebra axioms on concrete state spaces."""

__version__ = "0.1.0"
