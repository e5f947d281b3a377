"""Chebyshev oscillator algebras, their Barut-Girardello coherent states,
and numerical checks of the associated operator identities."""

__version__ = "0.1.0"
