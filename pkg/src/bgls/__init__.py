"""Bilateral grand Lebesgue spaces: norms, dilation operators, indices and boundedness rules."""

__version__ = "0.1.0"
