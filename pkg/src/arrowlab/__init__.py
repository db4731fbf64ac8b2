"""arrowlab: transfer operators, entropy monotonicity, resonance decay,
and entropy-gap cosmology."""

__version__ = "0.1.0"
