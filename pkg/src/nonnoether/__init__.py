"""Non-Noether symmetries of Hamiltonian systems: exact multivector calculus,
conservation laws, Lax pairs, recursion operators and numerical checks."""

__version__ = "0.1.0"

from .expr import Expr, parse, evaluate, differentiate, exact_divide  # noqa: F401
