"""Exception types raised across the package."""


class HermitError(Exception):
    """Base class for all package errors."""


class InputError(HermitError, ValueError):
    """Malformed or out-of-contract input (non-unitary matrix, bad axis, ...)."""


class AncillaRequired(InputError):
    """A gate can only be rewritten into the target set with an ancilla wire."""


class SynthesisError(HermitError, RuntimeError):
    """Internal synthesis failure; indicates a bug rather than a bad input."""
