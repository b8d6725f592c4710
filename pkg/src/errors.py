"""
Error types shared by the regularity-structures library.

Report-style operations return dataclasses with a ``passed`` flag instead of
raising; the exceptions below are reserved for violated preconditions.
"""


class RegularityError(Exception):
    """Base class for all library errors."""


class GradingError(RegularityError):
    """Domain and codomain gradings of a map do not match."""


class SymbolGenerationError(RegularityError):
    """Symbol generation did not close below the requested threshold."""


class CascadeError(RegularityError):
    """Refinement coefficients are invalid or the cascade diverged."""


class ModelError(RegularityError):
    """A model could not be built (Chen violation, missing seed, bad data)."""


class ReconstructionError(RegularityError):
    """Reconstruction preconditions failed (gamma <= 0, wavelet too rough)."""


class ProductTableError(RegularityError):
    """A product table lacks an entry needed below the output gamma."""


class SectorError(RegularityError):
    """Composition requested on a sector that is not function-like."""


class KernelError(RegularityError):
    """Kernel decomposition or abstract integration preconditions failed."""


class PairingError(RegularityError):
    """Product of a distribution and a function is not well defined."""


class ConfigError(RegularityError):
    """Experiment configuration is invalid."""
