"""Exception types shared by every structure in the package."""


class AsapError(Exception):
    """Base class for errors raised by this package."""


class ConstructionError(AsapError, ValueError):
    """Input rejected while building a structure."""


class RangeError(AsapError, IndexError):
    """Query argument outside the valid index or rank range."""


class SymbolNotFound(AsapError, KeyError):
    """Symbol does not belong to any partition of the alphabet map."""


class FormatError(AsapError, ValueError):
    """Malformed, corrupted, or unsupported serialized data."""
