"""Exception hierarchy shared by every module."""


class Lie4Error(Exception):
    """Base class for all library errors."""


class ParamOutOfRange(Lie4Error, ValueError):
    pass


class ParamMissing(Lie4Error, ValueError):
    pass


class ParamUnexpected(Lie4Error, ValueError):
    pass


class BadParams(Lie4Error, ValueError):
    pass


class Singular(Lie4Error, ValueError):
    pass


class NotPositiveDefinite(Lie4Error, ValueError):
    pass


class UnsupportedAlgebra(Lie4Error, ValueError):
    pass


class SchemaError(Lie4Error, ValueError):
    """A JSON document does not match the expected layout."""
