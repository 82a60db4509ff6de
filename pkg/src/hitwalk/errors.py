"""Exception hierarchy.

Every error raised on purpose by the library derives from ``HitwalkError`` so
callers (and the CLI) can separate input problems from numerical failures.
"""


class HitwalkError(Exception):
    pass


class InputError(HitwalkError, ValueError):
    """Malformed or inconsistent user input."""


class NumericalError(HitwalkError, ArithmeticError):
    """A numerical kernel could not deliver its contract."""


class DisconnectedGraph(InputError):
    pass


class IndexOutOfRange(InputError):
    pass


class DuplicateEdge(InputError):
    pass


class UnknownFamily(InputError):
    pass


class BadParams(InputError):
    pass


class NotRegular(InputError):
    pass


class UnknownLabel(InputError, KeyError):
    pass


class DisconnectedRelation(InputError):
    pass


class SingularMatrix(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class WalkLimitExceeded(NumericalError):
    pass
