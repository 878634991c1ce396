"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line front end can map it
directly to a process status.
"""


class DTorsionError(Exception):
    exit_code = 1


class BudgetExceeded(DTorsionError):
    exit_code = 2


class OrderCapExceeded(BudgetExceeded):
    pass


class SizeBudgetExceeded(BudgetExceeded):
    pass


class ParseError(DTorsionError):
    exit_code = 3


class UnknownFamily(ParseError):
    pass


class InvalidPermutation(ParseError):
    pass


class VerificationMismatch(DTorsionError):
    exit_code = 4


class NotInKernel(DTorsionError, ValueError):
    pass


class NotSubmodule(DTorsionError, ValueError):
    pass


class NotASummand(DTorsionError, ValueError):
    pass


class NonCommutingTuple(DTorsionError, ValueError):
    pass


class MissingSector(DTorsionError, KeyError):
    pass
