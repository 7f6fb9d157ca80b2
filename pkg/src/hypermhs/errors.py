"""Exception hierarchy.

Input problems derive from :class:`InputError`, numerical breakdowns from
:class:`NumericalError`; the CLI maps them to exit codes 2 and 3.
"""


class HyperMHSError(Exception):
    pass


class InputError(HyperMHSError, ValueError):
    pass


class NumericalError(HyperMHSError, ArithmeticError):
    pass


class NotSquarefree(InputError):
    pass


class DegreeTooSmall(InputError):
    pass


class EvenDegreeUnsupported(InputError):
    pass


class PointNotOnCurve(InputError):
    pass


class ClearanceViolation(InputError):
    pass


class RadiusTooLarge(InputError):
    pass


class LengthMismatch(InputError):
    pass


class DegenerateConfiguration(NumericalError):
    pass


class ContinuationAmbiguous(NumericalError):
    pass


class PoleOnPath(NumericalError):
    pass


class NoConvergence(NumericalError):
    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class FormSingularAtInfinity(InputError):
    pass


class SingularABlock(NumericalError):
    pass


class NotSymmetric(NumericalError):
    pass


class NotPositive(NumericalError):
    pass


class NotPositiveDefinite(NumericalError):
    pass
