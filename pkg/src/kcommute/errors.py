"""Exception hierarchy.

``PreconditionError`` subclasses signal bad input (CLI exit 3);
``VerificationFailure`` signals an internal postcondition that did not hold
(CLI exit 4, always a bug).
"""


class KCommuteError(Exception):
    pass


class PreconditionError(KCommuteError):
    pass


class NoRootOfUnity(PreconditionError):
    pass


class KNotInvertible(PreconditionError):
    pass


class RootNotInRing(PreconditionError):
    pass


class Singular(PreconditionError):
    pass


class NotCoherent(PreconditionError):
    pass


class NotConjugate(PreconditionError):
    pass


class DegenerateBlock(PreconditionError):
    pass


class KTooSmall(PreconditionError):
    pass


class ScalarInput(PreconditionError):
    pass


class EigenvalueOne(PreconditionError):
    pass


class VerificationFailure(KCommuteError):
    pass
