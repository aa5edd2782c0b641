"""Exception hierarchy shared by all modules.

Each exception carries an ``exit_code`` used by the command-line front end:
1 for invalid configuration, 2 for violated preconditions, 3 for exceeded
budgets or caps.
"""


class FermiGasError(Exception):
    exit_code = 2


class InvalidConfig(FermiGasError):
    exit_code = 1


class PreconditionError(FermiGasError):
    exit_code = 2


class CapExceeded(FermiGasError):
    exit_code = 3


class BudgetExceeded(CapExceeded):
    pass


# scattering
class NonpositiveRange(PreconditionError):
    pass


class GridTooCoarse(PreconditionError):
    pass


class ZeroScatteringLength(PreconditionError):
    pass


class NoBracket(PreconditionError):
    pass


class UnsupportedMoment(PreconditionError):
    pass


# fermi_surface
class SymmetryOrbitMismatch(PreconditionError):
    pass


class DegenerateHull(PreconditionError):
    pass


class EmptySet(PreconditionError):
    pass


# lebesgue
class GridAliased(PreconditionError):
    pass


# slater
class FitIllConditioned(PreconditionError):
    pass


# ggr
class UnknownId(PreconditionError):
    pass


# energy
class DiluteRegimeViolated(PreconditionError):
    pass


class GeometryInvalid(PreconditionError):
    pass
