"""Exception hierarchy shared by all fansheaf modules."""


class FanSheafError(Exception):
    """Base class for all errors raised by this package."""


# -- scalar arithmetic ------------------------------------------------------

class DivisionByZero(FanSheafError, ZeroDivisionError):
    pass


class FieldMismatch(FanSheafError):
    """Mixing elements of distinct quadratic extensions."""


class ParseError(FanSheafError):
    pass


# -- cones and fans ---------------------------------------------------------

class EmptyInput(FanSheafError):
    pass


class NotStrictlyConvex(FanSheafError):
    """The generators positively span a line."""


class NotAFan(FanSheafError):
    """Two cones intersect in a set that is not a common face."""


class NotPure(FanSheafError):
    pass


class ConeNotInFan(FanSheafError):
    pass


class RayOutsideSupport(FanSheafError):
    pass


class NotASubfan(FanSheafError):
    pass


class NotQuasiConvex(FanSheafError):
    pass


class NotComplete(FanSheafError):
    pass


class NotSimplicial(FanSheafError):
    pass


# -- graded linear algebra --------------------------------------------------

class CutoffTooSmall(FanSheafError):
    """The degree cutoff does not reach all generators of a module."""


class IncompatibleShapes(FanSheafError):
    pass


# -- sheaves and duality ----------------------------------------------------

class NotPerverse(FanSheafError):
    pass


class WrongKernel(FanSheafError):
    """Linear form does not cut out the requested facet."""


class NotAFacet(FanSheafError):
    pass


class ChainInconsistency(FanSheafError):
    """Facet-chain composites disagree; orientation data is corrupt."""


class ComparisonNotBijective(FanSheafError):
    """The global duality comparison map failed to be an isomorphism."""


class SolutionSpaceNotOneDimensional(FanSheafError):
    """Sheaf morphism space does not have the expected dimension 1."""


# -- intersection product ---------------------------------------------------

class DenominatorNotCleared(FanSheafError):
    """Localization sum did not reduce to a polynomial."""


class BoundarySupport(FanSheafError):
    """Section fails to vanish on the boundary fan."""


class NotStrictlyConvexFunction(FanSheafError):
    pass
