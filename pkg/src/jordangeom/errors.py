"""Exception hierarchy shared by the whole package."""


class JordanGeomError(Exception):
    """Base class for every error raised by :mod:`jordangeom`."""


class ShapeMismatchError(JordanGeomError, ValueError):
    pass


class NotSelfAdjointError(JordanGeomError, ValueError):
    pass


class NotPositiveError(JordanGeomError, ValueError):
    pass


class NotFaithfulError(JordanGeomError, ValueError):
    pass


class NotAbsolutelyContinuousError(JordanGeomError, ValueError):
    """A tangent functional charges the kernel of its base point."""


class NotUnitalError(JordanGeomError, ValueError):
    pass


class DomainError(JordanGeomError, ValueError):
    """A parameter (or a finite-difference stencil point) left the model domain."""


class JRegularityError(JordanGeomError):
    """The model tangent space is not contained in AC at the base point."""

    def __init__(self, message, point=None, direction=None, qq_norm=None):
        super().__init__(message)
        self.point = point
        self.direction = direction
        self.qq_norm = qq_norm


class NumericalError(JordanGeomError, ArithmeticError):
    pass
