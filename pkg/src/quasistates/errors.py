class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class OutsideSpaceError(DomainError):
    pass


class StructureError(DomainError):
    """Point/space arity or kind mismatch."""


class TreeError(DomainError):
    pass


class CycleError(TreeError):
    pass


class DisconnectedError(TreeError):
    pass


class ZeroMassError(TreeError):
    pass


class NotPolynomialError(TypeError):
    """Raised by the exact engine on a term it cannot integrate in closed form."""


class InvalidCertificateError(DomainError):
    pass


class CoverError(DomainError):
    pass


class DecompositionError(RuntimeError):
    pass
