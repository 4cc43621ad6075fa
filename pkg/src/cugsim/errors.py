"""Exception hierarchy shared by every module."""


class CugSimError(Exception):
    """Base class for all errors raised by cugsim."""


class InvalidDimensionError(CugSimError, ValueError):
    pass


class InvalidArgumentError(CugSimError, ValueError):
    pass


class ShapeError(CugSimError, ValueError):
    """Operand shapes are incompatible."""


class InvalidConditionalError(CugSimError, ValueError):
    """A conditional or projector refers to a level the wire does not have."""


class SpecError(CugSimError, ValueError):
    """A controlled-gate specification violates its structural invariants."""


class SpanError(SpecError):
    """A matrix dimension does not match the level product of any consecutive wire run."""


class NotUnitaryError(CugSimError, ValueError):
    pass


class LevelMismatchError(CugSimError, ValueError):
    pass


class InvalidStateError(CugSimError, ValueError):
    pass


class WireIndexError(CugSimError, IndexError):
    pass


class ResourceGuardError(CugSimError):
    """The requested register is larger than the configured memory budget."""


class CircuitFileError(CugSimError):
    """A circuit file failed to parse or validate.

    ``element`` is the 0-based index of the offending element, or ``None``
    when the problem is at file level.
    """

    def __init__(self, reason, element=None, kind=None):
        self.reason = reason
        self.element = element
        self.kind = kind
        if element is None:
            msg = reason
        else:
            label = f"element {element}" + (f" ({kind})" if kind else "")
            msg = f"{label}: {reason}"
        super().__init__(msg)
