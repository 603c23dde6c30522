"""Exception types shared across the package."""


class MrtError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(MrtError, ValueError):
    """Inputs disagree on ambient dimension."""


class EmptyInput(MrtError, ValueError):
    """An operation received no atoms / no points where at least one is required."""


class InvalidWeight(MrtError, ValueError):
    """A weight is zero, negative, or non-finite."""


class DegenerateRegion(MrtError, ValueError):
    """A region with zero diameter was passed where a normalization needs diam > 0."""


class ZeroMassRegion(MrtError, ValueError):
    """The region carries no mass but the operation needs mu(E) > 0."""


class TreeStructureError(MrtError, ValueError):
    """A cube family violates the tree contract (top membership / upward closure)."""


class NetValidationError(MrtError, ValueError):
    """A net sequence violates separation or proximity requirements."""


class OrderingError(MrtError, ValueError):
    """Projection orders along two nearby lines cannot be reconciled."""


class AlphaRecheckError(MrtError, ValueError):
    """A supplied flatness coefficient fails its neighborhood recheck."""


class ForwardProximityError(MrtError, ValueError):
    """A required same-generation neighbor is missing during curve construction.

    Signals a violation of the forward-proximity property of the net sequence.
    """


class ZeroMassTriple(MrtError, ValueError):
    """A tree branch used for drawing has a zero-mass triple (center of mass undefined)."""


class CertificateError(MrtError, ValueError):
    """A length-certificate check failed (ledger, windows, cores, or coverage)."""


class InputFormatError(MrtError, ValueError):
    """A measure / net file could not be parsed."""
