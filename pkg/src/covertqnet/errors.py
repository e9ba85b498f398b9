"""Exception and warning types shared across the simulator."""


class CovertQNetError(Exception):
    """Base class for domain errors raised by this package."""


class NonConvergence(CovertQNetError):
    """Adaptive quadrature could not reach the requested tolerance."""


class PerturbativeBreakdown(CovertQNetError):
    """Requested amplification exceeds the first-order validity guard."""


class StateNotPositive(CovertQNetError):
    """Density matrix is more negative than the allowed positivity slack."""


class NotDistillable(CovertQNetError):
    """Singlet fraction at or below 1/2: recurrence distillation cannot start."""


class UnsupportedOnBackend(CovertQNetError):
    """Gate or basis not representable on the selected simulation backend."""


class DimensionMismatch(CovertQNetError):
    """Operands act on different qubit counts."""


class CapExceeded(CovertQNetError):
    """Requested system size exceeds a configured backend cap."""


class ResourceDepleted(CovertQNetError):
    """A Bell resource was already consumed by a previous protocol run."""


class EndpointMismatch(CovertQNetError):
    """Resources do not share the node required by the protocol."""


class TopologyError(CovertQNetError):
    """Resource endpoints do not connect the requested parties."""


class FlowViolation(CovertQNetError):
    """Measurement adaptation referenced a site that is not yet measured."""


class AlreadyMeasured(CovertQNetError):
    """Protocol site was measured twice."""


class NoPath(CovertQNetError):
    """No route between the requested nodes."""


class OptimizerStall(UserWarning):
    """Multi-start optimizer could not corroborate its best value."""
