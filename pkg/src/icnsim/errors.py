"""Exception types shared across the simulator."""


class SimError(Exception):
    """Base class for all simulator errors."""


class DanglingEndpoint(SimError):
    pass


class DuplicateEdge(SimError):
    pass


class NegativeWeight(SimError):
    pass


class Unreachable(SimError):
    pass


class InvalidParams(SimError):
    pass


class UnitMismatch(SimError):
    pass


class DimensionMismatch(SimError):
    pass


class EmptyDataset(SimError):
    pass


class NonFiniteLoss(SimError):
    pass


class InvalidSpec(SimError):
    pass


class EmptyHrn(SimError):
    pass


class CollisionDetected(SimError):
    pass


class LocatorLimitExceeded(SimError):
    pass


class NotFound(SimError):
    pass


class IndirectLoop(SimError):
    pass


class NamespaceExhausted(SimError):
    pass


class Unresolvable(SimError):
    pass


class NoRoute(SimError):
    pass


class EmptyLog(SimError):
    pass


class ZeroDenominator(SimError):
    pass


class DegenerateDistribution(SimError):
    pass


class ConfigError(SimError):
    """Bad configuration file or CLI usage."""
