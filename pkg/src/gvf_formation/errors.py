"""Exception types raised across the package."""


class SingularPointError(ValueError):
    """The level-set gradient vanishes, so no tangent or normal exists."""


class IntegrationError(RuntimeError):
    """A non-finite command or state reached the integrator."""


class UndefinedPhaseError(ValueError):
    """Phase requested at the circle center."""


class MissingPhaseError(KeyError):
    """A graph vertex has no phase entry."""


class UnknownNodeError(KeyError):
    """Message addressed to or from an unregistered vehicle."""


class ScenarioError(ValueError):
    """Scenario failed validation."""
