"""Exception hierarchy shared by all modules."""


class PowerSenseError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(PowerSenseError, ValueError):
    """Invalid configuration or argument."""


class BracketNotFoundError(PowerSenseError):
    """No sign change found for a root equation (non-sigmoidal parameterisation)."""


class InfeasibleError(PowerSenseError):
    """A closed-form equilibrium does not exist for the given parameters.

    ``condition`` names the violated inequality so the CLI can report it.
    """

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition or message


class InfeasibleKError(InfeasibleError):
    pass


class InfeasibleProfileError(InfeasibleError):
    pass


class SaturationError(InfeasibleError):
    """Closed-form Nash powers exceed a power cap."""


class NoInteriorSolutionError(PowerSenseError):
    pass


class GameSizeError(PowerSenseError, ValueError):
    pass
