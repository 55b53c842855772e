"""Exception types shared across the package.

The CLI maps each of these to a distinct process exit code; library users
can catch them individually.
"""


class ConfigError(Exception):
    """Invalid configuration: unknown key, unparsable value, bad model parameters."""


class InputError(Exception):
    """Invalid input data, e.g. an unreadable or too-short trace file."""


class StabilityError(Exception):
    """A stationary construction was requested for an unstable or critical system."""


class PremiseError(Exception):
    """A checker was invoked on inputs that do not satisfy its premise."""
