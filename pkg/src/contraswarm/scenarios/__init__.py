"""Worked scenarios: ant foraging, geese formation flight, spatial prisoner's dilemma."""


class ConfigError(ValueError):
    """A scenario or run configuration that cannot be simulated."""
