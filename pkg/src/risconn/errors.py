class ConfigurationError(ValueError):
    """Invalid scenario, radio or sweep configuration."""


class GeometryError(ValueError):
    """Geometry for which a channel or SNR formula is undefined."""


class DimensionError(ValueError):
    """Vector or matrix sizes that do not line up."""
