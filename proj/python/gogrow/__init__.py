"""Go-or-grow front models: wave speeds, profiles, spreading runs and scenarios."""

from ._gogrow import (
    ConfigError,
    MonotonicityLost,
    NumericalError,
    PreconditionError,
    __version__,
    characteristic_roots,
    decay_roots,
    kinetic_decay_roots,
    kinetic_minimal_speed,
    minimal_speed,
    parse_config,
    profile_values,
    run_scenario,
    run_spreading,
    spectral_gap,
    subsonic_wave_exists,
    to_config_text,
)

__all__ = [
    "ConfigError",
    "MonotonicityLost",
    "NumericalError",
    "PreconditionError",
    "__version__",
    "characteristic_roots",
    "decay_roots",
    "kinetic_decay_roots",
    "kinetic_minimal_speed",
    "minimal_speed",
    "parse_config",
    "profile_values",
    "run_scenario",
    "run_spreading",
    "spectral_gap",
    "subsonic_wave_exists",
    "to_config_text",
]
