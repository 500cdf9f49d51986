"""High-harmonic generation in a gas jet.

Thin wrapper over the C++ library: dipole tables, beam geometry, free-space
transport and the scenario runner used by the ``hhgsim`` command line tool.
"""

from ._core import (
    AtomModel,
    BlowUpError,
    ConfigError,
    DipoleTable,
    DomainError,
    Error,
    FarFieldProfile,
    FitError,
    FocusGeometry,
    GridSpec,
    NotFoundError,
    NumericalAccuracyError,
    RadialField,
    RangeError,
    RunManifest,
    Scenario,
    build_table,
    cutoff_coefficient,
    default_out_dir,
    far_field,
    find_preset,
    fresnel_propagate,
    fwhm,
    presets,
    run_scenario,
    sha256_hex,
    spherical_wave_coefficient,
    uniform_radii,
)

__all__ = [name for name in dir() if not name.startswith("_")]
