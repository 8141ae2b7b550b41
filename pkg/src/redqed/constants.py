from __future__ import annotations

from dataclasses import dataclass, fields

from .errors import ConfigurationError


@dataclass(frozen=True)
class PhysicalConstants:
    """Physical scales. Natural units (hbar = c = ell = 1) by default.

    ``ell`` makes fields dimensionless, ``lam`` is the coupling length of the
    vector potential, ``kappa`` the inverse Compton length mc/hbar and ``q_el``
    the unit charge. ``mu0`` only enters the Coulomb correction.
    """

    hbar: float = 1.0
    c: float = 1.0
    ell: float = 1.0
    lam: float = 1.0
    kappa: float = 1.0
    q_el: float = 1.0
    mu0: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not (value > 0):
                raise ConfigurationError(f"constant {f.name!r} must be strictly positive, got {value!r}")


NATURAL = PhysicalConstants()
