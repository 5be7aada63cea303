"""BGK relaxation in coefficient space and the benchmark collision
frequency models."""

import math
from dataclasses import dataclass

import numpy as np

from ._tables import table

KIND_COUETTE = "couette-power-law"
KIND_VHS = "vhs"


@dataclass(frozen=True)
class CollisionModel:
    """Collision frequency nu = prefactor * rho * theta^(1 - omega).

    kind 'couette-power-law': prefactor = sqrt(pi/2) / Kn.
    kind 'vhs':  prefactor = sqrt(2/pi) (5 - 2 w)(7 - 2 w) / (15 Kn).
    """

    kind: str
    kn: float
    omega: float

    def __post_init__(self):
        if self.kn <= 0.0:
            raise ValueError(f"Kn must be positive, got {self.kn}")
        if not 0.0 < self.omega <= 1.0:
            raise ValueError(f"viscosity index out of range: {self.omega}")
        if self.kind not in (KIND_COUETTE, KIND_VHS):
            raise ValueError(f"unknown collision model kind {self.kind!r}")

    @property
    def prefactor(self):
        if self.kind == KIND_COUETTE:
            return math.sqrt(math.pi / 2.0) / self.kn
        w = self.omega
        return math.sqrt(2.0 / math.pi) * (5.0 - 2.0 * w) * (7.0 - 2.0 * w) \
            / (15.0 * self.kn)


def collision_frequency(model, rho, theta):
    if rho <= 0.0 or theta <= 0.0:
        raise ValueError("collision frequency needs rho > 0 and theta > 0")
    return model.prefactor * rho * theta ** (1.0 - model.omega)


def bgk_rate(s, nu):
    """Relaxation rate of a native state: -nu f_alpha for |alpha| >= 2 and
    zero on the conserved slots."""
    if not s.is_native():
        raise ValueError("bgk_rate requires a native state")
    tab = table(s.M)
    out = np.where(tab.order >= 2, -nu * s.coeffs, 0.0)
    return out
