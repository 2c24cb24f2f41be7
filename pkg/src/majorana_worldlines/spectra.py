"""Particle-hole symmetric spectral densities and thermal dressing."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

KINDS = ("uniform", "ohmic", "subohmic", "superohmic")
OHMIC_EXPONENT = {"ohmic": 1.0, "subohmic": 0.5, "superohmic": 2.0}

# beyond this multiple of Lambda_UV the Gaussian factor is below machine epsilon
_GAUSS_CUT = math.sqrt(math.log(1.0 / np.finfo(float).eps)) + 0.5


@dataclass(frozen=True)
class Spectrum:
    """Spectral density ``A(omega)``.

    ``uniform``: ``q^2/|omega|`` above ``lambda_ir``, cut at ``lambda_max``
    (default ``10 * lambda_uv``).
    Ohmic family: ``(q^2/|omega|) (|omega|/lambda_uv)^(Q+1) exp(-omega^2/lambda_uv^2)``
    with ``Q = 1, 1/2, 2``.
    """

    kind: str
    q: float = 1.0
    lambda_ir: float = 0.02
    lambda_uv: float = 10.0
    lambda_max: float | None = None

    def __post_init__(self):
        kind = self.kind.lower().replace("-", "").replace("_", "")
        if kind not in KINDS:
            raise ValueError(f"unknown spectrum kind {self.kind!r}; expected one of {KINDS}")
        object.__setattr__(self, "kind", kind)
        if self.lambda_ir < 0 or self.lambda_uv <= 0:
            raise ValueError("cutoffs must be positive")

    @property
    def exponent(self):
        return OHMIC_EXPONENT.get(self.kind)

    def __call__(self, omega):
        w = np.abs(np.asarray(omega, dtype=float))
        q2 = self.q * self.q
        if self.kind == "uniform":
            with np.errstate(divide="ignore"):
                val = np.where(w > self.lambda_ir, q2 / np.where(w > 0, w, 1.0), 0.0)
            return np.where(w <= self.cutoff, val, 0.0)
        lam = self.lambda_uv
        x = w / lam
        return q2 / lam * x ** self.exponent * np.exp(-x * x)

    @property
    def cutoff(self) -> float:
        """Upper end of every frequency integral."""
        if self.kind == "uniform":
            return self.lambda_max if self.lambda_max is not None else 10.0 * self.lambda_uv
        return _GAUSS_CUT * self.lambda_uv

    @property
    def lower(self) -> float:
        """Lower end of the support on the positive axis."""
        return self.lambda_ir if self.kind == "uniform" else 0.0

    def breakpoints(self):
        return (self.lambda_ir,) if self.kind == "uniform" else ()

    def with_coupling(self, q: float) -> "Spectrum":
        return Spectrum(self.kind, q, self.lambda_ir, self.lambda_uv, self.lambda_max)

    def check_integrable(self, dimension: int) -> float:
        """``int |omega|^(d-1) A(omega) d omega`` over the truncated domain (finite by construction)."""
        from .quadrature import frequency_integral

        res = frequency_integral(lambda w: w ** (dimension - 1) * self(w),
                                 (self.lower, self.cutoff), tol=1e-8)
        total = 2.0 * res.value
        if not math.isfinite(total):
            raise ValueError(f"spectrum {self} is not integrable in d={dimension}")
        return total


def thermal_factor(T: float, omega):
    """``[1 + 2 n(omega)] sgn(omega) = coth(omega / 2T)``, even in ``omega``.

    Equals 1 at ``T = 0``.  At ``omega = 0`` the factor diverges like ``2T/|omega|``;
    it returns ``inf`` there (frequency grids never sample that point).
    """
    if T < 0:
        raise ValueError("temperature must be non-negative")
    w = np.abs(np.asarray(omega, dtype=float))
    if T == 0:
        return np.ones_like(w)
    x = w / (2.0 * T)
    with np.errstate(divide="ignore"):
        return np.where(x > 0, 1.0 / np.tanh(np.where(x > 0, x, 1.0)), np.inf)


def unruh_temperature(a: float) -> float:
    return abs(a) / (2.0 * math.pi)
