"""Base definitions for asymptotic eigenvalue laws.

A law is a continuous density on [λ₋, λ₊] of the form

    f(x) = √((λ₊ - x)(x - λ₋)) / (2πβ x h(x))

plus an optional point mass. Integrals against f use the substitution
x = λ₋ + (λ₊ - λ₋) sin²θ, which removes the square-root edge singularities.
"""

import math
from abc import ABC, abstractmethod
from enum import Enum
from typing import Any, Callable, Dict, Optional

import numpy as np
import numpy.typing as npt
from scipy import integrate

# Absolute accuracy requested from the adaptive quadrature.
QUAD_ABS_TOL = 1e-9
QUAD_LIMIT = 200

# θ-grid used to tabulate the cdf.
CDF_GRID_POINTS = 4097


class LawKind(str, Enum):
    """Supported eigenvalue laws."""

    MARCHENKO_PASTUR = "marchenko_pastur"
    WACHTER_MANOVA = "wachter_manova"


class SpectralLaw(ABC):
    """Limiting eigenvalue distribution of a K x K subframe Gram.

    Subclasses set the edges and the atom in __init__ and implement tail_factor().

    Attributes:
        kind: Which law this is
        beta: K/M
        gamma: M/N (0 for Marchenko-Pastur)
        lambda_minus: Lower support edge
        lambda_plus: Upper support edge
        atom_mass: Point mass outside the continuous part
        atom_location: Where the point mass sits
    """

    kind: LawKind

    def __init__(
        self,
        beta: float,
        gamma: float,
        lambda_minus: float,
        lambda_plus: float,
        atom_mass: float = 0.0,
        atom_location: float = 0.0,
    ) -> None:
        self.beta = beta
        self.gamma = gamma
        self.lambda_minus = lambda_minus
        self.lambda_plus = lambda_plus
        self.atom_mass = atom_mass
        self.atom_location = atom_location
        self._cdf_table: Optional[tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]] = None

    @abstractmethod
    def tail_factor(self, x: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """h(x) in the density denominator 2πβ x h(x)."""
        ...

    def kernel(self, x: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """Density divided by √((λ₊ - x)(x - λ₋))."""
        return 1.0 / (2.0 * math.pi * self.beta * x * self.tail_factor(x))

    @property
    def width(self) -> float:
        return self.lambda_plus - self.lambda_minus

    def density(self, x: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """Continuous density, zero outside (λ₋, λ₊)."""
        xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
        out = np.zeros_like(xs)
        inside = (xs > self.lambda_minus) & (xs < self.lambda_plus)
        xi = xs[inside]
        out[inside] = np.sqrt((self.lambda_plus - xi) * (xi - self.lambda_minus)) * self.kernel(xi)
        return out

    def _theta_weight(self, theta: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """f(x(θ)) dx/dθ on [0, π/2]."""
        s2 = np.sin(theta) ** 2
        x = self.lambda_minus + self.width * s2
        # s2 / x tends to 1 / width at x = 0 (only reachable when λ₋ = 0).
        s2_over_x = np.where(x > 0.0, s2 / np.where(x > 0.0, x, 1.0), 1.0 / self.width)
        return np.asarray(
            self.width**2 * s2_over_x * (1.0 - s2) / (math.pi * self.beta * self.tail_factor(x))
        )

    def _x_of_theta(self, theta: float) -> float:
        return self.lambda_minus + self.width * math.sin(theta) ** 2

    def integrate_continuous(self, g: Callable[[float], float]) -> float:
        """∫ g(x) f(x) dx over the continuous part."""
        if self.width <= 0.0:
            return (1.0 - self.atom_mass) * g(self.lambda_minus)

        def integrand(theta: float) -> float:
            weight = float(self._theta_weight(np.array([theta]))[0])
            if weight == 0.0:
                return 0.0
            return g(self._x_of_theta(theta)) * weight

        value, _ = integrate.quad(
            integrand, 0.0, math.pi / 2.0, epsabs=QUAD_ABS_TOL, limit=QUAD_LIMIT
        )
        return float(value)

    def expect(self, g: Callable[[float], float]) -> float:
        """E[g(λ)] under the law, atom included."""
        total = self.integrate_continuous(g)
        if self.atom_mass > 0.0:
            total += self.atom_mass * g(self.atom_location)
        return total

    def continuous_mass(self) -> float:
        return self.integrate_continuous(lambda _x: 1.0)

    def total_mass(self) -> float:
        return self.continuous_mass() + self.atom_mass

    def mean(self) -> float:
        return self.expect(lambda x: x)

    def _tabulate_cdf(self) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
        if self._cdf_table is None:
            theta = np.linspace(0.0, math.pi / 2.0, CDF_GRID_POINTS)
            cumulative = integrate.cumulative_trapezoid(
                self._theta_weight(theta), theta, initial=0.0
            )
            self._cdf_table = (theta, cumulative)
        return self._cdf_table

    def cdf(self, x: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """P(λ <= x), vectorized; the atom contributes a jump at its location."""
        xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
        continuous_total = 1.0 - self.atom_mass
        if self.width <= 0.0:
            out = np.where(xs >= self.lambda_minus, continuous_total, 0.0)
        else:
            theta_grid, cumulative = self._tabulate_cdf()
            frac = np.clip((xs - self.lambda_minus) / self.width, 0.0, 1.0)
            theta = np.arcsin(np.sqrt(frac))
            out = np.interp(theta, theta_grid, cumulative)
        if self.atom_mass > 0.0:
            out = out + np.where(xs >= self.atom_location, self.atom_mass, 0.0)
        return np.asarray(np.clip(out, 0.0, 1.0))

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        return {
            "kind": self.kind.value,
            "beta": self.beta,
            "gamma": self.gamma,
            "lambda_minus": self.lambda_minus,
            "lambda_plus": self.lambda_plus,
            "atom_mass": self.atom_mass,
            "atom_location": self.atom_location,
        }

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(beta={self.beta!r}, gamma={self.gamma!r}, "
            f"edges=({self.lambda_minus:.6g}, {self.lambda_plus:.6g}), atom={self.atom_mass:.6g})"
        )
