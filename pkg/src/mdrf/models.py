"""Immutable model descriptions and allocation results."""
from dataclasses import dataclass
from typing import Optional, Tuple


class InfeasibleError(ValueError):
    """The closed-form allocation does not exist and no fallback was allowed."""

    def __init__(self, message, diagnosis=None):
        super().__init__(message)
        self.diagnosis = diagnosis


class CapacityError(ValueError):
    """A brute-force routine was asked for more sensors than it can enumerate."""


@dataclass(frozen=True)
class GaussianModel:
    """Sensors observing ``Y_l = sqrt(gamma_l) X + Z_l`` with ``X, Z_l ~ N(0, 1)``.

    SNRs are stored sorted non-increasing, so sensor 0 is the cleanest one.
    """

    gammas: Tuple[float, ...]

    def __post_init__(self):
        gammas = tuple(sorted((float(g) for g in self.gammas), reverse=True))
        if not gammas:
            raise ValueError("GaussianModel needs at least one sensor")
        if any(not g >= 0 for g in gammas) or any(g == float("inf") for g in gammas):
            raise ValueError(f"SNRs must be finite and nonnegative, got {gammas}")
        object.__setattr__(self, "gammas", gammas)

    @property
    def L(self):
        return len(self.gammas)


@dataclass(frozen=True)
class BinaryModel:
    """Sensors observing ``Y_l = X xor Z_l`` with ``Z_l ~ Bern(p_l)`` and ``X ~ Bern(alpha)``.

    Crossover probabilities are stored sorted non-decreasing.
    """

    ps: Tuple[float, ...]
    alpha: float = 0.5

    def __post_init__(self):
        ps = tuple(sorted(float(p) for p in self.ps))
        if not ps:
            raise ValueError("BinaryModel needs at least one sensor")
        if any(not 0.0 <= p <= 0.5 for p in ps):
            raise ValueError(f"crossover probabilities must lie in [0, 1/2], got {ps}")
        alpha = float(self.alpha)
        if not 0.0 < alpha <= 0.5:
            raise ValueError(f"source bias must lie in (0, 1/2], got {alpha}")
        object.__setattr__(self, "ps", ps)
        object.__setattr__(self, "alpha", alpha)

    @property
    def L(self):
        return len(self.ps)


@dataclass(frozen=True)
class WaterLevelSolution:
    nu_star: float
    rates: Tuple[float, ...]
    total_rate: float
    active: Tuple[bool, ...]
    exact: bool
    method: str = "closed_form"
    # None when exact; otherwise why the closed form failed
    diagnosis: Optional[str] = None


@dataclass(frozen=True)
class RateAllocation:
    rates: Tuple[float, ...]
    budget: float
    distortion: float
    method: str = "closed_form"
    nu_star: Optional[float] = None
    diagnosis: Optional[str] = None

    @property
    def active(self):
        return tuple(r > 0 for r in self.rates)
