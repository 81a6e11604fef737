"""Parámetros del motor CoLa."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from certificados.locales import LocalGap, NeighborAverage
from errores import ConfigError
from solver_local.subproblema import Sampling, SolverBudget

__all__ = ["SigmaPrimeMode", "FailureModel", "CostModel", "EngineConfig"]


class SigmaPrimeMode(str, Enum):
    SAFE = "safe"  # σ′ = γK
    DATA = "data"  # σ′_min calculado de los datos, con tope γK


class FailureModel(str, Enum):
    FREEZE = "freeze"  # el x_[k] del nodo ausente se congela
    RESET = "reset"    # el x_[k] del nodo ausente vuelve a 0


@dataclass(frozen=True)
class CostModel:
    """Reloj simulado: cada paso de gossip cuesta ``gossip_ms`` y la ronda
    espera al nodo con más actualizaciones (``update_us`` cada una)."""

    update_us: float = 1.0
    gossip_ms: float = 1.0

    def __post_init__(self) -> None:
        if self.update_us < 0 or self.gossip_ms < 0:
            raise ConfigError("los costes del modelo deben ser >= 0")

    def round_ms(self, B: int, max_updates: int) -> float:
        return B * self.gossip_ms + max_updates * self.update_us / 1000.0


@dataclass(frozen=True)
class EngineConfig:
    gamma: float = 1.0
    sigma_prime_mode: SigmaPrimeMode = SigmaPrimeMode.SAFE
    sigma_prime: Optional[float] = None  # valor explícito, sustituye al modo
    kappa: int = 1
    sampling: Sampling = Sampling.UNIFORM
    rounds: int = 100
    dropout_p: float = 1.0
    failure_model: FailureModel = FailureModel.FREEZE
    gossip_B: int = 1
    solver_seed: int = 0
    dropout_seed: int = 0
    cert_epsilon: Optional[float] = None
    cert_every: int = 10
    cert_neighbor_average: NeighborAverage = NeighborAverage.MIXING
    cert_local_gap: LocalGap = LocalGap.NEIGHBORHOOD
    workers: int = 1
    cost_model: CostModel = field(default_factory=CostModel)
    log_every: int = 50
    check_consensus: bool = True

    def __post_init__(self) -> None:
        if not 0.0 < self.gamma <= 1.0:
            raise ConfigError(f"γ debe estar en (0, 1], llegó {self.gamma}")
        if self.rounds < 0:
            raise ConfigError(f"rounds debe ser >= 0, llegó {self.rounds}")
        if not 0.0 < self.dropout_p <= 1.0:
            raise ConfigError(f"p debe estar en (0, 1], llegó {self.dropout_p}")
        if self.gossip_B < 1:
            raise ConfigError(f"B debe ser >= 1, llegó {self.gossip_B}")
        if self.workers < 1:
            raise ConfigError(f"workers debe ser >= 1, llegó {self.workers}")
        if self.cert_every < 1:
            raise ConfigError(f"cert_every debe ser >= 1, llegó {self.cert_every}")
        if self.cert_epsilon is not None and self.cert_epsilon <= 0:
            raise ConfigError(f"cert_epsilon debe ser > 0, llegó {self.cert_epsilon}")
        # normaliza cadenas de la config a sus enums
        object.__setattr__(self, "sigma_prime_mode", SigmaPrimeMode(self.sigma_prime_mode))
        object.__setattr__(self, "sampling", Sampling(self.sampling))
        object.__setattr__(self, "failure_model", FailureModel(self.failure_model))
        object.__setattr__(self, "cert_neighbor_average", NeighborAverage(self.cert_neighbor_average))
        object.__setattr__(self, "cert_local_gap", LocalGap(self.cert_local_gap))
        SolverBudget(self.kappa, self.sampling)

    @property
    def budget(self) -> SolverBudget:
        return SolverBudget(self.kappa, self.sampling)
