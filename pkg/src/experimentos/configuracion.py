"""Configuración de ejecuciones y barridos.

Un fichero JSON por experimento; se valida contra el esquema y se carga en
dataclasses congeladas. ``from_dict(to_dict(c)) == c``.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Type, TypeVar, Union

from errores import ConfigError
from experimentos.esquema import EXPERIMENT_SCHEMA, RUN_SCHEMA, validate
from motor.configuracion import CostModel, EngineConfig

__all__ = [
    "ProblemConfig",
    "DataConfig",
    "TopologyConfig",
    "SeedsConfig",
    "RunConfig",
    "SweepConfig",
    "ExperimentConfig",
    "load_config",
    "default_output_dir",
    "OUTPUT_DIR_ENV",
]

OUTPUT_DIR_ENV = "COLA_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "resultados"

T = TypeVar("T")


def _build(cls: Type[T], data: Optional[Dict[str, Any]]) -> T:
    data = dict(data or {})
    known = {f.name for f in fields(cls)}
    return cls(**{k: v for k, v in data.items() if k in known})


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


@dataclass(frozen=True)
class ProblemConfig:
    kind: str = "lasso"
    lam: Optional[float] = None
    lam_ratio: Optional[float] = None
    radius: Optional[float] = None
    orientation: str = "primal"


@dataclass(frozen=True)
class DataConfig:
    kind: str = "synthetic"
    path: Optional[str] = None
    d: int = 100
    n: int = 400
    density: float = 0.2
    noise: float = 0.01
    seed: int = 0
    support: float = 0.1
    n_features: Optional[int] = None


@dataclass(frozen=True)
class TopologyConfig:
    kind: str = "ring"
    K: int = 8
    rows: Optional[int] = None
    wrap: bool = False
    adjacency_path: Optional[str] = None
    time_varying: bool = False


@dataclass(frozen=True)
class SeedsConfig:
    partition: int = 0
    solver: int = 0
    dropout: int = 0


@dataclass(frozen=True)
class RunConfig:
    problem: ProblemConfig = field(default_factory=ProblemConfig)
    data: DataConfig = field(default_factory=DataConfig)
    topology: TopologyConfig = field(default_factory=TopologyConfig)
    gamma: float = 1.0
    sigma_prime_mode: str = "safe"
    sigma_prime: Optional[float] = None
    kappa: int = 1
    sampling: str = "uniform"
    rounds: int = 100
    dropout_p: float = 1.0
    failure_model: str = "freeze"
    gossip_B: int = 1
    seeds: SeedsConfig = field(default_factory=SeedsConfig)
    cert_epsilon: Optional[float] = None
    cert_every: int = 10
    cert_neighbor_average: str = "mixing"
    cert_local_gap: str = "neighborhood"
    workers: int = 1
    baseline: str = "cola"
    alpha_candidates: Tuple[float, ...] = (1e-3, 3e-3, 1e-2, 3e-2, 1e-1)
    diging_budget: int = 300
    reference_budget: int = 2_000_000
    reference_gap: float = 1e-10
    cost_model: CostModel = field(default_factory=CostModel)
    output: Optional[str] = None
    certs_output: Optional[str] = None
    log_every: int = 50

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        validate(data, RUN_SCHEMA)
        return cls._from_valid(data)

    @classmethod
    def _from_valid(cls, data: Dict[str, Any]) -> "RunConfig":
        nested = {
            "problem": _build(ProblemConfig, data.get("problem")),
            "data": _build(DataConfig, data.get("data")),
            "topology": _build(TopologyConfig, data.get("topology")),
            "seeds": _build(SeedsConfig, data.get("seeds")),
            "cost_model": _build(CostModel, data.get("cost_model")),
        }
        flat = {k: v for k, v in data.items() if k in {f.name for f in fields(cls)} and k not in nested}
        if "alpha_candidates" in flat:
            flat["alpha_candidates"] = tuple(float(a) for a in flat["alpha_candidates"])
        return cls(**nested, **flat)

    def to_dict(self) -> Dict[str, Any]:
        return _jsonable(asdict(self))

    def engine_config(self) -> EngineConfig:
        return EngineConfig(
            gamma=self.gamma,
            sigma_prime_mode=self.sigma_prime_mode,
            sigma_prime=self.sigma_prime,
            kappa=self.kappa,
            sampling=self.sampling,
            rounds=self.rounds,
            dropout_p=self.dropout_p,
            failure_model=self.failure_model,
            gossip_B=self.gossip_B,
            solver_seed=self.seeds.solver,
            dropout_seed=self.seeds.dropout,
            cert_epsilon=self.cert_epsilon,
            cert_every=self.cert_every,
            cert_neighbor_average=self.cert_neighbor_average,
            cert_local_gap=self.cert_local_gap,
            workers=self.workers,
            cost_model=self.cost_model,
            log_every=self.log_every,
        )


@dataclass(frozen=True)
class SweepConfig:
    kappa: Tuple[int, ...] = ()
    topology: Tuple[str, ...] = ()
    dropout: Tuple[float, ...] = ()

    @property
    def empty(self) -> bool:
        return not (self.kappa or self.topology or self.dropout)


@dataclass(frozen=True)
class ExperimentConfig:
    run: RunConfig = field(default_factory=RunConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    output_dir: Optional[str] = None

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        validate(data, EXPERIMENT_SCHEMA)
        sweep = data.get("sweep") or {}
        run = {k: v for k, v in data.items() if k not in ("sweep", "output_dir")}
        return cls(
            run=RunConfig._from_valid(run),
            sweep=SweepConfig(
                kappa=tuple(int(k) for k in sweep.get("kappa", ())),
                topology=tuple(sweep.get("topology", ())),
                dropout=tuple(float(p) for p in sweep.get("dropout", ())),
            ),
            output_dir=data.get("output_dir"),
        )

    def to_dict(self) -> Dict[str, Any]:
        out = self.run.to_dict()
        out["sweep"] = _jsonable(asdict(self.sweep))
        out["output_dir"] = self.output_dir
        return out

    @property
    def resolved_output_dir(self) -> Path:
        return Path(self.output_dir) if self.output_dir else default_output_dir()


def default_output_dir() -> Path:
    """Directorio de salida por defecto; sólo la variable de entorno lo cambia."""
    return Path(os.environ.get(OUTPUT_DIR_ENV) or DEFAULT_OUTPUT_DIR)


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: JSON inválido ({exc})") from exc
    return ExperimentConfig.from_dict(data)
