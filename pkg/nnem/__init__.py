"""
NN element method for second-order elliptic problems on triangular meshes.
All construction from a run configuration goes through NNEMFactory; public API:
NNEMFactory, create_components(), load_config().
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Mapping, NamedTuple

import numpy as np

from .config import load_config
from .errors import ConfigError, NNEMError

logger = logging.getLogger(__name__)

__version__ = "1.0.0"


class NNEMComponents(NamedTuple):
    """Immutable bundle of everything a run needs."""

    mesh: Any
    family: Any
    rule: Any
    edge_rule: tuple[np.ndarray, np.ndarray]
    problem: Any
    space: Any
    train_config: Any


class NNEMFactory:
    """
    Builds meshes, envelope families, quadrature rules, problems and spaces from a
    validated flat config. Single responsibility: construction.
    """

    def __init__(self, config: Mapping[str, Any]) -> None:
        self._config = dict(config)

    @property
    def config(self) -> dict[str, Any]:
        return dict(self._config)

    def create_mesh(self, n: int | None = None) -> Any:
        from .mesh import generate_l_shape, generate_unit_square, load_mesh

        kind = self._config["mesh.kind"]
        if kind == "file":
            path = Path(self._config["mesh.path"])
            try:
                text = path.read_text(encoding="utf-8")
            except OSError as e:
                raise ConfigError(f"cannot read mesh file {path}: {e}", key="mesh.path") from e
            return load_mesh(text)
        n = int(self._config["mesh.n"] if n is None else n)
        if kind == "l_shape":
            return generate_l_shape(n)
        return generate_unit_square(n)

    def create_family(self) -> Any:
        from .envelope import create_family

        return create_family(
            self._config["envelope.kind"],
            order=int(self._config["envelope.order"]),
            bubbles=bool(self._config["envelope.bubbles"]),
        )

    def create_rule(self) -> Any:
        from .quadrature import triangle_rule

        try:
            return triangle_rule(int(self._config["quad.triangle_points"]))
        except NNEMError as e:
            raise ConfigError(str(e), key="quad.triangle_points") from e

    def create_edge_rule(self) -> tuple[np.ndarray, np.ndarray]:
        from .quadrature import gauss_legendre_1d

        return gauss_legendre_1d(int(self._config["quad.edge_points"]))

    def create_problem(self) -> Any:
        from .problems import get_problem

        return get_problem(self._config["problem.name"])

    def create_net_config(self) -> Any:
        from .localnet import NetConfig

        return NetConfig(
            hidden_layers=int(self._config["net.hidden_layers"]),
            width=int(self._config["net.width"]),
            activation=self._config["net.activation"],
        )

    def create_space(self, mesh: Any, family: Any, problem: Any, networks: bool = True) -> Any:
        from .nnspace import build_space

        return build_space(
            mesh,
            family,
            self.create_net_config(),
            bc="homogeneous" if problem.is_homogeneous else "nonhomogeneous",
            seed=int(self._config["train.seed"]),
            augment_constant=bool(self._config["space.augment_constant"]),
            networks=networks,
        )

    def create_train_config(self) -> Any:
        from .solver import TrainConfig

        return TrainConfig(
            max_steps=int(self._config["train.steps"]),
            learning_rate=float(self._config["train.lr"]),
            beta1=float(self._config["train.beta1"]),
            beta2=float(self._config["train.beta2"]),
            eps=float(self._config["train.eps"]),
            seed=int(self._config["train.seed"]),
            tau=float(self._config["train.tau"]),
            log_every=int(self._config["train.log_every"]),
            lift=self._config["boundary.lift"],
        )

    def create_components(self) -> NNEMComponents:
        """Build and return the full component bundle for one run."""
        mesh = self.create_mesh()
        family = self.create_family()
        problem = self.create_problem()
        return NNEMComponents(
            mesh=mesh,
            family=family,
            rule=self.create_rule(),
            edge_rule=self.create_edge_rule(),
            problem=problem,
            space=self.create_space(mesh, family, problem),
            train_config=self.create_train_config(),
        )


def create_components(
    path: str | Path | None = None, overrides: Mapping[str, Any] | None = None
) -> NNEMComponents:
    """Public API: load and validate a config, then build every component."""
    return NNEMFactory(load_config(path, overrides)).create_components()


__all__ = [
    "NNEMComponents",
    "NNEMFactory",
    "__version__",
    "create_components",
    "load_config",
]
