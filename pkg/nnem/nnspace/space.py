"""
The NN element space: basis functions phi_i(x) * net_i(x; theta_i), optionally
paired with the constant partner phi_i(x) * 1.

Basis numbering interleaves the pairs: with augmentation on, basis 2i is the
constant partner of dof i and basis 2i + 1 its network partner, so every dof owns a
2 x 2 block of the stiffness matrix. Without augmentation basis i is the network
partner; with networks off (the FEM restriction) basis i is the constant partner.
"""

from __future__ import annotations

import dataclasses
import hashlib
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Any

import numpy as np
import torch

from ..envelope import DofDescriptor, EnvelopeFamily, envelope_eval, envelope_grad
from ..errors import DimensionMismatchError, InvalidArgumentError
from ..localnet import DTYPE, LocalNet, NetConfig, forward_with_spatial_grad, init_params_batch
from ..mesh import Mesh

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class NNElementSpace:
    mesh: Mesh
    family: EnvelopeFamily
    dofs: tuple[DofDescriptor, ...]
    bc: str
    net_config: NetConfig
    theta: torch.Tensor
    augment_constant: bool = True
    networks: bool = True
    seed: int = 0

    def __post_init__(self) -> None:
        if not (self.augment_constant or self.networks):
            raise InvalidArgumentError("space needs the constant partner or the networks")
        expected = (len(self.dofs), self.net_config.n_params if self.networks else 0)
        if tuple(self.theta.shape) != expected:
            raise DimensionMismatchError(
                f"theta shape {tuple(self.theta.shape)} != {expected}"
            )

    # --- layout ---

    @property
    def per_dof(self) -> int:
        return 2 if (self.augment_constant and self.networks) else 1

    @property
    def dimension(self) -> int:
        return self.per_dof * len(self.dofs)

    @property
    def n_dofs(self) -> int:
        return len(self.dofs)

    def partners(self) -> list[str]:
        """Partner kinds in slot order within one dof block."""
        out = []
        if self.augment_constant:
            out.append("constant")
        if self.networks:
            out.append("network")
        return out

    def basis_owner(self, i: int) -> tuple[int, str]:
        """(dof index, partner kind) of basis function i."""
        if not 0 <= i < self.dimension:
            raise InvalidArgumentError(f"basis index {i} out of range [0, {self.dimension})")
        return i // self.per_dof, self.partners()[i % self.per_dof]

    def basis_indices(self, dof_indices: Any, partner: str | None = None) -> np.ndarray:
        """Basis indices owned by the given dofs (optionally one partner kind only)."""
        dofs = np.asarray(dof_indices, dtype=np.int64).reshape(-1)
        slots = [
            s for s, kind in enumerate(self.partners()) if partner is None or kind == partner
        ]
        return (dofs[:, None] * self.per_dof + np.array(slots)[None, :]).reshape(-1)

    def partner_indices(self, partner: str) -> np.ndarray:
        return self.basis_indices(np.arange(self.n_dofs), partner)

    @cached_property
    def boundary_dof_indices(self) -> np.ndarray:
        return np.array(
            [d.index for d in self.dofs if d.on_dirichlet_boundary], dtype=np.int64
        )

    @cached_property
    def interior_dof_indices(self) -> np.ndarray:
        return np.array(
            [d.index for d in self.dofs if not d.on_dirichlet_boundary], dtype=np.int64
        )

    @cached_property
    def dof_table(self) -> np.ndarray:
        return self.family.dof_table(self.mesh, self.dofs)

    # --- parameters ---

    def net(self, i: int) -> LocalNet:
        if not self.networks:
            raise InvalidArgumentError("space has no networks")
        return LocalNet(self.net_config, self.theta[i])

    def theta_flat(self) -> torch.Tensor:
        return self.theta.reshape(-1)

    def with_theta(self, theta: torch.Tensor) -> "NNElementSpace":
        """New space with parameters replaced wholesale."""
        return dataclasses.replace(self, theta=theta.reshape(self.theta.shape))

    def describe(self) -> dict[str, Any]:
        """Structural signature (no parameter values)."""
        digest = hashlib.sha256()
        digest.update(np.ascontiguousarray(self.mesh.vertices).tobytes())
        digest.update(np.ascontiguousarray(self.mesh.triangles).tobytes())
        return {
            "mesh.sha256": digest.hexdigest(),
            "envelope": self.family.describe(),
            "bc": self.bc,
            "net.hidden_layers": self.net_config.hidden_layers,
            "net.width": self.net_config.width,
            "net.activation": self.net_config.activation,
            "space.augment_constant": self.augment_constant,
            "space.networks": self.networks,
            "space.dofs": self.n_dofs,
        }


def build_space(
    mesh: Mesh,
    family: EnvelopeFamily,
    net_config: NetConfig | None = None,
    bc: str = "homogeneous",
    seed: int = 0,
    augment_constant: bool = True,
    networks: bool = True,
) -> NNElementSpace:
    """Deterministic NN element space for the given seed; one network per dof."""
    net_config = net_config or NetConfig()
    dofs = tuple(family.enumerate_dofs(mesh, bc))
    if networks:
        theta = init_params_batch(net_config, len(dofs), seed)
    else:
        theta = torch.zeros((len(dofs), 0), dtype=DTYPE)
    space = NNElementSpace(
        mesh=mesh,
        family=family,
        dofs=dofs,
        bc=bc,
        net_config=net_config,
        theta=theta,
        augment_constant=augment_constant,
        networks=networks,
        seed=int(seed),
    )
    logger.info(
        "NN element space: %s, %d dofs, N=%d (augment=%s, networks=%s, bc=%s)",
        family,
        space.n_dofs,
        space.dimension,
        augment_constant,
        networks,
        bc,
    )
    return space


def basis_eval_grad(
    space: NNElementSpace, i: int, triangle: int, bary: Any
) -> tuple[np.ndarray, np.ndarray]:
    """Value and gradient of basis function i at barycentric point(s) of triangle."""
    dof_index, partner = space.basis_owner(i)
    dof = space.dofs[dof_index]
    lam = np.atleast_2d(np.asarray(bary, dtype=np.float64))
    env = envelope_eval(space.family, dof, space.mesh, triangle, lam)
    genv = envelope_grad(space.family, dof, space.mesh, triangle, lam)
    if partner == "constant" or dof.patch.position(int(triangle)) < 0:
        return env, genv
    points = lam @ space.mesh.vertices[space.mesh.triangles[int(triangle)]]
    with torch.no_grad():
        nv, ng = forward_with_spatial_grad(space.net(dof_index), points)
    nv = nv.numpy()
    ng = ng.numpy()
    return env * nv, nv[:, None] * genv + env[:, None] * ng
