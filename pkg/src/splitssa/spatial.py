"""Compartment models: per-cell reaction copies plus diffusion hop channels.

A spatial model subdivides a volume into ``K`` well-stirred cells.  The
flattened state vector enumerates species column-major over cells: species
``i`` in cell ``j`` sits at flat index ``i + D * j``.  Channels come out in
two blocks:

* ``R * K`` reaction channels, grouped by cell (cell 0's channels first),
  each reading and writing only its own cell;
* one hop channel per (connected ordered cell pair, species), ordered by
  (from-cell, to-cell, species), moving a single molecule between cells at
  the first-order rate ``q * count``.

Both simulators run the flattened network unchanged, and the
reaction-vs-diffusion grouping is the natural split partition.

This indexing is part of the package's stable interface; CSV column order
and split indices rely on it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import MassAction, ReactionNetwork, SplitPartition

__all__ = ["Mesh", "SpatialModel", "flatten", "reaction_diffusion_partition", "line_mesh"]


@dataclass(frozen=True)
class Mesh:
    """Cells and per-species hop rates between connected ordered pairs.

    ``rates[k, j, i]`` is the rate constant for one molecule of species ``i``
    to hop from cell ``k`` to cell ``j``; zero means not connected.
    """

    cell_count: int
    rates: np.ndarray

    def __post_init__(self) -> None:
        K = self.cell_count
        rates = np.asarray(self.rates, dtype=np.float64)
        if K <= 0:
            raise ValueError("cell_count must be positive")
        if rates.ndim != 3 or rates.shape[0] != K or rates.shape[1] != K:
            raise ValueError(f"rates must have shape (K, K, D), got {rates.shape}")
        if np.any(rates < 0):
            raise ValueError("hop rates must be non-negative")
        if np.any(np.diagonal(rates, axis1=0, axis2=1) != 0):
            raise ValueError("self-hops (k -> k) must have zero rate")
        rates.setflags(write=False)
        object.__setattr__(self, "rates", rates)

    @property
    def species_count(self) -> int:
        return int(self.rates.shape[2])

    def connections(self) -> list[tuple[int, int]]:
        """Ordered cell pairs with at least one non-zero hop rate, sorted."""
        K = self.cell_count
        return [
            (k, j)
            for k in range(K)
            for j in range(K)
            if k != j and np.any(self.rates[k, j] > 0)
        ]


def line_mesh(cell_count: int, diffusion: float | np.ndarray, dx: float = 1.0) -> "Mesh":
    """A 1-d chain of cells with symmetric nearest-neighbor hop rate ``d / dx**2``.

    ``diffusion`` is a scalar or one constant per species; this is the
    standard second-order discretization of a diffusion coefficient on a
    uniform grid.
    """
    d = np.atleast_1d(np.asarray(diffusion, dtype=np.float64))
    q = d / dx**2
    K = cell_count
    rates = np.zeros((K, K, d.size))
    for k in range(K - 1):
        rates[k, k + 1, :] = q
        rates[k + 1, k, :] = q
    return Mesh(cell_count=K, rates=rates)


@dataclass(frozen=True)
class SpatialModel:
    """A per-cell network replicated over a mesh, with hop channels appended."""

    base: ReactionNetwork
    mesh: Mesh
    flattened: ReactionNetwork
    reaction_channels: tuple[int, ...]
    diffusion_channels: tuple[int, ...]

    @property
    def cell_count(self) -> int:
        return self.mesh.cell_count

    def flat_index(self, species: int, cell: int) -> int:
        return species + self.base.species_count * cell


def flatten(base: ReactionNetwork, mesh: Mesh) -> SpatialModel:
    """Build the flattened reaction-diffusion network over ``mesh``.

    Reaction channel ``r`` of cell ``j`` keeps its mass-action/custom form
    but acts on cell ``j``'s sub-state; each hop channel moves one molecule
    from its source cell to its target cell (two non-zero stoichiometric
    entries).  Custom propensities are wrapped to read their own cell only.
    """
    if mesh.species_count != base.species_count:
        raise ValueError(
            f"mesh carries {mesh.species_count} species rates, network has {base.species_count}"
        )
    D = base.species_count
    R = base.channel_count
    K = mesh.cell_count
    pairs = mesh.connections()

    n_species = D * K
    n_hops = sum(int(np.count_nonzero(mesh.rates[k, j] > 0)) for k, j in pairs)
    n_channels = R * K + n_hops
    stoich = np.zeros((n_species, n_channels), dtype=np.int64)
    props = []
    ch_names = []
    base_ch = base.channel_names or tuple(f"channel{r}" for r in range(R))
    base_sp = base.species_names or tuple(f"species{i}" for i in range(D))

    c = 0
    for j in range(K):
        lo = D * j
        for r in range(R):
            stoich[lo : lo + D, c] = base.stoich[:, r]
            p = base.propensities[r]
            if isinstance(p, MassAction):
                mult = np.zeros(n_species, dtype=np.int64)
                mult[lo : lo + D] = p.reactant_multiplicity
                props.append(MassAction(p.rate_constant, tuple(mult)))
            else:
                from .network import Custom

                props.append(
                    Custom(lambda x, _p=p, _lo=lo, _hi=lo + D: _p(x[_lo:_hi]))
                )
            ch_names.append(f"{base_ch[r]}@cell{j}")
            c += 1

    reaction_channels = tuple(range(c))
    for k, j in pairs:
        for i in range(D):
            q = float(mesh.rates[k, j, i])
            if q <= 0:
                continue
            src = i + D * k
            dst = i + D * j
            stoich[src, c] = 1
            stoich[dst, c] = -1
            mult = np.zeros(n_species, dtype=np.int64)
            mult[src] = 1
            props.append(MassAction(q, tuple(mult)))
            ch_names.append(f"hop:{base_sp[i]}:cell{k}->cell{j}")
            c += 1
    diffusion_channels = tuple(range(len(reaction_channels), c))

    sp_names = tuple(f"{base_sp[i]}@cell{j}" for j in range(K) for i in range(D))
    flattened = ReactionNetwork(
        stoich=stoich,
        propensities=tuple(props),
        species_names=sp_names,
        channel_names=tuple(ch_names),
    )
    return SpatialModel(
        base=base,
        mesh=mesh,
        flattened=flattened,
        reaction_channels=reaction_channels,
        diffusion_channels=diffusion_channels,
    )


def reaction_diffusion_partition(model: SpatialModel) -> SplitPartition:
    """Group one: every reaction channel; group two: every hop channel."""
    return SplitPartition(set_one=model.reaction_channels, set_two=model.diffusion_channels)
