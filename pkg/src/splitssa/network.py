"""Reaction networks: states, stoichiometry, propensities and norms.

Sign convention
---------------
The stoichiometric matrix ``N`` (``species_count`` rows by ``channel_count``
columns) is stored so that firing channel ``r`` updates the state as

    x  ->  x - N[:, r]

A *birth* channel therefore carries a **negative** entry and a pure
degradation channel a **positive** one.  This is the convention used
throughout the package (simulators, model files, spatial flattening);
mixing it up silently flips every model, so double-check new stoichiometry
against :func:`apply_channel`.

All states are vectors of non-negative integer copy numbers.  Propensity
evaluation is conservative by construction: whenever ``x - N[:, r]`` would
leave the non-negative lattice the library clamps the propensity of channel
``r`` to zero, regardless of what the user-supplied form evaluates to.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

__all__ = [
    "State",
    "as_state",
    "MassAction",
    "Custom",
    "Propensity",
    "ReactionNetwork",
    "SplitPartition",
    "WeightVector",
    "evaluate_propensity",
    "apply_channel",
    "weighted_norm",
    "InfeasibleFiringError",
]

#: A state is a plain integer numpy vector; no wrapper class.
State = np.ndarray


class InfeasibleFiringError(RuntimeError):
    """Raised when a channel fires from a state where it is not feasible.

    This signals a simulator bug (or a hand-built event list that replays
    into negative copy numbers), never a property of a valid model.
    """


def as_state(counts: Sequence[int] | np.ndarray, species_count: int | None = None) -> State:
    """Validate and convert ``counts`` to an integer state vector.

    Entries must be non-negative integers; ``species_count``, when given,
    pins the expected dimension.
    """
    x = np.asarray(counts)
    if x.ndim != 1:
        raise ValueError(f"state must be a 1-d vector, got shape {x.shape}")
    if not np.issubdtype(x.dtype, np.integer):
        rounded = np.rint(x)
        if not np.array_equal(rounded, x):
            raise ValueError("state entries must be integers")
        x = rounded
    x = x.astype(np.int64)
    if np.any(x < 0):
        raise ValueError(f"state entries must be non-negative, got {x}")
    if species_count is not None and x.shape[0] != species_count:
        raise ValueError(f"state has {x.shape[0]} species, expected {species_count}")
    return x


@dataclass(frozen=True)
class MassAction:
    """Mass-action propensity ``c * prod_i x_i (x_i - 1) ... (x_i - m_i + 1)``.

    ``reactant_multiplicity[i]`` is the number of molecules of species ``i``
    consumed combinatorially; the falling factorial (not a plain power)
    matches the ``x (x - 1)`` style counting of reacting pairs/triples.
    A channel with all multiplicities zero has the constant propensity ``c``.
    """

    rate_constant: float
    reactant_multiplicity: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.rate_constant < 0:
            raise ValueError("rate_constant must be non-negative")
        object.__setattr__(self, "reactant_multiplicity", tuple(int(m) for m in self.reactant_multiplicity))
        if any(m < 0 for m in self.reactant_multiplicity):
            raise ValueError("multiplicities must be non-negative")

    def __call__(self, x: State) -> float:
        w = self.rate_constant
        for i, m in enumerate(self.reactant_multiplicity):
            xi = x[i]
            for j in range(m):
                w *= xi - j
            if w == 0.0:
                return 0.0
        return float(max(w, 0.0))


@dataclass(frozen=True)
class Custom:
    """Opaque user-supplied propensity ``evaluator: state -> rate >= 0``.

    The evaluator must be total on the non-negative lattice.  Conservativeness
    is still enforced externally by the clamp in :func:`evaluate_propensity`.
    """

    evaluator: Callable[[State], float]

    def __call__(self, x: State) -> float:
        w = float(self.evaluator(x))
        if w < 0.0 or not np.isfinite(w):
            raise ValueError(f"custom propensity returned {w}; must be finite and >= 0")
        return w


Propensity = Union[MassAction, Custom]


@dataclass(frozen=True)
class ReactionNetwork:
    """A reaction network: stoichiometric matrix plus per-channel propensities.

    Parameters
    ----------
    stoich
        Integer matrix with one column per channel, in the ``x -> x - N[:, r]``
        convention (see module docstring).
    propensities
        One :class:`MassAction` or :class:`Custom` per channel.
    species_names, channel_names
        Optional labels, purely cosmetic.

    Instances are immutable and safe to share across workers.
    """

    stoich: np.ndarray
    propensities: tuple[Propensity, ...]
    species_names: tuple[str, ...] | None = None
    channel_names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        stoich = np.asarray(self.stoich)
        if stoich.ndim != 2:
            raise ValueError("stoich must be a 2-d matrix (species x channels)")
        if not np.issubdtype(stoich.dtype, np.integer):
            if not np.array_equal(np.rint(stoich), stoich):
                raise ValueError("stoich entries must be integers")
        stoich = stoich.astype(np.int64)
        stoich.setflags(write=False)
        object.__setattr__(self, "stoich", stoich)
        object.__setattr__(self, "propensities", tuple(self.propensities))
        if len(self.propensities) != stoich.shape[1]:
            raise ValueError(
                f"{len(self.propensities)} propensities for {stoich.shape[1]} stoichiometric columns"
            )
        for p in self.propensities:
            if not isinstance(p, (MassAction, Custom)):
                raise TypeError(f"unsupported propensity {p!r}")
            if isinstance(p, MassAction) and len(p.reactant_multiplicity) != stoich.shape[0]:
                raise ValueError("mass-action multiplicity length must equal species count")
        if self.species_names is not None:
            object.__setattr__(self, "species_names", tuple(self.species_names))
            if len(self.species_names) != stoich.shape[0]:
                raise ValueError("species_names length mismatch")
        if self.channel_names is not None:
            object.__setattr__(self, "channel_names", tuple(self.channel_names))
            if len(self.channel_names) != stoich.shape[1]:
                raise ValueError("channel_names length mismatch")

    @property
    def species_count(self) -> int:
        return int(self.stoich.shape[0])

    @property
    def channel_count(self) -> int:
        return int(self.stoich.shape[1])

    def column(self, r: int) -> np.ndarray:
        """Stoichiometric column ``N[:, r]``."""
        return self.stoich[:, r]

    def feasible(self, x: State, r: int) -> bool:
        """Whether firing channel ``r`` keeps the state on the lattice."""
        return bool(np.all(x >= self.stoich[:, r]))

    def propensity_vector(self, x: State) -> np.ndarray:
        """All channel propensities at ``x``, conservativeness clamp included."""
        return np.array([evaluate_propensity(self, r, x) for r in range(self.channel_count)])


def evaluate_propensity(network: ReactionNetwork, r: int, x: State) -> float:
    """Propensity of channel ``r`` at state ``x``.

    Returns 0 whenever ``x - N[:, r]`` would leave the non-negative lattice,
    even if the underlying propensity form is positive there (the
    conservativeness clamp).
    """
    if not 0 <= r < network.channel_count:
        raise IndexError(f"channel index {r} out of range [0, {network.channel_count})")
    if not network.feasible(x, r):
        return 0.0
    return network.propensities[r](x)


def apply_channel(x: State, network: ReactionNetwork, r: int) -> State:
    """State after firing channel ``r``: ``x - N[:, r]``.

    Raises :class:`InfeasibleFiringError` if the result has a negative entry;
    a correct simulator only fires feasible channels.
    """
    if not 0 <= r < network.channel_count:
        raise IndexError(f"channel index {r} out of range [0, {network.channel_count})")
    out = x - network.stoich[:, r]
    if np.any(out < 0):
        raise InfeasibleFiringError(
            f"channel {r} fired from {x} producing negative counts {out}"
        )
    return out


@dataclass(frozen=True)
class SplitPartition:
    """Disjoint two-way partition of the channel indices ``0 .. R-1``.

    ``set_one`` holds the channels modulated by the ``(1 + sigma)`` factor,
    ``set_two`` those modulated by ``(1 - sigma)``.
    """

    set_one: tuple[int, ...]
    set_two: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "set_one", tuple(int(r) for r in self.set_one))
        object.__setattr__(self, "set_two", tuple(int(r) for r in self.set_two))
        overlap = set(self.set_one) & set(self.set_two)
        if overlap:
            raise ValueError(f"partition sets overlap: {sorted(overlap)}")

    def validate(self, channel_count: int) -> None:
        covered = set(self.set_one) | set(self.set_two)
        if covered != set(range(channel_count)):
            raise ValueError(
                f"partition {sorted(covered)} does not cover channels 0..{channel_count - 1} exactly"
            )

    def group_of(self, channel_count: int) -> np.ndarray:
        """Per-channel group labels: 0 for ``set_one``, 1 for ``set_two``."""
        self.validate(channel_count)
        g = np.zeros(channel_count, dtype=np.int8)
        g[list(self.set_two)] = 1
        return g


@dataclass(frozen=True)
class WeightVector:
    """Species weights ``l`` for the weighted norm ``l^T x``.

    Normalized so that ``min_i l_i == 1``; this guarantees the weighted norm
    dominates the 1-norm on the non-negative lattice.
    """

    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a non-empty 1-d vector")
        if np.any(w < 1.0):
            raise ValueError("all weights must be >= 1")
        if abs(w.min() - 1.0) > 1e-12:
            raise ValueError(f"weights must be normalized with min == 1, got min {w.min()}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def ones(cls, species_count: int) -> "WeightVector":
        return cls(np.ones(species_count))

    def __len__(self) -> int:
        return int(self.weights.size)


def weighted_norm(x: State | np.ndarray, l: WeightVector) -> float:
    """The weighted norm ``l^T x`` for ``x`` on the non-negative lattice."""
    x = np.asarray(x)
    if x.shape[0] != len(l):
        raise ValueError(f"dimension mismatch: state {x.shape[0]}, weights {len(l)}")
    return float(l.weights @ x)
