"""Model definition files (JSON) and the bundled example models.

Schema
------
::

    {
      "name": "birth-death",                      # optional
      "species": ["X"],                           # names fix the dimension D
      "channels": [
        {"name": "birth",                         # optional
         "stoich": [-1],                          # column of N, x -> x - N_r
         "propensity": {"type": "mass_action",
                        "rate": 5.0,
                        "multiplicity": [0]}},
        {"name": "decay",
         "stoich": [1],
         "propensity": {"type": "builtin",
                        "form": "linear",         # registered custom form
                        "params": {"species": 0, "rate": 0.05}}}
      ],
      "weights": [1.0],                           # optional weight vector
      "split": {"set_one": [0], "set_two": [1]},  # optional partition (0-based)
      "initial_state": [50],                      # optional default x0
      "mesh": {"cells": 3,                        # optional diffusion mesh
               "connections": [
                 {"from": 0, "to": 1, "rates": [2.0]},
                 {"from": 1, "to": 0, "rates": [2.0]}]}
    }

Remember the sign convention: firing maps ``x -> x - stoich``, so birth
channels carry negative entries (see :mod:`splitssa.network`).

Custom propensities in files must refer to a *named builtin form*;
arbitrary code is never loaded from data files.  New forms can be
registered with :func:`register_custom_form`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Any, Callable

import numpy as np

from .network import Custom, MassAction, Propensity, ReactionNetwork, SplitPartition, WeightVector
from .spatial import Mesh

__all__ = [
    "ModelDocument",
    "load_model",
    "load_model_file",
    "save_model_file",
    "bundled_model",
    "bundled_model_names",
    "register_custom_form",
]

_CUSTOM_FORMS: dict[str, Callable[..., Callable]] = {}


def register_custom_form(name: str, factory: Callable[..., Callable]) -> None:
    """Register a named builtin propensity form for use in model files.

    ``factory(**params)`` must return an evaluator ``state -> rate``.
    """
    if name in _CUSTOM_FORMS:
        raise ValueError(f"custom form {name!r} already registered")
    _CUSTOM_FORMS[name] = factory


def _linear_form(species: int, rate: float) -> Callable:
    return lambda x: rate * x[species]


def _polynomial_form(species: int, coefficients: list[float]) -> Callable:
    coeffs = list(reversed([float(c) for c in coefficients]))
    return lambda x: float(np.polyval(coeffs, x[species]))


register_custom_form("linear", _linear_form)
register_custom_form("polynomial", _polynomial_form)


@dataclass(frozen=True)
class ModelDocument:
    """A parsed model file: the network plus its optional companions."""

    network: ReactionNetwork
    weights: WeightVector
    split: SplitPartition | None
    initial_state: np.ndarray | None
    mesh: Mesh | None
    name: str | None

    @property
    def species_count(self) -> int:
        return self.network.species_count


def _parse_propensity(spec: dict[str, Any], species_count: int) -> Propensity:
    kind = spec.get("type")
    if kind == "mass_action":
        mult = spec["multiplicity"]
        if len(mult) != species_count:
            raise ValueError("mass_action multiplicity length mismatch")
        return MassAction(rate_constant=float(spec["rate"]), reactant_multiplicity=tuple(mult))
    if kind == "builtin":
        form = spec.get("form")
        if form not in _CUSTOM_FORMS:
            raise ValueError(
                f"unknown builtin propensity form {form!r}; registered: {sorted(_CUSTOM_FORMS)}"
            )
        return Custom(_CUSTOM_FORMS[form](**spec.get("params", {})))
    raise ValueError(f"propensity type must be 'mass_action' or 'builtin', got {kind!r}")


def load_model(doc: dict[str, Any]) -> ModelDocument:
    """Build a :class:`ModelDocument` from a parsed JSON dictionary."""
    species = list(doc["species"])
    D = len(species)
    channels = doc["channels"]
    if not channels:
        raise ValueError("model needs at least one channel")
    stoich = np.zeros((D, len(channels)), dtype=np.int64)
    props: list[Propensity] = []
    names: list[str] = []
    for r, ch in enumerate(channels):
        col = ch["stoich"]
        if len(col) != D:
            raise ValueError(f"channel {r} stoich has length {len(col)}, expected {D}")
        stoich[:, r] = col
        props.append(_parse_propensity(ch["propensity"], D))
        names.append(str(ch.get("name", f"channel{r}")))
    network = ReactionNetwork(
        stoich=stoich,
        propensities=tuple(props),
        species_names=tuple(species),
        channel_names=tuple(names),
    )
    weights = (
        WeightVector(np.asarray(doc["weights"], dtype=float))
        if "weights" in doc
        else WeightVector.ones(D)
    )
    split = None
    if "split" in doc:
        split = SplitPartition(
            set_one=tuple(doc["split"]["set_one"]), set_two=tuple(doc["split"]["set_two"])
        )
        split.validate(network.channel_count)
    x0 = np.asarray(doc["initial_state"], dtype=np.int64) if "initial_state" in doc else None
    mesh = None
    if "mesh" in doc:
        m = doc["mesh"]
        K = int(m["cells"])
        rates = np.zeros((K, K, D))
        for conn in m.get("connections", []):
            k, j = int(conn["from"]), int(conn["to"])
            r = np.asarray(conn["rates"], dtype=float)
            if r.shape != (D,):
                raise ValueError("connection rates must list one rate per species")
            rates[k, j, :] = r
        mesh = Mesh(cell_count=K, rates=rates)
    return ModelDocument(
        network=network,
        weights=weights,
        split=split,
        initial_state=x0,
        mesh=mesh,
        name=doc.get("name"),
    )


def load_model_file(path) -> ModelDocument:
    """Load and validate a model definition file."""
    with open(path) as fh:
        return load_model(json.load(fh))


def save_model_file(path, doc: dict[str, Any]) -> None:
    """Write a model dictionary as JSON after a validation round-trip."""
    load_model(doc)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def bundled_model_names() -> list[str]:
    """Names of the model files shipped with the package."""
    pkg = resources.files("splitssa") / "models"
    return sorted(p.name.removesuffix(".json") for p in pkg.iterdir() if p.name.endswith(".json"))


def bundled_model(name: str) -> ModelDocument:
    """Load one of the shipped models (``bundled_model_names()`` lists them)."""
    pkg = resources.files("splitssa") / "models" / f"{name}.json"
    if not pkg.is_file():
        raise FileNotFoundError(f"no bundled model {name!r}; have {bundled_model_names()}")
    return load_model(json.loads(pkg.read_text()))
