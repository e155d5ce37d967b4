"""Lossless JSON form of instances.

The document shape is fixed::

    {"agents": n, "elements": m, "utilities": [[...]],
     "constraint": {"type": ..., ...type-specific fields}}

Constraint types and their fields: ``partition_matroid`` (groups),
``uniform_matroid`` (rank), ``graphic_matroid`` (vertices, edges),
``matching`` (vertices, edges), ``packing`` (A, b), ``private_goods``
(goods). Unknown constraint types are rejected.
"""

import json

import numpy as np

from .errors import ValidationError
from .instance import (
    GraphicMatroid,
    Instance,
    Matching,
    Packing,
    PartitionMatroid,
    PrivateGoods,
    UniformMatroid,
)
from .reports import dump_json


def constraint_to_dict(constraint):
    if isinstance(constraint, PartitionMatroid):
        return {
            "type": "partition_matroid",
            "groups": [list(g) for g in constraint.groups],
        }
    if isinstance(constraint, UniformMatroid):
        return {"type": "uniform_matroid", "rank": constraint.rank}
    if isinstance(constraint, GraphicMatroid):
        return {
            "type": "graphic_matroid",
            "vertices": constraint.vertices,
            "edges": [list(e) for e in constraint.edges],
        }
    if isinstance(constraint, Matching):
        return {
            "type": "matching",
            "vertices": constraint.vertices,
            "edges": [list(e) for e in constraint.edges],
        }
    if isinstance(constraint, Packing):
        return {
            "type": "packing",
            "A": constraint.A.tolist(),
            "b": constraint.b.tolist(),
        }
    if isinstance(constraint, PrivateGoods):
        return {"type": "private_goods", "goods": constraint.goods}
    raise ValidationError(f"unknown constraint {type(constraint)!r}")


def constraint_from_dict(payload, n_agents):
    kind = payload.get("type")
    if kind == "partition_matroid":
        return PartitionMatroid(tuple(tuple(g) for g in payload["groups"]))
    if kind == "uniform_matroid":
        return UniformMatroid(int(payload["rank"]))
    if kind == "graphic_matroid":
        return GraphicMatroid(
            int(payload["vertices"]), tuple(tuple(e) for e in payload["edges"])
        )
    if kind == "matching":
        return Matching(
            int(payload["vertices"]), tuple(tuple(e) for e in payload["edges"])
        )
    if kind == "packing":
        return Packing(np.array(payload["A"]), np.array(payload["b"]))
    if kind == "private_goods":
        return PrivateGoods(agents=n_agents, goods=int(payload["goods"]))
    raise ValidationError(f"unknown constraint type {kind!r}")


def instance_to_dict(inst):
    return {
        "agents": inst.n_agents,
        "elements": inst.n_elements,
        "utilities": inst.utilities.tolist(),
        "constraint": constraint_to_dict(inst.constraint),
    }


def instance_to_json(inst):
    return dump_json(instance_to_dict(inst))


def instance_from_dict(payload):
    try:
        agents = int(payload["agents"])
        elements = int(payload["elements"])
        utilities = np.array(payload["utilities"], dtype=float)
        constraint_payload = payload["constraint"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed instance document: {exc}") from exc
    if utilities.shape != (agents, elements):
        raise ValidationError(
            f"utilities shape {utilities.shape} does not match "
            f"agents={agents}, elements={elements}"
        )
    constraint = constraint_from_dict(constraint_payload, agents)
    return Instance(utilities, constraint)


def instance_from_json(text):
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc}") from exc
    return instance_from_dict(payload)


def load_instance(path):
    with open(path) as handle:
        return instance_from_json(handle.read())
