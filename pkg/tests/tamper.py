"""Single-field mutations of JSON certificates."""

from __future__ import annotations

import copy
import random


def leaf_paths(node, prefix=()):
    if isinstance(node, dict):
        for k, v in node.items():
            yield from leaf_paths(v, prefix + (k,))
    elif isinstance(node, list) and node:
        for i, v in enumerate(node):
            yield from leaf_paths(v, prefix + (i,))
    else:
        yield prefix


def _mutated(value, rng: random.Random):
    if isinstance(value, bool):
        return not value
    if isinstance(value, int):
        return value + rng.choice([-1, 1, 2])
    if isinstance(value, str):
        if value and set(value) <= {"0", "1"}:
            i = rng.randrange(len(value))
            return value[:i] + ("1" if value[i] == "0" else "0") + value[i + 1:]
        return value + "0" if value else "1"
    if value is None:
        return 0
    return [0]  # empty list


def mutate(cert: dict, rng: random.Random) -> tuple[dict, tuple]:
    """A deep copy of ``cert`` with one randomly chosen leaf changed."""
    out = copy.deepcopy(cert)
    path = rng.choice(list(leaf_paths(out)))
    node = out
    for key in path[:-1]:
        node = node[key]
    node[path[-1]] = _mutated(node[path[-1]], rng)
    return out, path
