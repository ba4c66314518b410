"""Seeded instance generators shared by the test modules."""

import itertools

import numpy as np

from isopair.bcl import BCLData, random_bcl_data, random_unitary

SWAP = BCLData(np.array([[0, 1], [1, 0]]), np.diag([1.0, 0.0]))
DIAG = BCLData(np.eye(2), np.diag([1.0, 0.0]))

# generators of the three bidisc fixtures: H^2 itself, z1 H^2, and the ideal <z1, z2>
BIDISC_FIXTURES = {
    "whole": [{(0, 0): 1}],
    "z1": [{(1, 0): 1}],
    "z1,z2": [{(1, 0): 1}, {(0, 1): 1}],
}


def all_shapes(max_dim):
    return [(n, r) for n in range(1, max_dim + 1) for r in range(n + 1)]


def bcl_instances(count, max_dim, seed, commuting_every=0, shapes=None):
    """``count`` random (U, P) cycling through every (dim, rank) with dim <= max_dim."""
    rng = np.random.default_rng(seed)
    shapes = shapes or all_shapes(max_dim)
    out = []
    for k, (n, r) in zip(range(count), itertools.cycle(shapes)):
        commuting = bool(commuting_every) and k % commuting_every == 0
        out.append(random_bcl_data(n, r, rng, commuting=commuting))
    return out


def pure_instances(count, max_dim, seed):
    """Instances with 0 < rank P < dim, where both factors are pure almost surely."""
    return bcl_instances(count, max_dim, seed,
                         shapes=[(n, r) for n, r in all_shapes(max_dim) if 0 < r < n])


def conjugated(data, rng):
    return data.conjugate(random_unitary(data.dim, rng))
