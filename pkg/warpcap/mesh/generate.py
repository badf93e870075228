"""
Deterministic meshers for the built-in domain shapes.

Disks and annuli are built from concentric rings of equally spaced vertices;
consecutive rings are stitched by walking both rings in angle order. Every
ring has a vertex at angle 0, so indexing depends only on the inputs.
"""
import math
from typing import List, Tuple

import numpy as np

from warpcap.errors import InvalidInput, MeshBudgetExceeded
from warpcap.mesh.mesh import Mesh

MAX_VERTICES = 400_000

OUTER_TAG = 1
INNER_TAG = 2


def _ring_size(rho: float, h: float) -> int:
    return max(6, math.ceil(2 * math.pi * rho / h - 1e-9))


def _ring(rho: float, n: int) -> np.ndarray:
    angles = 2 * np.pi * np.arange(n) / n
    return np.stack([rho * np.cos(angles), rho * np.sin(angles)], axis=1)


def _stitch(inner: np.ndarray, outer: np.ndarray) -> List[Tuple[int, int, int]]:
    """
    Triangulate the band between two rings given as index arrays in angle order.
    """
    n, m = len(inner), len(outer)
    triangles = []
    i = j = 0
    while i < n or j < m:
        # compare angles (i+1)/n and (j+1)/m without rounding; ties advance the inner ring
        if j == m or (i < n and (i + 1) * m <= (j + 1) * n):
            triangles.append((inner[i % n], inner[(i + 1) % n], outer[j % m]))
            i += 1
        else:
            triangles.append((inner[i % n], outer[(j + 1) % m], outer[j % m]))
            j += 1
    return triangles


def _ring_facets(ring: np.ndarray) -> np.ndarray:
    return np.stack([ring, np.roll(ring, -1)], axis=1)


def _check_budget(radii: List[float], h: float, max_vertices: int):
    estimate = sum(_ring_size(rho, h) for rho in radii if rho > 0) + 1
    if estimate > max_vertices:
        raise MeshBudgetExceeded(
            f"h={h} needs about {estimate} vertices, more than the budget of {max_vertices}"
        )


def _ring_mesh(radii: List[float], h: float, shape: tuple, max_vertices: int) -> Mesh:
    _check_budget(radii, h, max_vertices)
    points = []
    rings = []
    cells = []
    offset = 0
    if radii[0] == 0:
        points.append(np.zeros((1, 2)))
        rings.append(np.array([0]))
        offset = 1
        radii = radii[1:]
    for rho in radii:
        n = _ring_size(rho, h)
        points.append(_ring(rho, n))
        rings.append(np.arange(offset, offset + n))
        offset += n

    start = 0
    if len(rings[0]) == 1:
        center, first = rings[0][0], rings[1]
        cells.extend((center, a, b) for a, b in _ring_facets(first))
        start = 1
    for inner, outer in zip(rings[start:], rings[start + 1 :]):
        cells.extend(_stitch(inner, outer))

    facets = [_ring_facets(rings[-1])]
    tags = [np.full(len(rings[-1]), OUTER_TAG)]
    if start == 0:
        facets.append(_ring_facets(rings[0]))
        tags.append(np.full(len(rings[0]), INNER_TAG))

    return Mesh(
        vertices=np.concatenate(points),
        cells=np.array(cells),
        boundary_facets=np.concatenate(facets),
        boundary_tags=np.concatenate(tags),
        shape=shape,
    )


def generate_disk_mesh(radius: float, h: float, max_vertices: int = MAX_VERTICES) -> Mesh:
    """
    Triangulated disk of the given radius centered at the origin.
    """
    if not radius > 0:
        raise InvalidInput(f"disk radius must be positive, got {radius}")
    if not 0 < h < radius:
        raise InvalidInput(f"h must lie in (0, radius), got {h}")
    k = math.ceil(radius / h - 1e-9)
    radii = [radius * i / k for i in range(k + 1)]
    return _ring_mesh(radii, h, ("disk", float(radius)), max_vertices)


def generate_annulus_mesh(
    inner_radius: float, outer_radius: float, h: float, max_vertices: int = MAX_VERTICES
) -> Mesh:
    """
    Triangulated annulus. The outer circle is tagged 1, the inner circle 2.
    """
    if not 0 < inner_radius < outer_radius:
        raise InvalidInput(
            f"annulus radii must satisfy 0 < inner < outer, got {inner_radius}, {outer_radius}"
        )
    width = outer_radius - inner_radius
    if not 0 < h < width:
        raise InvalidInput(f"h must lie in (0, {width}), got {h}")
    k = math.ceil(width / h - 1e-9)
    radii = [inner_radius + width * i / k for i in range(k + 1)]
    return _ring_mesh(
        radii, h, ("annulus", float(inner_radius), float(outer_radius)), max_vertices
    )


def generate_interval_mesh(a: float, b: float, m: int) -> Mesh:
    """
    Uniform mesh of [a, b] with m cells. The end a is tagged 1, the end b 2.
    """
    if not a < b:
        raise InvalidInput(f"interval needs a < b, got a={a}, b={b}")
    if int(m) != m or m < 2:
        raise InvalidInput(f"interval needs at least 2 cells, got {m}")
    m = int(m)
    x = a + (b - a) * np.arange(m + 1) / m
    x[-1] = b
    cells = np.stack([np.arange(m), np.arange(1, m + 1)], axis=1)
    return Mesh(
        vertices=x[:, None],
        cells=cells,
        boundary_facets=np.array([[0], [m]]),
        boundary_tags=np.array([OUTER_TAG, INNER_TAG]),
        shape=("interval", float(a), float(b)),
    )
