from typing import Tuple

import numpy as np

# Order-2 rules in barycentric coordinates; weights are fractions of the
# simplex measure and sum to one.
_TRIANGLE_POINTS = np.array(
    [
        [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0],
        [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
        [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
    ]
)
_TRIANGLE_WEIGHTS = np.full(3, 1.0 / 3.0)

_GAUSS_T = np.array([0.5 - 0.5 / np.sqrt(3.0), 0.5 + 0.5 / np.sqrt(3.0)])
_SEGMENT_POINTS = np.stack([1.0 - _GAUSS_T, _GAUSS_T], axis=1)
_SEGMENT_WEIGHTS = np.full(2, 0.5)

_POINT_POINTS = np.ones((1, 1))
_POINT_WEIGHTS = np.ones(1)


def cell_rule(dim: int) -> Tuple[np.ndarray, np.ndarray]:
    if dim == 1:
        return _SEGMENT_POINTS, _SEGMENT_WEIGHTS
    if dim == 2:
        return _TRIANGLE_POINTS, _TRIANGLE_WEIGHTS
    raise NotImplementedError(f"No cell quadrature for dimension {dim}")


def facet_rule(dim: int) -> Tuple[np.ndarray, np.ndarray]:
    if dim == 1:
        return _POINT_POINTS, _POINT_WEIGHTS
    if dim == 2:
        return _SEGMENT_POINTS, _SEGMENT_WEIGHTS
    raise NotImplementedError(f"No facet quadrature for dimension {dim}")
