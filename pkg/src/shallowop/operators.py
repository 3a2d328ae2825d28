"""Ground-truth operators used as approximation targets.

Four families: kernel integral operators (trapezoid quadrature), the 1-d
Poisson solution operator (three-point finite differences), pointwise
superposition maps, and matrix-input maps.  All are wrapped as Operator
objects carrying the shape metadata the fitting pipeline needs; the pipeline
treats them as opaque maps even when they happen to be linear.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solveh_banded

from .errors import ConfigError, ShapeError
from .inputs import FunctionSample, InputPoint, MatrixPoint, SequencePoint
from .targets import GridMeta, TargetElement


@dataclass(frozen=True, eq=False)
class Kernel:
    """Bivariate kernel K(x, s), vectorized over node arrays.

    `domain` optionally pins the grid the kernel was calibrated for;
    applying it on a different grid is then an error.
    """

    fn: object
    name: str
    params: dict = field(default_factory=dict)
    domain: GridMeta | None = None

    def __call__(self, x, s):
        return self.fn(np.asarray(x, dtype=float), np.asarray(s, dtype=float))


def make_kernel(name: str, **params) -> Kernel:
    """Kernels by name: gaussian(width), constant(value)."""
    if name == "gaussian":
        width = float(params.pop("width", 1.0))
        if width <= 0:
            raise ConfigError(f"gaussian kernel width must be positive, got {width}")
        if params:
            raise ConfigError(f"unexpected gaussian kernel parameters {sorted(params)}")
        return Kernel(
            lambda x, s: np.exp(-((x - s) / width) ** 2), "gaussian", {"width": width}
        )
    if name == "constant":
        value = float(params.pop("value", 1.0))
        if params:
            raise ConfigError(f"unexpected constant kernel parameters {sorted(params)}")
        return Kernel(lambda x, s: np.full(np.broadcast(x, s).shape, value),
                      "constant", {"value": value})
    raise ConfigError(f"unknown kernel {name!r}")


def integral_operator_apply(kernel: Kernel, f: FunctionSample,
                            out_grid: GridMeta | None = None) -> TargetElement:
    """(Ff)(x_i) = sum_k w_k K(x_i, s_k) f(s_k) with trapezoid weights."""
    if not isinstance(f, FunctionSample):
        raise ShapeError("integral operator needs a function sample")
    if out_grid is None:
        out_grid = f.grid
    if kernel.domain is not None and kernel.domain != out_grid:
        raise ShapeError(
            f"kernel is calibrated for grid {kernel.domain}, output grid is {out_grid}"
        )
    x = out_grid.nodes()[:, None]
    s = f.grid.nodes()[None, :]
    mat = kernel(x, s) * f.grid.trapezoid_weights()
    return TargetElement(mat @ f.values, out_grid)


def poisson_solve_1d(f: FunctionSample) -> TargetElement:
    """Solve -u'' = f with u = 0 at both endpoints, on f's own grid.

    Standard second-order three-point scheme; the symmetric tridiagonal
    system is solved by banded Cholesky.  Exact (to roundoff) whenever the
    true solution is a cubic, since the truncation term carries u''''.
    """
    if not isinstance(f, FunctionSample):
        raise ShapeError("poisson solve needs a function sample")
    n = f.grid.n
    if n < 3:
        raise ValueError(f"poisson solve needs at least 3 nodes, got {n}")
    h = f.grid.spacing
    interior = n - 2
    ab = np.zeros((2, interior))
    ab[0, 1:] = -1.0 / h**2
    ab[1, :] = 2.0 / h**2
    u = np.zeros(n)
    u[1:-1] = solveh_banded(ab, f.values[1:-1])
    return TargetElement(u, f.grid)


_POINTWISE_MAPS = {
    "sin": np.sin,
    "square": np.square,
    "exp-": lambda v: np.exp(-v),
}


def superposition_apply(map_id: str, f: InputPoint) -> TargetElement:
    """Pointwise g(f) on function samples or truncated sequences."""
    try:
        g = _POINTWISE_MAPS[map_id]
    except KeyError:
        raise ConfigError(
            f"unknown pointwise map {map_id!r}, expected one of {sorted(_POINTWISE_MAPS)}"
        ) from None
    if isinstance(f, FunctionSample):
        return TargetElement(g(f.values), f.grid)
    if isinstance(f, SequencePoint):
        return TargetElement(g(f.values))
    raise ShapeError("superposition needs a function sample or sequence point")


def matrix_map_apply(map_id: str, z: MatrixPoint, out_dim: int = 3) -> TargetElement:
    """Benchmark maps on matrix inputs."""
    if not isinstance(z, MatrixPoint):
        raise ShapeError("matrix map needs a matrix point")
    if map_id == "row_sums":
        return TargetElement(z.values.sum(axis=1))
    if map_id == "sin_of_trace_times_basis":
        out = np.zeros(out_dim)
        out[0] = np.sin(np.trace(z.values))
        return TargetElement(out)
    raise ConfigError(f"unknown matrix map {map_id!r}")


@dataclass(frozen=True, eq=False)
class Operator:
    """An opaque map from input points to target elements, with shape metadata."""

    name: str
    fn: object
    input_signature: tuple
    output_dim: int
    output_grid: GridMeta | None = None

    def __post_init__(self):
        if self.output_grid is not None and self.output_dim != self.output_grid.n:
            raise ShapeError("operator output dim does not match its output grid")

    def __call__(self, s: InputPoint) -> TargetElement:
        if s.signature != self.input_signature:
            raise ShapeError(
                f"operator {self.name} expects {self.input_signature}, got {s.signature}"
            )
        out = self.fn(s)
        if out.dim != self.output_dim or out.grid != self.output_grid:
            raise ShapeError(f"operator {self.name} produced a mismatched output shape")
        return out

    def apply_many(self, samples) -> list[TargetElement]:
        return [self(s) for s in samples]


def integral_operator(kernel: Kernel, grid: GridMeta) -> Operator:
    return Operator(
        f"integral_{kernel.name}",
        lambda f: integral_operator_apply(kernel, f),
        ("function", grid),
        grid.n,
        grid,
    )


def poisson_operator(grid: GridMeta) -> Operator:
    return Operator("poisson_1d", poisson_solve_1d, ("function", grid), grid.n, grid)


def superposition_operator(map_id: str, signature: tuple) -> Operator:
    if map_id not in _POINTWISE_MAPS:
        raise ConfigError(f"unknown pointwise map {map_id!r}")
    kind = signature[0]
    if kind == "function":
        grid = signature[1]
        return Operator(
            f"superpose_{map_id}",
            lambda f: superposition_apply(map_id, f),
            signature,
            grid.n,
            grid,
        )
    if kind == "sequence":
        return Operator(
            f"superpose_{map_id}",
            lambda s: superposition_apply(map_id, s),
            signature,
            signature[1],
        )
    raise ShapeError("superposition operators accept function or sequence inputs")


def matrix_map_operator(map_id: str, shape: tuple[int, int], out_dim: int = 3) -> Operator:
    if map_id == "row_sums":
        out_dim = shape[0]
    elif map_id != "sin_of_trace_times_basis":
        raise ConfigError(f"unknown matrix map {map_id!r}")
    return Operator(
        f"matrix_{map_id}",
        lambda z: matrix_map_apply(map_id, z, out_dim),
        ("matrix", tuple(shape)),
        out_dim,
    )


def zero_operator(signature: tuple, output_dim: int,
                  output_grid: GridMeta | None = None) -> Operator:
    """The constant-zero operator; its best approximant is the empty network."""
    return Operator(
        "zero",
        lambda s: TargetElement(np.zeros(output_dim), output_grid),
        signature,
        output_dim,
        output_grid,
    )
