"""Physical parameters, the 2D base grid, gap functions and field containers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class ParameterError(ValueError):
    """Raised when physical parameters or gap data violate their bounds."""


@dataclass(frozen=True)
class PhysicalParams:
    """Material constants of the Darcy-Brinkman model.

    ``M = sqrt(mu / (K * mu_eff))`` is the inverse Brinkman length and is
    cached at construction.
    """

    mu: float
    mu_eff: float
    K: float
    k: float
    b: float = 0.0
    M: float = field(init=False)

    def __post_init__(self):
        for name in ("mu", "mu_eff", "K", "k"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ParameterError(f"{name} must be finite and > 0, got {value!r}")
        if not math.isfinite(self.b):
            raise ParameterError(f"b must be finite, got {self.b!r}")
        M = math.sqrt(self.mu / (self.K * self.mu_eff))
        if not (math.isfinite(M) and M > 0.0):
            raise ParameterError(f"derived M = {M!r} is not finite and positive")
        object.__setattr__(self, "M", M)

    @property
    def K_over_mu(self) -> float:
        return self.K / self.mu


def make_params(mu, mu_eff, K, k, b=0.0) -> PhysicalParams:
    return PhysicalParams(float(mu), float(mu_eff), float(K), float(k), float(b))


@dataclass(frozen=True)
class Grid2D:
    """Uniform cell-centered grid on the rectangle (0, lx) x (0, ly).

    Arrays living on this grid have shape ``(nx, ny)``; index ``i`` runs
    along x1 and ``j`` along x2.
    """

    nx: int
    ny: int
    lx: float = 1.0
    ly: float = 1.0

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ParameterError(f"grid needs at least one cell per direction, got {self.nx}x{self.ny}")
        if not (self.lx > 0 and self.ly > 0):
            raise ParameterError("domain extents must be positive")

    @property
    def dx(self) -> float:
        return self.lx / self.nx

    @property
    def dy(self) -> float:
        return self.ly / self.ny

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def size(self) -> int:
        return self.nx * self.ny

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    def centers_1d(self):
        xc = (np.arange(self.nx) + 0.5) * self.dx
        yc = (np.arange(self.ny) + 0.5) * self.dy
        return xc, yc

    def centers(self):
        """Cell-center coordinates as two ``(nx, ny)`` arrays."""
        xc, yc = self.centers_1d()
        return np.meshgrid(xc, yc, indexing="ij")


# -- gap functions -----------------------------------------------------------

@dataclass(frozen=True)
class ConstantGap:
    value: float

    def __call__(self, x, y, grid):
        return np.full(np.broadcast(x, y).shape, float(self.value))


@dataclass(frozen=True)
class ParabolicGap:
    """``h = b0 + a * ((x/lx - 1/2)^2 + (y/ly - 1/2)^2)``"""

    a: float
    b0: float

    def __call__(self, x, y, grid):
        return self.b0 + self.a * ((x / grid.lx - 0.5) ** 2 + (y / grid.ly - 0.5) ** 2)


@dataclass(frozen=True)
class SinusoidalGap:
    """``h = mean + amp * sin(2 pi (kx x/lx + ky y/ly))``"""

    mean: float
    amp: float
    kx: float = 1.0
    ky: float = 0.0

    def __call__(self, x, y, grid):
        phase = 2.0 * np.pi * (self.kx * x / grid.lx + self.ky * y / grid.ly)
        return self.mean + self.amp * np.sin(phase)


GapSpec = ConstantGap | ParabolicGap | SinusoidalGap


@dataclass(frozen=True, eq=False)
class GapField:
    grid: Grid2D
    values: np.ndarray
    spec: GapSpec | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.shape:
            raise ParameterError(f"gap shape {values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise ParameterError("gap contains non-finite values")
        imin = np.unravel_index(np.argmin(values), values.shape)
        if values[imin] <= 0.0:
            xc, yc = self.grid.centers_1d()
            raise ParameterError(
                f"gap minimum {values[imin]:.6g} <= 0 at cell {tuple(int(i) for i in imin)} "
                f"(x={xc[imin[0]]:.6g}, y={yc[imin[1]]:.6g})"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def h_min(self) -> float:
        return float(self.values.min())

    @property
    def h_max(self) -> float:
        return float(self.values.max())

    @property
    def is_constant(self) -> bool:
        return self.h_min == self.h_max


def make_gap_field(spec: GapSpec, grid: Grid2D) -> GapField:
    """Sample ``spec`` at the cell centers of ``grid``."""
    X, Y = grid.centers()
    return GapField(grid, spec(X, Y, grid), spec)


# -- field containers --------------------------------------------------------

def _frozen(values, shape, what):
    arr = np.array(values, dtype=float)
    if arr.shape != shape:
        raise ParameterError(f"{what}: shape {arr.shape} does not match {shape}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{what}: non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ScalarField2D:
    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values, self.grid.shape, "ScalarField2D"))

    def mean(self) -> float:
        return float(self.values.mean())


@dataclass(frozen=True, eq=False)
class VectorField2D:
    """Two-component field; ``values`` has shape ``(2, nx, ny)``."""

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values, (2,) + self.grid.shape, "VectorField2D"))

    @property
    def x(self):
        return self.values[0]

    @property
    def y(self):
        return self.values[1]


@dataclass(frozen=True, eq=False)
class ColumnField3D:
    """Per-column samples on ``z3 in [0, h(x')]`` for reduced-model fields.

    ``z`` has shape ``(nx, ny, nz + 1)``; ``values`` is ``(ncomp, nx, ny, nz + 1)``.
    """

    grid: Grid2D
    z: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        z = _frozen(self.z, self.z.shape, "ColumnField3D.z")
        if z.ndim != 3 or z.shape[:2] != self.grid.shape:
            raise ParameterError("ColumnField3D: z must be (nx, ny, nz+1)")
        object.__setattr__(self, "z", z)
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim == 3:
            vals = vals[None]
        object.__setattr__(self, "values", _frozen(vals, (vals.shape[0],) + z.shape, "ColumnField3D"))

    @property
    def nz(self) -> int:
        return self.z.shape[2] - 1


# -- forcing f'(x') ----------------------------------------------------------

@dataclass(frozen=True)
class ZeroForcing:
    def __call__(self, x, y):
        z = np.zeros(np.broadcast(x, y).shape)
        return z, z.copy()


@dataclass(frozen=True)
class ConstantForcing:
    cx: float
    cy: float

    def __call__(self, x, y):
        shape = np.broadcast(x, y).shape
        return np.full(shape, float(self.cx)), np.full(shape, float(self.cy))


@dataclass(frozen=True)
class SinusoidalForcing:
    """``f' = (a1, a2) * sin(pi (kx x + ky y))``; ``(1, 0, 0, 1)`` is ``(sin(pi y), 0)``."""

    a1: float
    a2: float
    kx: float
    ky: float

    def __call__(self, x, y):
        s = np.sin(np.pi * (self.kx * np.asarray(x) + self.ky * np.asarray(y)))
        return self.a1 * s, self.a2 * s


@dataclass(frozen=True)
class GradientForcing:
    """``f' = grad(phi)`` with ``phi = gx x + gy y + qxx x^2/2 + qyy y^2/2 + qxy x y``.

    Quadratic potentials are reproduced exactly by the finite-volume
    Reynolds scheme, so the pressure is ``phi`` minus its mean.
    """

    gx: float
    gy: float
    qxx: float = 0.0
    qyy: float = 0.0
    qxy: float = 0.0

    def potential(self, x, y):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        return (self.gx * x + self.gy * y + 0.5 * self.qxx * x * x
                + 0.5 * self.qyy * y * y + self.qxy * x * y)

    def __call__(self, x, y):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        return self.gx + self.qxx * x + self.qxy * y, self.gy + self.qyy * y + self.qxy * x


ForcingSpec = ZeroForcing | ConstantForcing | SinusoidalForcing | GradientForcing


def sample_forcing(spec: ForcingSpec, grid: Grid2D) -> VectorField2D:
    X, Y = grid.centers()
    f1, f2 = spec(X, Y)
    return VectorField2D(grid, np.stack([np.broadcast_to(f1, grid.shape),
                                         np.broadcast_to(f2, grid.shape)]))
