"""Plate domains described by signed distance functions.

Every domain exposes ``distances(p)``: an ``(n, k)`` array of signed
distances to its ``k`` boundary pieces (negative inside), and ``sdf(p)``,
the signed distance of the whole domain.  Seed reflection for the Voronoi
mesher works piece by piece, in the manner of PolyMesher.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _rect_pieces(p, lo, hi):
    return np.column_stack([lo[0] - p[:, 0], p[:, 0] - hi[0], lo[1] - p[:, 1], p[:, 1] - hi[1]])


def _circle_piece(p, center, radius):
    return (np.hypot(p[:, 0] - center[0], p[:, 1] - center[1]) - radius)[:, None]


@dataclass(frozen=True)
class HoleSpec:
    center: tuple[float, float]
    radius: float


@dataclass(frozen=True)
class DensityField:
    """Background density plus Gaussian attractors ``exp(-r^2 / (2 sigma^2))``."""

    attractors: tuple = ()
    background: float = 1.0

    def __post_init__(self):
        if not self.background > 0:
            raise ValueError("background density must be positive")
        for xc, yc, sigma in self.attractors:
            if not 0.0 < sigma <= 1.0:
                raise ValueError(f"attractor width must lie in (0, 1], got {sigma}")

    def __call__(self, p) -> np.ndarray:
        p = np.atleast_2d(np.asarray(p, dtype=float))
        d = np.full(len(p), float(self.background))
        for xc, yc, sigma in self.attractors:
            r2 = (p[:, 0] - xc) ** 2 + (p[:, 1] - yc) ** 2
            d += np.exp(-r2 / (2.0 * sigma ** 2))
        return d

    @property
    def upper_bound(self) -> float:
        return self.background + len(self.attractors)


UNIFORM = DensityField()


class Domain:
    holes: tuple = ()

    @property
    def corners(self) -> np.ndarray:
        """Convex corners that the mesh must reproduce as vertices."""
        return np.empty((0, 2))

    def outer_pieces(self, p) -> np.ndarray:
        raise NotImplementedError

    def outer_sdf(self, p) -> np.ndarray:
        raise NotImplementedError

    def distances(self, p) -> np.ndarray:
        p = np.atleast_2d(np.asarray(p, dtype=float))
        cols = [self.outer_pieces(p)]
        cols += [-_circle_piece(p, h.center, h.radius) for h in self.holes]
        return np.column_stack(cols)

    def sdf(self, p) -> np.ndarray:
        p = np.atleast_2d(np.asarray(p, dtype=float))
        d = self.outer_sdf(p)
        for h in self.holes:
            d = np.maximum(d, -_circle_piece(p, h.center, h.radius)[:, 0])
        return d

    def contains(self, p, tol: float = 0.0) -> np.ndarray:
        return self.sdf(p) <= tol

    @property
    def diameter(self) -> float:
        lo, hi = self.bbox
        return float(np.hypot(*(np.asarray(hi) - np.asarray(lo))))

    def area(self, n: int = 400) -> float:
        """Area by the closed form where known, else by a midpoint-grid estimate."""
        lo, hi = map(np.asarray, self.bbox)
        xs = lo[0] + (np.arange(n) + 0.5) * (hi[0] - lo[0]) / n
        ys = lo[1] + (np.arange(n) + 0.5) * (hi[1] - lo[1]) / n
        X, Y = np.meshgrid(xs, ys)
        inside = self.sdf(np.column_stack([X.ravel(), Y.ravel()])) < 0
        return float(inside.mean() * np.prod(hi - lo))

    def project(self, p, iterations: int = 4) -> np.ndarray:
        """Move points onto the nearest boundary along the distance gradient."""
        p = np.array(p, dtype=float)
        eps = 1e-8 * self.diameter
        for _ in range(iterations):
            d = self.sdf(p)
            gx = (self.sdf(p + [eps, 0.0]) - d) / eps
            gy = (self.sdf(p + [0.0, eps]) - d) / eps
            p -= d[:, None] * np.column_stack([gx, gy])
        return p


@dataclass(frozen=True)
class Rectangle(Domain):
    lower: tuple = (0.0, 0.0)
    upper: tuple = (1.0, 1.0)
    holes: tuple = ()

    @property
    def bbox(self):
        return tuple(self.lower), tuple(self.upper)

    @property
    def corners(self):
        (x0, y0), (x1, y1) = self.lower, self.upper
        return np.array([(x0, y0), (x1, y0), (x1, y1), (x0, y1)], dtype=float)

    def outer_pieces(self, p):
        return _rect_pieces(p, self.lower, self.upper)

    def outer_sdf(self, p):
        return self.outer_pieces(p).max(axis=1)

    def area(self, n: int = 0) -> float:
        w, h = np.subtract(self.upper, self.lower)
        return float(w * h - sum(np.pi * hole.radius ** 2 for hole in self.holes))


@dataclass(frozen=True)
class Circle(Domain):
    center: tuple = (0.0, 0.0)
    radius: float = 1.0
    holes: tuple = ()

    @property
    def bbox(self):
        c, r = np.asarray(self.center, dtype=float), self.radius
        return tuple(c - r), tuple(c + r)

    def outer_pieces(self, p):
        return _circle_piece(p, self.center, self.radius)

    def outer_sdf(self, p):
        return self.outer_pieces(p)[:, 0]

    def area(self, n: int = 0) -> float:
        return float(np.pi * self.radius ** 2 - sum(np.pi * h.radius ** 2 for h in self.holes))


@dataclass(frozen=True)
class LBracket(Domain):
    """L-shaped bracket: a vertical arm and a horizontal top arm joined by a fillet.

    The vertical arm is ``[0, arm] x [0, height]``, the top arm
    ``[0, length] x [height - arm, height]``; the re-entrant corner is
    rounded with radius ``fillet``.
    """

    length: float = 4.0
    height: float = 6.0
    arm: float = 1.0
    fillet: float = 0.25
    holes: tuple = field(default_factory=lambda: (
        HoleSpec((0.5, 0.5), 0.25), HoleSpec((0.5, 5.5), 0.25), HoleSpec((3.5, 5.5), 0.25)))

    @property
    def bbox(self):
        return (0.0, 0.0), (self.length, self.height)

    @property
    def corners(self):
        a, h, length = self.arm, self.height, self.length
        return np.array([(0.0, 0.0), (a, 0.0), (length, h - a), (length, h), (0.0, h)])

    def _parts(self, p):
        a, h, r = self.arm, self.height, self.fillet
        vertical = _rect_pieces(p, (0.0, 0.0), (a, h))
        top = _rect_pieces(p, (0.0, h - a), (self.length, h))
        corner = _rect_pieces(p, (a, h - a - r), (a + r, h - a))
        notch = _circle_piece(p, (a + r, h - a - r), r)
        return vertical, top, corner, notch

    def outer_pieces(self, p):
        vertical, top, corner, notch = self._parts(p)
        return np.column_stack([vertical, top, -notch])

    def outer_sdf(self, p):
        vertical, top, corner, notch = self._parts(p)
        fill = np.maximum(corner.max(axis=1), -notch[:, 0])
        return np.minimum(np.minimum(vertical.max(axis=1), top.max(axis=1)), fill)

    def area(self, n: int = 0) -> float:
        a, r = self.arm, self.fillet
        base = a * self.height + (self.length - a) * a + r * r * (1.0 - np.pi / 4.0)
        return float(base - sum(np.pi * hole.radius ** 2 for hole in self.holes))


def domain_from_config(cfg: dict) -> Domain:
    kind = cfg.get("type", "rectangle")
    holes = tuple(HoleSpec(tuple(h["center"]), float(h["diameter"]) / 2.0 if "diameter" in h else float(h["radius"]))
                  for h in cfg.get("holes", []))
    if kind == "rectangle":
        return Rectangle(tuple(cfg.get("lower", (0.0, 0.0))), tuple(cfg.get("upper", (1.0, 1.0))), holes)
    if kind == "circle":
        return Circle(tuple(cfg.get("center", (0.0, 0.0))), float(cfg.get("radius", 1.0)), holes)
    if kind == "l-bracket":
        kw = {k: float(cfg[k]) for k in ("length", "height", "arm", "fillet") if k in cfg}
        if "holes" in cfg:
            kw["holes"] = holes
        return LBracket(**kw)
    raise ValueError(f"unknown domain type {kind!r}")


def density_from_config(cfg: dict | None) -> DensityField:
    if not cfg:
        return UNIFORM
    return DensityField(tuple(tuple(map(float, a)) for a in cfg.get("attractors", [])),
                        float(cfg.get("background", 1.0)))
