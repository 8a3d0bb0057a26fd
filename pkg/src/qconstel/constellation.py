"""Source constellations, discrete momentum-space PSFs, and planar symmetry actions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SYMMETRY_MATCH_ATOL = 1e-9


class SymmetryError(ValueError):
    """A declared symmetry does not permute the given point set."""


@dataclass(frozen=True)
class SymmetrySpec:
    """Planar symmetry group declaration.

    kind:
        ``cyclic``            rotations by multiples of 2 pi / n  (group Z_n)
        ``reflection_1d``     point inversion through the origin  (group Z_2)
        ``rect_reflections``  independent sign flips of x and y   (group Z_2 x Z_2)
    """

    kind: str
    n: int | None = None

    def __post_init__(self):
        if self.kind == "cyclic":
            if self.n is None or self.n < 2:
                raise ValueError("cyclic symmetry needs n >= 2")
        elif self.kind in ("reflection_1d", "rect_reflections"):
            if self.n is not None:
                raise ValueError(f"{self.kind} takes no order parameter")
        else:
            raise ValueError(f"unknown symmetry kind: {self.kind!r}")

    @classmethod
    def cyclic(cls, n: int) -> "SymmetrySpec":
        return cls("cyclic", n)

    @classmethod
    def reflection_1d(cls) -> "SymmetrySpec":
        return cls("reflection_1d")

    @classmethod
    def rect_reflections(cls) -> "SymmetrySpec":
        return cls("rect_reflections")

    @property
    def factors(self) -> tuple[int, ...]:
        """Cyclic factor orders of the group."""
        if self.kind == "cyclic":
            return (self.n,)
        if self.kind == "reflection_1d":
            return (2,)
        return (2, 2)

    @property
    def order(self) -> int:
        out = 1
        for f in self.factors:
            out *= f
        return out


def _as_points(pts) -> np.ndarray:
    arr = np.atleast_2d(np.array(pts, dtype=float))
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"expected an (m, 2) point array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("points must be finite")
    return arr


def _check_distinct(arr: np.ndarray, what: str) -> None:
    m = arr.shape[0]
    for i in range(m):
        for j in range(i + 1, m):
            if np.max(np.abs(arr[i] - arr[j])) == 0.0:
                raise ValueError(f"{what} must be distinct (entries {i} and {j} coincide)")


@dataclass(frozen=True, eq=False)
class Constellation:
    """Equal-brightness point sources with an optional declared symmetry."""

    points: np.ndarray
    symmetry: SymmetrySpec | None = None

    def __post_init__(self):
        arr = _as_points(self.points)
        if arr.shape[0] > 1:
            _check_distinct(arr, "source points")
        arr.flags.writeable = False
        object.__setattr__(self, "points", arr)

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True, eq=False)
class DiscretePSF:
    """Point spread function supported on finitely many momentum points."""

    momenta: np.ndarray

    def __post_init__(self):
        arr = _as_points(self.momenta)
        _check_distinct(arr, "psf momenta")
        arr.flags.writeable = False
        object.__setattr__(self, "momenta", arr)

    def __len__(self) -> int:
        return self.momenta.shape[0]


def make_pair(r: float, theta: float = 0.0) -> Constellation:
    """Two sources at radius r and angles theta, theta + pi (inversion symmetric).

    theta = 0 places the pair on the x axis.
    """
    if r <= 0:
        raise ValueError(f"pair radius must be positive, got {r}")
    p0 = np.array([r * np.cos(theta), r * np.sin(theta)])
    return Constellation(np.stack([p0, -p0]), SymmetrySpec.reflection_1d())


def make_rectangle(x0: float, y0: float) -> Constellation:
    """Four sources at (+-x0, +-y0), listed in sign-flip group order."""
    if x0 <= 0 or y0 <= 0:
        raise ValueError(f"rectangle half-sides must be positive, got ({x0}, {y0})")
    pts = np.array([[x0, y0], [x0, -y0], [-x0, y0], [-x0, -y0]])
    return Constellation(pts, SymmetrySpec.rect_reflections())


def make_ring(n: int, r: float, phase: float = 0.0) -> Constellation:
    """n sources on a circle of radius r at angles phase + 2 pi k / n."""
    if n < 2:
        raise ValueError(f"ring needs at least 2 sources, got {n}")
    if r <= 0:
        raise ValueError(f"ring radius must be positive, got {r}")
    ang = phase + 2.0 * np.pi * np.arange(n) / n
    pts = r * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    return Constellation(pts, SymmetrySpec.cyclic(n))


def matching_psf(
    c: Constellation, p: float, phase: float = 0.0, p_y: float | None = None
) -> DiscretePSF:
    """Momentum comb with the same symmetry and count as the constellation.

    Pair: momenta +-p at angle ``phase``.  Ring(n): n momenta of radius p at
    angles phase + 2 pi k / n.  Rectangle: axis-aligned (+-p, +-p_y) in
    sign-flip group order, with p_y defaulting to p; ``phase`` does not
    apply and must stay 0.
    """
    if p <= 0:
        raise ValueError(f"psf momentum magnitude must be positive, got {p}")
    if c.symmetry is None:
        raise ValueError("constellation has no declared symmetry")
    kind = c.symmetry.kind
    if kind != "rect_reflections" and p_y is not None:
        raise ValueError("p_y only applies to the rectangle psf")
    if kind == "reflection_1d":
        m0 = np.array([p * np.cos(phase), p * np.sin(phase)])
        return DiscretePSF(np.stack([m0, -m0]))
    if kind == "rect_reflections":
        if phase != 0.0:
            raise ValueError("the rectangle psf is axis-aligned; phase must be 0")
        py = p if p_y is None else p_y
        if py <= 0:
            raise ValueError(f"p_y must be positive, got {py}")
        return DiscretePSF(np.array([[p, py], [p, -py], [-p, py], [-p, -py]]))
    n = c.symmetry.n
    ang = phase + 2.0 * np.pi * np.arange(n) / n
    return DiscretePSF(p * np.stack([np.cos(ang), np.sin(ang)], axis=1))


def element_tuple(spec: SymmetrySpec, g: int) -> tuple[int, ...]:
    """Mixed-radix digits of element index g (first factor most significant)."""
    order = spec.order
    if not 0 <= g < order:
        raise ValueError(f"group element index {g} out of range for |G|={order}")
    digits = []
    for f in reversed(spec.factors):
        digits.append(g % f)
        g //= f
    return tuple(reversed(digits))


def compose_elements(spec: SymmetrySpec, g: int, h: int) -> int:
    """Index of the product element g * h (componentwise modular addition)."""
    gd = element_tuple(spec, g)
    hd = element_tuple(spec, h)
    out = 0
    for f, a, b in zip(spec.factors, gd, hd):
        out = out * f + (a + b) % f
    return out


def apply_group_element(spec: SymmetrySpec, g: int, pts) -> np.ndarray:
    """Apply the planar orthogonal action of element g to every point."""
    arr = _as_points(pts)
    digits = element_tuple(spec, g)
    if spec.kind == "cyclic":
        a = 2.0 * np.pi * digits[0] / spec.n
        rot = np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]])
        return arr @ rot.T
    if spec.kind == "reflection_1d":
        return -arr if digits[0] else arr.copy()
    signs = np.array([(-1.0) ** digits[0], (-1.0) ** digits[1]])
    return arr * signs


def validate_symmetry(spec: SymmetrySpec, pts, atol: float = SYMMETRY_MATCH_ATOL) -> np.ndarray:
    """Permutation table of the group action on a point list.

    Returns an integer array ``perm`` of shape (|G|, m) with
    ``apply_group_element(spec, g, pts)[i] == pts[perm[g, i]]`` within
    ``atol`` per coordinate.  Raises SymmetryError naming the offending
    group element and point if the action fails to permute the set.
    """
    arr = _as_points(pts)
    m = arr.shape[0]
    perms = np.empty((spec.order, m), dtype=np.intp)
    for g in range(spec.order):
        moved = apply_group_element(spec, g, arr)
        taken = np.zeros(m, dtype=bool)
        for i in range(m):
            hit = np.nonzero(np.all(np.abs(arr - moved[i]) <= atol, axis=1))[0]
            hit = [j for j in hit if not taken[j]]
            if not hit:
                raise SymmetryError(
                    f"group element {g} maps point {i} to "
                    f"({moved[i, 0]:.6g}, {moved[i, 1]:.6g}), which matches no point"
                )
            perms[g, i] = hit[0]
            taken[hit[0]] = True
    return perms
