"""Quaternion scalars, similarity spheres, and sphere sampling.

Everything downstream is built over the real quaternion algebra: the basis
is (1, i, j, k) with i**2 = j**2 = k**2 = ijk = -1.  Two quaternions are
similar when they share the real part and the norm of the imaginary part;
the similarity class of ``q`` is a 2-sphere (a single point when ``q`` is
real), and spectra are reported in units of such spheres.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Quaternion",
    "SimilaritySphere",
    "UnitQuaternion",
    "mul",
    "conj",
    "re",
    "im",
    "norm",
    "similarity_class",
    "conjugate_by",
    "sample_sphere",
    "uniform_unit_quaternion",
    "random_quaternion",
]


@dataclass(frozen=True)
class Quaternion:
    """A quaternion a0 + a1*i + a2*j + a3*k with real coefficients."""

    a0: float = 0.0
    a1: float = 0.0
    a2: float = 0.0
    a3: float = 0.0

    @staticmethod
    def from_array(v) -> "Quaternion":
        v = np.asarray(v, dtype=float)
        if v.shape != (4,):
            raise ValueError(f"expected 4 components, got shape {v.shape}")
        return Quaternion(float(v[0]), float(v[1]), float(v[2]), float(v[3]))

    @staticmethod
    def from_complex(z: complex) -> "Quaternion":
        """Embed a complex number in the slice spanned by (1, i)."""
        z = complex(z)
        return Quaternion(z.real, z.imag, 0.0, 0.0)

    def as_array(self) -> np.ndarray:
        return np.array([self.a0, self.a1, self.a2, self.a3])

    def as_list(self) -> list[float]:
        """Serialized form: [a0, a1, a2, a3], used in every file format."""
        return [self.a0, self.a1, self.a2, self.a3]

    @property
    def re(self) -> float:
        return self.a0

    def imag(self) -> "Quaternion":
        """The pure part a1*i + a2*j + a3*k."""
        return Quaternion(0.0, self.a1, self.a2, self.a3)

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.a0, -self.a1, -self.a2, -self.a3)

    def norm(self) -> float:
        return math.sqrt(self.a0**2 + self.a1**2 + self.a2**2 + self.a3**2)

    __abs__ = norm

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(
            self.a0 + other.a0, self.a1 + other.a1,
            self.a2 + other.a2, self.a3 + other.a3,
        )

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(
            self.a0 - other.a0, self.a1 - other.a1,
            self.a2 - other.a2, self.a3 - other.a3,
        )

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.a0, -self.a1, -self.a2, -self.a3)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            p, q = self, other
            return Quaternion(
                p.a0 * q.a0 - p.a1 * q.a1 - p.a2 * q.a2 - p.a3 * q.a3,
                p.a0 * q.a1 + p.a1 * q.a0 + p.a2 * q.a3 - p.a3 * q.a2,
                p.a0 * q.a2 - p.a1 * q.a3 + p.a2 * q.a0 + p.a3 * q.a1,
                p.a0 * q.a3 + p.a1 * q.a2 - p.a2 * q.a1 + p.a3 * q.a0,
            )
        if isinstance(other, (int, float)):
            s = float(other)
            return Quaternion(self.a0 * s, self.a1 * s, self.a2 * s, self.a3 * s)
        return NotImplemented

    def __rmul__(self, other):
        # real scalars commute with everything
        if isinstance(other, (int, float)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return self * (1.0 / float(other))
        return NotImplemented

    def isclose(self, other: "Quaternion", atol: float = 1e-12) -> bool:
        return (self - other).norm() <= atol

    def __repr__(self) -> str:
        return f"Quaternion({self.a0}, {self.a1}, {self.a2}, {self.a3})"


ZERO = Quaternion()
ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def mul(p: Quaternion, q: Quaternion) -> Quaternion:
    """Hamilton product p*q (non-commutative)."""
    return p * q


def conj(q: Quaternion) -> Quaternion:
    return q.conjugate()


def re(q: Quaternion) -> float:
    return q.a0


def im(q: Quaternion) -> Quaternion:
    return q.imag()


def norm(q: Quaternion) -> float:
    return q.norm()


@dataclass(frozen=True)
class SimilaritySphere:
    """Canonical representative (re, im_radius) of a similarity class.

    ``im_radius == 0`` degenerates to the single real point ``re``.  Spheres
    compare for closeness with an absolute tolerance on each component,
    adjusted by max(1, |re|, im_radius).
    """

    re: float
    im_radius: float

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im_radius)):
            raise ValueError("sphere parameters must be finite")
        if self.im_radius < 0.0:
            raise ValueError(f"im_radius must be nonnegative, got {self.im_radius}")
        # normalize -0.0 so reports serialize identically
        object.__setattr__(self, "re", self.re + 0.0)
        object.__setattr__(self, "im_radius", self.im_radius + 0.0)

    @property
    def is_real_point(self) -> bool:
        return self.im_radius == 0.0

    def canonical_rep(self) -> Quaternion:
        """Intersection with the upper half of the (1, i) slice."""
        return Quaternion(self.re, self.im_radius, 0.0, 0.0)

    def distance_to(self, other: "SimilaritySphere") -> float:
        return math.hypot(self.re - other.re, self.im_radius - other.im_radius)

    def isclose(self, other: "SimilaritySphere", atol: float = 1e-8) -> bool:
        s = max(1.0, abs(self.re), self.im_radius)
        return (abs(self.re - other.re) <= atol * s
                and abs(self.im_radius - other.im_radius) <= atol * s)


def similarity_class(q: Quaternion) -> SimilaritySphere:
    """Map q to its class invariants (Re(q), |Im(q)|)."""
    return SimilaritySphere(q.a0, math.sqrt(q.a1**2 + q.a2**2 + q.a3**2))


@dataclass(frozen=True)
class UnitQuaternion:
    """A quaternion renormalized to |q| = 1 at construction.

    Inputs with |q| < 1e-300 are rejected rather than renormalized, since
    the direction is then numerically meaningless.
    """

    q: Quaternion

    def __post_init__(self):
        n = self.q.norm()
        if not math.isfinite(n) or n < 1e-300:
            raise ValueError(f"cannot normalize quaternion with norm {n}")
        if n != 1.0:
            object.__setattr__(self, "q", self.q / n)

    def conjugate(self) -> "UnitQuaternion":
        return UnitQuaternion(self.q.conjugate())


def conjugate_by(q: Quaternion, s: UnitQuaternion) -> Quaternion:
    """The similar element s* q s. Preserves the similarity class."""
    return s.q.conjugate() * q * s.q


def _as_rng(rng_seed) -> np.random.Generator:
    if isinstance(rng_seed, np.random.Generator):
        return rng_seed
    return np.random.default_rng(rng_seed)


def sample_sphere(sph: SimilaritySphere, rng_seed) -> Quaternion:
    """Draw a point re + u * im_radius with u a uniform random unit pure
    quaternion.  Degenerate spheres return the real point exactly."""
    if sph.im_radius == 0.0:
        return Quaternion(sph.re)
    rng = _as_rng(rng_seed)
    while True:
        u = rng.normal(size=3)
        n = float(np.linalg.norm(u))
        if n > 1e-12:
            break
    u = u / n
    r = sph.im_radius
    return Quaternion(sph.re, r * float(u[0]), r * float(u[1]), r * float(u[2]))


def uniform_unit_quaternion(rng_seed) -> UnitQuaternion:
    """Uniform draw from the unit 3-sphere (normalized 4d Gaussian)."""
    rng = _as_rng(rng_seed)
    while True:
        v = rng.normal(size=4)
        if float(np.linalg.norm(v)) > 1e-12:
            break
    return UnitQuaternion(Quaternion.from_array(v))


def random_quaternion(rng_seed, scale: float = 1.0) -> Quaternion:
    """Quaternion with i.i.d. normal components, used by verification code."""
    rng = _as_rng(rng_seed)
    return Quaternion.from_array(rng.normal(scale=scale, size=4))
