"""Spectra of quaternionic matrices via two independent routes.

The primary computation finds similarity spheres of eigenvalues through the
complex adjoint; membership in the right spectrum is decided independently
through the smallest singular value of the 4n x 4n real realization of
x -> x*lam - T*x.  In exact arithmetic both routes describe the same set,
componentwise in the point/residual/continuous partition; here agreement is
enforced numerically and any discrepancy is raised as an error rather than
reconciled silently.

All spectra involved are circular (closed under similarity), so scans and
reports live on the half-slice lam = x + y*i, y >= 0.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .numerics import (
    StructuralIntegrityError,
    eig_dense,
    pair_conjugates,
    sigma_max,
    singular_values,
)
from .qmat import (
    QMatrix,
    _hamilton,
    _right_mult_matrix,
    build_Delta,
    build_T_lambda,
    complex_adjoint,
    real_embed,
    unflatten,
)
from .quat import Quaternion, SimilaritySphere, UnitQuaternion, sample_sphere

__all__ = [
    "SphereEntry",
    "SpectrumReport",
    "MembershipVerdict",
    "SpectrumMismatch",
    "ScanGrid",
    "CircularityCheck",
    "BallCheck",
    "s_spectrum",
    "right_spectrum_member",
    "right_spectrum",
    "classify_parts_finite",
    "slice_scan",
    "verify_factorization",
    "verify_slide_identity",
    "verify_circularity",
    "verify_ball_containment",
]

DEFAULT_TOL = 1e-7
DEFAULT_CLUSTER_RADIUS = 1e-6
INDETERMINATE_FACTOR = 10.0
_EPS_DENOM = 1e-30


def worker_count(explicit=None) -> int:
    """Worker cap for scans; QSPECTRA_THREADS overrides the default."""
    if explicit is not None:
        return max(1, int(explicit))
    env = os.getenv("QSPECTRA_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(4, os.cpu_count() or 1)


@dataclass(frozen=True)
class SphereEntry:
    sphere: SimilaritySphere
    multiplicity: int
    part: str = "unclassified"
    witness: list | None = None
    witness_residual: float | None = None

    def to_dict(self) -> dict:
        d = {
            "re": float(self.sphere.re),
            "im_radius": float(self.sphere.im_radius),
            "multiplicity": int(self.multiplicity),
            "part": self.part,
        }
        if self.witness is not None:
            d["witness"] = self.witness
            d["witness_residual"] = float(self.witness_residual)
        return d


@dataclass(frozen=True)
class SpectrumReport:
    """Similarity spheres with multiplicities plus the diagnostics needed
    to recompute every verdict (tolerances, residuals, seeds)."""

    spheres: tuple[SphereEntry, ...]
    norm_bound: float
    tolerances: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "spheres": [e.to_dict() for e in self.spheres],
            "norm_bound": float(self.norm_bound),
            "tolerances": self.tolerances,
            "diagnostics": self.diagnostics,
        }

    def sphere_list(self) -> list[SimilaritySphere]:
        return [e.sphere for e in self.spheres]


class SpectrumMismatch(Exception):
    """The two routes disagreed about a point; carries the witness."""

    def __init__(self, lam: Quaternion, sigma_min_T_lambda: float,
                 sigma_min_Delta: float, detail: str):
        self.lam = lam
        self.sigma_min_T_lambda = float(sigma_min_T_lambda)
        self.sigma_min_Delta = float(sigma_min_Delta)
        self.detail = detail
        super().__init__(
            f"{detail}: lambda={lam}, sigma_min(T_lambda)={sigma_min_T_lambda:.6e}, "
            f"sigma_min(Delta)={sigma_min_Delta:.6e}"
        )

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam.as_list(),
            "sigma_min_T_lambda": self.sigma_min_T_lambda,
            "sigma_min_Delta": self.sigma_min_Delta,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class MembershipVerdict:
    """Both invertibility predicates at one point, with the inputs to
    rederive them: verdict = (sigma_min <= tolerance)."""

    lam: Quaternion
    in_right_spectrum: bool
    in_s_spectrum: bool
    sigma_min_T_lambda: float
    sigma_min_Delta: float
    tolerance: float
    delta_tolerance: float
    scale: float

    @property
    def right_status(self) -> str:
        if self.sigma_min_T_lambda <= self.tolerance:
            return "member"
        if self.sigma_min_T_lambda <= INDETERMINATE_FACTOR * self.tolerance:
            return "indeterminate"
        return "non_member"

    @property
    def s_status(self) -> str:
        if self.sigma_min_Delta <= self.delta_tolerance:
            return "member"
        if self.sigma_min_Delta <= INDETERMINATE_FACTOR**2 * self.delta_tolerance:
            return "indeterminate"
        return "non_member"

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam.as_list(),
            "in_right_spectrum": self.in_right_spectrum,
            "in_s_spectrum": self.in_s_spectrum,
            "sigma_min_T_lambda": self.sigma_min_T_lambda,
            "sigma_min_Delta": self.sigma_min_Delta,
            "tolerance": self.tolerance,
            "delta_tolerance": self.delta_tolerance,
            "right_status": self.right_status,
            "s_status": self.s_status,
        }


class _MembershipContext:
    """Precomputed embeddings for repeated membership tests on one T."""

    def __init__(self, T: QMatrix, tol: float):
        if tol <= 0:
            raise ValueError("tolerance must be positive")
        self.T = T
        self.tol = float(tol)
        self.rho_t = real_embed(T).m
        self.rho_tsq = real_embed(T @ T).m
        self.eye = np.eye(4 * T.n)
        self.rblock_i = np.kron(np.eye(T.n), _right_mult_matrix(np.array([0.0, 1.0, 0.0, 0.0])))
        self.norm_bound = float(sigma_max(complex_adjoint(T).m).value)
        self.scale = max(1.0, self.norm_bound)

    def t_lambda_matrix(self, lam: Quaternion) -> np.ndarray:
        rl = np.kron(np.eye(self.T.n), _right_mult_matrix(lam.as_array()))
        return rl - self.rho_t

    def t_lambda_matrix_slice(self, x: float, y: float) -> np.ndarray:
        # lam = x + y*i only; avoids the kron in scan loops
        return x * self.eye + y * self.rblock_i - self.rho_t

    def delta_matrix(self, lam: Quaternion) -> np.ndarray:
        mod2 = lam.a0**2 + lam.a1**2 + lam.a2**2 + lam.a3**2
        return self.rho_tsq - (2.0 * lam.re) * self.rho_t + mod2 * self.eye

    def delta_matrix_slice(self, x: float, y: float) -> np.ndarray:
        return self.rho_tsq - (2.0 * x) * self.rho_t + (x * x + y * y) * self.eye

    def verdict(self, lam: Quaternion) -> MembershipVerdict:
        smt = float(singular_values(self.t_lambda_matrix(lam))[-1])
        svd_d = singular_values(self.delta_matrix(lam))
        smd, sxd = float(svd_d[-1]), float(svd_d[0])
        tol_eff = self.tol * self.scale
        # Delta factors through two shifted copies of T, so its smallest
        # singular value responds quadratically; floor by sigma_max(Delta)
        # to stay above floating-point noise on large operators.
        tol_delta = self.tol**2 * max(1.0, sxd)
        return MembershipVerdict(
            lam=lam,
            in_right_spectrum=bool(smt <= tol_eff),
            in_s_spectrum=bool(smd <= tol_delta),
            sigma_min_T_lambda=smt,
            sigma_min_Delta=smd,
            tolerance=tol_eff,
            delta_tolerance=tol_delta,
            scale=self.scale,
        )


def right_spectrum_member(T: QMatrix, lam: Quaternion, tol: float = DEFAULT_TOL) -> MembershipVerdict:
    """Test lam against both invertibility predicates.

    The right-spectrum side thresholds sigma_min of the real realization of
    x -> x*lam - T*x at tol * max(1, ||T||).  Points in the band between
    the tolerance and 10x the tolerance report status "indeterminate".
    """
    return _MembershipContext(T, tol).verdict(lam)


def _single_linkage(points: np.ndarray, radius: float) -> list[list[int]]:
    m = points.shape[0]
    parent = list(range(m))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a in range(m):
        for b in range(a + 1, m):
            if np.hypot(*(points[a] - points[b])) <= radius:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[rb] = ra
    groups: dict[int, list[int]] = {}
    for a in range(m):
        groups.setdefault(find(a), []).append(a)
    return list(groups.values())


def s_spectrum(T: QMatrix, *, cluster_radius: float = DEFAULT_CLUSTER_RADIUS) -> SpectrumReport:
    """Similarity spheres on which T^2 - 2*Re(lam)*T + |lam|^2 I degenerates.

    Eigenvalues of the complex adjoint are conjugate-paired, mapped to
    (re, |im|), and single-linkage clustered; each cluster is one sphere
    with its pair count as multiplicity (they sum to n).  Every sphere is
    self-checked: the real realization of the quadratic operator at the
    canonical representative must be numerically singular.
    """
    chi = complex_adjoint(T)
    eres = eig_dense(chi.m)
    norm_bound = float(sigma_max(chi.m).value)
    scale = max(1.0, norm_bound)
    pairs = pair_conjugates(eres.values)
    cluster_tol = cluster_radius * scale
    groups = _single_linkage(pairs, cluster_tol)

    ctx = _MembershipContext(T, DEFAULT_TOL)
    entries = []
    delta_residuals = []
    for g in groups:
        pts = pairs[g]
        center = pts.mean(axis=0)
        sph = SimilaritySphere(float(center[0]), max(0.0, float(center[1])))
        smd = float(singular_values(ctx.delta_matrix(sph.canonical_rep()))[-1])
        if smd > cluster_tol:
            raise StructuralIntegrityError(
                f"sphere ({sph.re}, {sph.im_radius}) failed its degeneracy "
                f"self-check: sigma_min(Delta)={smd:.3e} > {cluster_tol:.3e}"
            )
        delta_residuals.append(smd)
        entries.append(SphereEntry(sphere=sph, multiplicity=len(g)))

    order = sorted(range(len(entries)),
                   key=lambda k: (entries[k].sphere.re, entries[k].sphere.im_radius))
    entries = tuple(entries[k] for k in order)
    delta_residuals = [delta_residuals[k] for k in order]

    return SpectrumReport(
        spheres=entries,
        norm_bound=norm_bound,
        tolerances={
            "cluster_radius": float(cluster_radius),
            "cluster_tolerance": float(cluster_tol),
            "pair_tol_factor": 1e-8,
        },
        diagnostics={
            "route": "complex_adjoint_eigenvalues",
            "eig_backward_error": float(eres.backward_error),
            "delta_residuals": [float(v) for v in delta_residuals],
        },
    )


def _probe_points(entries, norm_bound: float, count: int) -> list[tuple[float, float, float]]:
    """Deterministic off-sphere probes: grid candidates in the half-slice,
    ranked by distance to the sphere set (farthest first)."""
    b = 1.3 * max(1.0, norm_bound)
    xs = np.linspace(-b, b, 25)
    ys = np.linspace(0.0, b, 13)
    centers = np.array([[e.sphere.re, e.sphere.im_radius] for e in entries])
    cands = []
    for iy, y in enumerate(ys):
        for ix, x in enumerate(xs):
            d = float(np.min(np.hypot(centers[:, 0] - x, centers[:, 1] - y)))
            cands.append((-d, iy, ix, float(x), float(y)))
    cands.sort()
    return [(x, y, -negd) for negd, _, _, x, y in cands[:count]]


def right_spectrum(
    T: QMatrix,
    *,
    tol: float = DEFAULT_TOL,
    samples_per_sphere: int = 3,
    probe_count: int = 3,
    seed: int = 42,
    cluster_radius: float = DEFAULT_CLUSTER_RADIUS,
) -> SpectrumReport:
    """Spectrum via real-linear invertibility, cross-checked sphere by sphere.

    The sphere set is produced by :func:`s_spectrum` and then confirmed
    independently: on each sphere, ``samples_per_sphere`` random points must
    be members of the right spectrum (sigma_min of the real realization at
    or below tolerance), and ``probe_count`` far-off points must be
    rejected.  Any disagreement raises :class:`SpectrumMismatch`, because it
    would falsify the route equivalence and therefore indicates a bug.
    """
    base = s_spectrum(T, cluster_radius=cluster_radius)
    ctx = _MembershipContext(T, tol)
    rng = np.random.default_rng(seed)

    confirmations = []
    max_on_sphere = 0.0
    for entry in base.spheres:
        samples = []
        for _ in range(max(1, samples_per_sphere)):
            lam = sample_sphere(entry.sphere, rng)
            v = ctx.verdict(lam)
            if not v.in_right_spectrum:
                raise SpectrumMismatch(
                    lam, v.sigma_min_T_lambda, v.sigma_min_Delta,
                    "sphere sample rejected by the real-linear route",
                )
            if not v.in_s_spectrum:
                raise SpectrumMismatch(
                    lam, v.sigma_min_T_lambda, v.sigma_min_Delta,
                    "sphere sample rejected by the quadratic route",
                )
            max_on_sphere = max(max_on_sphere, v.sigma_min_T_lambda)
            samples.append({
                "lambda": lam.as_list(),
                "sigma_min_T_lambda": v.sigma_min_T_lambda,
                "sigma_min_Delta": v.sigma_min_Delta,
            })
        confirmations.append({
            "re": float(entry.sphere.re),
            "im_radius": float(entry.sphere.im_radius),
            "samples": samples,
        })

    probes = []
    min_off_sphere = math.inf
    for x, y, dist in _probe_points(base.spheres, base.norm_bound, probe_count):
        if dist <= INDETERMINATE_FACTOR * ctx.tol * ctx.scale:
            raise StructuralIntegrityError(
                "could not place probes far enough from the sphere set"
            )
        lam = Quaternion(x, y, 0.0, 0.0)
        v = ctx.verdict(lam)
        if v.right_status != "non_member":
            raise SpectrumMismatch(
                lam, v.sigma_min_T_lambda, v.sigma_min_Delta,
                "off-sphere probe accepted by the real-linear route",
            )
        min_off_sphere = min(min_off_sphere, v.sigma_min_T_lambda)
        probes.append({
            "lambda": lam.as_list(),
            "distance": float(dist),
            "sigma_min_T_lambda": v.sigma_min_T_lambda,
            "sigma_min_Delta": v.sigma_min_Delta,
        })

    tolerances = dict(base.tolerances)
    tolerances.update({
        "membership_tol": float(tol),
        "membership_tol_effective": float(ctx.tol * ctx.scale),
    })
    diagnostics = dict(base.diagnostics)
    diagnostics.update({
        "route": "complex_adjoint_eigenvalues + real_sigma_min_confirmation",
        "seed": int(seed),
        "generator": "numpy.random.PCG64",
        "samples_per_sphere": int(samples_per_sphere),
        "confirmations": confirmations,
        "probes": probes,
        "max_on_sphere_sigma_min": float(max_on_sphere),
        "min_off_sphere_sigma_min": float(min_off_sphere),
    })
    return SpectrumReport(
        spheres=base.spheres,
        norm_bound=base.norm_bound,
        tolerances=tolerances,
        diagnostics=diagnostics,
    )


def classify_parts_finite(T: QMatrix, report: SpectrumReport) -> SpectrumReport:
    """Tag every sphere as point spectrum and attach an eigenvector witness.

    In finite dimension failing to be bounded below already forces a
    nontrivial kernel and the range is closed, so the residual and
    continuous parts are empty; the witness is the smallest right singular
    vector of the real realization at the canonical representative.
    """
    entries = []
    for entry in report.spheres:
        lam = entry.sphere.canonical_rep()
        m = build_T_lambda(T, lam).m
        _, s, vh = np.linalg.svd(m)
        v = vh[-1]
        witness = unflatten(v)
        entries.append(replace(
            entry,
            part="point",
            witness=[[float(c) for c in row] for row in witness],
            witness_residual=float(s[-1]),
        ))
    diagnostics = dict(report.diagnostics)
    diagnostics["classification"] = {
        "rule": "finite_dimension_point_only",
        "witness": "smallest right singular vector at the canonical representative",
    }
    return SpectrumReport(
        spheres=tuple(entries),
        norm_bound=report.norm_bound,
        tolerances=report.tolerances,
        diagnostics=diagnostics,
    )


@dataclass(frozen=True)
class ScanGrid:
    """Half-slice grid of sigma_min values, suitable for contour plots.

    Rows iterate the imaginary axis, columns the real axis; serialization
    is row-major over (im, re)."""

    xs: np.ndarray
    ys: np.ndarray
    sigma_min_t_lambda: np.ndarray
    sigma_min_delta: np.ndarray

    CSV_HEADER = "re,im,sigma_min_T_lambda,sigma_min_Delta"

    @property
    def shape(self) -> tuple[int, int]:
        return self.sigma_min_t_lambda.shape

    def rows(self):
        for iy, y in enumerate(self.ys):
            for ix, x in enumerate(self.xs):
                yield (float(x), float(y),
                       float(self.sigma_min_t_lambda[iy, ix]),
                       float(self.sigma_min_delta[iy, ix]))

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.CSV_HEADER + "\n")
            for x, y, a, b in self.rows():
                fh.write(f"{x!r},{y!r},{a!r},{b!r}\n")


def slice_scan(T: QMatrix, window, resolution, *, threads=None) -> ScanGrid:
    """Evaluate both sigma_min fields over a rectangle in the half-slice.

    ``window`` is (x0, x1, y0, y1) with y0 >= 0, ``resolution`` is (W, H)
    with both at least 2.  Deterministic for fixed inputs regardless of the
    worker count.
    """
    x0, x1, y0, y1 = (float(v) for v in window)
    w, h = (int(v) for v in resolution)
    if w < 2 or h < 2:
        raise ValueError(f"resolution must be at least 2x2, got {w}x{h}")
    if not all(map(math.isfinite, (x0, x1, y0, y1))):
        raise ValueError("window bounds must be finite")
    if x1 <= x0 or y1 <= y0:
        raise ValueError(f"degenerate window ({x0}, {x1}) x ({y0}, {y1})")
    if y0 < 0:
        raise ValueError("the slice scan lives in the upper half-plane (y >= 0)")

    ctx = _MembershipContext(T, DEFAULT_TOL)
    xs = np.linspace(x0, x1, w)
    ys = np.linspace(y0, y1, h)
    sig_t = np.empty((h, w))
    sig_d = np.empty((h, w))

    def do_row(iy: int):
        y = float(ys[iy])
        for ix in range(w):
            x = float(xs[ix])
            sig_t[iy, ix] = singular_values(ctx.t_lambda_matrix_slice(x, y))[-1]
            sig_d[iy, ix] = singular_values(ctx.delta_matrix_slice(x, y))[-1]

    nworkers = worker_count(threads)
    if nworkers <= 1 or h == 1:
        for iy in range(h):
            do_row(iy)
    else:
        with ThreadPoolExecutor(max_workers=nworkers) as pool:
            list(pool.map(do_row, range(h)))

    return ScanGrid(xs=xs, ys=ys, sigma_min_t_lambda=sig_t, sigma_min_delta=sig_d)


def _right_scalar_mult(xv: np.ndarray, lam: Quaternion) -> np.ndarray:
    return _hamilton(xv, lam.as_array()[None, :])


def _vec_norm(xv: np.ndarray) -> float:
    return float(np.linalg.norm(xv.reshape(-1)))


def verify_factorization(T: QMatrix, lam: Quaternion, trials: int, *, seed: int = 0) -> float:
    """Max relative residual of the two factorizations of the quadratic
    operator through x -> x*mu - T*x at mu = lam and mu = conj(lam)."""
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = np.random.default_rng(seed)
    n = T.n
    lam_c = lam.conjugate()
    delta_norm = float(sigma_max(complex_adjoint(build_Delta(T, lam)).m).value)
    worst = 0.0
    for _ in range(trials):
        x = rng.normal(size=(n, 4))
        tx = T.matvec(x)
        dx = T.matvec(tx) - (2.0 * lam.re) * tx + (abs(lam) ** 2) * x
        u = _right_scalar_mult(x, lam_c) - tx
        z1 = _right_scalar_mult(u, lam) - T.matvec(u)
        v = _right_scalar_mult(x, lam) - tx
        z2 = _right_scalar_mult(v, lam_c) - T.matvec(v)
        denom = delta_norm * _vec_norm(x) + _EPS_DENOM
        r = max(_vec_norm(dx - z1), _vec_norm(dx - z2)) / denom
        worst = max(worst, r)
    return worst


def verify_slide_identity(T: QMatrix, x, lam: Quaternion, q: UnitQuaternion) -> float:
    """Relative residual of (T_lam x) q = T_mu (x q) with mu = q* lam q."""
    xv = x if isinstance(x, np.ndarray) else np.array([p.as_array() for p in x])
    if xv.shape != (T.n, 4):
        raise ValueError(f"vector shape {xv.shape} does not match ({T.n}, 4)")
    mu = q.q.conjugate() * lam * q.q
    lhs = _right_scalar_mult(_right_scalar_mult(xv, lam) - T.matvec(xv), q.q)
    xq = _right_scalar_mult(xv, q.q)
    rhs = _right_scalar_mult(xq, mu) - T.matvec(xq)
    tnorm = float(sigma_max(complex_adjoint(T).m).value)
    denom = _vec_norm(xv) * (abs(lam) + tnorm) + _EPS_DENOM
    return _vec_norm(lhs - rhs) / denom


@dataclass(frozen=True)
class CircularityCheck:
    passed: bool
    samples_checked: int
    witnesses: list

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "samples_checked": int(self.samples_checked),
            "witnesses": [
                {"lambda": lam.as_list(), "sigma_min_T_lambda": float(s)}
                for lam, s in self.witnesses
            ],
        }


def verify_circularity(
    T: QMatrix,
    report: SpectrumReport,
    samples_per_sphere: int,
    *,
    tol: float = DEFAULT_TOL,
    seed: int = 2718,
) -> CircularityCheck:
    """Sample each reported sphere; all points must be members of the right
    spectrum.  Failures are returned as witnesses, never swallowed."""
    ctx = _MembershipContext(T, tol)
    rng = np.random.default_rng(seed)
    witnesses = []
    checked = 0
    for entry in report.spheres:
        for _ in range(max(1, samples_per_sphere)):
            lam = sample_sphere(entry.sphere, rng)
            v = ctx.verdict(lam)
            checked += 1
            if not v.in_right_spectrum:
                witnesses.append((lam, v.sigma_min_T_lambda))
    return CircularityCheck(passed=not witnesses, samples_checked=checked,
                            witnesses=witnesses)


@dataclass(frozen=True)
class BallCheck:
    passed: bool
    norm_bound: float
    worst_excess: float

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "norm_bound": float(self.norm_bound),
            "worst_excess": float(self.worst_excess),
        }


def verify_ball_containment(T: QMatrix, report: SpectrumReport, *, slack: float = 1e-8) -> BallCheck:
    """Every sphere must lie in the closed ball of radius ||T||."""
    nb = float(sigma_max(complex_adjoint(T).m).value)
    worst = -math.inf
    for entry in report.spheres:
        r = math.hypot(entry.sphere.re, entry.sphere.im_radius)
        worst = max(worst, r - nb)
    if not report.spheres:
        worst = 0.0
    return BallCheck(passed=worst <= slack * max(1.0, nb), norm_bound=nb,
                     worst_excess=worst)
