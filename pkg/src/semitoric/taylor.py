"""The Taylor-series invariant at a focus-focus value, and its recovery from periods.

Near a focus-focus value the return times ``tau1, tau2`` of the joint flow
blow up like ``-log|z|`` and wind like ``arg z``.  Adding back the complex
logarithm,

    sigma1 = tau1 + Re(ln z),    sigma2 = tau2 - Im(ln z),

gives a smooth closed 1-form ``sigma1 dz1 + sigma2 dz2``; its primitive ``S``
with ``S(0) = 0`` is the invariant, kept as a truncated jet whose
``z2``-linear coefficient is normalized into ``[0, 2*pi)``.

This is the only module that works in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

import numpy as np

__all__ = [
    "FormalSeries2",
    "PeriodSample",
    "SigmaField",
    "ClosednessReport",
    "Recovery",
    "ConditioningError",
    "NotClosedError",
    "TWO_PI",
    "regularize",
    "check_closed",
    "recover_series",
    "series_equal",
    "normalize_z2_coefficient",
    "annulus_grid",
    "synthesize_samples",
    "read_samples",
    "parse_samples",
]

TWO_PI = 2.0 * math.pi

# Linear z2-coefficients this close below a multiple of 2*pi are snapped up to
# it, so roundoff around 0 does not wrap to 2*pi.
_WRAP_SNAP = 1e-9


class ConditioningError(np.linalg.LinAlgError):
    """The least-squares system is rank deficient on the given grid."""


class NotClosedError(ValueError):
    """The sampled 1-form fails the closedness check."""


def normalize_z2_coefficient(c: float) -> tuple[float, int]:
    """Reduce ``c`` into ``[0, 2*pi)``; returns the value and the 2*pi multiple removed."""
    m = math.floor((c + _WRAP_SNAP) / TWO_PI)
    value = c - m * TWO_PI
    if value < 0.0:
        value = 0.0
    return value, m


def _monomials(degree: int) -> list[tuple[int, int]]:
    return [(i, d - i) for d in range(1, degree + 1) for i in range(d, -1, -1)]


@dataclass(frozen=True)
class FormalSeries2:
    """Truncated power series ``sum c_ij z1^i z2^j`` over ``1 <= i + j <= degree``.

    Missing coefficients are zero.  The constant term is absent by
    construction and the ``z2`` coefficient must lie in ``[0, 2*pi)``.
    """

    degree: int
    coefficients: Mapping[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        if isinstance(self.degree, bool) or not isinstance(self.degree, int) or self.degree < 1:
            raise ValueError(f"truncation degree must be an int >= 1, got {self.degree!r}")
        coeffs = {}
        for key, value in dict(self.coefficients).items():
            i, j = key
            if i < 0 or j < 0 or not 1 <= i + j <= self.degree:
                raise ValueError(f"monomial z1^{i} z2^{j} outside 1 <= i+j <= {self.degree}")
            value = float(value)
            if not math.isfinite(value):
                raise ValueError(f"coefficient of z1^{i} z2^{j} is not finite")
            if value != 0.0:
                coeffs[(int(i), int(j))] = value
        c01 = coeffs.get((0, 1), 0.0)
        if not 0.0 <= c01 < TWO_PI:
            raise ValueError(f"z2 coefficient {c01} must lie in [0, 2*pi)")
        object.__setattr__(self, "coefficients", dict(sorted(coeffs.items())))

    def __getitem__(self, key: tuple[int, int]) -> float:
        return self.coefficients.get(key, 0.0)

    def __hash__(self):
        return hash((self.degree, tuple(self.coefficients.items())))

    @classmethod
    def zero(cls, degree: int) -> "FormalSeries2":
        return cls(degree, {})

    def truncate(self, degree: int) -> "FormalSeries2":
        return FormalSeries2(
            degree, {k: v for k, v in self.coefficients.items() if sum(k) <= degree}
        )

    def __call__(self, z1, z2):
        return sum(c * np.power(z1, i) * np.power(z2, j) for (i, j), c in self.coefficients.items())

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "coeffs": [{"i": i, "j": j, "value": v} for (i, j), v in self.coefficients.items()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FormalSeries2":
        coeffs = {}
        for entry in data["coeffs"]:
            key = (int(entry["i"]), int(entry["j"]))
            if key in coeffs:
                raise ValueError(f"duplicate coefficient for z1^{key[0]} z2^{key[1]}")
            coeffs[key] = float(entry["value"])
        return cls(int(data["degree"]), coeffs)


def series_equal(a: FormalSeries2, b: FormalSeries2, degree: int, tolerance: float = 0.0) -> bool:
    if degree > a.degree or degree > b.degree:
        raise ValueError(f"degree {degree} exceeds a truncation degree ({a.degree}, {b.degree})")
    return all(abs(a[key] - b[key]) <= tolerance for key in _monomials(degree))


class PeriodSample(NamedTuple):
    z1: float
    z2: float
    tau1: float
    tau2: float


def _angle(z1, z2, branch: float):
    """Argument of ``z1 + i z2`` taken in ``[branch, branch + 2*pi)``."""
    theta = np.arctan2(z2, z1)
    return branch + np.mod(theta - branch, TWO_PI)


@dataclass(frozen=True)
class SigmaField:
    """Samples of the regularized form ``(sigma1, sigma2)`` at points ``z``."""

    z: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float).reshape(-1, 2)
        sigma = np.asarray(self.sigma, dtype=float).reshape(-1, 2)
        if z.shape != sigma.shape:
            raise ValueError("z and sigma must have the same number of samples")
        if not np.all(np.isfinite(sigma)):
            raise ValueError("sigma must be finite at every sample")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "sigma", sigma)

    def __len__(self):
        return len(self.z)

    def grid_step(self) -> float:
        """Spacing of the square lattice the samples sit on."""
        diffs = []
        for axis in (0, 1):
            u = np.unique(self.z[:, axis])
            if len(u) > 1:
                diffs.append(np.min(np.diff(u)))
        if not diffs:
            raise ValueError("samples do not span a grid")
        return float(min(diffs))

    def lattice(self, step: Optional[float] = None) -> tuple[float, dict[tuple[int, int], int]]:
        h = self.grid_step() if step is None else float(step)
        idx = np.rint(self.z / h).astype(np.int64)
        if not np.allclose(idx * h, self.z, rtol=0.0, atol=1e-6 * h):
            raise ValueError(f"samples are not on a square lattice of step {h}")
        return h, {(int(a), int(b)): n for n, (a, b) in enumerate(idx)}


def regularize(samples: Iterable[PeriodSample], branch: float = 0.0) -> SigmaField:
    """Remove the logarithmic singularity from sampled periods.

    ``branch`` is the start of the angular window of ``ln``: 0 gives angles in
    ``[0, 2*pi)``, ``math.pi`` the window ``[pi, 3*pi)`` used for downward cuts.
    ``tau2`` must be lifted consistently with that window.
    """
    data = np.array([tuple(s) for s in samples], dtype=float).reshape(-1, 4)
    if len(data) == 0:
        raise ValueError("no period samples")
    z1, z2, tau1, tau2 = data.T
    r = np.hypot(z1, z2)
    if np.any(r == 0.0):
        raise ValueError("a period sample sits at the focus-focus value z = 0")
    sigma1 = tau1 + np.log(r)
    sigma2 = tau2 - _angle(z1, z2, branch)
    return SigmaField(np.column_stack([z1, z2]), np.column_stack([sigma1, sigma2]))


@dataclass(frozen=True)
class ClosednessReport:
    max_residual: float
    tolerance: float
    points: int
    step: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance

    def to_json(self) -> dict:
        return {
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "points": self.points,
            "step": self.step,
            "passed": self.passed,
        }


def check_closed(f: SigmaField, tolerance: Optional[float] = None, step: Optional[float] = None) -> ClosednessReport:
    """Max of ``|d sigma1/dz2 - d sigma2/dz1|`` by central differences.

    Only lattice points whose four neighbours are all sampled take part.  The
    default tolerance is ``10 h^2``.
    """
    h, where = f.lattice(step)
    s1, s2 = f.sigma[:, 0], f.sigma[:, 1]
    worst = 0.0
    count = 0
    for (a, b), n in where.items():
        try:
            e, w = where[(a + 1, b)], where[(a - 1, b)]
            nn, s = where[(a, b + 1)], where[(a, b - 1)]
        except KeyError:
            continue
        d2s1 = (s1[nn] - s1[s]) / (2 * h)
        d1s2 = (s2[e] - s2[w]) / (2 * h)
        worst = max(worst, abs(d2s1 - d1s2))
        count += 1
    if count == 0:
        raise ValueError("grid too small: no sample has all four lattice neighbours")
    tol = 10.0 * h * h if tolerance is None else float(tolerance)
    return ClosednessReport(float(worst), tol, count, h)


@dataclass(frozen=True)
class Recovery:
    series: FormalSeries2
    residual: float
    wraps: int
    closedness: Optional[ClosednessReport] = None

    def to_json(self) -> dict:
        out = {"series": self.series.to_json(), "residual": self.residual, "wraps": self.wraps}
        if self.closedness is not None:
            out["closedness"] = self.closedness.to_json()
        return out


def recover_series(
    f: SigmaField,
    degree: int,
    *,
    check: bool = True,
    tolerance: Optional[float] = None,
) -> Recovery:
    """Least-squares primitive of ``sigma`` with zero constant term.

    Fits ``dS/dz1 = sigma1`` and ``dS/dz2 = sigma2`` jointly over polynomials
    of total degree ``<= degree``; ``wraps`` is the multiple of ``2*pi``
    removed from the ``z2`` coefficient.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    report = None
    if check:
        report = check_closed(f, tolerance)
        if not report.passed:
            raise NotClosedError(
                f"sampled form is not closed: residual {report.max_residual:.3e} "
                f"> tolerance {report.tolerance:.3e}"
            )
    scale = float(np.max(np.abs(f.z))) or 1.0
    w1, w2 = f.z[:, 0] / scale, f.z[:, 1] / scale
    monos = _monomials(degree)
    n = len(f)
    A = np.zeros((2 * n, len(monos)))
    for col, (i, j) in enumerate(monos):
        # columns in scaled variables w = z / scale; gradient picks up 1/scale
        if i > 0:
            A[:n, col] = i * w1 ** (i - 1) * w2**j
        if j > 0:
            A[n:, col] = j * w1**i * w2 ** (j - 1)
    rhs = np.concatenate([f.sigma[:, 0], f.sigma[:, 1]]) * scale
    sol, _, rank, sv = np.linalg.lstsq(A, rhs, rcond=None)
    if rank < len(monos) or sv[-1] < 1e-10 * sv[0]:
        raise ConditioningError(
            f"degenerate grid: rank {rank} of {len(monos)} for degree {degree}"
        )
    residual = float(np.max(np.abs(A @ sol - rhs)) / scale)
    coeffs = {m: float(c) / scale ** sum(m) for m, c in zip(monos, sol)}
    c01, wraps = normalize_z2_coefficient(coeffs.get((0, 1), 0.0))
    coeffs[(0, 1)] = c01
    return Recovery(FormalSeries2(degree, coeffs), residual, wraps, report)


# -- sample generation and I/O ------------------------------------------------


def annulus_grid(r_max: float, step: float, r_min: Optional[float] = None) -> np.ndarray:
    """Square-lattice points ``step * (a, b)`` with ``r_min <= |z| <= r_max``."""
    if r_min is None:
        r_min = r_max / 10.0
    n = int(math.floor(r_max / step + 1e-9))
    a = np.arange(-n, n + 1)
    aa, bb = np.meshgrid(a, a, indexing="ij")
    pts = np.column_stack([aa.ravel(), bb.ravel()]) * step
    r = np.hypot(pts[:, 0], pts[:, 1])
    keep = (r >= r_min * (1 - 1e-12)) & (r <= r_max * (1 + 1e-12)) & (r > 0)
    return pts[keep]


def _gradient(coeffs: Mapping[tuple[int, int], float], z1, z2):
    g1 = np.zeros_like(z1)
    g2 = np.zeros_like(z1)
    for (i, j), c in coeffs.items():
        if i > 0:
            g1 = g1 + c * i * z1 ** (i - 1) * z2**j
        if j > 0:
            g2 = g2 + c * j * z1**i * z2 ** (j - 1)
    return g1, g2


def synthesize_samples(
    coeffs: Mapping[tuple[int, int], float],
    points: np.ndarray,
    branch: float = 0.0,
) -> list[PeriodSample]:
    """Period samples of a system whose invariant is the polynomial ``coeffs``.

    The ``z2`` coefficient may lie outside ``[0, 2*pi)``; that models a
    different lift of ``tau2``.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    z1, z2 = pts[:, 0], pts[:, 1]
    g1, g2 = _gradient(coeffs, z1, z2)
    tau1 = g1 - np.log(np.hypot(z1, z2))
    tau2 = g2 + _angle(z1, z2, branch)
    return [PeriodSample(*row) for row in np.column_stack([z1, z2, tau1, tau2]).tolist()]


def parse_samples(text: str, source: str = "<samples>") -> list[PeriodSample]:
    """Parse whitespace-separated ``z1 z2 tau1 tau2`` lines; ``#`` starts a comment."""
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) != 4:
            raise ValueError(f"{source}:{lineno}: expected 4 columns, got {len(parts)}")
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise ValueError(f"{source}:{lineno}: non-numeric column in {body!r}") from None
        if not all(math.isfinite(v) for v in values):
            raise ValueError(f"{source}:{lineno}: non-finite value")
        if values[0] == 0.0 and values[1] == 0.0:
            raise ValueError(f"{source}:{lineno}: sample at the origin")
        out.append(PeriodSample(*values))
    if not out:
        raise ValueError(f"{source}: no samples")
    return out


def read_samples(path) -> list[PeriodSample]:
    with open(path, encoding="utf-8") as fh:
        return parse_samples(fh.read(), str(path))


def format_samples(samples: Sequence[PeriodSample]) -> str:
    return "".join(f"{s.z1!r} {s.z2!r} {s.tau1!r} {s.tau2!r}\n" for s in samples)
