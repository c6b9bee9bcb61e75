"""Compactly supported potential families and their exact transforms.

The default family is the polynomial bump ``c * (1 - |x - x0|^2 / a^2)^m``
supported on the ball of radius ``a`` around ``x0``.  Sums of bumps cover
non-symmetric cases; the square well and ball indicator are rough-edged
oracle families accepted by the forward solver but rejected by the
smoothness-sensitive estimate routines.

Every family is a sum of radial pieces, which gives closed forms for the
volume integral, the plane (Radon) integral and the Fourier transform at
arbitrary complex frequency vectors.  The closed forms back the fast
paths and the test oracles; the quadrature routes (`fourier_complex`,
`radon_transform`) are kept fully independent of them.
"""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import RangeError, ResolutionTooLow, ScenarioError
from .frequencies import ComplexFrequency
from .quadrature import adaptive_cube, gauss_rule, tangent_frame

# Growth guard: exp(eta * support_radius) beyond this is unsafe in doubles.
ETA_TIMES_RADIUS_MAX = 40.0


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolyBump:
    """Polynomial bump c*(1 - |x-x0|^2/a^2)^m on the ball |x-x0| < a."""

    order: int = 4
    amplitude: float = 1.0
    radius: float = 1.0
    center: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("order must be >= 0")
        if self.radius <= 0:
            raise ValueError("radius must be > 0")

    @property
    def support_radius(self) -> float:
        return float(np.linalg.norm(self.center)) + self.radius

    @property
    def smoothness_order(self) -> int:
        # boundary regularity of (1-u)^m: m-1 continuous derivatives
        return self.order - 1

    @property
    def oracle_only(self) -> bool:
        return self.smoothness_order <= 2

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        d2 = np.sum((pts - np.asarray(self.center)) ** 2, axis=1)
        u = 1.0 - d2 / (self.radius * self.radius)
        return self.amplitude * np.where(u > 0.0, u, 0.0) ** self.order

    def _bumps(self):
        return (self,)


@dataclass(frozen=True)
class SquareWell:
    """Piecewise-constant potential: `depth` inside the ball, 0 outside.

    Positive depth is a repulsive barrier (keeps the operator free of
    bound states); negative depth is allowed for oracle comparisons.
    """

    depth: float = 1.0
    radius: float = 1.0
    center: tuple = (0.0, 0.0, 0.0)

    @property
    def support_radius(self) -> float:
        return float(np.linalg.norm(self.center)) + self.radius

    @property
    def smoothness_order(self) -> int:
        return 0

    @property
    def oracle_only(self) -> bool:
        return True

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        d2 = np.sum((pts - np.asarray(self.center)) ** 2, axis=1)
        return np.where(d2 < self.radius * self.radius, self.depth, 0.0)


class BallIndicator(SquareWell):
    """Indicator of a ball (square well of unit depth); oracle family."""

    def __init__(self, radius=1.0, center=(0.0, 0.0, 0.0)):
        super().__init__(depth=1.0, radius=radius, center=center)


@dataclass(frozen=True)
class SumOfBumps:
    """Linear combination of polynomial bumps (amplitudes may be signed)."""

    bumps: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if not all(isinstance(b, PolyBump) for b in self.bumps):
            raise TypeError("SumOfBumps accepts PolyBump components only")

    @property
    def support_radius(self) -> float:
        if not self.bumps:
            return 0.0
        return max(b.support_radius for b in self.bumps)

    @property
    def smoothness_order(self) -> int:
        if not self.bumps:
            return 10**9  # identically zero is as smooth as it gets
        return min(b.smoothness_order for b in self.bumps)

    @property
    def oracle_only(self) -> bool:
        return bool(self.bumps) and self.smoothness_order <= 2

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros(len(pts))
        for b in self.bumps:
            out += b.evaluate(pts)
        return out

    def _bumps(self):
        return self.bumps


def eval_potential(spec, x) -> float:
    """Pointwise value of the potential; exactly zero outside support."""
    return float(spec.evaluate(np.asarray(x, dtype=float).reshape(1, 3))[0])


def difference_spec(q1, q2):
    """The difference q1 - q2 as a single spec (bump families only)."""
    negated = tuple(
        PolyBump(b.order, -b.amplitude, b.radius, b.center) for b in q2._bumps())
    return SumOfBumps(tuple(q1._bumps()) + negated)


def require_admissible(spec, what: str = "operation"):
    from .errors import AdmissibilityError
    if spec.oracle_only:
        raise AdmissibilityError(
            f"{what} needs boundary smoothness order > 2, got "
            f"{spec.smoothness_order} ({type(spec).__name__})")


# ---------------------------------------------------------------------------
# Exact moments, plane integrals and Fourier transforms
# ---------------------------------------------------------------------------

def _series_jn_ratio(n: int, z2: np.ndarray) -> np.ndarray:
    """Power series for j_n(z)/z^n as a function of z^2 (entire)."""
    dd = float(np.multiply.reduce(np.arange(1, 2 * n + 2, 2, dtype=float)))
    term = np.full(z2.shape, 1.0 / dd, dtype=complex)
    out = term.copy()
    for k in range(1, 60):
        term = term * (-0.5 * z2) / (k * (2 * n + 2 * k + 1))
        out += term
        if np.all(np.abs(term) <= 1e-18 * (np.abs(out) + 1e-300)):
            break
    return out


def spherical_jn_ratio(n: int, z: np.ndarray) -> np.ndarray:
    """j_n(z) / z^n for complex z, stable through z = 0.

    Series evaluation near the origin, sin/cos upward recurrence away
    from it (fine for the small orders used here).
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty(z.shape, dtype=complex)
    small = np.abs(z) < max(8.0, n + 2.0)
    if np.any(small):
        out[small] = _series_jn_ratio(n, z[small] ** 2)
    big = ~small
    if np.any(big):
        zb = z[big]
        jm, jc = np.sin(zb) / zb, None
        if n == 0:
            jn = jm
        else:
            jc = np.sin(zb) / zb**2 - np.cos(zb) / zb
            jn = jc
            for ell in range(1, n):
                jm, jn = jn, (2 * ell + 1) / zb * jn - jm
        out[big] = jn / zb**n
    return out[0] if scalar else out


def moment(spec) -> float:
    """Exact volume integral of the potential."""
    if isinstance(spec, SquareWell):
        return spec.depth * 4.0 / 3.0 * math.pi * spec.radius**3
    total = 0.0
    for b in spec._bumps():
        m = b.order
        radial = 0.5 * math.gamma(1.5) * math.gamma(m + 1) / math.gamma(m + 2.5)
        total += b.amplitude * 4.0 * math.pi * b.radius**3 * radial
    return total


def fourier_analytic(spec, xi: np.ndarray) -> np.ndarray:
    """Fourier transform at complex frequency vectors, closed form.

    ``xi`` has shape (..., 3) and may be complex; the transform uses the
    e^{+i xi.x} convention.  The radial factor is analytic in the
    bilinear square xi.xi, so this is the entire continuation of the
    real-frequency transform.
    """
    xi = np.asarray(xi, dtype=complex)
    single = xi.ndim == 1
    xi = np.atleast_2d(xi)
    out = np.zeros(len(xi), dtype=complex)
    if isinstance(spec, SquareWell):
        comps = [(spec.depth, 0, spec.radius, spec.center)]
    else:
        comps = [(b.amplitude, b.order, b.radius, b.center) for b in spec._bumps()]
    zz = np.sum(xi * xi, axis=1)
    w0 = np.sqrt(zz)
    for amp, m, a, center in comps:
        w = a * w0
        radial = 4.0 * math.pi * a**3 * (2.0**m) * math.factorial(m) \
            * spherical_jn_ratio(m + 1, w)
        phase = np.exp(1j * (xi @ np.asarray(center, dtype=float)))
        out += amp * radial * phase
    return out[0] if single else out


def radon_analytic(spec, beta: np.ndarray, lam) -> np.ndarray:
    """Plane integral over {x : beta.x = lam}, closed form (vector in lam)."""
    beta = np.asarray(beta, dtype=float)
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    out = np.zeros(lam.shape)
    if isinstance(spec, SquareWell):
        d = lam - beta @ np.asarray(spec.center)
        u = spec.radius**2 - d * d
        out += spec.depth * math.pi * np.where(u > 0.0, u, 0.0)
    else:
        for b in spec._bumps():
            d = lam - beta @ np.asarray(b.center)
            u = 1.0 - (d / b.radius) ** 2
            out += (b.amplitude * math.pi * b.radius**2 / (b.order + 1)
                    * np.where(u > 0.0, u, 0.0) ** (b.order + 1))
    return out if out.shape != (1,) else out


def support_interval(spec, beta: np.ndarray):
    """Range of beta.x over the support (the profile vanishes outside)."""
    beta = np.asarray(beta, dtype=float)
    if isinstance(spec, SquareWell):
        comps = [(spec.radius, spec.center)]
    else:
        comps = [(b.radius, b.center) for b in spec._bumps()]
    if not comps:
        return -1.0, 1.0
    lo = min(beta @ np.asarray(c) - a for a, c in comps)
    hi = max(beta @ np.asarray(c) + a for a, c in comps)
    return lo, hi


# ---------------------------------------------------------------------------
# Quadrature routes (independent of the closed forms)
# ---------------------------------------------------------------------------

def check_growth(spec, eta: float):
    if abs(eta) * spec.support_radius > ETA_TIMES_RADIUS_MAX:
        raise RangeError(
            f"eta * support_radius = {abs(eta) * spec.support_radius:.1f} "
            f"exceeds {ETA_TIMES_RADIUS_MAX} (exp overflow guard)")


def fourier_complex(spec, beta, freq: ComplexFrequency, shift=(0.0, 0.0, 0.0),
                    tol: float = 1e-8):
    """Fourier transform at (kappa + i*eta)*beta - shift by 3D quadrature.

    Adaptive tensor-Gauss integration of q(x) exp(i xi . x) over the
    bounding cube of the support; the initial split tracks the real
    oscillation so each starting cell spans about one period.
    """
    beta = np.asarray(beta, dtype=float)
    check_growth(spec, freq.eta)
    xi = freq.two_k() * beta - np.asarray(shift, dtype=float)
    r = spec.support_radius
    if r == 0.0:
        return 0.0 + 0.0j

    xi_re = xi.real
    xi_im = xi.imag

    def integrand(pts):
        phase = pts @ xi_re
        damp = pts @ xi_im
        return spec.evaluate(pts) * np.exp(1j * phase - damp)

    osc = np.max(np.abs(xi_re)) * 2.0 * r / (2.0 * math.pi)
    split = int(min(8, max(2, math.ceil(osc))))
    val, _ = adaptive_cube(integrand, [-r, -r, -r], [r, r, r], tol=tol,
                           order=6, init_split=split)
    return complex(val)


def radon_transform(spec, beta, lam: float, tol: float = 1e-8) -> float:
    """Plane integral by 2D quadrature in polar plane coordinates.

    Each radial component is integrated over its own trace disk with a
    tensor (rho, theta) Gauss rule, doubled until two successive orders
    agree within ``tol``.
    """
    beta = np.asarray(beta, dtype=float)
    beta = beta / np.linalg.norm(beta)
    e1, e2 = tangent_frame(beta)
    if isinstance(spec, SquareWell):
        comps = [(spec, spec.radius, spec.center)]
    else:
        comps = [(b, b.radius, b.center) for b in spec._bumps()]
    total = 0.0
    for comp, a, center in comps:
        center = np.asarray(center, dtype=float)
        d = lam - beta @ center
        if abs(d) >= a:
            continue
        disk_r = math.sqrt(a * a - d * d)
        foot = center + d * beta
        val_prev = None
        n_rho, n_th = 12, 8
        for _ in range(4):
            xr, wr = gauss_rule(n_rho)
            rho = 0.5 * disk_r * (xr + 1.0)
            wrho = 0.5 * disk_r * wr * rho
            th = (np.arange(n_th) + 0.5) * (2.0 * math.pi / n_th)
            wth = 2.0 * math.pi / n_th
            pts = (foot[None, None, :]
                   + rho[:, None, None] * np.cos(th)[None, :, None] * e1
                   + rho[:, None, None] * np.sin(th)[None, :, None] * e2)
            vals = comp.evaluate(pts.reshape(-1, 3)).reshape(n_rho, n_th)
            val = float(np.sum(vals @ np.full(n_th, wth) * wrho))
            if val_prev is not None and abs(val - val_prev) <= tol:
                break
            val_prev = val
            n_rho *= 2
            n_th *= 2
        total += val
    return total


# ---------------------------------------------------------------------------
# Grids
# ---------------------------------------------------------------------------

GRID_MAGIC = b"BSL1"
MIN_GRID_N = 8


@dataclass(frozen=True)
class PotentialGrid:
    """Immutable n^3 sample of a potential on cell centers of [-a, a]^3."""

    n: int
    a: float
    values: np.ndarray  # (n, n, n) float64, index order [ix, iy, iz]
    spec_hash: str = ""

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def h(self) -> float:
        return 2.0 * self.a / self.n

    def axis(self) -> np.ndarray:
        """Cell-center coordinates along one axis."""
        return -self.a + (np.arange(self.n) + 0.5) * self.h

    def points(self) -> np.ndarray:
        """All grid points, shape (n^3, 3), index order [ix, iy, iz]."""
        c = self.axis()
        return np.stack(np.meshgrid(c, c, c, indexing="ij"), axis=-1).reshape(-1, 3)

    def same_geometry(self, other: "PotentialGrid") -> bool:
        return self.n == other.n and self.a == other.a


def sample_grid(spec, n: int, a: float | None = None) -> PotentialGrid:
    """Sample a potential on the n^3 cell-center grid covering [-a, a]^3."""
    if n < MIN_GRID_N:
        raise ResolutionTooLow(f"grid needs n >= {MIN_GRID_N}, got {n}")
    if a is None:
        a = spec.support_radius
        if a == 0.0:
            a = 1.0
    if a < spec.support_radius:
        raise ValueError(
            f"grid half-width {a} smaller than support radius "
            f"{spec.support_radius}")
    h = 2.0 * a / n
    c = -a + (np.arange(n) + 0.5) * h
    pts = np.stack(np.meshgrid(c, c, c, indexing="ij"), axis=-1).reshape(-1, 3)
    vals = spec.evaluate(pts).reshape(n, n, n)
    return PotentialGrid(n=n, a=float(a), values=vals, spec_hash=spec_digest(spec))


def save_grid(grid: PotentialGrid, path):
    """Write a grid as flat binary: magic, n, a, then x-fastest float64."""
    with open(path, "wb") as fh:
        fh.write(GRID_MAGIC)
        fh.write(struct.pack("<q", grid.n))
        fh.write(struct.pack("<d", grid.a))
        fh.write(np.ascontiguousarray(
            grid.values.ravel(order="F"), dtype="<f8").tobytes())


def load_grid(path) -> PotentialGrid:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != GRID_MAGIC:
            raise ScenarioError(f"bad grid magic {magic!r}")
        n = struct.unpack("<q", fh.read(8))[0]
        a = struct.unpack("<d", fh.read(8))[0]
        data = np.frombuffer(fh.read(8 * n**3), dtype="<f8")
    values = data.reshape((n, n, n), order="F").copy()
    return PotentialGrid(n=int(n), a=float(a), values=values)


# ---------------------------------------------------------------------------
# Structured-text serialization
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def spec_to_text(spec) -> str:
    """Serialize a spec as key/value stanzas (one stanza per component)."""
    if isinstance(spec, BallIndicator):
        stanzas = [("ball", None, 1.0, spec.radius, spec.center)]
    elif isinstance(spec, SquareWell):
        stanzas = [("squarewell", None, spec.depth, spec.radius, spec.center)]
    else:
        stanzas = [("polybump", b.order, b.amplitude, b.radius, b.center)
                   for b in spec._bumps()]
    blocks = []
    for family, m, c, a, center in stanzas:
        lines = [f"family = {family}"]
        if m is not None:
            lines.append(f"m = {m}")
        lines.append(f"c = {_fmt(c)}")
        lines.append(f"a = {_fmt(a)}")
        lines.append("center = " + " ".join(_fmt(v) for v in center))
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def _parse_stanza(lines, base_line):
    kv = {}
    for off, raw in enumerate(lines):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ScenarioError(f"expected 'key = value', got {text!r}",
                                line=base_line + off)
        key, val = (s.strip() for s in text.split("=", 1))
        kv[key.lower()] = (val, base_line + off)
    if "family" not in kv:
        raise ScenarioError("missing 'family' key", line=base_line)
    family = kv["family"][0].lower()

    def get_float(key, default=None):
        if key not in kv:
            if default is None:
                raise ScenarioError(f"missing '{key}' key", line=base_line)
            return default
        val, line = kv[key]
        try:
            return float(val)
        except ValueError:
            raise ScenarioError(f"bad number for '{key}': {val!r}", line=line)

    center = (0.0, 0.0, 0.0)
    if "center" in kv:
        val, line = kv["center"]
        parts = val.replace(",", " ").split()
        if len(parts) != 3:
            raise ScenarioError(f"center needs 3 components, got {val!r}",
                                line=line)
        try:
            center = tuple(float(p) for p in parts)
        except ValueError:
            raise ScenarioError(f"bad center components: {val!r}", line=line)

    if family == "polybump":
        m_val, m_line = kv.get("m", ("4", base_line))
        try:
            m = int(m_val)
        except ValueError:
            raise ScenarioError(f"bad integer for 'm': {m_val!r}", line=m_line)
        return PolyBump(order=m, amplitude=get_float("c", 1.0),
                        radius=get_float("a"), center=center)
    if family == "squarewell":
        return SquareWell(depth=get_float("c", 1.0), radius=get_float("a"),
                          center=center)
    if family == "ball":
        return BallIndicator(radius=get_float("a"), center=center)
    raise ScenarioError(f"unknown family {family!r}", line=kv["family"][1])


def spec_from_text(text: str, first_line: int = 1):
    """Parse the stanza format; several stanzas form a sum of bumps."""
    lines = text.splitlines()
    stanzas = []
    current, start = [], None
    for idx, raw in enumerate(lines):
        if raw.split("#", 1)[0].strip():
            if start is None:
                start = idx
            current.append(raw)
        elif current:
            stanzas.append((current, start))
            current, start = [], None
    if current:
        stanzas.append((current, start))
    if not stanzas:
        raise ScenarioError("empty potential description", line=first_line)
    specs = [_parse_stanza(block, first_line + start) for block, start in stanzas]
    if len(specs) == 1:
        return specs[0]
    if not all(isinstance(s, PolyBump) for s in specs):
        raise ScenarioError("only polybump stanzas can be summed",
                            line=first_line)
    return SumOfBumps(tuple(specs))


def spec_digest(spec) -> str:
    """Content digest of the generating spec (stable across sessions)."""
    return hashlib.sha256(spec_to_text(spec).encode()).hexdigest()
