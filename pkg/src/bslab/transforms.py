"""Fourier and plane-integral identities, plus two-center coordinates.

Identity checkers return both routes and let the caller assert
closeness, so each route stays an independent oracle for the other.
The two-center (prolate spheroidal) map underpins the oscillatory
double-kernel integral in the estimate module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFoci
from .frequencies import ComplexFrequency
from .potentials import (PotentialGrid, SquareWell, fourier_complex, moment,
                         support_interval)
from .quadrature import adaptive_cube, adaptive_line, gauss_rule, tangent_frame
from .reporting import EstimateReport


# ---------------------------------------------------------------------------
# Plane-integral (Radon) profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadonProfile:
    """Samples of the plane integral along one direction."""

    beta: tuple
    lambdas: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.lambdas) <= 0):
            raise ValueError("lambdas must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("profile values must be finite")

    def to_csv(self, path):
        bx, by, bz = self.beta
        with open(path, "w") as fh:
            fh.write("beta_x,beta_y,beta_z,lambda,value\n")
            for lam, val in zip(self.lambdas, self.values):
                fh.write(f"{bx:.17g},{by:.17g},{bz:.17g},"
                         f"{lam:.17g},{val:.17g}\n")


def radon_batch(spec, beta, lams, n_rho: int = 12, n_th: int = 8) -> np.ndarray:
    """Plane integrals at many offsets by polar plane quadrature.

    The rho rule is exact for the polynomial radial profiles used here
    once 2*n_rho - 1 exceeds the profile degree; the theta rule is a
    plain periodic midpoint rule.
    """
    beta = np.asarray(beta, dtype=float)
    beta = beta / np.linalg.norm(beta)
    e1, e2 = tangent_frame(beta)
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    out = np.zeros(lams.shape)
    if isinstance(spec, SquareWell):
        comps = [(spec, spec.radius, spec.center)]
    else:
        comps = [(b, b.radius, b.center) for b in spec._bumps()]
    xr, wr = gauss_rule(n_rho)
    th = (np.arange(n_th) + 0.5) * (2.0 * math.pi / n_th)
    ring = np.cos(th)[:, None] * e1 + np.sin(th)[:, None] * e2  # (n_th, 3)
    for comp, a, center in comps:
        center = np.asarray(center, dtype=float)
        d = lams - beta @ center
        mask = np.abs(d) < a
        if not np.any(mask):
            continue
        dm = d[mask]
        disk_r = np.sqrt(a * a - dm * dm)  # (L,)
        rho = 0.5 * disk_r[:, None] * (xr + 1.0)[None, :]  # (L, n_rho)
        wrho = 0.5 * disk_r[:, None] * wr[None, :] * rho  # includes rho drho
        foot = center[None, :] + dm[:, None] * beta[None, :]  # (L, 3)
        pts = (foot[:, None, None, :]
               + rho[:, :, None, None] * ring[None, None, :, :])
        vals = comp.evaluate(pts.reshape(-1, 3)).reshape(rho.shape + (n_th,))
        contrib = np.sum(vals, axis=2) * (2.0 * math.pi / n_th)
        out[mask] += np.sum(contrib * wrho, axis=1)
    return out


def radon_profile(spec, beta, lambdas, n_rho: int = 12, n_th: int = 8) -> RadonProfile:
    beta = np.asarray(beta, dtype=float)
    beta = beta / np.linalg.norm(beta)
    vals = radon_batch(spec, beta, lambdas, n_rho=n_rho, n_th=n_th)
    return RadonProfile(beta=tuple(beta), lambdas=np.asarray(lambdas, float),
                        values=vals)


def radon_reflection_check(spec, beta, lam: float, tol: float = 1e-10):
    """Both sides of the point-reflection identity of the plane integral.

    The two values come from independent quadrature runs (the reflected
    direction gets its own tangent frame and node layout).
    """
    from .potentials import radon_transform
    beta = np.asarray(beta, dtype=float)
    return (radon_transform(spec, beta, lam, tol=tol),
            radon_transform(spec, -beta, -lam, tol=tol))


def volume_integral_quad(spec, tol: float = 1e-9) -> float:
    """Plain 3D quadrature of the potential (independent of `moment`)."""
    r = spec.support_radius
    if r == 0.0:
        return 0.0
    val, _ = adaptive_cube(lambda p: spec.evaluate(p),
                           [-r, -r, -r], [r, r, r], tol=tol, order=6,
                           init_split=2)
    return float(val.real)


def radon_moment_identity(spec, directions, tol: float = 1e-6) -> EstimateReport:
    """Check that every profile integrates to the volume integral."""
    vol = volume_integral_quad(spec)
    report = EstimateReport(name="radon_moment_identity", tolerance_used=tol)
    worst = 0.0
    for beta in np.atleast_2d(directions):
        lo, hi = support_interval(spec, beta)
        if hi <= lo:
            line = 0.0
        else:
            line, _ = adaptive_line(lambda lam, b=beta: radon_batch(spec, b, lam),
                                    lo, hi, tol=tol * 1e-2)
        rel = abs(line - vol) / max(1e-300, abs(vol)) if vol != 0 else abs(line)
        worst = max(worst, rel)
        report.add({"beta_x": beta[0], "beta_y": beta[1], "beta_z": beta[2]},
                   rel)
    report.details = {"volume_integral": vol, "max_relative_error": worst}
    report.passed = bool(worst < tol)
    return report


def fourier_slice_identity(spec, beta, k: float, tol: float = 1e-8):
    """Two routes to the 1D Fourier transform along a direction.

    Route one integrates exp(i k beta.x) against the potential over the
    volume; route two pushes the same oscillation through the plane
    profile.  Both are quadrature routes, independent of closed forms.
    """
    beta = np.asarray(beta, dtype=float)
    beta = beta / np.linalg.norm(beta)
    side_volume = fourier_complex(spec, beta, ComplexFrequency(kappa=abs(k)),
                                  tol=tol) if k >= 0 else \
        np.conj(fourier_complex(spec, -beta, ComplexFrequency(kappa=abs(k)),
                                tol=tol))
    lo, hi = support_interval(spec, beta)
    if hi <= lo:
        return 0.0 + 0.0j, 0.0 + 0.0j

    def integrand(lam):
        return np.exp(1j * k * lam) * radon_batch(spec, beta, lam)

    breaks = None
    if abs(k) * (hi - lo) > 2.0 * math.pi:
        m = int(abs(k) * (hi - lo) / math.pi) + 1
        breaks = np.linspace(lo, hi, m + 1)[1:-1]
    side_profile, _ = adaptive_line(integrand, lo, hi, tol=tol,
                                    breakpoints=breaks)
    return complex(side_volume), complex(side_profile)


def convolution_theorem_check(f, g, xi, tol: float = 1e-5):
    """Transform of a convolution vs the product of transforms.

    The left side nests two tensor-Gauss volume quadratures (outer over
    the convolution support, inner over one factor's support), doubled
    until stable; the right side multiplies two independently computed
    transforms.
    """
    xi = np.asarray(xi, dtype=float)
    rf, rg = f.support_radius, g.support_radius
    if rf == 0.0 or rg == 0.0:
        return 0.0 + 0.0j, 0.0 + 0.0j
    rh = rf + rg

    def lhs_value(n_out, n_in):
        xo, wo = gauss_rule(n_out)
        xi_in, wi = gauss_rule(n_in)
        out_axis = rh * xo
        in_axis = rg * xi_in
        opts = np.stack(np.meshgrid(out_axis, out_axis, out_axis,
                                    indexing="ij"), axis=-1).reshape(-1, 3)
        ipts = np.stack(np.meshgrid(in_axis, in_axis, in_axis,
                                    indexing="ij"), axis=-1).reshape(-1, 3)
        wout = (rh ** 3) * np.einsum("i,j,k->ijk", wo, wo, wo).ravel()
        win = (rg ** 3) * np.einsum("i,j,k->ijk", wi, wi, wi).ravel()
        gvals = g.evaluate(ipts) * win
        total = 0.0 + 0.0j
        chunk = max(1, 2_000_000 // len(ipts))
        for lo_i in range(0, len(opts), chunk):
            hi_i = min(lo_i + chunk, len(opts))
            diff = opts[lo_i:hi_i, None, :] - ipts[None, :, :]
            fv = f.evaluate(diff.reshape(-1, 3)).reshape(hi_i - lo_i, -1)
            conv = fv @ gvals
            total += np.sum(conv * wout[lo_i:hi_i]
                            * np.exp(1j * (opts[lo_i:hi_i] @ xi)))
        return total

    prev = lhs_value(10, 10)
    lhs = lhs_value(16, 14)
    if abs(lhs - prev) > 10 * tol:
        lhs = lhs_value(22, 18)

    def transform(spec):
        r = spec.support_radius
        def integrand(p):
            return spec.evaluate(p) * np.exp(1j * (p @ xi))
        osc = np.max(np.abs(xi)) * 2.0 * r / (2.0 * math.pi)
        val, _ = adaptive_cube(integrand, [-r] * 3, [r] * 3, tol=tol * 1e-2,
                               order=6, init_split=int(min(6, max(2, osc + 1))))
        return val

    rhs = transform(f) * transform(g)
    return complex(lhs), complex(rhs)


# ---------------------------------------------------------------------------
# Lattice transform (visualization only; verification uses quadrature)
# ---------------------------------------------------------------------------

def grid_fourier(grid: PotentialGrid, pad: int = 2):
    """Discrete transform of grid samples on a zero-padded lattice.

    Returns (frequency axes, transform values).  Intended for quick
    looks at spectra; all verification-grade transforms go through
    quadrature because complex frequencies never sit on this lattice.
    """
    if pad < 2:
        raise ValueError("padding factor must be >= 2")
    n, h = grid.n, grid.h
    big = pad * n
    padded = np.zeros((big, big, big), dtype=complex)
    padded[:n, :n, :n] = grid.values
    xi = 2.0 * math.pi * np.fft.fftfreq(big, d=h)
    x0 = grid.axis()[0]
    vals = np.fft.ifftn(padded) * (big ** 3) * (h ** 3)
    phase = np.exp(1j * xi * x0)
    vals *= phase[:, None, None] * phase[None, :, None] * phase[None, None, :]
    return xi, vals


def grid_fourier_inverse(xi, vals, n: int, h: float):
    """Invert `grid_fourier` back to the leading n^3 samples."""
    big = len(xi)
    x0 = -0.5 * n * h + 0.5 * h
    phase = np.exp(-1j * xi * x0)
    work = vals * (phase[:, None, None] * phase[None, :, None]
                   * phase[None, None, :])
    rec = np.fft.fftn(work) / (big ** 3) / (h ** 3)
    return rec[:n, :n, :n]


# ---------------------------------------------------------------------------
# Two-center (prolate spheroidal) coordinates
# ---------------------------------------------------------------------------

DEGENERATE_FOCI_DISTANCE = 1e-12


def spheroidal_frame(x, y):
    """Orthonormal frame whose first axis joins the foci.

    The second axis completes deterministically via the global z axis
    (or the x axis when the foci line is nearly parallel to z), so test
    fixtures are reproducible.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = x - y
    dist = np.linalg.norm(d)
    if dist < DEGENERATE_FOCI_DISTANCE:
        raise DegenerateFoci(f"|x - y| = {dist:.3e}")
    e1 = d / dist
    helper = np.array([0.0, 0.0, 1.0])
    if abs(e1 @ helper) > 0.99:
        helper = np.array([1.0, 0.0, 0.0])
    e2 = np.cross(helper, e1)
    e2 /= np.linalg.norm(e2)
    e3 = np.cross(e1, e2)
    return e1, e2, e3


def spheroidal_map(s: float, t: float, psi: float, x, y) -> np.ndarray:
    """Point with elliptic coordinates (s, t, psi) relative to foci x, y."""
    if s < 1.0:
        raise ValueError(f"s must be >= 1, got {s}")
    if abs(t) > 1.0:
        raise ValueError(f"t must lie in [-1, 1], got {t}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    e1, e2, e3 = spheroidal_frame(x, y)
    ell = 0.5 * np.linalg.norm(x - y)
    mid = 0.5 * (x + y)
    rho = math.sqrt(max(0.0, (s * s - 1.0) * (1.0 - t * t)))
    return (mid + ell * s * t * e1
            + ell * rho * (math.cos(psi) * e2 + math.sin(psi) * e3))


def spheroidal_map_many(s, t, psi, x, y) -> np.ndarray:
    """Vectorized map; s, t, psi are broadcastable arrays."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    e1, e2, e3 = spheroidal_frame(x, y)
    ell = 0.5 * np.linalg.norm(x - y)
    mid = 0.5 * (x + y)
    s, t, psi = np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float),
                                    np.asarray(psi, float))
    rho = np.sqrt(np.maximum(0.0, (s * s - 1.0) * (1.0 - t * t)))
    return (mid
            + (ell * s * t)[..., None] * e1
            + (ell * rho * np.cos(psi))[..., None] * e2
            + (ell * rho * np.sin(psi))[..., None] * e3)


def spheroidal_jacobian(s: float, t: float, ell: float) -> float:
    """Volume element ell^3 (s^2 - t^2) of the two-center map."""
    if s < 1.0:
        raise ValueError(f"s must be >= 1, got {s}")
    if abs(t) > 1.0:
        raise ValueError(f"t must lie in [-1, 1], got {t}")
    if ell <= 0.0:
        raise ValueError(f"ell must be > 0, got {ell}")
    return ell ** 3 * (s * s - t * t)


@dataclass(frozen=True)
class SpheroidalPoint:
    """Two-center coordinates of a point, with its foci."""

    s: float
    t: float
    psi: float
    ell: float
    x: tuple
    y: tuple

    def to_cartesian(self) -> np.ndarray:
        return spheroidal_map(self.s, self.t, self.psi, self.x, self.y)


def spheroidal_from_point(z, x, y) -> SpheroidalPoint:
    """Coordinates of a Cartesian point relative to foci x, y."""
    z = np.asarray(z, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    e1, e2, e3 = spheroidal_frame(x, y)
    ell = 0.5 * np.linalg.norm(x - y)
    d1 = np.linalg.norm(x - z)
    d2 = np.linalg.norm(z - y)
    s = (d1 + d2) / (2.0 * ell)
    t = (d1 - d2) / (2.0 * ell)
    rel = z - 0.5 * (x + y)
    psi = math.atan2(rel @ e3, rel @ e2) % (2.0 * math.pi)
    return SpheroidalPoint(s=float(s), t=float(np.clip(t, -1, 1)),
                           psi=float(psi), ell=float(ell),
                           x=tuple(x), y=tuple(y))


def integrate_spheroidal(f, x, y, s_max: float, n_s: int = 48, n_t: int = 32,
                         n_psi: int = 24):
    """Volume integral of f over the spheroid family s in [1, s_max].

    Tensor rule in (s, t, psi) with the two-center volume element; f
    receives an (N, 3) array of Cartesian points.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ell = 0.5 * np.linalg.norm(x - y)
    xs, ws = gauss_rule(n_s)
    xt, wt = gauss_rule(n_t)
    s = 1.0 + 0.5 * (s_max - 1.0) * (xs + 1.0)
    ws = 0.5 * (s_max - 1.0) * ws
    t = xt
    psi = (np.arange(n_psi) + 0.5) * (2.0 * math.pi / n_psi)
    wpsi = 2.0 * math.pi / n_psi
    S, T, P = np.meshgrid(s, t, psi, indexing="ij")
    pts = spheroidal_map_many(S, T, P, x, y)
    vals = np.asarray(f(pts.reshape(-1, 3))).reshape(S.shape)
    jac = ell ** 3 * (S * S - T * T)
    return np.einsum("ijk,i,j->", vals * jac, ws, wt) * wpsi
