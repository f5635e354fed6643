"""Oscillation fits, frequency-minimum location, and ellipse-center calibration.

Only the two models used by the experiments are provided: the damped
cosine ``A cos(2 pi f t + phi) exp(-(t/T_phi)^2) + A0`` for time traces,
and a local parabola for frequency-vs-voltage minima.  The equal-exchange
calibration map estimator exploits the two-fold point symmetry of the
ideal probability pattern instead of fitting conics, which stays robust
when the stripes are tilted or distorted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares


class NoOscillationError(ValueError):
    """The trace has no spectral peak above the noise floor."""


@dataclass(frozen=True)
class FitResult:
    """Damped-cosine parameters with 1-sigma uncertainties.

    Parameter order in ``covariance``: (a, f, phi, tphi, a0).
    ``a`` is the oscillation amplitude (non-negative), ``f`` the frequency
    in MHz, ``phi`` the phase in (-pi, pi], ``tphi`` the Gaussian decay
    time in ns, ``a0`` the offset.
    """

    a: float
    f: float
    phi: float
    tphi: float
    a0: float
    covariance: np.ndarray
    residual_rms: float

    @property
    def sigmas(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.covariance), 0, None))

    @property
    def visibility(self) -> float:
        """Peak-to-peak amplitude 2A of the undamped oscillation."""
        return 2 * self.a

    def to_flat_record(self) -> dict:
        sig = self.sigmas
        rec = {}
        for k, name in enumerate(("a", "f_mhz", "phi_rad", "tphi_ns", "a0")):
            rec[f"fit.{name}"] = float((self.a, self.f, self.phi, self.tphi, self.a0)[k])
            rec[f"fit.sigma_{name}"] = float(sig[k])
        rec["fit.residual_rms"] = float(self.residual_rms)
        return rec


def _model(t, a, f, phi, tphi, a0):
    return a * np.cos(2 * np.pi * 1e-3 * f * t + phi) * np.exp(-((t / tphi) ** 2)) + a0


def trace_to_csv(path, t_ns, p) -> None:
    """Write a (t_ns, probability) trace."""
    from .io import write_csv

    write_csv(path, {"t_ns": np.asarray(t_ns), "probability": np.asarray(p)})


def trace_from_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a (t_ns, probability) trace."""
    from .io import read_csv

    data = read_csv(path)
    return data["t_ns"], data["probability"]


def fit_trace_csv(path) -> FitResult:
    """Fit the damped cosine to a trace file."""
    return fit_damped_cosine(*trace_from_csv(path))


def _spectral_seed(t: np.ndarray, p: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """Dominant frequency (MHz) of the de-meaned trace via a dense DFT."""
    dt = np.median(np.diff(np.sort(t)))
    f_nyq = 0.5 / dt * 1e3  # MHz
    grid = np.linspace(0.0, f_nyq, max(512, 8 * len(t)))
    demeaned = p - p.mean()
    phases = np.exp(-2j * np.pi * 1e-3 * np.outer(grid, t))
    power = np.abs(phases @ demeaned)
    lo = max(2, int(0.01 * len(grid)))  # skip the DC shoulder
    peak = lo + int(np.argmax(power[lo:]))
    floor = 4.0 * np.median(power[lo:]) + 1e-12 * (abs(p).max() + 1.0) * len(t)
    if power[peak] <= floor:
        raise NoOscillationError("no spectral peak above the noise floor")
    return float(grid[peak]), grid, power


def fit_damped_cosine(t_ns, p) -> FitResult:
    """Least-squares fit of a Gaussian-damped cosine to a probability trace.

    Seeds the frequency from the dominant spectral peak and the remaining
    parameters from variable projection over a small decay-time grid, then
    polishes with bounded nonlinear least squares (gradient tolerance
    1e-10).  Requires at least 10 points spanning 1.5 periods of the
    dominant frequency.
    """
    t = np.asarray(t_ns, dtype=float).ravel()
    p = np.asarray(p, dtype=float).ravel()
    if t.shape != p.shape:
        raise ValueError("t and p must have matching length")
    if len(t) < 10:
        raise ValueError("need at least 10 points to fit")
    f0, _, _ = _spectral_seed(t, p)
    span = t.max() - t.min()
    if span * f0 * 1e-3 < 1.5:
        raise ValueError(
            f"trace spans {span * f0 * 1e-3:.2f} periods of the dominant "
            "frequency; need at least 1.5"
        )

    # variable projection: linear solve for (a cos, a sin, a0) on a seed grid
    best = None
    for f_try in f0 * np.array([0.97, 1.0, 1.03]):
        for tphi_try in [8 * span, 2 * span, span, span / 3]:
            env = np.exp(-((t / tphi_try) ** 2))
            theta = 2 * np.pi * 1e-3 * f_try * t
            design = np.column_stack([np.cos(theta) * env, -np.sin(theta) * env, np.ones_like(t)])
            coef, *_ = np.linalg.lstsq(design, p, rcond=None)
            rss = float(np.sum((design @ coef - p) ** 2))
            if best is None or rss < best[0]:
                best = (rss, f_try, tphi_try, coef)
    _, f_seed, tphi_seed, (c1, c2, a0_seed) = best
    a_seed = float(np.hypot(c1, c2))
    phi_seed = float(np.arctan2(c2, c1))

    scale = max(p.max() - p.min(), 1e-6)
    x0 = [max(a_seed, 1e-4 * scale), f_seed, phi_seed, tphi_seed, a0_seed]
    lower = [0.0, 0.0, -2 * np.pi, span * 1e-3, -np.inf]
    upper = [10 * scale, 2 * f0 + 0.5 / (np.median(np.diff(np.sort(t)))) * 1e3, 2 * np.pi, 1e12, np.inf]
    x0 = np.clip(x0, lower, upper)

    res = least_squares(
        lambda x: _model(t, *x) - p,
        x0=x0,
        bounds=(lower, upper),
        gtol=1e-10,
        xtol=1e-12,
        ftol=1e-12,
        max_nfev=2000,
    )
    a, f, phi, tphi, a0 = res.x
    phi = float((phi + np.pi) % (2 * np.pi) - np.pi)

    dof = max(len(t) - 5, 1)
    sigma2 = 2 * res.cost / dof
    jtj = res.jac.T @ res.jac
    cov = sigma2 * np.linalg.pinv(jtj)
    rms = float(np.sqrt(np.mean(res.fun**2)))
    return FitResult(float(a), float(f), phi, float(tphi), float(a0), cov, rms)


@dataclass(frozen=True)
class FrequencyMinimum:
    dv_star: float
    f_min: float
    curvature: float  # MHz per mV^2


def find_frequency_minimum(sweep) -> FrequencyMinimum:
    """Vertex of a local parabola through (voltage, frequency) sweep points.

    ``sweep`` is a sequence of (dv_mv, frequency) with frequency either a
    float or a :class:`FitResult`.  Needs at least 5 points bracketing an
    interior minimum.
    """
    dv = np.array([s[0] for s in sweep], dtype=float)
    f = np.array([s[1].f if isinstance(s[1], FitResult) else float(s[1]) for s in sweep])
    order = np.argsort(dv)
    dv, f = dv[order], f[order]
    if len(dv) < 5:
        raise ValueError("need at least 5 sweep points")
    imin = int(np.argmin(f))
    if imin in (0, len(dv) - 1):
        raise ValueError("frequency minimum is not bracketed by the sweep")
    lo, hi = max(0, imin - 4), min(len(dv), imin + 5)
    c2, c1, c0 = np.polyfit(dv[lo:hi], f[lo:hi], 2)
    if c2 <= 0:
        raise ValueError("local fit is not convex; no interior minimum")
    dv_star = -c1 / (2 * c2)
    if not (dv[0] <= dv_star <= dv[-1]):
        raise ValueError("parabola vertex falls outside the sweep range")
    return FrequencyMinimum(float(dv_star), float(c0 - c1**2 / (4 * c2)), float(c2))


@dataclass(frozen=True)
class CalibrationMap:
    """Probability map on a rectangular (dvx, dvy) voltage lattice.

    ``values[i, j]`` corresponds to ``(dvx[i], dvy[j])``.
    """

    dvx: np.ndarray
    dvy: np.ndarray
    values: np.ndarray
    t_ns: float = 0.0

    def __post_init__(self):
        dvx = np.asarray(self.dvx, dtype=float)
        dvy = np.asarray(self.dvy, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if values.shape != (len(dvx), len(dvy)):
            raise ValueError("values must have shape (len(dvx), len(dvy))")
        for g in (dvx, dvy):
            if len(g) < 3 or np.ptp(np.diff(g)) > 1e-9 * max(1.0, np.ptp(g)):
                raise ValueError("grids must be uniform with at least 3 points")
        for arr in (dvx, dvy, values):
            arr.setflags(write=False)
        object.__setattr__(self, "dvx", dvx)
        object.__setattr__(self, "dvy", dvy)
        object.__setattr__(self, "values", values)

    def to_csv(self, path) -> None:
        from .io import write_csv

        xx, yy = np.meshgrid(self.dvx, self.dvy, indexing="ij")
        write_csv(path, {
            "dvx_mv": xx.ravel(),
            "dvy_mv": yy.ravel(),
            "probability": self.values.ravel(),
        })

    @classmethod
    def from_csv(cls, path, t_ns: float = 0.0) -> "CalibrationMap":
        from .io import read_csv

        data = read_csv(path)
        dvx = np.unique(data["dvx_mv"])
        dvy = np.unique(data["dvy_mv"])
        values = np.full((len(dvx), len(dvy)), np.nan)
        ix = np.searchsorted(dvx, data["dvx_mv"])
        iy = np.searchsorted(dvy, data["dvy_mv"])
        values[ix, iy] = data["probability"]
        if np.isnan(values).any():
            raise ValueError("map CSV does not cover a full rectangular grid")
        return cls(dvx=dvx, dvy=dvy, values=values, t_ns=t_ns)


@dataclass(frozen=True)
class EllipseCenter:
    center: tuple[float, float]
    uncertainty: tuple[float, float]
    score: float


def _reflection_score(v: np.ndarray, ci2: int, cj2: int) -> tuple[float, int]:
    """Pearson correlation of the map with its point reflection about (ci2/2, cj2/2)."""
    nx, ny = v.shape
    i0, i1 = max(0, ci2 - (nx - 1)), min(nx - 1, ci2)
    j0, j1 = max(0, cj2 - (ny - 1)), min(ny - 1, cj2)
    if i1 < i0 or j1 < j0:
        return -np.inf, 0
    a = v[i0 : i1 + 1, j0 : j1 + 1]
    b = v[ci2 - i1 : ci2 - i0 + 1, cj2 - j1 : cj2 - j0 + 1][::-1, ::-1]
    n = a.size
    if n < 16:
        return -np.inf, n
    da, db = a - a.mean(), b - b.mean()
    denom = np.sqrt(np.sum(da**2) * np.sum(db**2))
    if denom == 0:
        return -np.inf, n
    return float(np.sum(da * db) / denom), n


def find_ellipse_center(cal_map: CalibrationMap, min_overlap: float = 0.25) -> EllipseCenter:
    """Estimate the symmetry center of a fixed-time probability map.

    Maximizes the autocorrelation under point reflection over a half-step
    center lattice, then refines the peak with a local parabola.  The
    reported uncertainty is the half-width at half the peak prominence.
    Raises if no reflection point correlates above 0.2.
    """
    v = cal_map.values
    nx, ny = v.shape
    total = v.size
    scores = np.full((2 * nx - 1, 2 * ny - 1), -np.inf)
    for ci2 in range(2 * nx - 1):
        for cj2 in range(2 * ny - 1):
            s, n = _reflection_score(v, ci2, cj2)
            if n >= min_overlap * total:
                scores[ci2, cj2] = s
    if not np.isfinite(scores).any():
        raise ValueError("map too small for a symmetric-overlap search")
    best = np.unravel_index(np.nanargmax(np.where(np.isfinite(scores), scores, np.nan)), scores.shape)
    s_max = scores[best]
    if s_max < 0.2:
        raise ValueError("no point-symmetric structure found in the map")

    finite = scores[np.isfinite(scores)]
    baseline = float(np.median(finite))
    prominence = max(s_max - baseline, 1e-6)

    step_x = cal_map.dvx[1] - cal_map.dvx[0]
    step_y = cal_map.dvy[1] - cal_map.dvy[0]

    center = []
    sigma = []
    for axis, (idx, step, grid) in enumerate(
        [(best[0], step_x, cal_map.dvx), (best[1], step_y, cal_map.dvy)]
    ):
        line = scores[:, best[1]] if axis == 0 else scores[best[0], :]
        delta, curv = _parabolic_refine(line, idx)
        pos = grid[0] + (idx + delta) * step / 2  # half-step lattice
        center.append(float(pos))
        if curv > 0:
            half_width = np.sqrt(prominence / (2 * curv)) * step / 2
        else:
            half_width = step
        sigma.append(float(half_width))

    return EllipseCenter(center=tuple(center), uncertainty=tuple(sigma), score=float(s_max))


def _parabolic_refine(line: np.ndarray, idx: int) -> tuple[float, float]:
    """Sub-step peak offset and curvature from the three points around idx."""
    if idx == 0 or idx == len(line) - 1:
        return 0.0, 0.0
    y0, y1, y2 = line[idx - 1], line[idx], line[idx + 1]
    if not (np.isfinite(y0) and np.isfinite(y2)):
        return 0.0, 0.0
    denom = y0 - 2 * y1 + y2
    if denom >= 0:
        return 0.0, 0.0
    delta = 0.5 * (y0 - y2) / denom
    return float(np.clip(delta, -0.5, 0.5)), float(-denom / 2)
