"""Time evolution under pulse sequences, quasi-static dephasing, and closed-form dynamics.

Phase convention: a level at energy f (MHz) accumulates phase
``2*pi * f * t * 1e-3`` over a time t (ns); propagators are
``U = exp(-i * 2*pi*1e-3 * H * t)`` evaluated by exact eigendecomposition.

Linear ramps interpolate gate voltages linearly, so each exchange coupling
moves geometrically (exponentially) between its endpoints; a linear-in-J
ramp is available behind ``mode="linear"`` for sensitivity studies.  Ramps
are discretized into n piecewise-constant steps with n doubled until the
final state moves by less than ``ramp_tol``, up to a hard step cap.

Quasi-static noise: each trajectory draws one Gaussian frequency offset
(std ``sigma_f``) and scales every exchange coupling by the common factor
``1 + offset/f_ref``, which shifts any exchange-set oscillation frequency
by the drawn offset (all such frequencies are degree-1 homogeneous in the
couplings).  ``f_ref`` defaults to the singlet-singlet frequency of the
dwell configuration.  Ramp segments are evaluated at nominal couplings;
only constant-coupling segments are rescaled per trajectory.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .basis import Basis, SpinState, subspace_projector
from .hamiltonians import (
    ExchangeConfig,
    ZeemanConfig,
    heisenberg_full,
    singlet_block,
    zeeman_full,
    _BOND_OPS,
)
from .basis import Pair

W2PI = 2 * np.pi * 1e-3  # rad per (MHz * ns)
_SQRT3 = np.sqrt(3.0)

#: Duration of the pair singlet -> T- rotation step in the hardware pulse
#: pattern; the pairs are decoupled during this step, so it contributes no
#: four-spin phase and is kept for structural fidelity of sequences.
T_PI_NS = 300.0

RAMP_STEP_CAP = 2**20


class RampConvergenceError(RuntimeError):
    """Ramp discretization did not converge within the step cap."""


def evolve(state: SpinState, h: np.ndarray, t_ns: float) -> SpinState:
    """Propagate a state under a constant Hermitian Hamiltonian (MHz) for t (ns)."""
    h = np.asarray(h)
    if h.shape != (state.basis.dim, state.basis.dim):
        raise ValueError(
            f"Hamiltonian shape {h.shape} does not match state basis {state.basis.name}"
        )
    w, v = np.linalg.eigh(h)
    amps = v @ (np.exp(-1j * W2PI * w * t_ns) * (v.conj().T @ state.amplitudes))
    return SpinState(state.basis, amps, norm_tolerance=state.norm_tolerance)


# ---------------------------------------------------------------------------
# closed-form predictions for the singlet subspace


def f_ss(jx: float, jy: float) -> float:
    """Singlet-singlet oscillation frequency sqrt(jx^2 + jy^2 - jx*jy), MHz."""
    if jx < 0 or jy < 0:
        raise ValueError("couplings must be non-negative")
    if jx == 0 and jy == 0:
        raise ValueError("oscillation frequency undefined at jx = jy = 0")
    return float(np.sqrt(jx**2 + jy**2 - jx * jy))


def mixing_angle(jx: float, jy: float) -> float:
    """Polar angle of the singlet-subspace Hamiltonian axis, radians.

    cos(theta) = (-2 jx + jy) / (2 h0), sin(theta) = sqrt(3) jy / (2 h0)
    with 2 h0 the eigen-gap; equal exchange gives theta = 120 degrees.
    """
    gap = f_ss(jx, jy)
    return float(np.arctan2(_SQRT3 * jy / (2 * gap), (-2 * jx + jy) / (2 * gap)))


def visibilities(jx: float, jy: float) -> tuple[float, float]:
    """Peak-to-peak oscillation visibilities (vx, vy) after a diabatic singlet start.

    vx = 3 jy^2 / (4 (jx^2 - jx jy + jy^2)), vy = 3 jx jy / (4 (...)); both
    in [0, 1], and the two readout directions oscillate in phase opposition.
    """
    d = f_ss(jx, jy) ** 2
    return float(3 * jy**2 / (4 * d)), float(3 * jx * jy / (4 * d))


def singlet_singlet_probabilities(jx, jy, t_ns, sigma_f: float = 0.0):
    """(P_horizontal, P_vertical) singlet-singlet probabilities vs time.

    Closed form for a diabatic start in the horizontal singlet product: the
    return probability is ``1 - (vx/2)(1 - cos wt)`` and the swapped one is
    ``1/4 + (vy/2)(1 - cos wt)``.  A nonzero ``sigma_f`` (MHz) applies the
    Gaussian quasi-static envelope exp(-(t/T_phi)^2) to the cosine.
    """
    t = np.asarray(t_ns, dtype=float)
    vx, vy = visibilities(jx, jy)
    osc = np.cos(W2PI * f_ss(jx, jy) * t)
    if sigma_f > 0:
        osc = osc * np.exp(-((t / tphi_from_sigma(sigma_f)) ** 2))
    px = 1 - vx / 2 * (1 - osc)
    py = 0.25 + vy / 2 * (1 - osc)
    return px, py


def ground_state_probabilities(jx: float, jy: float) -> tuple[float, float]:
    """Singlet-singlet readout probabilities of the exchange ground state.

    P_horizontal = 1/2 - (-2 jx + jy) / (4 gap),
    P_vertical   = 1/2 + (-jx + 2 jy) / (4 gap),  gap = f_ss(jx, jy).
    Both equal 3/4 at equal exchange.
    """
    gap = f_ss(jx, jy)
    px = 0.5 - (-2 * jx + jy) / (4 * gap)
    py = 0.5 + (-jx + 2 * jy) / (4 * gap)
    return float(px), float(py)


# ---------------------------------------------------------------------------
# closed-form predictions for the m = -1 triplet subspace


def f_st_perturbative(j: ExchangeConfig) -> float:
    """Singlet/triplet swap frequency jy/2 + dx^2/jy + dy^2/(2 jx), MHz.

    Second-order result, valid away from jx = jy; the residual error
    against the exact 3-level gap scales as O(delta^4).  Raises in the
    degenerate regime, where :func:`p_st_degenerate` applies instead.
    """
    jx, jy, dx, dy = j.jx, j.jy, j.delta_x, j.delta_y
    if jx <= 0 or jy <= 0:
        raise ValueError("perturbative frequency needs positive jx, jy")
    if dx == 0 and dy == 0:
        return jy / 2
    guard = max(dx**2, dy**2) / (abs(jx - jy) * min(jx, jy)) if jx != jy else np.inf
    if guard >= 0.1:
        raise ValueError(
            "degenerate regime (imbalance comparable to |jx - jy|); "
            "use p_st_degenerate"
        )
    return float(jy / 2 + dx**2 / jy + dy**2 / (2 * jx))


def degenerate_frequencies(j_mhz: float, delta_x: float, delta_y: float) -> dict[str, float]:
    """Spectral lines of the equal-exchange triplet-subspace oscillation (MHz).

    Returns the two dominant lines ``f1 <= f2``, their slow ``beat``
    (f2 - f1)/2 ~ (dx^2 + dy^2)/(4 J), and the ``fast`` carrier (f1 + f2)/2.
    """
    r = np.sqrt(j_mhz**2 + 4 * delta_x**2 + 4 * delta_y**2)
    f1 = (j_mhz + r) / 4
    f2 = r / 2
    return {
        "f1": float(f1),
        "f2": float(f2),
        "beat": float((f2 - f1) / 2),
        "fast": float((f1 + f2) / 2),
        "low": float(f2 - f1),
    }


def p_st_degenerate(j_mhz: float, delta_x: float, delta_y: float, t_ns):
    """Survival probability of the singlet/T- product at equal exchange jx = jy = J.

    Exact three-frequency closed form: the initial state splits over the
    three levels with weights p_k, and P(t) = |sum_k p_k exp(-i w_k t)|^2.
    The oscillation carries a beating envelope at (dx^2+dy^2)/(4J); with
    both imbalances zero it reduces to (1 + cos(2 pi (J/2) t)) / 2.
    """
    if j_mhz <= 0:
        raise ValueError("exchange must be positive")
    t = np.asarray(t_ns, dtype=float)
    rho2 = delta_x**2 + delta_y**2
    if rho2 == 0:
        return 0.5 * (1 + np.cos(W2PI * (j_mhz / 2) * t))
    r = np.sqrt(j_mhz**2 + 4 * rho2)
    e_g = (-3 * j_mhz - r) / 4
    e_1 = -j_mhz / 2
    e_2 = (-3 * j_mhz + r) / 4
    p_g = (2 * delta_x + j_mhz + r) ** 2 / (4 * r * (r + j_mhz))
    p_1 = delta_y**2 / (2 * rho2)
    p_2 = (2 * delta_x + j_mhz - r) ** 2 / (4 * r * (r - j_mhz))
    amp = (
        p_g * np.exp(-1j * W2PI * e_g * t)
        + p_1 * np.exp(-1j * W2PI * e_1 * t)
        + p_2 * np.exp(-1j * W2PI * e_2 * t)
    )
    return np.abs(amp) ** 2


# ---------------------------------------------------------------------------
# quasi-static dephasing


def tphi_from_sigma(sigma_f: float) -> float:
    """Gaussian dephasing time (ns) of quasi-static frequency noise sigma_f (MHz)."""
    if sigma_f <= 0:
        raise ValueError("sigma_f must be positive")
    return np.sqrt(2.0) / (2 * np.pi * sigma_f * 1e-3)


def sigma_from_tphi(tphi_ns: float) -> float:
    """Quasi-static frequency noise std (MHz) producing a given T_phi (ns)."""
    if tphi_ns <= 0:
        raise ValueError("tphi must be positive")
    return np.sqrt(2.0) / (2 * np.pi * tphi_ns * 1e-3)


@dataclass(frozen=True)
class NoiseModel:
    """Quasi-static Gaussian frequency noise: one offset draw per trajectory.

    ``sigma_f`` is the std (MHz) of the resulting oscillation-frequency
    offset.  Draws are counter-based per (seed, trajectory index), so
    ensembles are reproducible regardless of execution order.
    """

    sigma_f: float
    n_samples: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.sigma_f < 0:
            raise ValueError("sigma_f must be non-negative")
        if self.n_samples < 1:
            raise ValueError("n_samples must be at least 1")

    def frequency_offsets(self) -> np.ndarray:
        """The n_samples static frequency offsets (MHz)."""
        draws = np.empty(self.n_samples)
        for k in range(self.n_samples):
            key = np.array([self.seed & 0xFFFFFFFFFFFFFFFF, k], dtype=np.uint64)
            rng = np.random.Generator(np.random.Philox(key=key))
            draws[k] = rng.standard_normal()
        return self.sigma_f * draws


def dephasing_envelope(noise: NoiseModel, t_ns) -> np.ndarray:
    """Ensemble-averaged cosine attenuation <cos(2 pi df t)> at time t (ns).

    Converges to exp(-(t/T_phi)^2) with T_phi = sqrt(2)/(2 pi sigma_f 1e-3)
    at the Monte-Carlo rate ~3/sqrt(n_samples).
    """
    t = np.atleast_1d(np.asarray(t_ns, dtype=float))
    if noise.sigma_f == 0:
        out = np.ones_like(t)
    else:
        offsets = noise.frequency_offsets()
        out = np.cos(W2PI * np.outer(offsets, t)).mean(axis=0)
    return out if np.ndim(t_ns) else float(out[0])


# ---------------------------------------------------------------------------
# pulse sequences


class SegmentKind(enum.Enum):
    SET_DIABATIC = "diabatic"
    LINEAR_RAMP = "ramp"
    HOLD = "hold"
    EXCHANGE_PULSE = "pulse"


@dataclass(frozen=True)
class PulseSegment:
    """One step of a pulse sequence.

    ``SET_DIABATIC``, ``HOLD`` and ``EXCHANGE_PULSE`` evolve under the
    target couplings for ``duration`` ns (0 means an instantaneous switch).
    ``LINEAR_RAMP`` interpolates from the previous segment's couplings to
    the target over ``duration``; ``ramp_mode`` "voltage" moves each
    coupling geometrically (linear gate voltage), "linear" moves it
    linearly.
    """

    kind: SegmentKind
    target: ExchangeConfig
    duration: float = 0.0
    ramp_mode: str = "voltage"

    def __post_init__(self):
        if self.duration < 0:
            raise ValueError("segment duration must be non-negative")
        if self.ramp_mode not in ("voltage", "linear"):
            raise ValueError("ramp_mode must be 'voltage' or 'linear'")


def set_diabatic(target: ExchangeConfig, duration: float = 0.0) -> PulseSegment:
    return PulseSegment(SegmentKind.SET_DIABATIC, target, duration)


def hold(target: ExchangeConfig, duration: float) -> PulseSegment:
    return PulseSegment(SegmentKind.HOLD, target, duration)


def exchange_pulse(target: ExchangeConfig, duration: float) -> PulseSegment:
    return PulseSegment(SegmentKind.EXCHANGE_PULSE, target, duration)


def linear_ramp(target: ExchangeConfig, duration: float, mode: str = "voltage") -> PulseSegment:
    return PulseSegment(SegmentKind.LINEAR_RAMP, target, duration, ramp_mode=mode)


@dataclass(frozen=True)
class PulseSequence:
    """Initial state, ordered segments, and an optional dwell-time grid.

    With ``dwell_times`` set, the final segment must be a HOLD whose
    duration is swept over the grid; the result then holds one state per
    dwell time.
    """

    init: SpinState
    segments: tuple[PulseSegment, ...]
    dwell_times: tuple[float, ...] | None = None

    def __post_init__(self):
        segments = tuple(self.segments)
        object.__setattr__(self, "segments", segments)
        if not segments:
            raise ValueError("sequence needs at least one segment")
        if segments[0].kind is SegmentKind.LINEAR_RAMP:
            raise ValueError("a ramp cannot be the first segment (no starting couplings)")
        if self.dwell_times is not None:
            dw = tuple(float(t) for t in self.dwell_times)
            if any(t < 0 for t in dw):
                raise ValueError("dwell times must be non-negative")
            if segments[-1].kind is not SegmentKind.HOLD:
                raise ValueError("a dwell grid sweeps the final segment, which must be a HOLD")
            object.__setattr__(self, "dwell_times", dw)


@dataclass(frozen=True)
class SequenceResult:
    """States returned by :func:`run_sequence`.

    ``states`` has shape (n_dwell, dim) without noise and
    (n_samples, n_dwell, dim) with noise; without a dwell grid the n_dwell
    axis is 1.
    """

    basis: Basis
    states: np.ndarray
    dwell_times: np.ndarray | None
    scale_factors: np.ndarray | None = None

    @property
    def noisy(self) -> bool:
        return self.states.ndim == 3

    def states_full(self) -> np.ndarray:
        """States lifted to the full 16-dim basis."""
        if self.basis is Basis.FULL16:
            return self.states
        lift = subspace_projector(self.basis).conj().T
        return self.states @ lift.T


_BOND_STACK = np.stack(
    [_BOND_OPS[Pair.Q12], _BOND_OPS[Pair.Q34], _BOND_OPS[Pair.Q23], _BOND_OPS[Pair.Q14]]
)


def _interp_bonds(b0: np.ndarray, b1: np.ndarray, s: np.ndarray, mode: str) -> np.ndarray:
    """Per-bond coupling schedule along the ramp, shape (n, 4)."""
    if mode == "linear":
        return b0 + np.outer(s, b1 - b0)
    out = np.empty((len(s), 4))
    floor = 1e-12
    for b in range(4):
        if b0[b] > floor and b1[b] > floor:
            out[:, b] = b0[b] * (b1[b] / b0[b]) ** s
        else:
            # a coupling pinned at zero has no finite-voltage representation;
            # fall back to a linear move for that bond
            out[:, b] = b0[b] + s * (b1[b] - b0[b])
    return out


def _chunked_ordered_product(unitaries_iter, dim: int) -> np.ndarray:
    """Product U_{n-1} ... U_1 U_0 from an iterator of (chunk, dim, dim) arrays."""
    total = np.eye(dim, dtype=complex)
    for chunk in unitaries_iter:
        m = chunk
        while m.shape[0] > 1:
            if m.shape[0] % 2:
                tail = m[-1]
                m = m[1:-1:2] @ m[0:-1:2]
                m = np.concatenate([m, tail[None]])
            else:
                m = m[1::2] @ m[0::2]
        total = m[0] @ total
    return total


def _ramp_unitary_once(
    bonds0, bonds1, duration, n, mode, use2d, zeeman_h=None, chunk=1 << 14
) -> np.ndarray:
    dt = duration / n
    dim = 2 if use2d else 16

    def chunks():
        for start in range(0, n, chunk):
            k = np.arange(start, min(start + chunk, n))
            s = (k + 0.5) / n
            jb = _interp_bonds(bonds0, bonds1, s, mode)
            if use2d:
                jx, jy = jb[:, 0] + jb[:, 1], jb[:, 2] + jb[:, 3]
                a = 0.5 * (-jx - jy / 4 - 0.75 * jy)
                hz = 0.5 * (-jx - jy / 4 + 0.75 * jy)
                hx = _SQRT3 / 4 * jy
                h0 = np.hypot(hz, hx)
                theta = W2PI * h0 * dt
                sinc = np.where(h0 > 0, np.sin(theta) / np.where(h0 > 0, h0, 1.0), W2PI * dt)
                u = np.empty((len(k), 2, 2), dtype=complex)
                u[:, 0, 0] = np.cos(theta) - 1j * sinc * hz
                u[:, 1, 1] = np.cos(theta) + 1j * sinc * hz
                u[:, 0, 1] = -1j * sinc * hx
                u[:, 1, 0] = u[:, 0, 1]
                u *= np.exp(-1j * W2PI * a * dt)[:, None, None]
            else:
                h = np.einsum("kb,bij->kij", jb, _BOND_STACK)
                if zeeman_h is not None:
                    h = h + zeeman_h
                tr = np.trace(h, axis1=1, axis2=2).real / 16
                h = h - tr[:, None, None] * np.eye(16)
                w, v = np.linalg.eigh(h)
                phases = np.exp(-1j * W2PI * (w + tr[:, None]) * dt)
                u = (v * phases[:, None, :]) @ np.conj(np.swapaxes(v, 1, 2))
            yield u

    return _chunked_ordered_product(chunks(), dim)


def _ramp_unitary(
    bonds0,
    bonds1,
    duration,
    mode,
    use2d,
    probe_state,
    zeeman_h=None,
    tol=1e-9,
    step_cap=RAMP_STEP_CAP,
):
    """Adaptive piecewise-constant ramp propagator, doubling n until converged."""
    if duration == 0:
        return np.eye(2 if use2d else 16, dtype=complex)
    n = 64
    u_prev = _ramp_unitary_once(bonds0, bonds1, duration, n, mode, use2d, zeeman_h)
    psi_prev = u_prev @ probe_state
    while n < step_cap:
        n *= 2
        u = _ramp_unitary_once(bonds0, bonds1, duration, n, mode, use2d, zeeman_h)
        psi = u @ probe_state
        if np.linalg.norm(psi - psi_prev) < tol:
            return u
        u_prev, psi_prev = u, psi
    raise RampConvergenceError(
        f"ramp discretization did not reach {tol} within {step_cap} steps"
    )


def _segment_hamiltonian(config: ExchangeConfig, use2d: bool, zeeman_h):
    if use2d:
        return singlet_block(config.jx, config.jy)
    h = heisenberg_full(config)
    return h if zeeman_h is None else h + zeeman_h


def _in_singlet_span(vec: np.ndarray) -> bool:
    p = subspace_projector(Basis.GLOBAL_SINGLET_2)
    coords = p @ vec
    return np.linalg.norm(p.conj().T @ coords - vec) < 1e-10


def _balanced(config: ExchangeConfig) -> bool:
    return abs(config.delta_x) < 1e-12 and abs(config.delta_y) < 1e-12


def run_sequence(
    seq: PulseSequence,
    noise: NoiseModel | None = None,
    *,
    zeeman: ZeemanConfig | None = None,
    subspace: str = "auto",
    ramp_tol: float = 1e-9,
    ramp_step_cap: int = RAMP_STEP_CAP,
    noise_reference_mhz: float | None = None,
) -> SequenceResult:
    """Run a pulse sequence, optionally over a quasi-static noise ensemble.

    ``subspace="auto"`` evolves inside the 2-dim global-singlet block when
    the initial state lies in it, every segment is pair-balanced, and no
    Zeeman term is present (exact, and much faster for long ramps);
    "full"/"singlet" force the choice.  Results keep the basis of the
    initial state.

    With ``noise``, every constant-coupling segment is rescaled per
    trajectory by ``1 + offset/f_ref`` (see the module docstring);
    ramps run at nominal couplings.
    """
    init = seq.init
    zeeman_h = zeeman_full(zeeman) if zeeman is not None else None

    if subspace not in ("auto", "full", "singlet"):
        raise ValueError("subspace must be auto, full, or singlet")
    eligible = (
        zeeman is None
        and all(_balanced(s.target) for s in seq.segments)
        and (
            init.basis is Basis.GLOBAL_SINGLET_2
            or (init.basis is Basis.FULL16 and _in_singlet_span(init.amplitudes))
        )
    )
    if subspace == "singlet" and not eligible:
        raise ValueError("sequence is not confined to the global-singlet subspace")
    use2d = eligible if subspace == "auto" else subspace == "singlet"

    if init.basis is Basis.GLOBAL_SINGLET_2 and not use2d:
        psi0 = subspace_projector(Basis.GLOBAL_SINGLET_2).conj().T @ init.amplitudes
    elif init.basis is Basis.FULL16 and use2d:
        psi0 = subspace_projector(Basis.GLOBAL_SINGLET_2) @ init.amplitudes
    elif init.basis in (Basis.FULL16, Basis.GLOBAL_SINGLET_2):
        psi0 = init.amplitudes.copy()
    else:
        raise ValueError("sequences run on FULL16 or GLOBAL_SINGLET_2 states")

    if seq.dwell_times is not None:
        prefix, dwell_seg = seq.segments[:-1], seq.segments[-1]
        dwell = np.asarray(seq.dwell_times, dtype=float)
    else:
        prefix, dwell_seg = seq.segments, None
        dwell = None

    if noise is not None:
        if noise_reference_mhz is not None:
            f_ref = noise_reference_mhz
        else:
            ref_cfg = (dwell_seg or seq.segments[-1]).target
            f_ref = f_ss(ref_cfg.jx, ref_cfg.jy)
        if f_ref <= 0:
            raise ValueError("noise needs a positive reference frequency")
        lam = np.maximum(1.0 + noise.frequency_offsets() / f_ref, 0.0)
    else:
        lam = None

    # states: (n_samples, dim); noiseless runs carry a single row
    states = np.tile(psi0, (len(lam) if lam is not None else 1, 1))

    prev_cfg = None
    for seg in prefix:
        if seg.kind is SegmentKind.LINEAR_RAMP:
            if prev_cfg is None:
                raise ValueError("ramp without a preceding configuration")
            u = _ramp_unitary(
                prev_cfg.as_array(),
                seg.target.as_array(),
                seg.duration,
                seg.ramp_mode,
                use2d,
                probe_state=states[0],
                zeeman_h=zeeman_h,
                tol=ramp_tol,
                step_cap=ramp_step_cap,
            )
            states = states @ u.T
            # the product of up to 2^20 exact step unitaries accumulates
            # float roundoff in the norm; renormalize to keep the 1e-12
            # norm contract on returned states
            states /= np.linalg.norm(states, axis=-1, keepdims=True)
        elif seg.duration > 0:
            h = _segment_hamiltonian(seg.target, use2d, zeeman_h)
            if lam is None:
                w, v = np.linalg.eigh(h)
                states = (v @ (np.exp(-1j * W2PI * w * seg.duration)[:, None] * (v.conj().T @ states.T))).T
            elif zeeman_h is None:
                w, v = np.linalg.eigh(h)
                coords = states @ v.conj()
                coords *= np.exp(-1j * W2PI * np.outer(lam, w) * seg.duration)
                states = coords @ v.T
            else:
                hj = _segment_hamiltonian(seg.target, use2d, None)
                for s, scale in enumerate(lam):
                    w, v = np.linalg.eigh(scale * hj + zeeman_h)
                    states[s] = v @ (np.exp(-1j * W2PI * w * seg.duration) * (v.conj().T @ states[s]))
        prev_cfg = seg.target

    if dwell_seg is None:
        # one final state per trajectory
        result_states = states[:, None, :] if lam is not None else states[0:1, :]
        dwell_arr = None
    else:
        h = _segment_hamiltonian(dwell_seg.target, use2d, zeeman_h)
        if lam is None:
            w, v = np.linalg.eigh(h)
            coords = states[0] @ v.conj()
            phases = np.exp(-1j * W2PI * np.outer(dwell, w))
            result_states = (phases * coords) @ v.T
        elif zeeman_h is None:
            w, v = np.linalg.eigh(h)
            coords = states @ v.conj()  # (samples, dim)
            phases = np.exp(-1j * W2PI * lam[:, None, None] * w[None, None, :] * dwell[None, :, None])
            result_states = (phases * coords[:, None, :]) @ v.T
        else:
            hj = _segment_hamiltonian(dwell_seg.target, use2d, None)
            result_states = np.empty((len(lam), len(dwell), states.shape[1]), dtype=complex)
            for s, scale in enumerate(lam):
                w, v = np.linalg.eigh(scale * hj + zeeman_h)
                coords = v.conj().T @ states[s]
                phases = np.exp(-1j * W2PI * np.outer(dwell, w))
                result_states[s] = (phases * coords) @ v.T
        dwell_arr = dwell

    out_basis = init.basis
    if use2d and out_basis is Basis.FULL16:
        lift_m = subspace_projector(Basis.GLOBAL_SINGLET_2).conj().T
        result_states = result_states @ lift_m.T
    elif not use2d and out_basis is Basis.GLOBAL_SINGLET_2:
        proj = subspace_projector(Basis.GLOBAL_SINGLET_2)
        result_states = result_states @ proj.conj().T  # back to subspace coordinates

    return SequenceResult(
        basis=out_basis,
        states=result_states,
        dwell_times=dwell_arr,
        scale_factors=lam,
    )
