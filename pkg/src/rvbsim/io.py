"""Plain-text formats: flat key-value configs, pulse-sequence files, CSV tables.

Config files are flat ``section.key = value`` documents (one per line,
``#`` comments); values parse as int, float, bool, or string.

Pulse-sequence files (one directive per line)::

    init product S Q12 T- Q34        # pair states on two disjoint pairs
    init state swave                 # or: sx, sy, dwave
    init amplitudes full16 re:im re:im ...
    segment diabatic j12=25 j34=25 j23=0 j14=0
    segment ramp j12=25 j34=25 j23=25 j14=25 dur=160 mode=voltage
    segment hold j12=25 j34=25 j23=25 j14=25 dur=0
    dwell 0 4 8 12                   # explicit dwell times (ns)
    dwell range 0 300 2              # inclusive arange

CSV emitters format floats with %.10g so reruns are byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .basis import Basis, Pair, PairLabel, PairState, SpinState, pair_product_state
from .basis import d_wave, s_wave, singlet_x, singlet_y
from .dynamics import (
    PulseSegment,
    PulseSequence,
    SegmentKind,
    exchange_pulse,
    hold,
    linear_ramp,
    set_diabatic,
)
from .hamiltonians import ExchangeConfig


# ---------------------------------------------------------------------------
# flat key-value configs


def parse_config(text: str) -> dict:
    """Parse a flat ``key = value`` document with dotted section keys."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ValueError(f"config line {lineno}: empty key")
        out[key] = _parse_scalar(value)
    return out


def _parse_scalar(value: str):
    low = value.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        pass
    return value


def load_config(path) -> dict:
    return parse_config(Path(path).read_text())


def format_config(cfg: dict) -> str:
    lines = [f"{key} = {cfg[key]}" for key in sorted(cfg)]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# CSV tables


def write_csv(path, columns: dict[str, np.ndarray]) -> None:
    """Write named columns to CSV with stable %.10g float formatting."""
    names = list(columns)
    arrays = [np.asarray(columns[name]).ravel() for name in names]
    n = len(arrays[0])
    if any(len(a) != n for a in arrays):
        raise ValueError("all columns must have the same length")
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(names) + "\n")
        for i in range(n):
            fh.write(",".join(_fmt(a[i]) for a in arrays) + "\n")


def _fmt(x) -> str:
    if isinstance(x, (np.integer, int)):
        return str(int(x))
    return f"{float(x):.10g}"


def read_csv(path) -> dict[str, np.ndarray]:
    """Read a header + numeric-columns CSV written by :func:`write_csv`."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if data.size == 0:
        return {name: np.empty(0) for name in header}
    return {name: data[:, k] for k, name in enumerate(header)}


def write_json(path, payload: dict) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# pulse-sequence files

_NAMED_INITS = {
    "sx": singlet_x,
    "sy": singlet_y,
    "swave": lambda: s_wave(Basis.FULL16),
    "dwave": lambda: d_wave(Basis.FULL16),
}

_LABELS = {"S": PairLabel.S, "T0": PairLabel.T0, "T+": PairLabel.T_PLUS, "T-": PairLabel.T_MINUS}

_SEGMENT_KINDS = {
    "diabatic": SegmentKind.SET_DIABATIC,
    "hold": SegmentKind.HOLD,
    "pulse": SegmentKind.EXCHANGE_PULSE,
    "ramp": SegmentKind.LINEAR_RAMP,
}


def sequence_from_text(text: str) -> PulseSequence:
    init: SpinState | None = None
    segments: list[PulseSegment] = []
    dwell: tuple[float, ...] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        try:
            if tokens[0] == "init":
                init = _parse_init(tokens[1:])
            elif tokens[0] == "segment":
                segments.append(_parse_segment(tokens[1:]))
            elif tokens[0] == "dwell":
                dwell = _parse_dwell(tokens[1:])
            else:
                raise ValueError(f"unknown directive {tokens[0]!r}")
        except (IndexError, KeyError, ValueError) as exc:
            raise ValueError(f"sequence line {lineno}: {exc}") from exc
    if init is None:
        raise ValueError("sequence file has no init line")
    return PulseSequence(init=init, segments=tuple(segments), dwell_times=dwell)


def load_sequence(path) -> PulseSequence:
    return sequence_from_text(Path(path).read_text())


def _parse_init(tokens: list[str]) -> SpinState:
    if tokens[0] == "state":
        return _NAMED_INITS[tokens[1].lower()]()
    if tokens[0] == "product":
        label_a, pair_a, label_b, pair_b = tokens[1:5]
        return pair_product_state(
            PairState(Pair[pair_a.upper()], _LABELS[label_a]),
            PairState(Pair[pair_b.upper()], _LABELS[label_b]),
        )
    if tokens[0] == "amplitudes":
        basis = Basis[tokens[1].upper()]
        amps = np.array([complex(*map(float, tok.split(":"))) for tok in tokens[2:]])
        return SpinState(basis, amps)
    raise ValueError(f"unknown init form {tokens[0]!r}")


def _parse_segment(tokens: list[str]) -> PulseSegment:
    kind = _SEGMENT_KINDS[tokens[0]]
    kv = dict(tok.split("=", 1) for tok in tokens[1:])
    config = ExchangeConfig(
        j12=float(kv.pop("j12")),
        j34=float(kv.pop("j34")),
        j23=float(kv.pop("j23")),
        j14=float(kv.pop("j14")),
    )
    duration = float(kv.pop("dur", 0.0))
    mode = kv.pop("mode", "voltage")
    if kv:
        raise ValueError(f"unknown segment fields {sorted(kv)}")
    if kind is SegmentKind.LINEAR_RAMP:
        return linear_ramp(config, duration, mode)
    return {
        SegmentKind.SET_DIABATIC: set_diabatic,
        SegmentKind.HOLD: hold,
        SegmentKind.EXCHANGE_PULSE: exchange_pulse,
    }[kind](config, duration)


def _parse_dwell(tokens: list[str]) -> tuple[float, ...]:
    if tokens[0] == "range":
        start, stop, step = map(float, tokens[1:4])
        n = int(round((stop - start) / step)) + 1
        return tuple(start + step * k for k in range(n))
    return tuple(float(tok) for tok in tokens)


def sequence_to_text(seq: PulseSequence) -> str:
    lines = [_format_init(seq.init)]
    for seg in seq.segments:
        kind = {v: k for k, v in _SEGMENT_KINDS.items()}[seg.kind]
        t = seg.target
        parts = [
            f"segment {kind}",
            f"j12={t.j12:.10g}", f"j34={t.j34:.10g}",
            f"j23={t.j23:.10g}", f"j14={t.j14:.10g}",
            f"dur={seg.duration:.10g}",
        ]
        if seg.kind is SegmentKind.LINEAR_RAMP:
            parts.append(f"mode={seg.ramp_mode}")
        lines.append(" ".join(parts))
    if seq.dwell_times is not None:
        lines.append("dwell " + " ".join(f"{t:.10g}" for t in seq.dwell_times))
    return "\n".join(lines) + "\n"


def _format_init(state: SpinState) -> str:
    for name, factory in _NAMED_INITS.items():
        ref = factory()
        if state.basis is ref.basis and np.allclose(state.amplitudes, ref.amplitudes, atol=1e-12):
            return f"init state {name}"
    if state.basis is Basis.FULL16:
        for la, pa, lb, pb in _product_candidates():
            ref = pair_product_state(PairState(pa, _LABELS[la]), PairState(pb, _LABELS[lb]))
            if np.allclose(state.amplitudes, ref.amplitudes, atol=1e-12):
                return f"init product {la} {pa.name} {lb} {pb.name}"
    amps = " ".join(f"{a.real:.10g}:{a.imag:.10g}" for a in state.amplitudes)
    return f"init amplitudes {state.basis.name.lower()} {amps}"


def _product_candidates():
    pairs = [(Pair.Q12, Pair.Q34), (Pair.Q34, Pair.Q12), (Pair.Q23, Pair.Q14), (Pair.Q14, Pair.Q23)]
    labels = list(_LABELS)
    for pa, pb in pairs:
        for la in labels:
            for lb in labels:
                yield la, pa, lb, pb
