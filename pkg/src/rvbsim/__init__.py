"""Four-spin resonating-valence-bond simulator for a 2x2 quantum dot array."""

from .basis import (
    Basis,
    Pair,
    PairLabel,
    PairState,
    SpinState,
    change_basis_singlet_xy,
    d_wave,
    pair_product_state,
    s_wave,
    singlet_x,
    singlet_y,
    subspace_projector,
    total_spin_operators,
)
from .hamiltonians import (
    DEFAULT_G_FACTORS,
    MU_B_OVER_H,
    DoubleDotModel,
    ExchangeConfig,
    ZeemanConfig,
    double_dot_energies,
    find_st_anticrossing,
    heisenberg_full,
    singlet_block,
    triplet_block,
    triplet_block_split,
    triplet_block_transformed,
    zeeman_full,
    zeeman_sector_elements,
)
from .control import (
    CalibrationUncertainty,
    ExchangeVoltageModel,
    GateMatrixKind,
    SweepModel,
    SyntheticDevice,
    VirtualGateMatrix,
    apply_compensation,
    exchange_from_voltages,
    load_matrix_table,
    propagate_calibration_error,
    virtual_to_physical,
)
from .dynamics import (
    NoiseModel,
    PulseSegment,
    PulseSequence,
    SegmentKind,
    SequenceResult,
    T_PI_NS,
    dephasing_envelope,
    evolve,
    exchange_pulse,
    f_ss,
    f_st_perturbative,
    ground_state_probabilities,
    hold,
    linear_ramp,
    p_st_degenerate,
    run_sequence,
    set_diabatic,
    sigma_from_tphi,
    singlet_singlet_probabilities,
    tphi_from_sigma,
    visibilities,
)
from .readout import (
    ReadoutConfig,
    ReadoutDirection,
    ShotRecord,
    measure_pair_probabilities,
    sample_shots,
)
from .fitting import (
    CalibrationMap,
    EllipseCenter,
    FitResult,
    FrequencyMinimum,
    find_ellipse_center,
    find_frequency_minimum,
    fit_damped_cosine,
)

__version__ = "0.1.0"
