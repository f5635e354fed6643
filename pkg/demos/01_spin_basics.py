"""Tour of the four-spin Hilbert space: pair products, subspaces, total spin.

Run:  python3 demos/01_spin_basics.py
"""

import numpy as np

from rvbsim import (
    Basis,
    Pair,
    PairLabel,
    PairState,
    change_basis_singlet_xy,
    d_wave,
    pair_product_state,
    s_wave,
    singlet_x,
    singlet_y,
    subspace_projector,
    total_spin_operators,
)

# The two singlet-pairing patterns on the 2x2 plaquette are not orthogonal:
sx, sy = singlet_x(), singlet_y()
print("overlap of horizontal and vertical singlet products:",
      f"{sx.overlap(sy).real:+.3f}  (expect -1/2)")

# A singlet/triplet product has no weight in the total-spin-zero block:
st = pair_product_state(PairState(Pair.Q12, PairLabel.S),
                        PairState(Pair.Q34, PairLabel.T_MINUS))
proj = subspace_projector(Basis.GLOBAL_SINGLET_2)
print("singlet-block weight of |S_12 T-_34>:",
      f"{np.linalg.norm(proj @ st.amplitudes):.2e}")

# Total-spin structure of the full 16-dim space: sectors 0, 1, 2 with
# multiplicities 2, 9, 5.
s2, sz_tot = total_spin_operators()
values, counts = np.unique(np.round(np.linalg.eigvalsh(s2), 9), return_counts=True)
print("S_tot^2 eigenvalues:", dict(zip(values.tolist(), counts.tolist())))

# The equal-exchange eigenstates overlap both pairing patterns with
# probability 3/4 (ground) and 1/4 (excited):
for name, state in (("s-wave", s_wave(Basis.FULL16)), ("d-wave", d_wave(Basis.FULL16))):
    px = abs(sx.overlap(state)) ** 2
    py = abs(sy.overlap(state)) ** 2
    print(f"{name}: |<S_x|.>|^2 = {px:.3f}, |<S_y|.>|^2 = {py:.3f}")

# Switching the 2-dim singlet block between the two pairing conventions is
# a rotation by -120 degrees:
e0 = s_wave()
print("s-wave coordinates, x-pairing:", np.round(e0.amplitudes.real, 4))
print("s-wave coordinates, y-pairing:", np.round(change_basis_singlet_xy(e0).amplitudes.real, 4))
