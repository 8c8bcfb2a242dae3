"""Published threshold values used by ``reproduce`` and the acceptance tests.

The "thresholds" table holds ranks 0..10 for the cubic (V_m, xi_m), GKP
and cat (W_m, zeta_m) columns; ``None`` marks cells printed as negligible.
The "fock" table holds raw W_m for Fock targets k = 1..10 and ranks m < k.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class ReferenceCell:
    table: str
    column: str
    quantity: str
    m: int
    value: float  # None when printed as negligible

    @property
    def negligible(self):
        return self.value is None

    @property
    def coordinate(self):
        return f"{self.table} {self.column} {self.quantity} m={self.m}"


_THRESHOLDS = {
    # column: (raw, normalized)
    "cubic": (
        [0.9449, 0.6774, 0.5586, 0.4887, 0.4417, 0.3990, 0.3660, 0.3342, 0.3098, 0.2905, 0.2747],
        [1.0000, 0.7169, 0.5912, 0.5172, 0.4675, 0.4223, 0.3873, 0.3537, 0.3279, 0.3074, 0.2907],
    ),
    "gkp": (
        [1.0000, 1.0000, 0.8731, 0.7627, 0.6524, 0.6466, 0.5543, 0.5391, 0.4949, 0.4641, 0.4343],
        [1.0000, 1.0000, 0.8731, 0.7627, 0.6524, 0.6466, 0.5543, 0.5391, 0.4949, 0.4641, 0.4343],
    ),
    "cat_even": (
        [0.9997, 0.9997, 0.9996, 0.7241, 0.0804, 0.0673, 0.0047, 0.0037, 0.0002, 0.0002, None],
        [1.0000, 1.0000, 0.9999, 0.7243, 0.0804, 0.0673, 0.0047, 0.0037, 0.0002, 0.0002, None],
    ),
    "cat_odd": (
        [1.0003, 1.0003, 1.0003, 0.3117, 0.2414, 0.0189, 0.0167, 0.0009, 0.0008, None, None],
        [1.0000, 1.0000, 1.0000, 0.3116, 0.2413, 0.0189, 0.0167, 0.0009, 0.0008, None, None],
    ),
}

_THRESHOLD_LABELS = {
    "cubic": ("cubic kappa=1", "V", "xi"),
    "gkp": ("gkp fp=sqrt(pi)=2fx", "W", "zeta"),
    "cat_even": ("cat tau+ alpha=2", "W", "zeta"),
    "cat_odd": ("cat tau- alpha=2", "W", "zeta"),
}

# Row m lists the printed cells for k = m+1 .. 10.
_FOCK_ROWS = [
    [0.611, 1.156, 1.612, 2.020, 2.396, 2.748, 3.081, 3.400, 3.705, 4.000],
    [0.545, 0.927, 1.239, 1.518, 1.776, 2.020, 2.251, 2.472, 2.685],
    [0.516, 0.832, 1.083, 1.307, 1.515, 1.710, 1.896, 2.075],
    [0.500, 0.779, 0.997, 1.190, 1.368, 1.536, 1.695],
    [0.490, 0.746, 0.942, 1.114, 1.273, 1.423],
    [0.483, 0.723, 0.904, 1.062, 1.207],
    [0.477, 0.706, 0.875, 1.023],
    [0.473, 0.693, 0.854],
    [0.470, 0.682],
    [0.467],
]

THRESHOLD_COLUMNS = tuple(_THRESHOLDS)
FOCK_KS = tuple(range(1, 11))


def threshold_cells(column, normalized=False):
    raw, norm = _THRESHOLDS[column]
    label, q_raw, q_norm = _THRESHOLD_LABELS[column]
    values = norm if normalized else raw
    quantity = q_norm if normalized else q_raw
    return [ReferenceCell("thresholds", label, quantity, m, v) for m, v in enumerate(values)]


def fock_cells(k):
    """Printed W_m for target Fock state ``k`` (ranks 0..k-1)."""
    if k not in FOCK_KS:
        raise KeyError(f"reference Fock values cover k = 1..10, got {k}")
    cells = []
    for m in range(k):
        cells.append(ReferenceCell("fock", f"k={k}", "W", m, _FOCK_ROWS[m][k - 1 - m]))
    return cells


def all_cells():
    cells = []
    for col in THRESHOLD_COLUMNS:
        cells += threshold_cells(col) + threshold_cells(col, normalized=True)
    for k in FOCK_KS:
        cells += fock_cells(k)
    return cells
