"""Threshold optimization over Gaussian parameters.

The threshold for stellar rank ``m`` is the smallest eigenvalue of the
leading ``(m+1) x (m+1)`` block of the conjugated witness, minimized over
the Gaussian parameters (and over the shift ``lambda`` for the variance
witness).  The search is a coarse grid, followed by shrinking local grids
around several of the best grid points and a final Nelder-Mead polish.

Parameter vectors are laid out as ``(vartheta, Re z, Im z, r)``; the Fock
family drops ``vartheta``.  The variance family appends ``t`` in ``[0, 1]``
that places ``lambda`` inside :func:`lambda_interval`.
"""

import itertools
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from .errors import ContractViolation, ConvergenceFailure, InvalidRankError
from .families import WitnessFamily, conjugated_matrix, cubic_conjugated_form
from .gaussian_transform import GaussianParams, realize_quadratic

log = logging.getLogger(__name__)

NEGLIGIBLE = 5e-5
THREADS_ENV = "STELLARANK_THREADS"

#: Grid points per Gaussian axis when the config leaves ``grid`` unset.
DEFAULT_GRID = {"cubic": 15, "gkp": 31, "cat": 31, "fock": 31}

#: Search boxes per family: (max |Re z|, |Im z|), max |r|.
DEFAULT_DOMAINS = {
    "cubic": (3.0, 1.5),
    "gkp": (3.0, 5.0),
    "cat": (3.0, 1.5),
    "fock": (4.5, 2.0),
}


def default_threads():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass
class OptimizerConfig:
    grid: int = None
    lambda_grid: int = 25
    refine_rounds: int = 4
    shrink: float = 1.0 / 3.0
    refine_points: int = 5
    starts: int = 16
    polish: bool = True
    polish_starts: int = 16
    zmax: float = None
    rmax: float = None
    lambda_margin: float = 1.0
    dim_start: int = None
    dim_growth: float = 1.5
    dim_cap: int = 256
    tol: float = 1e-5
    threads: int = field(default_factory=default_threads)
    chunk: int = 20000

    def __post_init__(self):
        if (self.grid is not None and self.grid < 3) or self.lambda_grid < 3 or self.refine_points < 3:
            raise ContractViolation("grid resolutions must be at least 3")
        if not 0 < self.shrink < 1:
            raise ContractViolation("shrink factor must lie in (0, 1)")
        if self.zmax is not None and self.zmax <= 0:
            raise ContractViolation("zmax must be positive")
        if self.rmax is not None and self.rmax <= 0:
            raise ContractViolation("rmax must be positive")
        if self.tol <= 0:
            raise ContractViolation("tol must be positive")
        if self.dim_growth <= 1:
            raise ContractViolation("dim_growth must exceed 1")

    def domain(self, family):
        zmax, rmax = DEFAULT_DOMAINS[family.kind]
        return (self.zmax or zmax), (self.rmax or rmax)

    def grid_points(self, family):
        return self.grid or DEFAULT_GRID[family.kind]

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in d.items() if k in known})


@dataclass
class EntryMeta:
    m: int
    raw_before_prefix: float
    params: tuple = None
    lam: float = None
    dim_used: int = None
    converged: bool = True
    negligible: bool = False
    analytic: bool = False


@dataclass
class ThresholdTable:
    family: WitnessFamily
    max_rank: int
    raw: list
    normalized: list
    witness_kind: str
    entries: list

    def scale(self, name):
        if name == "raw":
            return self.raw
        if name == "normalized":
            return self.normalized
        raise ContractViolation(f"unknown scale {name!r}; use 'raw' or 'normalized'")

    @property
    def converged(self):
        return all(e.converged for e in self.entries)

    def to_dict(self):
        entries = []
        for e in self.entries:
            d = asdict(e)
            if e.params is not None:
                th, z, r = e.params
                d["params"] = {"vartheta": th, "z": [z.real, z.imag], "r": r}
            entries.append(d)
        return {
            "family": self.family.to_dict(),
            "max_rank": self.max_rank,
            "witness_kind": self.witness_kind,
            "raw": list(self.raw),
            "normalized": list(self.normalized),
            "entries": entries,
        }

    @classmethod
    def from_dict(cls, d):
        entries = []
        for e in d["entries"]:
            e = dict(e)
            p = e.get("params")
            if p is not None:
                e["params"] = (p["vartheta"], complex(*p["z"]), p["r"])
            entries.append(EntryMeta(**e))
        return cls(
            family=WitnessFamily.from_dict(d["family"]),
            max_rank=d["max_rank"],
            raw=[float(v) for v in d["raw"]],
            normalized=[float(v) for v in d["normalized"]],
            witness_kind=d["witness_kind"],
            entries=entries,
        )


# -- projected eigenvalues -------------------------------------------------

def min_eig_projected(matrix, m, check=True):
    """Least eigenvalue of the leading ``(m+1) x (m+1)`` Fock block.

    Works on a single matrix or a stack of matrices.  The rightmost phase of
    the Gaussian unitary maps this block onto itself and so never needs to
    be represented.
    """
    matrix = np.asarray(matrix)
    dim = matrix.shape[-1]
    if m < 0 or m + 1 > dim:
        raise InvalidRankError(f"rank m={m} needs a matrix of dimension >= {m + 1}, got {dim}")
    block = matrix[..., : m + 1, : m + 1]
    if check:
        herm = np.conj(np.swapaxes(block, -1, -2))
        scale = 1.0 + np.max(np.abs(block), initial=0.0)
        if np.max(np.abs(block - herm), initial=0.0) > 1e-10 * scale:
            raise ContractViolation("projected matrix is not Hermitian")
    return np.linalg.eigvalsh(block)[..., 0]


def lambda_interval(conjugated_form, m, margin=1.0):
    """Interval sure to contain the optimal shift ``lambda* = <Q>``.

    Any state supported on the first ``m+1`` Fock states has ``<Q>`` between
    the extreme eigenvalues of the projected ``Q``; a margin is added on both
    sides.  Batched forms give arrays of bounds.
    """
    q = realize_quadratic(conjugated_form, m + 1)
    ev = np.linalg.eigvalsh(q)
    return ev[..., 0] - margin, ev[..., -1] + margin


# -- objective -------------------------------------------------------------

def params_from_points(family, points):
    points = np.asarray(points, dtype=float)
    if family.kind == "fock":
        th = np.zeros(points.shape[:-1])
        zr, zi, r = points[..., 0], points[..., 1], points[..., 2]
    else:
        th, zr, zi, r = points[..., 0], points[..., 1], points[..., 2], points[..., 3]
    return GaussianParams(th, zr + 1j * zi, r)


def lambda_from_points(family, m, points, margin=1.0):
    params = params_from_points(family, points)
    lo, hi = lambda_interval(cubic_conjugated_form(params), m, margin)
    return lo + points[..., -1] * (hi - lo)


def evaluate_points(family, m, points, dim=None):
    """Projected least eigenvalue at each parameter point (no Hermitian check)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    dim = m + 1 if dim is None else dim
    params = params_from_points(family, points)
    lam = lambda_from_points(family, m, points) if family.is_variance else None
    mats = conjugated_matrix(family, params, dim, lam=lam)
    return min_eig_projected(mats, m, check=False)


class _Objective:
    """Vectorized objective with optional thread fan-out over chunks."""

    def __init__(self, family, m, cfg, margin):
        self.family, self.m, self.cfg, self.margin = family, m, cfg, margin
        self.nfev = 0

    def _eval(self, pts):
        params = params_from_points(self.family, pts)
        lam = None
        if self.family.is_variance:
            lam = lambda_from_points(self.family, self.m, pts, self.margin)
        mats = conjugated_matrix(self.family, params, self.m + 1, lam=lam)
        return min_eig_projected(mats, self.m, check=False)

    def __call__(self, points):
        points = np.atleast_2d(points)
        self.nfev += len(points)
        size = self.cfg.chunk
        chunks = [points[i:i + size] for i in range(0, len(points), size)]
        if self.cfg.threads > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(self.cfg.threads) as pool:
                parts = list(pool.map(self._eval, chunks))
        else:
            parts = [self._eval(c) for c in chunks]
        return np.concatenate(parts)


# -- search ----------------------------------------------------------------

@dataclass
class _Box:
    lower: np.ndarray
    upper: np.ndarray
    periodic: np.ndarray
    counts: list

    def clip(self, pts):
        out = np.array(pts, dtype=float)
        span = self.upper - self.lower
        for i in range(len(self.lower)):
            if self.periodic[i]:
                out[..., i] = self.lower[i] + np.mod(out[..., i] - self.lower[i], span[i])
            else:
                out[..., i] = np.clip(out[..., i], self.lower[i], self.upper[i])
        return out

    def axes(self):
        out = []
        for lo, hi, per, n in zip(self.lower, self.upper, self.periodic, self.counts):
            out.append(np.linspace(lo, hi, n, endpoint=not per))
        return out

    def steps(self):
        return np.array([
            (hi - lo) / (n if per else n - 1)
            for lo, hi, per, n in zip(self.lower, self.upper, self.periodic, self.counts)
        ])


def search_box(family, cfg):
    zmax, rmax = cfg.domain(family)
    n = cfg.grid_points(family)
    lower = [-zmax, -zmax, -rmax]
    upper = [zmax, zmax, rmax]
    periodic = [False, False, False]
    counts = [n, n, n]
    if family.kind != "fock":
        # vartheta + pi is equivalent to z -> -z; with a real witness,
        # vartheta -> pi - vartheta is equivalent to z -> -conj(z) as well.
        if family.real_in_fock_basis:
            lower, upper = [0.0] + lower, [np.pi / 2] + upper
            periodic, counts = [False] + periodic, [n // 2 + 1] + counts
        else:
            lower, upper = [0.0] + lower, [np.pi] + upper
            periodic, counts = [True] + periodic, [n] + counts
    if family.is_variance:
        lower, upper = lower + [0.0], upper + [1.0]
        periodic, counts = periodic + [False], counts + [cfg.lambda_grid]
    return _Box(np.array(lower), np.array(upper), np.array(periodic), counts)


def _tiebreak_key(family, point):
    th = 0.0 if family.kind == "fock" else point[0]
    off = 0 if family.kind == "fock" else 1
    z = math.hypot(point[off], point[off + 1])
    return (z, abs(point[off + 2]), th)


def _pick_best(family, values, points):
    """Argmin with reproducible tie-breaking on (|z|, |r|, vartheta)."""
    values = np.asarray(values)
    best = values.min()
    tied = np.flatnonzero(values == best)
    if len(tied) == 1:
        return int(tied[0])
    return int(min(tied, key=lambda i: _tiebreak_key(family, points[i])))


def _distinct_starts(values, points, steps, count):
    order = np.argsort(values, kind="stable")
    chosen = []
    for i in order:
        if len(chosen) >= count:
            break
        p = points[i]
        if all(np.max(np.abs(p - points[j]) / steps) > 1.5 for j in chosen):
            chosen.append(i)
    return chosen


@dataclass
class SearchResult:
    value: float
    point: np.ndarray
    history: list
    nfev: int


def grid_minimize(objective, box, cfg, family, extra_starts=()):
    """Coarse grid, local grid refinement around several starts, polish."""
    axes = box.axes()
    grid = np.array(list(itertools.product(*axes)))
    vals = objective(grid)
    steps = box.steps()
    starts = [grid[i] for i in _distinct_starts(vals, grid, steps, cfg.starts)]
    starts += [box.clip(np.asarray(p, dtype=float)) for p in extra_starts]
    i0 = _pick_best(family, vals, grid)
    best_val, best_pt = float(vals[i0]), grid[i0]
    history = [best_val]

    refined = []
    offsets = np.linspace(-1.0, 1.0, cfg.refine_points)
    local = np.array(list(itertools.product(offsets, repeat=len(steps))))
    for start in starts:
        centre = np.asarray(start, dtype=float)
        centre_val = float(objective(centre[None])[0])
        half = steps.copy()
        for _ in range(cfg.refine_rounds):
            pts = box.clip(centre + local * half)
            v = objective(pts)
            j = _pick_best(family, v, pts)
            if v[j] <= centre_val:
                centre, centre_val = pts[j], float(v[j])
            half = half * cfg.shrink
        refined.append((centre_val, centre))

    for val, pt in refined:
        if val < best_val or (val == best_val and _tiebreak_key(family, pt) < _tiebreak_key(family, best_pt)):
            best_val, best_pt = val, pt
    history.append(best_val)

    if cfg.polish:
        refined.sort(key=lambda t: t[0])
        bounds = list(zip(box.lower, box.upper))
        for i, b in enumerate(bounds):
            if box.periodic[i]:
                bounds[i] = (None, None)

        def scalar(x):
            return float(objective(box.clip(x)[None])[0])

        for val, pt in refined[: max(1, cfg.polish_starts)]:
            res = minimize(scalar, pt, method="Nelder-Mead", bounds=bounds,
                           options={"xatol": 1e-8, "fatol": 1e-12, "maxiter": 4000,
                                    "initial_simplex": pt + np.vstack([np.zeros_like(steps), np.diag(steps / 4)])})
            x = box.clip(res.x)
            fx = scalar(x)
            if fx < best_val:
                best_val, best_pt = fx, x
        history.append(best_val)
    return SearchResult(best_val, np.asarray(best_pt), history, objective.nfev)


# -- truncation control ----------------------------------------------------

def converge_truncation(eval_at_dim, cfg, start=None):
    """Evaluate at growing truncation until successive values agree.

    Returns ``(value, dim)`` at the first dimension whose value differs from
    the previous one by less than ``cfg.tol``.
    """
    dim = int(start if start is not None else (cfg.dim_start or 8))
    prev = eval_at_dim(dim)
    while True:
        nxt = max(dim + 1, int(math.ceil(dim * cfg.dim_growth)))
        if nxt > cfg.dim_cap:
            raise ConvergenceFailure(
                f"truncation did not settle below tolerance {cfg.tol:g} before dim cap {cfg.dim_cap}",
                best=prev, dim=dim,
            )
        cur = eval_at_dim(nxt)
        if abs(cur - prev) < cfg.tol:
            return cur, nxt
        prev, dim = cur, nxt


def _point_to_tuple(family, point):
    p = params_from_points(family, point)
    return (float(p.vartheta), complex(p.z), float(p.r))


# -- thresholds ------------------------------------------------------------

@dataclass
class ThresholdResult:
    value: float
    params: tuple
    lam: float
    dim_used: int
    converged: bool
    point: np.ndarray
    history: list


def _optimize(family, m, cfg, extra_starts=()):
    obj = _Objective(family, m, cfg, cfg.lambda_margin)
    box = search_box(family, cfg)
    res = grid_minimize(obj, box, cfg, family, extra_starts)
    params_t = _point_to_tuple(family, res.point)
    params = GaussianParams(*params_t)
    lam = None
    if family.is_variance:
        lam = float(lambda_from_points(family, m, res.point, cfg.lambda_margin))

    def at_dim(d):
        return float(min_eig_projected(conjugated_matrix(family, params, d, lam=lam), m))

    start = cfg.dim_start or 2 * (m + 1)
    converged = True
    try:
        value, dim_used = converge_truncation(at_dim, cfg, start=max(start, m + 1))
    except ConvergenceFailure as exc:
        value, dim_used, converged = exc.best, exc.dim, False
        log.warning("%s m=%d: %s", family.label, m, exc)
    if abs(value - res.value) > cfg.tol:
        log.warning("%s m=%d: block value %.8g differs from truncated value %.8g", family.label, m, res.value, value)
    log.info("%s m=%d -> %.6f (nfev=%d)", family.label, m, value, res.nfev)
    return ThresholdResult(value, params_t, lam, dim_used, converged, res.point, res.history)


def optimize_expectation_threshold(family, m, cfg=None, extra_starts=()):
    """``W_m``: least projected eigenvalue of ``G^dag W G`` minimized over ``G``."""
    cfg = cfg or OptimizerConfig()
    if family.is_variance:
        raise ContractViolation(f"{family.label} is a variance witness")
    return _optimize(family, m, cfg, extra_starts)


def optimize_variance_threshold(family, m, cfg=None, extra_starts=()):
    """``V_m``: as above for the surrogate ``(G^dag Q G - lambda)^2``, also over lambda."""
    cfg = cfg or OptimizerConfig()
    if not family.is_variance:
        raise ContractViolation(f"{family.label} is an expectation-value witness")
    return _optimize(family, m, cfg, extra_starts)


def prefix_minimum(values):
    out, cur = [], math.inf
    for v in values:
        cur = min(cur, v)
        out.append(cur)
    return out


def build_table(family, m_max, cfg=None, progress=None):
    """Thresholds for ranks ``0..m_max`` with prefix minimum and normalization."""
    if m_max < 0:
        raise InvalidRankError("m_max must be non-negative")
    cfg = cfg or OptimizerConfig()
    optimize = optimize_variance_threshold if family.is_variance else optimize_expectation_threshold
    entries, raw_pre = [], []
    prev_point = None
    for m in range(m_max + 1):
        if family.kind == "fock" and m >= family.k:
            entries.append(EntryMeta(m, 0.0, analytic=True, dim_used=m + 1))
            raw_pre.append(0.0)
        else:
            extra = [prev_point] if prev_point is not None else []
            res = optimize(family, m, cfg, extra_starts=extra)
            prev_point = res.point
            entries.append(EntryMeta(m, res.value, res.params, res.lam, res.dim_used, res.converged))
            raw_pre.append(res.value)
        if progress:
            progress(m, raw_pre[-1])

    raw = prefix_minimum(raw_pre)
    for m, (before, after) in enumerate(zip(raw_pre, raw)):
        if before - after > 1e-9:
            log.warning("%s m=%d: prefix minimum lowered %.6g to %.6g", family.label, m, before, after)
    for e, v in zip(entries, raw):
        e.negligible = bool(abs(v) < NEGLIGIBLE and not e.analytic)
    if raw[0] <= 0:
        raise ContractViolation("Gaussian limit is zero; cannot normalize")
    normalized = [1.0] + [v / raw[0] for v in raw[1:]]
    return ThresholdTable(family, m_max, raw, normalized, family.witness_kind, entries)
