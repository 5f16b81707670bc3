"""Detection and classification of frozen entanglement volume.

Two detectors are provided.  The conditional detector uses the two-branch
structure: when every excitation margin ``2 cos^2(theta) r_k^2 - cos(2 theta)``
has the same sign, ``Y_s`` is pinned to a closed-form value, so intervals are
found from margin signs and their edges refined by bisection in time.  The
value detector only looks at a sampled ``Y_s(t)`` and works for any trace,
e.g. the open cavity system.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .entanglement import (
    Case,
    VolumeSample,
    bloch_lengths,
    classify_margins,
    excitation_margins,
    fast_volume_trace,
    weights_from_bloch,
)
from .errors import BracketError, DomainError
from .open_dynamics import OpenSystemParams, open_amplitude_trace
from .sector_state import SectorBasis, TwoBranchState, excitation_weights, make_two_branch
from .xx_dynamics import XXModel, sector_amplitude_trace, time_grid

MARGIN_TOL = 1e-12
VALUE_TOL = 1e-6
MIN_LEN = 3
CURVATURE_TOL = 1e-13

CLASSIFICATIONS = ("none", "temporary", "permanent")


def predicted_frozen_values(n: int, e: int, theta: float) -> tuple[float, float]:
    """Frozen ``Y_s`` under Case 1 and Case 2, whether or not either is reachable."""
    if n < 2 or not 0 <= e <= n:
        raise DomainError(f"invalid (n, e) = ({n}, {e})")
    c2 = np.cos(theta) ** 2
    s2 = np.sin(theta) ** 2
    return 2.0 * (n - e) * c2, 2.0 * n * s2 + 2.0 * e * c2


def case_condition(state: TwoBranchState, margin_tol: float = MARGIN_TOL) -> Case:
    margins = excitation_margins(state.excitation_weights(), state.theta)
    return classify_margins(margins, margin_tol)


def _full_weights(amps, basis: SectorBasis, theta, phi) -> np.ndarray:
    amps = np.atleast_2d(amps)
    psi = np.zeros((amps.shape[0], 2**basis.n), dtype=complex)
    psi[:, basis.codes] = np.cos(theta) * amps
    psi[:, -1] += np.exp(1j * phi) * np.sin(theta)
    return weights_from_bloch(bloch_lengths(psi, basis.n))


def two_branch_weights(amps, basis: SectorBasis, theta: float, phi: float = 0.0) -> np.ndarray:
    """Per-qubit ``Y_k`` for a stack of sector amplitudes, shape ``(T, n)``.

    The closed form holds for ``e <= n - 2``.  At ``e = n - 1`` a sector string
    differs from ``|1...1>`` in a single qubit, the marginals pick up a
    coherence, and the full-vector partial trace is used instead.
    """
    if basis.e <= basis.n - 2:
        return fast_volume_trace(np.atleast_2d(amps), basis, theta)[0]
    return _full_weights(amps, basis, theta, phi)


@dataclass
class EvolutionTrace:
    """Sampled entanglement data along one trajectory."""

    times: np.ndarray
    y: np.ndarray
    r_squared: np.ndarray | None = None
    cases: np.ndarray | None = None

    @property
    def y_s(self) -> np.ndarray:
        return self.y.sum(axis=1)

    @property
    def horizon(self) -> float:
        return float(self.times[-1] - self.times[0])

    def samples(self) -> list[VolumeSample]:
        out = []
        for j, t in enumerate(self.times):
            r2 = None if self.r_squared is None else self.r_squared[j]
            case = Case.NONE if self.cases is None else Case(int(self.cases[j]))
            out.append(VolumeSample(float(t), self.y[j], float(self.y[j].sum()), r2, case))
        return out

    @classmethod
    def from_samples(cls, samples: list[VolumeSample]) -> "EvolutionTrace":
        times = np.array([s.t for s in samples], dtype=float)
        y = np.stack([np.asarray(s.y_per_qubit, dtype=float) for s in samples])
        r2 = None
        if all(s.r_squared is not None for s in samples):
            r2 = np.stack([s.r_squared for s in samples])
        cases = np.array([int(s.case_label) for s in samples])
        return cls(times, y, r2, cases)


def closed_trace(states: list[TwoBranchState], times, margin_tol: float = MARGIN_TOL) -> EvolutionTrace:
    """Entanglement data for a trace of two-branch states."""
    first = states[0]
    amps = np.stack([s.amps for s in states])
    _, r2, margins = fast_volume_trace(amps, first.basis, first.theta)
    y = two_branch_weights(amps, first.basis, first.theta, first.phi)
    return EvolutionTrace(np.asarray(times, dtype=float), y, r2, classify_margins(margins, margin_tol))


def open_trace(params: OpenSystemParams) -> EvolutionTrace:
    amps = open_amplitude_trace(params)
    y = weights_from_bloch(bloch_lengths(amps, 4))
    return EvolutionTrace(params.kappa_t(), y)


@dataclass(frozen=True)
class FreezeInterval:
    t_start: float
    t_end: float
    frozen_value: float
    mechanism: str  # "Case1", "Case2" or "ValuePlateau"
    first_sample: int = field(default=-1, compare=False)
    last_sample: int = field(default=-1, compare=False)

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    def to_dict(self) -> dict:
        return {
            "t_start": self.t_start,
            "t_end": self.t_end,
            "value": self.frozen_value,
            "mechanism": self.mechanism,
        }


@dataclass
class FreezeReport:
    intervals: list[FreezeInterval]
    r_f: float
    classification: str
    horizon: float
    predicted_case1: float | None = None
    predicted_case2: float | None = None
    certificate: str = "sampled"
    detector: str = ""

    @property
    def frozen_time(self) -> float:
        return sum(iv.duration for iv in self.intervals)

    def dominant_value(self) -> float | None:
        """Frozen value of the mechanism holding ``Y_s`` fixed for longest."""
        if not self.intervals:
            return None
        totals: dict[float, float] = {}
        for iv in self.intervals:
            key = round(iv.frozen_value, 12)
            totals[key] = totals.get(key, 0.0) + iv.duration
        return max(totals.items(), key=lambda kv: (kv[1], -kv[0]))[0]

    def to_dict(self) -> dict:
        return {
            "intervals": [iv.to_dict() for iv in self.intervals],
            "r_f": self.r_f,
            "classification": self.classification,
            "predicted_case1": self.predicted_case1,
            "predicted_case2": self.predicted_case2,
            "horizon": self.horizon,
            "certificate": self.certificate,
            "detector": self.detector,
        }


def _assemble(intervals, times, **kw) -> FreezeReport:
    t0, t1 = float(times[0]), float(times[-1])
    horizon = t1 - t0
    frozen = sum(iv.duration for iv in intervals)
    r_f = min(max(frozen / horizon, 0.0), 1.0)
    if not intervals:
        cls = "none"
    elif len(intervals) == 1 and intervals[0].first_sample == 0 and intervals[0].last_sample == len(times) - 1:
        cls = "permanent"
        r_f = 1.0
    else:
        cls = "temporary"
    return FreezeReport(intervals, r_f, cls, horizon, **kw)


def _runs(labels: np.ndarray):
    """Maximal runs of equal nonzero labels as ``(label, first, last)``."""
    out = []
    j = 0
    T = len(labels)
    while j < T:
        lab = labels[j]
        k = j
        while k + 1 < T and labels[k + 1] == lab:
            k += 1
        if lab != 0:
            out.append((int(lab), j, k))
        j = k + 1
    return out


def _bisect_edge(inside, t_in: float, t_out: float, tol: float) -> float:
    """Boundary between a time where ``inside`` holds and one where it fails."""
    while abs(t_out - t_in) > tol:
        mid = 0.5 * (t_in + t_out)
        if inside(mid):
            t_in = mid
        else:
            t_out = mid
    return 0.5 * (t_in + t_out)


def detect_freezing_conditional(states: list[TwoBranchState], times, model: XXModel | None,
                                margin_tol: float = MARGIN_TOL, value_tol: float = VALUE_TOL,
                                refine_tol: float = 1e-9) -> FreezeReport:
    """Freezing intervals from the Case 1 / Case 2 sign conditions.

    Parameters
    ----------
    states, times
        A uniformly sampled trajectory; ``states[j]`` is the state at ``times[j]``.
    model
        Generator of the trajectory, used to re-evolve ``states[0]`` while
        bisecting interval edges down to ``refine_tol * horizon``.  With
        ``None`` the edges stay on the sample grid.
    value_tol
        Only used for ``e = n - 1``, where the sign conditions no longer pin
        ``Y_s``; an interval is kept there only if the full-vector ``Y_s`` is
        constant to this tolerance across it.
    """
    times = np.asarray(times, dtype=float)
    if len(states) != len(times) or len(times) < 2:
        raise DomainError("need matching states and times with at least two samples")
    first = states[0]
    n, e, theta = first.n, first.e, first.theta
    trace = closed_trace(states, times, margin_tol)
    labels = trace.cases
    pred1, pred2 = predicted_frozen_values(n, e, theta)
    horizon = float(times[-1] - times[0])

    def label_at(t):
        amps = sector_amplitude_trace(first, model, [t - times[0]])[0]
        margins = excitation_margins(excitation_weights(amps, first.basis), theta)
        return classify_margins(margins, margin_tol)

    intervals = []
    for lab, i, j in _runs(labels):
        t_start, t_end = times[i], times[j]
        if model is not None:
            tol = refine_tol * horizon
            if i > 0:
                t_start = _bisect_edge(lambda t: label_at(t) == lab, times[i], times[i - 1], tol)
            if j < len(times) - 1:
                t_end = _bisect_edge(lambda t: label_at(t) == lab, times[j], times[j + 1], tol)
        if e >= n - 1:
            ys = trace.y_s[i:j + 1]
            if j == i or np.ptp(ys) > value_tol:
                continue
        value = pred1 if lab == Case.CASE1 else pred2
        intervals.append(FreezeInterval(float(t_start), float(t_end), float(value),
                                        f"Case{lab}", i, j))
    certificate = "analytic" if (np.cos(2 * theta) <= 0 and e <= n - 2) else "sampled"
    return _assemble(intervals, times, predicted_case1=pred1, predicted_case2=pred2,
                     certificate=certificate, detector="conditional")


def _extrapolate_edge(t_a, y_a, t_b, y_b, value, lo, hi):
    """Where the line through two off-plateau samples meets ``value``, clipped to ``[lo, hi]``."""
    slope = (y_b - y_a) / (t_b - t_a)
    if slope == 0 or not np.isfinite(slope):
        return hi if t_b <= lo else lo
    t = t_b + (value - y_b) / slope
    return float(min(max(t, lo), hi))


def detect_freezing_value(trace, value_tol: float = VALUE_TOL, min_len: int = MIN_LEN,
                          curvature_tol: float = CURVATURE_TOL, min_duration: float = 0.0) -> FreezeReport:
    """Plateaus of a sampled ``Y_s(t)`` without any model knowledge.

    A sample is flat when both neighbouring steps change ``Y_s`` by less
    than ``value_tol`` and the second difference is below ``curvature_tol``;
    the curvature test keeps slow extrema and exponential tails, which pass
    any absolute step test over a few samples, from counting as plateaus.
    A run of flat samples plus its two neighbours is a plateau when it
    spans at least ``min_len`` samples and varies by at most ``value_tol``.
    Edges are placed where the straight line through the two samples just
    outside the plateau reaches the plateau value, and plateaus shorter
    than ``min_duration`` (in time units) are dropped.
    """
    if min_len < 3:
        raise DomainError("min_len must be at least 3 samples")
    if isinstance(trace, EvolutionTrace):
        times, ys = trace.times, trace.y_s
    else:
        times = np.array([s.t for s in trace], dtype=float)
        ys = np.array([s.y_s for s in trace], dtype=float)
    T = len(ys)
    if T < 3:
        return _assemble([], times, detector="value")
    step = np.abs(np.diff(ys))
    curv = np.abs(np.diff(ys, 2))
    flat = np.zeros(T, dtype=bool)
    flat[1:-1] = (step[:-1] < value_tol) & (step[1:] < value_tol) & (curv <= curvature_tol)

    intervals = []
    for _, f0, f1 in _runs(flat.astype(int)):
        i, j = f0 - 1, f1 + 1
        seg = ys[i:j + 1]
        if j - i + 1 < min_len or np.ptp(seg) > value_tol:
            continue
        value = float(seg.mean())
        t_start, t_end = float(times[i]), float(times[j])
        if i >= 2:
            t_start = _extrapolate_edge(times[i - 2], ys[i - 2], times[i - 1], ys[i - 1], value,
                                        times[i - 1], times[i])
        if j <= T - 3:
            t_end = _extrapolate_edge(times[j + 2], ys[j + 2], times[j + 1], ys[j + 1], value,
                                      times[j], times[j + 1])
        if t_end - t_start < min_duration:
            continue
        intervals.append(FreezeInterval(t_start, t_end, value, "ValuePlateau", i, j))
    return _assemble(intervals, times, detector="value")


# ---------------------------------------------------------------------------
# families and sweeps


FAMILIES = ("single_head", "symmetric_W")


def family_coeffs(family: str, n: int, e: int = 1, coeffs=None) -> np.ndarray:
    """Coefficient vector (sector order) for a named initial-state family.

    ``single_head`` is ``[1, 0, ..., 0]``, i.e. the rightmost ``e`` qubits
    excited, ``|0..01..1>``;
    ``symmetric_W`` is the uniform superposition over the sector; ``custom``
    takes ``coeffs`` verbatim.
    """
    from math import comb

    dim = comb(n, e)
    if family == "single_head":
        c = np.zeros(dim, dtype=complex)
        c[0] = 1.0
        return c
    if family == "symmetric_W":
        return np.ones(dim, dtype=complex)
    if family == "custom":
        if coeffs is None:
            raise DomainError("custom family needs explicit coefficients")
        return np.asarray(coeffs, dtype=complex)
    raise DomainError(f"unknown family {family!r}")


@dataclass
class CellResult:
    n: int
    theta: float
    r_f: float
    frozen_value: float | None
    classification: str


@dataclass
class PhaseDiagramGrid:
    theta_axis: np.ndarray
    n_axis: np.ndarray
    r_f_grid: np.ndarray
    frozen_value_grid: np.ndarray  # NaN where nothing froze
    classification_grid: np.ndarray

    @property
    def no_freeze(self) -> np.ndarray:
        return np.isnan(self.frozen_value_grid)

    def rows(self):
        """``(N, theta, R_f, frozen_value or None, classification)``, N-major."""
        for a, n in enumerate(self.n_axis):
            for b, th in enumerate(self.theta_axis):
                v = self.frozen_value_grid[a, b]
                yield (int(n), float(th), float(self.r_f_grid[a, b]),
                       None if np.isnan(v) else float(v), str(self.classification_grid[a, b]))


def default_theta_axis(steps: int = 49) -> np.ndarray:
    """``steps`` interior points of ``(0, pi/2)``: ``j pi / (2 (steps + 1))``, ``j = 1..steps``.

    The default of 49 gives the ``j pi / 100`` grid.
    """
    if steps < 1:
        raise DomainError(f"need at least one theta step, got {steps}")
    return np.arange(1, steps + 1) * np.pi / (2 * (steps + 1))


def run_cell(n: int, theta: float, family: str = "single_head", e: int = 1, J: float = 1.0,
             horizon: float = 10.0, samples: int = 2001, margin_tol: float = MARGIN_TOL,
             coeffs=None) -> CellResult:
    model = XXModel(n, J)
    state = make_two_branch(n, e, family_coeffs(family, n, e, coeffs), theta)
    times = time_grid(horizon, samples)
    amps = sector_amplitude_trace(state, model, times)
    states = [state] + [state.with_amps(a) for a in amps[1:]]
    report = detect_freezing_conditional(states, times, model, margin_tol)
    return CellResult(n, float(theta), report.r_f, report.dominant_value(), report.classification)


def _run_cell_kw(kw):
    return run_cell(**kw)


def worker_count(requested: int | None = None) -> int:
    cap = os.environ.get("ENTVOL_THREADS")
    n = requested if requested is not None else (os.cpu_count() or 1)
    if cap:
        n = min(n, max(int(cap), 1))
    return max(n, 1)


def phase_diagram(family: str, n_axis, theta_axis, e: int = 1, J: float = 1.0,
                  horizon: float = 10.0, samples: int = 2001, margin_tol: float = MARGIN_TOL,
                  coeffs=None, workers: int | None = 1) -> PhaseDiagramGrid:
    """R_f and frozen value on an (N, theta) grid using the conditional detector.

    Cells are independent; with ``workers > 1`` they run in a process pool and
    are merged back in N-major, theta-minor order, so the result does not
    depend on scheduling.
    """
    n_axis = np.asarray(list(n_axis), dtype=int)
    theta_axis = np.asarray(list(theta_axis), dtype=float)
    if n_axis.size == 0 or theta_axis.size == 0:
        raise DomainError("phase diagram axes must be nonempty")
    jobs = [dict(n=int(n), theta=float(th), family=family, e=e, J=J, horizon=horizon,
                 samples=samples, margin_tol=margin_tol, coeffs=coeffs)
            for n in n_axis for th in theta_axis]
    workers = worker_count(workers)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_run_cell_kw, jobs, chunksize=max(len(jobs) // (4 * workers), 1)))
    else:
        cells = [_run_cell_kw(kw) for kw in jobs]
    shape = (n_axis.size, theta_axis.size)
    r_f = np.array([c.r_f for c in cells]).reshape(shape)
    vals = np.array([np.nan if c.frozen_value is None else c.frozen_value for c in cells]).reshape(shape)
    cls = np.array([c.classification for c in cells], dtype=object).reshape(shape)
    return PhaseDiagramGrid(theta_axis, n_axis, r_f, vals, cls)


# ---------------------------------------------------------------------------
# open system


@dataclass(frozen=True)
class OpenDetectorConfig:
    """Value-detector settings for the two-cavity system.

    ``min_duration`` is in units of ``kappa t``.  A finite plateau exists for
    every ``theta > 0``, so the onset angle of visible freezing is set by the
    shortest plateau that still counts; fixing it in time units (rather than
    in samples) keeps that angle independent of the sampling density.
    """

    value_tol: float = VALUE_TOL
    min_len: int = MIN_LEN
    curvature_tol: float = CURVATURE_TOL
    min_duration: float = 0.02
    kappa: float = 1.0
    horizon: float = 10.0
    samples: int = 2001

    def params(self, theta: float) -> OpenSystemParams:
        return OpenSystemParams(theta, self.kappa, self.horizon, self.samples)

    def to_dict(self) -> dict:
        return asdict(self)


def detect_open(theta: float, config: OpenDetectorConfig = OpenDetectorConfig()) -> FreezeReport:
    trace = open_trace(config.params(theta))
    report = detect_freezing_value(trace, config.value_tol, config.min_len,
                                   config.curvature_tol, config.min_duration)
    # the bit-flipped state is a two-branch state with n = 4, e = 2
    report.predicted_case1, report.predicted_case2 = predicted_frozen_values(4, 2, theta)
    return report


def bracket_critical_theta(config: OpenDetectorConfig = OpenDetectorConfig(), bisection_tol: float = 1e-6,
                           lo: float = 0.01, hi: float = np.pi / 4 - 0.01) -> tuple[float, float]:
    """Shrink ``(lo, hi)`` around the smallest theta with a detected plateau."""

    def freezes(theta):
        return bool(detect_open(theta, config).intervals)

    if freezes(lo) or not freezes(hi):
        raise BracketError(
            f"freezing predicate does not bracket theta_crit on [{lo:.6g}, {hi:.6g}]: "
            f"f(lo)={freezes(lo)}, f(hi)={freezes(hi)}"
        )
    while hi - lo > bisection_tol:
        mid = 0.5 * (lo + hi)
        if freezes(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def critical_theta(config: OpenDetectorConfig = OpenDetectorConfig(), bisection_tol: float = 1e-6) -> float:
    lo, hi = bracket_critical_theta(config, bisection_tol)
    return 0.5 * (lo + hi)
