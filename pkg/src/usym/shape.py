"""Grid evidence for the shape of |F|.

A universal symbol has a connected minimum set, |F| strictly monotone and
unbounded on each side of it, and if bounded it is c * exp(i a x).  These
functions look for violations of that picture on finite windows.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .symbols import SymbolExpr, evaluate

MIN_RTOL = 1e-9
FLAT_TOL = 1e-7
MULT_TOL = 1e-6
GROWTH_FACTOR = 1.5
PEAK_RTOL = 1e-9


@dataclass
class MinSetApprox:
    window: tuple[float, float]
    h: float
    components: list[tuple[float, float]]
    grid_min: float


@dataclass
class ShapeVerdict:
    connected: bool
    strictly_monotone_off_min: bool
    growth_witnessed: bool
    bounded_exponential: tuple[complex, float] | None
    window_max: list[float] = field(default_factory=list)
    component_counts: list[int] = field(default_factory=list)
    interior_maxima: list[float] = field(default_factory=list)
    windows: list[tuple[float, int]] = field(default_factory=list)

    @property
    def rejects(self) -> bool:
        if self.bounded_exponential is not None:
            return False
        return not (self.connected and self.strictly_monotone_off_min and self.growth_witnessed)

    @property
    def reason(self) -> str:
        if not self.rejects:
            return ""
        parts = []
        if not self.connected:
            parts.append(f"disconnected minimum set ({self.component_counts[-1]} components)")
        if not self.strictly_monotone_off_min:
            where = ", ".join(f"{x:.4g}" for x in self.interior_maxima[:4])
            parts.append(f"relative maximum of |F| off the minimum set (near {where})")
        if not self.growth_witnessed:
            parts.append("|F| bounded on the windows but not of the form c*exp(iax)")
        return "; ".join(parts)

    def to_json(self) -> dict:
        be = self.bounded_exponential
        return {
            "connected": self.connected,
            "strictly_monotone_off_min": self.strictly_monotone_off_min,
            "growth_witnessed": self.growth_witnessed,
            "bounded_exponential": None if be is None else {"c_re": be[0].real, "c_im": be[0].imag, "alpha": be[1]},
            "window_max": self.window_max,
            "component_counts": self.component_counts,
            "interior_maxima": self.interior_maxima[:16],
            "windows": [list(w) for w in self.windows],
            "rejects": self.rejects,
            "reason": self.reason,
        }


def _grid(W: float, n: int) -> np.ndarray:
    return np.linspace(-W, W, n)


def _min_mask(mags: np.ndarray) -> tuple[np.ndarray, float]:
    gmin = float(mags.min())
    tol = MIN_RTOL * (1 + gmin)
    # one grid step of slack: the continuous minimum may sit between samples
    d = np.abs(np.diff(mags))
    step = np.zeros_like(mags)
    step[:-1] = d
    step[1:] = np.maximum(step[1:], d)
    return mags - step <= gmin + tol, gmin


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    idx = np.flatnonzero(np.diff(np.concatenate([[0], mask.astype(int), [0]])))
    return [(int(s), int(e) - 1) for s, e in zip(idx[::2], idx[1::2])]


def min_set(F: SymbolExpr, W: float, n: int) -> MinSetApprox:
    """Grid approximation of the set where |F| attains its infimum.

    A grid point belongs if |F| there is within min_tol of the grid minimum
    after allowing one grid step of change (the largest adjacent difference),
    so that minima falling between samples are not missed.
    """
    if W <= 0 or n < 16:
        raise ValueError("need W > 0 and n >= 16")
    xs = _grid(W, n)
    mags = np.abs(evaluate(F, xs))
    mask, gmin = _min_mask(mags)
    comps = [(float(xs[s]), float(xs[e])) for s, e in _runs(mask)]
    return MinSetApprox((-W, W), float(xs[1] - xs[0]), comps, gmin)


def interior_maxima(F: SymbolExpr, W: float, n: int) -> list[float]:
    """Relative maxima of |F| (plateaus included) away from the minimum set and the edges."""
    xs = _grid(W, n)
    mags = np.abs(evaluate(F, xs))
    in_min, _ = _min_mask(mags)
    tol = PEAK_RTOL * (1 + mags)
    same = np.abs(np.diff(mags)) <= np.maximum(tol[:-1], tol[1:])
    # plateau runs: maximal stretches of mutually adjacent equal values
    out = []
    start = 0
    for j in range(1, n + 1):
        if j < n and same[j - 1]:
            continue
        s, e = start, j - 1
        start = j
        if s == 0 or e == n - 1 or in_min[s:e + 1].any():
            continue
        v = mags[s:e + 1].max()
        if mags[s - 1] < v - tol[s] and mags[e + 1] < v - tol[e]:
            out.append(float(xs[(s + e) // 2]))
    return out


def exponential_detector(F: SymbolExpr, W: float, n: int, n_pairs: int = 64) -> tuple[complex, float] | None:
    """(c, a) if F looks like c * exp(i a x) on [-W, W], else None."""
    xs = _grid(W, n)
    vals = evaluate(F, xs)
    mags = np.abs(vals)
    f0 = evaluate(F, 0.0)
    if f0 == 0:
        return (0j, 0.0) if mags.max() == 0 else None
    if mags.max() - mags.min() > FLAT_TOL * mags.max():
        return None
    g = vals / f0
    probe = np.linspace(-W, W, n_pairs)
    px, py = np.meshgrid(probe, probe, indexing="ij")
    inside = np.abs(px + py) <= W
    px, py = px[inside], py[inside]
    defect = np.abs(evaluate(F, px + py) / f0 - evaluate(F, px) * evaluate(F, py) / f0**2)
    if defect.max() > MULT_TOL:
        return None
    phase = np.unwrap(np.angle(g))
    alpha = float(np.polyfit(xs, phase, 1)[0])
    return complex(f0), alpha


def shape_verdict(F: SymbolExpr, schedule) -> ShapeVerdict:
    """Connectivity, monotonicity and growth evidence across windows.

    Connectivity is judged on the two largest windows only: a disconnected
    minimum set must show in both.
    """
    schedule = [(float(W), int(n)) for W, n in schedule]
    if not schedule:
        raise ValueError("empty schedule")
    if any(w1 <= w0 for (w0, _), (w1, _) in zip(schedule, schedule[1:])):
        raise ValueError("schedule must be strictly increasing in W")
    counts, wmax, peaks = [], [], []
    for W, n in schedule:
        ms = min_set(F, W, n)
        counts.append(len(ms.components))
        wmax.append(float(np.abs(evaluate(F, _grid(W, n))).max()))
        peaks.extend(interior_maxima(F, W, n))
    connected = not all(c >= 2 for c in counts[-2:])
    growth = len(wmax) >= 2 and wmax[-1] >= GROWTH_FACTOR * wmax[0]
    W_last, n_last = schedule[-1]
    expo = exponential_detector(F, W_last, n_last)
    return ShapeVerdict(
        connected=connected,
        strictly_monotone_off_min=not peaks,
        growth_witnessed=growth,
        bounded_exponential=expo,
        window_max=wmax,
        component_counts=counts,
        interior_maxima=sorted(set(peaks)),
        windows=schedule,
    )
