"""Independent enumeration oracle: exact and float dynamic programming over the
orthant, with endpoint filters (anywhere / chosen boundary hyperplanes / origin)
and full endpoint-resolved tables.

Exact mode uses Python big integers (big rationals for non-integer weights) and
is bit-reproducible.  Float mode renormalizes by the total weight S(1) at every
step, storing u_n = s_n / S(1)^n together with the log scale, so series up to
n ~ 1000 neither overflow nor silently degrade.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from orthantwalks import _dp
from orthantwalks.stepset import StepSet


class CapacityError(RuntimeError):
    """A resource bound (state count / table size) was exceeded."""


DEFAULT_STATE_CAP = 1 << 26


def normalize_filter(flt, dim):
    """Canonical filter form: 'anywhere' or ('axes', sorted axis tuple).

    Axes are 0-based user-coordinate indices; 'origin' means all axes.
    """
    if flt in (None, "anywhere"):
        return "anywhere"
    if flt == "origin":
        return ("axes", tuple(range(dim)))
    if isinstance(flt, tuple) and len(flt) == 2 and flt[0] == "axes":
        axes = tuple(sorted(set(int(a) for a in flt[1])))
        if not axes:
            return "anywhere"
        if any(a < 0 or a >= dim for a in axes):
            raise ValueError("filter axis out of range")
        return ("axes", axes)
    raise ValueError(f"unknown endpoint filter {flt!r}")


def parse_filter(text, dim):
    """Parse CLI filter syntax: anywhere | origin | axes=1,2 (1-based axes)."""
    text = text.strip().lower()
    if text in ("anywhere", "origin"):
        return normalize_filter(text, dim)
    if text.startswith("axes="):
        axes = tuple(int(a) - 1 for a in text[5:].split(",") if a.strip())
        return normalize_filter(("axes", axes), dim)
    raise ValueError(f"cannot parse endpoint filter {text!r}")


def filter_name(flt, dim):
    if flt == "anywhere":
        return "anywhere"
    axes = flt[1]
    if len(axes) == dim:
        return "origin"
    return "axes=" + ",".join(str(a + 1) for a in axes)


@dataclass
class CountSeries:
    """Walk counts s_0..s_n under an endpoint filter.

    mode 'exact': values are ints/Fractions.  mode 'float': values are the
    renormalized u_n = s_n / S(1)^n and log_scale = log S(1), so
    log s_n = log u_n + n * log_scale.
    """

    mode: str
    filter: object
    values: object
    log_scale: float = 0.0
    underflow: bool = False

    def __len__(self):
        return len(self.values)

    def n_max(self):
        return len(self.values) - 1

    def value(self, n):
        if self.mode == "exact":
            return self.values[n]
        return self.values[n] * math.exp(n * self.log_scale)

    def log_value(self, n):
        if self.mode == "exact":
            v = self.values[n]
            return math.log(v) if v > 0 else -math.inf
        u = self.values[n]
        return (math.log(u) + n * self.log_scale) if u > 0 else -math.inf


@dataclass
class EndpointTable:
    """Exact endpoint-resolved counts after n steps."""

    n: int
    counts: dict

    def total(self):
        return sum(self.counts.values())


def _exact_weights(s: StepSet):
    if all(w.denominator == 1 for _, w in s.steps):
        return [(v, int(w)) for v, w in s.steps]
    return [(v, w) for v, w in s.steps]


def _exact_frontier(s: StepSet, n, state_cap):
    """Run the exact DP for n steps and return the list of frontier dicts' reductions lazily."""
    steps = _exact_weights(s)
    frontier = {(0,) * s.dim: steps[0][1] * 0 + 1}
    yield frontier
    for _ in range(n):
        nxt = {}
        for pos, c in frontier.items():
            for v, w in steps:
                q = tuple(p + dv for p, dv in zip(pos, v))
                if any(x < 0 for x in q):
                    continue
                nxt[q] = nxt.get(q, 0) + c * w
        if len(nxt) > state_cap:
            raise CapacityError(
                f"exact DP frontier exceeded {state_cap} states; raise state_cap to allow"
            )
        frontier = nxt
        yield frontier


def _reduce(frontier, flt):
    if flt == "anywhere":
        return sum(frontier.values())
    axes = flt[1]
    return sum(c for pos, c in frontier.items() if all(pos[a] == 0 for a in axes))


def count_walks(s: StepSet, n_max, flt="anywhere", mode="exact",
                state_cap=DEFAULT_STATE_CAP):
    """Total weight of n-step orthant walks satisfying the endpoint filter, n <= n_max."""
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    flt = normalize_filter(flt, s.dim)
    if mode == "float":
        return count_profile(s, n_max, state_cap=state_cap)[flt]
    if mode != "exact":
        raise ValueError("mode must be 'exact' or 'float'")
    values = [_reduce(f, flt) for f in _exact_frontier(s, n_max, state_cap)]
    return CountSeries("exact", flt, values)


def count_walks_scaled(s: StepSet, n_max, flt="anywhere", state_cap=DEFAULT_STATE_CAP):
    """Float-mode counting (see CountSeries); one DP pass, renormalized by S(1)."""
    return count_walks(s, n_max, flt, mode="float", state_cap=state_cap)


def count_profile(s: StepSet, n_max, state_cap=DEFAULT_STATE_CAP, force_numpy=False):
    """One float DP pass returning CountSeries for every standard filter.

    Standard filters: anywhere, every single axis, and the origin; in d <= 3
    every axis subset is recorded.
    """
    if (n_max + 1) ** s.dim > state_cap:
        raise CapacityError(f"float DP state {(n_max + 1) ** s.dim} exceeds cap {state_cap}")
    s1 = s.total_weight()
    vectors = [v for v, _ in s.steps]
    weights = [float(w / s1) for _, w in s.steps]
    raw = _dp.evolve_float(vectors, weights, n_max, force_numpy=force_numpy)
    log_scale = math.log(float(s1))
    out = {}
    for key, arr in raw.items():
        flt = "anywhere" if key == "tot" else normalize_filter(key, s.dim)
        positive = arr[arr > 0]
        underflow = bool(positive.size and positive.min() < 1e-290)
        out[flt] = CountSeries("float", flt, np.asarray(arr), log_scale, underflow)
    return out


def endpoint_table(s: StepSet, n, max_n=12, state_cap=DEFAULT_STATE_CAP):
    """Exact coefficients of the length-n slice of the full endpoint generating function."""
    if n > max_n:
        raise CapacityError(f"endpoint tables limited to n <= {max_n} by default")
    frontier = None
    for frontier in _exact_frontier(s, n, state_cap):
        pass
    return EndpointTable(n, dict(frontier))
