"""Shared test utilities: random model generation and brute-force oracles."""

from __future__ import annotations

import itertools
from fractions import Fraction

from hypothesis import strategies as st

from orthantwalks.stepset import build_stepset

WEIGHT_CHOICES = [Fraction(1), Fraction(2), Fraction(3), Fraction(1, 2), Fraction(3, 2)]


@st.composite
def symmetric_models(draw, dims=(2, 3), want=("pos", "neg", "hs")):
    """Random weighted step sets symmetric over all canonical axes but the last.

    Weights are assigned per reflection orbit of the first d-1 coordinates, so
    the symmetry constraints hold by construction.  The drift class is drawn
    from ``want``.
    """
    d = draw(st.sampled_from(list(dims)))
    mode = draw(st.sampled_from(list(want)))
    reps = list(itertools.product((0, 1), repeat=d - 1))

    def draw_layer(force_nonzero):
        coeffs = {}
        for r in reps:
            use = draw(st.booleans())
            if use:
                coeffs[r] = draw(st.sampled_from(WEIGHT_CHOICES))
        if force_nonzero and not coeffs:
            coeffs[draw(st.sampled_from(reps))] = draw(st.sampled_from(WEIGHT_CHOICES))
        return coeffs

    a = draw_layer(True)
    b = draw_layer(True) if mode != "hs" else dict(a)
    q = draw_layer(False)
    q.pop((0,) * (d - 1), None)  # the zero vector is not a step
    # every symmetric axis needs a forward step somewhere
    for j in range(d - 1):
        if not any(r[j] for layer in (a, q, b) for r in layer):
            rj = tuple(1 if i == j else 0 for i in range(d - 1))
            a[rj] = a.get(rj, Fraction(0)) + draw(st.sampled_from(WEIGHT_CHOICES))
            if mode == "hs":
                b[rj] = a[rj]
    asum = sum(w * 2 ** sum(r) for r, w in a.items())
    bsum = sum(w * 2 ** sum(r) for r, w in b.items())
    if mode == "pos" and asum >= bsum:
        a, b, asum, bsum = b, a, bsum, asum
    if mode == "neg" and asum <= bsum:
        a, b, asum, bsum = b, a, bsum, asum
    if mode == "pos" and asum == bsum:
        b[reps[0]] = b.get(reps[0], Fraction(0)) + 1
    if mode == "neg" and asum == bsum:
        a[reps[0]] = a.get(reps[0], Fraction(0)) + 1

    steps = []
    for layer, zd in ((a, -1), (q, 0), (b, 1)):
        for r, w in layer.items():
            signs = [(-1, 1) if c else (0,) for c in r]
            for pattern in itertools.product(*signs):
                steps.append((pattern + (zd,), w))
    return build_stepset(d, steps)


def brute_force_counts(steps, n_max, dim, endpoint=None, axes=None):
    """Oracle: direct recursive enumeration of orthant paths, no DP reuse.

    ``steps`` is a list of (vector, weight).  Returns the list s_0..s_{n_max}
    of total weights of paths whose endpoint satisfies the filter:
    everything, exact ``endpoint``, or zero on every axis in ``axes``.
    """
    totals = []
    frontier = {(0,) * dim: Fraction(1)}
    for n in range(n_max + 1):
        tot = Fraction(0)
        for pos, w in frontier.items():
            if endpoint is not None and pos != tuple(endpoint):
                continue
            if axes is not None and any(pos[j] != 0 for j in axes):
                continue
            tot += w
        totals.append(tot)
        nxt = {}
        for pos, w in frontier.items():
            for v, wv in steps:
                q = tuple(p + c for p, c in zip(pos, v))
                if any(c < 0 for c in q):
                    continue
                nxt[q] = nxt.get(q, Fraction(0)) + w * wv
        frontier = nxt
    return totals
