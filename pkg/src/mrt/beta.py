"""Beta numbers: normalized L^p distances from a measure to a line.

For a region E with diameter diam E and a line l,

    beta_p(mu, E, l) = ( integral_E (dist(x, l) / diam E)^p dmu / mu(E) )^(1/p)

with the convention beta = 0 when mu(E) = 0. beta_best takes the infimum over
lines for a single region. beta_multi takes the coupled infimum for a dyadic
cube Q over its nearby-cube family Delta*(Q) (same scale and one coarser,
triples inside the closed 1600 sqrt(n) dilate of Q):

    variant "star":       inf_l max_R bhat_p(mu, 3R, l)^2 * min(mu(3R)/diam 3R, 1)
    variant "star_star":  inf_l max_R bhat_p(mu, 3R, l)
    variant "star_c":     as "star" but only R with mu(3R) >= c diam 3R,
                          weight min(c, 1); zero if no cube qualifies

where bhat = min(beta, 1) is the per-cube beta truncated at 1 (a line can sit
arbitrarily far from one member of the family, but the coupled scores live in
[0, 1] by definition). Only mass-carrying nearby cubes are ever enumerated:
empty cubes contribute 0 to every max. The reported value is a certified upper
bound: it is the exact score of a concrete witness line, chosen from per-cube
minimizers, the global minimizer, atom-pair lines, and a deterministic
pattern-search refinement. The p = 1 search additionally scores the p = 2
witness and the star_c search scores the star witness, so the computed values
inherit the monotonicity of the definitions: nondecreasing in p on {1, 2} and
star_c <= star cube by cube.

beta_sup_set is the set version (sup over points instead of the mass
integral), exact in the plane via the minimum-width strip.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .dyadic import (
    Box,
    DyadicCube,
    NEARBY_DILATION,
    in_nearby_family,
    parent_scale_bound,
    same_scale_radius,
)
from .errors import DegenerateRegion
from .geometry import Line, fit_line, pattern_search, unit
from .measure import Ball, DiscreteMeasure, Region

VARIANTS = ("star", "star_star", "star_c")

# per-cube candidate line fits per family; huge families keep the heaviest
_MAX_ENTRY_FITS = 48

# planar families up to this many atom slots also get an angle x offset
# candidate sweep: the coupled max objective has many local basins (and flat
# plateaus where every nearby cube is capped) that line fits alone miss.
# Families on <= 16 distinct atoms get oracle-grade density.
_GRID_SLOT_LIMIT = 240
_GRID_ANGLES = 144
_GRID_OFFSETS = 48
_GRID_ANGLES_DENSE = 720
_GRID_OFFSETS_DENSE = 120


@dataclass
class BetaValue:
    """A beta number with its witness line.

    value is an exact evaluation of the defining objective at `line` (for the
    inf variants this makes it a certified upper bound of the infimum).
    """

    value: float
    line: Line | None
    p: object
    variant: str
    region: object = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if not np.isfinite(self.value) or not 0 <= self.value <= 1 + 1e-9:
            raise ValueError(f"beta value must lie in [0, 1], got {self.value}")


def beta_fixed_line(mu: DiscreteMeasure, region: Region, line: Line, p=2) -> float:
    """beta_p(mu, E, l) for a fixed line; 0 when mu(E) = 0."""
    if not (isinstance(p, (int, float)) and p >= 1):
        raise ValueError("beta_fixed_line needs numeric p >= 1")
    idx = mu.atoms_in(region)
    if len(idx) == 0:
        return 0.0
    diam = region.diameter
    if diam <= 0:
        raise DegenerateRegion("region with atoms has zero diameter")
    w = mu.weights[idx]
    d = line.distances(mu.points[idx])
    return float((np.sum(w * (d / diam) ** p) / w.sum()) ** (1.0 / p))


def beta_best(mu: DiscreteMeasure, region: Region, p=2) -> BetaValue:
    """Best-line beta of a single region: inf_l beta_p(mu, E, l).

    Exact for p=2 (principal line) and, in the plane, for p="sup" (min-width
    strip); p=1 uses the multistart reweighted fit. The value is the witness
    line's exact objective.
    """
    idx = mu.atoms_in(region)
    if len(idx) == 0:
        return BetaValue(0.0, None, p, "best", region, {"atoms": 0})
    diam = region.diameter
    if diam <= 0:
        raise DegenerateRegion("region with atoms has zero diameter")
    X = mu.points[idx]
    w = mu.weights[idx]
    fit_p = p if p in (1, 2, "sup") else 2
    line, _ = fit_line(X, w, fit_p)
    if p == "sup":
        value = float(line.distances(X).max()) / diam
    else:
        value = beta_fixed_line(mu, region, line, p)
    if p == 1:
        # score the p=2 witness too; keeps the computed values nondecreasing
        # in p (power-mean inequality at the shared line) regardless of how
        # well the reweighted fit converged
        line2, _ = fit_line(X, w, 2)
        value2 = beta_fixed_line(mu, region, line2, 1)
        if value2 < value:
            value, line = value2, line2
    return BetaValue(value, line, p, "best", region, {"atoms": int(len(idx))})


def beta_sup_set(points, region: Region) -> float:
    """Set beta: inf_l sup_{x in E cap Q} dist(x, l) / diam Q; 0 if empty."""
    X = np.atleast_2d(np.asarray(points, dtype=float))
    mask = region.contains_mask(X)
    X = X[mask]
    if len(X) == 0:
        return 0.0
    diam = region.diameter
    if diam <= 0:
        raise DegenerateRegion("region with points has zero diameter")
    line, maxdist = fit_line(X, None, "sup")
    return float(maxdist) / diam


# ---------------------------------------------------------------------------
# nearby mass-carrying cubes


class BetaCache:
    """Per-measure memo for nearby-cube enumeration and beta_multi values.

    Jones sums and tree draws evaluate the same cubes many times; the cache
    keys are exact (cube, p, variant, c) tuples so hits are bit-identical to
    recomputation.
    """

    def __init__(self, mu: DiscreteMeasure):
        self.mu = mu
        self._triples: dict[int, list[tuple[DyadicCube, np.ndarray, float]]] = {}
        self._tripidx: dict[int, np.ndarray] = {}
        self._values: dict[tuple, BetaValue] = {}

    def mass_triples(self, k: int) -> list[tuple[DyadicCube, np.ndarray, float]]:
        """All scale-k cubes R with mu(3R) > 0, with atom indices and masses."""
        out = self._triples.get(k)
        if out is None:
            mu = self.mu
            n = mu.dim
            idx = np.floor(mu.points * 2.0**k).astype(np.int64)
            occupied = {tuple(int(v) for v in row) for row in idx}
            cand: set[tuple[int, ...]] = set()
            for cell in occupied:
                for off in itertools.product((-2, -1, 0, 1), repeat=n):
                    cand.add(tuple(c + o for c, o in zip(cell, off)))
            out = []
            for key in sorted(cand):
                R = DyadicCube(k, key)
                atoms = mu.atoms_in_triple(R)
                if len(atoms):
                    out.append((R, atoms, float(mu.weights[atoms].sum())))
            self._triples[k] = out
        return out

    def triple_index(self, k: int) -> np.ndarray:
        """Integer index matrix aligned with mass_triples(k), one row per cube."""
        idx = self._tripidx.get(k)
        if idx is None:
            trips = self.mass_triples(k)
            if trips:
                idx = np.array([R.index for (R, _, _) in trips], dtype=np.int64)
            else:
                idx = np.empty((0, self.mu.dim), dtype=np.int64)
            self._tripidx[k] = idx
        return idx

    def get(self, key):
        return self._values.get(key)

    def put(self, key, value: BetaValue):
        self._values[key] = value


def nearby_cubes_with_mass(
    mu: DiscreteMeasure, Q: DyadicCube, cache: BetaCache | None = None
) -> list[tuple[DyadicCube, np.ndarray, float]]:
    """Members R of the nearby family of Q with mu(3R) > 0.

    Returns (R, atom indices of 3R, mu(3R)) sorted by (scale, index). These
    are the only family members that can contribute to any beta variant.
    """
    if cache is None:
        cache = BetaCache(mu)
    n = Q.dim
    qidx = np.asarray(Q.index, dtype=np.int64)
    out = []
    for k in (Q.k, Q.k - 1):
        trips = cache.mass_triples(k)
        if not trips:
            continue
        # vectorized form of in_nearby_family over the whole per-scale list
        idx = cache.triple_index(k)
        if k == Q.k:
            keep = np.all(np.abs(idx - qidx) <= same_scale_radius(n), axis=1)
        else:
            keep = np.all(np.abs(4 * idx + 1 - 2 * qidx) <= parent_scale_bound(n), axis=1)
        for i in np.flatnonzero(keep):
            out.append(trips[i])
    return out


# ---------------------------------------------------------------------------
# coupled inf-max over the nearby family


def _quad_roots(a, b, c):
    """Real roots of a t^2 + b t + c = 0, vectorized.

    Uses the q-form (q = -(b + sign(b) sqrt(disc)) / 2, roots q/a and c/q) so
    roots stay accurate when a is tiny: the naive (-b +- sqrt(disc)) / 2a form
    cancels catastrophically for near-linear quadratics, which arise here
    whenever two entries have almost equal leading moments.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    disc = b * b - 4.0 * a * c
    ok = disc >= 0
    if not ok.any():
        return np.empty(0)
    a, b, c, disc = a[ok], b[ok], c[ok], disc[ok]
    sgn = np.where(b >= 0.0, 1.0, -1.0)
    q = -0.5 * (b + sgn * np.sqrt(disc))
    out = []
    m = np.abs(a) > 1e-300
    if m.any():
        out.append(q[m] / a[m])
    m = np.abs(q) > 1e-300
    if m.any():
        out.append(c[m] / q[m])
    if not out:
        return np.empty(0)
    return np.concatenate(out)


def beta_multi(
    mu: DiscreteMeasure,
    Q: DyadicCube,
    p=2,
    variant: str = "star",
    c: float | None = None,
    refine: bool = True,
    cache: BetaCache | None = None,
) -> BetaValue:
    """Coupled best-line beta of Q over its nearby-cube family.

    See module docstring for the three variants. The returned value equals
    the witness line's exact score (sqrt of the weighted min-max for the
    squared variants), making it a certified upper bound of the infimum.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    if variant == "star_c":
        if c is None or c <= 0:
            raise ValueError("variant star_c needs c > 0")
    if not (isinstance(p, (int, float)) and p >= 1):
        raise ValueError("beta_multi needs numeric p >= 1")
    key = (Q, p, variant, c, bool(refine))
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return hit

    raw_entries = nearby_cubes_with_mass(mu, Q, cache)
    # triple diameters depend only on the scale; the family spans two scales
    diam3 = {kk: 3.0 * float(np.sqrt(Q.dim)) * 2.0**-kk for kk in (Q.k, Q.k - 1)}
    if variant == "star_c":
        raw_entries = [e for e in raw_entries if e[2] >= c * diam3[e[0].k]]
    if not raw_entries:
        result = BetaValue(0.0, None, p, variant, Q, {"nearby_mass_cubes": 0})
        if cache is not None:
            cache.put(key, result)
        return result
    # same-scale cubes with identical atom sets have identical scores: keep
    # one representative. A coarse cube whose triple holds exactly the same
    # atoms as a same-family fine cube is dominated outright: halving the
    # diameter quadruples b^2 and cannot shrink the density weight, so the
    # fine twin scores at least as much at every line.
    entries = []
    seen_sets: set = set()
    fine_sets: set = set()
    k_fine = max(R.k for (R, _, _) in raw_entries)
    for R, atoms, mass in raw_entries:
        if R.k == k_fine:
            fine_sets.add(atoms.tobytes())
    for R, atoms, mass in raw_entries:
        sig = (R.k, atoms.tobytes())
        if sig in seen_sets:
            continue
        if R.k < k_fine and atoms.tobytes() in fine_sets:
            continue
        seen_sets.add(sig)
        entries.append((R, atoms, mass))

    # flat slot arrays: one distance pass scores the whole family
    atom_arrays = [a for (_, a, _) in entries]
    slots = np.concatenate(atom_arrays)
    entry_id = np.repeat(np.arange(len(entries)), [len(a) for a in atom_arrays])
    P = mu.points[slots]
    W = mu.weights[slots]
    counts = np.array([len(a) for a in atom_arrays])
    starts = np.zeros(len(counts), dtype=np.intp)
    starts[1:] = np.cumsum(counts)[:-1]
    cen = P.mean(axis=0)
    Pc = P - cen
    inv_diam = np.array([1.0 / diam3[R.k] for (R, _, _) in entries])
    inv_mass = np.array([1.0 / mass for (_, _, mass) in entries])
    slot_inv_diam = inv_diam[entry_id]
    if variant == "star":
        entry_factor = np.minimum(
            np.array([mass / diam3[R.k] for (R, _, mass) in entries]), 1.0
        )
    elif variant == "star_c":
        entry_factor = np.full(len(entries), min(float(c), 1.0))
    else:
        entry_factor = None

    def entry_betas(line: Line, cap: bool = True) -> np.ndarray:
        Y = P - line.base
        t = Y @ line.direction
        resid = Y - t[:, None] * line.direction
        d = np.sqrt(np.einsum("ij,ij->i", resid, resid))
        contrib = W * (d * slot_inv_diam) ** p
        sums = np.bincount(entry_id, weights=contrib, minlength=len(entries))
        b = (sums * inv_mass) ** (1.0 / p)
        # per-cube betas are truncated at 1: a line can sit arbitrarily far
        # from one nearby cube, but the variant scores live in [0, 1]
        return np.minimum(b, 1.0) if cap else b

    def score(line: Line) -> float:
        b = entry_betas(line)
        vals = b * b * entry_factor if entry_factor is not None else b
        return float(vals.max())

    def score_many(lines: list[Line]) -> np.ndarray:
        # one pass over all candidates; distances via d^2 = |y|^2 - (y . dir)^2
        # on family-centered coordinates so the subtraction stays accurate
        dirs = np.array([ln.direction for ln in lines])
        bases = np.array([ln.base for ln in lines]) - cen
        t = Pc @ dirs.T - np.einsum("cj,cj->c", bases, dirs)[None, :]
        sq = (
            np.einsum("ij,ij->i", Pc, Pc)[:, None]
            - 2.0 * (Pc @ bases.T)
            + np.einsum("cj,cj->c", bases, bases)[None, :]
            - t * t
        )
        sq = np.maximum(sq, 0.0)
        if p == 2:
            contrib = (W * slot_inv_diam * slot_inv_diam)[:, None] * sq
            sums = np.add.reduceat(contrib, starts, axis=0)
            b2 = np.minimum(sums * inv_mass[:, None], 1.0)
            vals = b2 * entry_factor[:, None] if entry_factor is not None else np.sqrt(b2)
            return vals.max(axis=0)
        d = np.sqrt(sq)
        contrib = W[:, None] * (d * slot_inv_diam[:, None]) ** p
        sums = np.add.reduceat(contrib, starts, axis=0)
        b = np.minimum((sums * inv_mass[:, None]) ** (1.0 / p), 1.0)
        vals = b * b * entry_factor[:, None] if entry_factor is not None else b
        return vals.max(axis=0)

    fit_p = p if p in (1, 2) else 2
    candidates: list[Line] = []
    # cap per-cube fits on huge families; order is deterministic. Candidates
    # only seed the search, so the cheap principal-line fit is enough here;
    # the scorer itself is always p-correct.
    order = sorted(range(len(entries)), key=lambda i: (-entries[i][2], entries[i][0].k, entries[i][0].index))
    pick = order[:_MAX_ENTRY_FITS]
    if Q.dim == 2:
        # closed-form principal line per entry from bincount moments; the
        # looped fit is only kept for higher dimensions
        Sw = np.add.reduceat(W, starts)
        Swx = np.add.reduceat(W * Pc[:, 0], starts)
        Swy = np.add.reduceat(W * Pc[:, 1], starts)
        Sxx = np.add.reduceat(W * Pc[:, 0] * Pc[:, 0], starts)
        Sxy = np.add.reduceat(W * Pc[:, 0] * Pc[:, 1], starts)
        Syy = np.add.reduceat(W * Pc[:, 1] * Pc[:, 1], starts)
        mx, my = Swx / Sw, Swy / Sw
        cxx = Sxx / Sw - mx * mx
        cxy = Sxy / Sw - mx * my
        cyy = Syy / Sw - my * my
        ang = 0.5 * np.arctan2(2.0 * cxy, cxx - cyy)
        for i in pick:
            candidates.append(
                Line(
                    cen + np.array([mx[i], my[i]]),
                    np.array([np.cos(ang[i]), np.sin(ang[i])]),
                )
            )
    else:
        for i in pick:
            _R, atoms, _mass = entries[i]
            ln, _ = fit_line(mu.points[atoms], mu.weights[atoms], 2)
            candidates.append(ln)
    big = Q.dilate(NEARBY_DILATION * float(np.sqrt(Q.dim)))
    all_atoms = np.unique(slots)
    ln, _ = fit_line(mu.points[all_atoms], mu.weights[all_atoms], fit_p)
    candidates.append(ln)
    # the unique-coordinate row sort is only worth it when the family is
    # small enough for the dense angle sweep to be in play
    if len(all_atoms) <= 64:
        pts = np.unique(mu.points[all_atoms], axis=0)
    else:
        pts = mu.points[all_atoms[:17]]
    if len(pts) <= 16:
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                diff = pts[j] - pts[i]
                if float(np.linalg.norm(diff)) > 1e-300:
                    candidates.append(Line(pts[i], unit(diff)))
    dense = len(pts) <= 16 and p == 2
    if Q.dim == 2 and dense:
        q_w = W * slot_inv_diam**2
        factor = entry_factor if entry_factor is not None else np.ones(len(entries))
        M0 = np.add.reduceat(q_w, starts) * inv_mass
        E = len(entries)
        ii, jj = np.triu_indices(E, 1)
        fi = np.repeat(np.arange(E), E)
        fj = np.tile(np.arange(E), E)

        def exact_offset_min(th):
            # along offset t each entry scores a capped parabola; the envelope
            # minimum lies at a vertex or a pairwise breakpoint
            nrm = np.array([-np.sin(th), np.cos(th)])
            s = P @ nrm - cen @ nrm
            M1 = np.add.reduceat(q_w * s, starts) * inv_mass
            M2 = np.add.reduceat(q_w * s * s, starts) * inv_mass
            A = factor * M2
            B = factor * M1
            C = factor * M0
            cand = [M1 / np.maximum(M0, 1e-300)]
            if len(ii):
                cand.append(_quad_roots(C[ii] - C[jj], -2.0 * (B[ii] - B[jj]), A[ii] - A[jj]))
            # parabola of e crossing a plateau level w_f (own cap included)
            cand.append(_quad_roots(C[fi], -2.0 * B[fi], A[fi] - factor[fj]))
            ts = np.concatenate([c[np.isfinite(c)] for c in cand])
            if not len(ts):
                ts = np.zeros(1)

            def envelope(sub):
                b2 = np.minimum(
                    np.maximum(M2[:, None] - 2.0 * M1[:, None] * sub[None, :] + M0[:, None] * sub[None, :] ** 2, 0.0),
                    1.0,
                )
                return (factor[:, None] * b2).max(axis=0)

            if len(ts) > 256:
                # each term is a clamped convex parabola, so the envelope is
                # unimodal in t; scoring a coarse subsample of the sorted
                # breakpoints and then only the basin around its (tie-expanded)
                # argmin visits the same global minimum at a fraction of the cost
                ts = np.sort(ts)
                stride = max(1, len(ts) // 64)
                coarse = np.arange(0, len(ts), stride)
                wc = envelope(ts[coarse])
                wmin = wc.min()
                tied = np.flatnonzero(wc <= wmin * (1.0 + 1e-12) + 1e-300)
                lo = max(0, int(coarse[tied[0]]) - stride)
                hi = min(len(ts), int(coarse[tied[-1]]) + stride + 1)
                sel = ts[lo:hi]
                worst = envelope(sel)
                j = int(np.argmin(worst))
                return float(worst[j]), float(sel[j])
            worst = envelope(ts)
            j = int(np.argmin(worst))
            return float(worst[j]), float(ts[j])

        n_ang = _GRID_ANGLES_DENSE
        sweep = np.empty(n_ang)
        sweep_t = np.empty(n_ang)
        for i in range(n_ang):
            sweep[i], sweep_t[i] = exact_offset_min(np.pi * i / n_ang)
        # refine every local basin of the circular angle profile; value-ranked
        # starts miss narrow dips whose grid samples sit high on the wall
        local = np.flatnonzero(
            (sweep <= np.roll(sweep, 1)) & (sweep <= np.roll(sweep, -1))
        )
        if len(local) > 48:
            # flat profiles (every angle ties) otherwise refine hundreds of
            # identical basins; generic profiles have far fewer dips
            local = local[np.argsort(sweep[local], kind="stable")[:48]]
        for i in local:
            if sweep[i] <= 1e-30:
                # already an exact zero: nothing below it to search for
                th = np.pi * i / n_ang
                tr = sweep_t[i]
            else:
                _v, x = pattern_search(
                    lambda q: exact_offset_min(q[0])[0],
                    np.array([np.pi * i / n_ang]),
                    np.array([np.pi / n_ang]),
                    max_iter=60,
                    tol=1e-14,
                )
                th = float(x[0])
                _vr, tr = exact_offset_min(th)
            candidates.append(
                Line(cen + tr * np.array([-np.sin(th), np.cos(th)]), np.array([np.cos(th), np.sin(th)]))
            )
    elif Q.dim == 2 and len(slots) <= _GRID_SLOT_LIMIT:
        rad = float(np.max(np.linalg.norm(Pc, axis=1))) + Q.diameter
        ts = np.linspace(-rad, rad, _GRID_OFFSETS)
        gbest = None
        for i in range(_GRID_ANGLES):
            th = np.pi * i / _GRID_ANGLES
            nrm = np.array([-np.sin(th), np.cos(th)])
            s = P @ nrm - cen @ nrm
            devs = np.abs(s[:, None] - ts[None, :])
            contrib = W[:, None] * (devs * slot_inv_diam[:, None]) ** p
            sums = np.add.reduceat(contrib, starts, axis=0)
            b = np.minimum((sums * inv_mass[:, None]) ** (1.0 / p), 1.0)
            vals = b * b * entry_factor[:, None] if entry_factor is not None else b
            worst = vals.max(axis=0)
            j = int(np.argmin(worst))
            if gbest is None or worst[j] < gbest[0]:
                gbest = (float(worst[j]), th, float(ts[j]))
        _, th, t = gbest
        candidates.append(
            Line(cen + t * np.array([-np.sin(th), np.cos(th)]), np.array([np.cos(th), np.sin(th)]))
        )
    # cross-pipeline witnesses make the computed values respect the
    # definitional monotonicities term by term (see module docstring)
    witness_ids: list[int] = []
    if p == 1:
        sib = beta_multi(mu, Q, 2, variant, c=c, refine=refine, cache=cache)
        if sib.line is not None:
            witness_ids.append(len(candidates))
            candidates.append(sib.line)
    if variant == "star_c":
        sib = beta_multi(mu, Q, p, "star", refine=refine, cache=cache)
        if sib.line is not None:
            witness_ids.append(len(candidates))
            candidates.append(sib.line)

    approx = score_many(candidates)
    rank = np.argsort(approx, kind="stable")
    # the reported value must be an exact evaluation at the witness line, and
    # the monotonicity guarantees need the sibling witnesses scored the same
    # way, so the leaders and every witness go through the one-line scorer
    exact_pool = sorted({int(i) for i in rank[:3]} | set(witness_ids))
    best_score, best_i = min((score(candidates[i]), i) for i in exact_pool)
    best_line = candidates[best_i]
    scored = [(float(approx[i]), int(i), candidates[int(i)]) for i in rank]

    if refine and best_score > 0:
        n = Q.dim
        step0 = 0.25 * Q.diameter

        def objective(x):
            raw = x[n:]
            nrm = float(np.linalg.norm(raw))
            if nrm < 1e-9:
                return 1e30
            return score(Line(x[:n], raw / nrm))

        for _, _, ln in scored[: min(3, len(scored))]:
            x0 = np.concatenate([ln.base, ln.direction])
            steps = np.concatenate([np.full(n, step0), np.full(n, 0.05)])
            val, x = pattern_search(objective, x0, steps, max_iter=60, tol=1e-12)
            if val < best_score:
                best_score = val
                best_line = Line(x[:n], unit(x[n:]))

    value = float(np.sqrt(best_score)) if variant in ("star", "star_c") else float(best_score)
    max_plain = float(entry_betas(best_line, cap=False).max())
    result = BetaValue(
        value,
        best_line,
        p,
        variant,
        Q,
        {
            "nearby_mass_cubes": int(len(raw_entries)),
            "distinct_atom_sets": int(len(entries)),
            "witness_max_beta": float(max_plain),
            "big_box_mass": mu.mass(big),
        },
    )
    if cache is not None:
        cache.put(key, result)
    return result
