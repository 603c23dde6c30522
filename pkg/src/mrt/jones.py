"""Density-normalized multiscale square functions (Jones functions).

For a point x and unit-or-smaller dyadic scales 0..k_max, the chain of cubes
containing x contributes one term per scale:

    J(x) = sum_k beta(Q_k)^2 * diam Q_k / mu(Q_k)

where beta is one of

    variant "star"      coupled nearby-family beta (weight min(mass/diam, 1))
    variant "star_c"    c-qualified nearby-family beta (weight min(c, 1))
    variant "star_star" coupled nearby-family beta, unsquared max inside
    variant "tilde"     best-line beta of the concentric triple 3Q_k

Conventions: 0/0 = 0 (zero beta over a zero-mass cube contributes nothing);
beta > 0 over a zero-mass cube means the sum diverges, which is reported as a
flag plus the offending cubes, never as a non-finite float.

square_sum computes the scale-indexed companion sums (over a cube family
instead of a chain): the mass-carrying family per scale, a cube tree, or the
set version. Each report carries a per-cube ledger so totals can be
cross-checked independently.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .beta import BetaCache, BetaValue, beta_best, beta_multi, beta_sup_set
from .dyadic import CubeTree, DyadicCube, chain_of_cubes, cube_at
from .measure import DiscreteMeasure

JONES_VARIANTS = ("star", "tilde", "star_star", "star_c")


@dataclass
class JonesTerm:
    cube: DyadicCube
    beta: float
    mass: float
    term: float
    divergent: bool


@dataclass
class JonesReport:
    """Truncated Jones function at a point, with its per-scale ledger."""

    point: np.ndarray
    p: object
    variant: str
    c: float | None
    k_max: int
    terms: list[JonesTerm]
    value: float
    divergent: bool
    divergent_cubes: list[DyadicCube] = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "variant": self.variant,
            "k_max": self.k_max,
            "value": self.value,
            "divergent": self.divergent,
            "n_divergent_cubes": len(self.divergent_cubes),
        }


def default_kmax(mu: DiscreteMeasure, x, cap: int = 40) -> int:
    """First scale whose chain cube holds at most one atom (capped)."""
    for k in range(cap + 1):
        if len(mu.atoms_in_cube(cube_at(x, k))) <= 1:
            return k
    return cap


def _beta_for(mu, Q, p, variant, c, cache, refine) -> BetaValue:
    if variant == "tilde":
        key = (Q, p, "tilde", None)
        if cache is not None:
            hit = cache.get(key)
            if hit is not None:
                return hit
        val = beta_best(mu, Q.triple(), p)
        if cache is not None:
            cache.put(key, val)
        return val
    return beta_multi(mu, Q, p, variant, c=c, refine=refine, cache=cache)


def jones_at(
    mu: DiscreteMeasure,
    x,
    p=2,
    variant: str = "star",
    k_max: int | None = None,
    c: float | None = None,
    cache: BetaCache | None = None,
    refine: bool = True,
) -> JonesReport:
    """Truncated Jones function of mu at x.

    k_max defaults to the first scale at which the chain cube contains at
    most one atom. p > 2 triggers a warning (the p=2 theory is the sharp
    one; larger p only weakens the statistics).
    """
    if variant not in JONES_VARIANTS:
        raise ValueError(f"variant must be one of {JONES_VARIANTS}")
    if isinstance(p, (int, float)) and p > 2:
        warnings.warn("p > 2 beta numbers are larger and the sums may diverge faster")
    x = np.asarray(x, dtype=float).reshape(-1)
    if k_max is None:
        k_max = default_kmax(mu, x)
    if cache is None:
        cache = BetaCache(mu)
    terms: list[JonesTerm] = []
    divergent_cubes: list[DyadicCube] = []
    total = 0.0
    for Q in chain_of_cubes(x, k_max):
        bv = _beta_for(mu, Q, p, variant, c, cache, refine)
        b2 = bv.value * bv.value
        mass = float(mu.weights[mu.atoms_in_cube(Q)].sum())
        if mass > 0.0:
            term = b2 * Q.diameter / mass
            divergent = False
        elif b2 == 0.0:
            term = 0.0  # 0/0 convention
            divergent = False
        else:
            term = 0.0  # excluded from the float sum; flagged instead
            divergent = True
            divergent_cubes.append(Q)
        total += term
        terms.append(JonesTerm(Q, bv.value, mass, term, divergent))
    return JonesReport(
        point=x,
        p=p,
        variant=variant,
        c=c,
        k_max=int(k_max),
        terms=terms,
        value=float(total),
        divergent=bool(divergent_cubes),
        divergent_cubes=divergent_cubes,
    )


# ---------------------------------------------------------------------------
# scale-indexed square sums


@dataclass
class SquareSumReport:
    """A beta-squared sum with its per-cube ledger."""

    kind: str
    total: float
    ledger: list[tuple[DyadicCube, float, float]]  # (cube, beta, term)
    family: str
    params: dict = field(default_factory=dict)


def mass_cube_family(
    mu: DiscreteMeasure, k_range, cache: BetaCache | None = None
) -> list[DyadicCube]:
    """Cubes with mu(3Q) > 0 at each scale in k_range, sorted."""
    if cache is None:
        cache = BetaCache(mu)
    out: list[DyadicCube] = []
    for k in k_range:
        out.extend(R for (R, _, _) in cache.mass_triples(k))
    return out


def square_sum(
    mu: DiscreteMeasure | None,
    kind: str,
    *,
    k_range=None,
    tree: CubeTree | None = None,
    p=2,
    c: float | None = None,
    points=None,
    cache: BetaCache | None = None,
    refine: bool = True,
) -> SquareSumReport:
    """Scale-indexed beta-squared sums.

    kind:
      "s_star_star"   sum of beta_multi(star_star)^2 diam Q over the
                      mass-carrying family {Q : mu(3Q) > 0} at scales k_range
      "s_p_tree"      sum of beta_best(mu, 3Q, p)^2 diam Q over a cube tree
      "s_star_c_tree" sum of beta_multi(star_c)^2 diam Q over a cube tree
      "beta_sq_set"   sum of beta_sup_set(E, 3Q)^2 diam Q over cubes whose
                      triple meets the point set E, at scales k_range

    The mass-carrying family for s_star_star is a desk-scale truncation:
    faraway empty cubes whose dilate still reaches the support are omitted
    (their terms are small but nonzero); the report names the family.
    """
    ledger: list[tuple[DyadicCube, float, float]] = []
    if kind == "s_star_star":
        if mu is None or k_range is None:
            raise ValueError("s_star_star needs mu and k_range")
        if cache is None:
            cache = BetaCache(mu)
        for Q in mass_cube_family(mu, k_range, cache):
            bv = beta_multi(mu, Q, p, "star_star", cache=cache, refine=refine)
            ledger.append((Q, bv.value, bv.value**2 * Q.diameter))
        family = "cubes with mu(3Q) > 0 at scales in k_range"
        params = {"k_range": list(k_range), "p": p}
    elif kind == "s_p_tree":
        if mu is None or tree is None:
            raise ValueError("s_p_tree needs mu and tree")
        if cache is None:
            cache = BetaCache(mu)
        for Q in tree:
            bv = beta_best(mu, Q.triple(), p)
            ledger.append((Q, bv.value, bv.value**2 * Q.diameter))
        family = "all member cubes of the tree"
        params = {"p": p, "tree_size": len(tree)}
    elif kind == "s_star_c_tree":
        if mu is None or tree is None or c is None:
            raise ValueError("s_star_c_tree needs mu, tree, and c")
        if cache is None:
            cache = BetaCache(mu)
        for Q in tree:
            bv = beta_multi(mu, Q, p, "star_c", c=c, cache=cache, refine=refine)
            ledger.append((Q, bv.value, bv.value**2 * Q.diameter))
        family = "all member cubes of the tree"
        params = {"p": p, "c": c, "tree_size": len(tree)}
    elif kind == "beta_sq_set":
        if points is None or k_range is None:
            raise ValueError("beta_sq_set needs points and k_range")
        X = np.atleast_2d(np.asarray(points, dtype=float))
        import itertools as _it

        for k in k_range:
            idx = np.floor(X * 2.0**k).astype(np.int64)
            cells = {tuple(int(v) for v in row) for row in idx}
            cand: set[tuple[int, ...]] = set()
            for cell in cells:
                for off in _it.product((-2, -1, 0, 1), repeat=X.shape[1]):
                    cand.add(tuple(v + o for v, o in zip(cell, off)))
            for key in sorted(cand):
                Q = DyadicCube(k, key)
                b = beta_sup_set(X, Q.triple())
                if np.any(Q.triple().contains_mask(X)):
                    ledger.append((Q, b, b * b * Q.diameter))
        family = "cubes whose triple meets the point set, at scales in k_range"
        params = {"k_range": list(k_range)}
    else:
        raise ValueError(f"unknown square_sum kind {kind!r}")
    total = float(sum(t for (_, _, t) in ledger))
    return SquareSumReport(kind=kind, total=total, ledger=ledger, family=family, params=params)
