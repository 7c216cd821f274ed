"""Projective hypersurfaces over GF(q): point counts, smoothness probes,
cyclic-shift fixed points and coherent cohomology dimensions.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import BudgetExceeded, ContextMismatch
from .ff import FieldCtx, FieldElem, TowerEmbedding, make_embedding, make_field, tower
from .polyring import MultiPoly, evaluate, evaluate_many, partial_derivative, rotate

DEFAULT_BUDGET = 10**8
CHUNK = 1 << 16


def current_budget(budget: int | None = None) -> int:
    if budget is not None:
        return int(budget)
    env = os.environ.get("FROBWITT_BUDGET")
    return int(float(env)) if env else DEFAULT_BUDGET


class Hypersurface:
    """{f = 0} in P^N, f homogeneous of degree d in N+1 variables."""

    def __init__(self, f: MultiPoly):
        if f.is_zero():
            raise ValueError("the zero polynomial does not define a hypersurface")
        if not f.is_homogeneous():
            raise ValueError("polynomial is not homogeneous")
        if f.nvars < 2:
            raise ValueError("need at least two variables")
        self.f = f

    @property
    def ctx(self) -> FieldCtx:
        return self.f.ctx

    @property
    def N(self) -> int:
        return self.f.nvars - 1

    @property
    def d(self) -> int:
        return self.f.degree

    def __repr__(self):
        return f"Hypersurface(deg {self.d} in P^{self.N} over {self.ctx!r})"

    def to_json(self) -> dict:
        from .polyring import to_json

        return {"field": self.ctx.to_json(), "N": self.N, "d": self.d, "poly": to_json(self.f)}


@dataclass
class PointCount:
    e: int
    count: int

    def to_json(self):
        return {"e": self.e, "N_e": self.count}


def projective_size(Q: int, N: int) -> int:
    return (Q ** (N + 1) - 1) // (Q - 1)


def _extension(X: Hypersurface, e: int) -> TowerEmbedding:
    if e < 1:
        raise ValueError("extension degree must be >= 1")
    return tower(X.ctx, e)


def iter_projective_chunks(Q: int, N: int, chunk: int = CHUNK):
    """Normalized representatives of P^N(GF(Q)) in lexicographic order of codes.

    The first nonzero coordinate is 1; yields (npts, N+1) int64 arrays.
    """
    for lead in range(N, -1, -1):
        ntail = N - lead
        total = Q**ntail
        for start in range(0, total, chunk):
            idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
            pts = np.zeros((idx.size, N + 1), dtype=np.int64)
            pts[:, lead] = 1
            rem = idx.copy()
            for j in range(N, lead, -1):
                pts[:, j] = rem % Q
                rem //= Q
            yield pts


def _check_budget(required: int, budget: int | None):
    b = current_budget(budget)
    if required > b:
        raise BudgetExceeded(required, b)


def count_points(X: Hypersurface, e: int = 1, budget: int | None = None) -> PointCount:
    """#X(GF(q^e)) by enumerating normalized projective representatives."""
    emb = _extension(X, e)
    Q = emb.sup.q
    _check_budget(projective_size(Q, X.N), budget)
    total = 0
    for pts in iter_projective_chunks(Q, X.N):
        total += int(np.count_nonzero(evaluate_many(X.f, pts, emb) == 0))
    return PointCount(e, total)


def count_points_cone(X: Hypersurface, e: int = 1, budget: int | None = None) -> PointCount:
    """Same count via the affine cone: nonzero zeros of f in GF(q^e)^(N+1), divided by q^e - 1."""
    emb = _extension(X, e)
    Q = emb.sup.q
    n = X.N + 1
    total_pts = Q**n
    _check_budget(total_pts, budget)
    zeros = 0
    for start in range(0, total_pts, CHUNK):
        idx = np.arange(start, min(start + CHUNK, total_pts), dtype=np.int64)
        pts = np.zeros((idx.size, n), dtype=np.int64)
        rem = idx.copy()
        for j in range(n - 1, -1, -1):
            pts[:, j] = rem % Q
            rem //= Q
        zeros += int(np.count_nonzero(evaluate_many(X.f, pts, emb) == 0))
    zeros -= 1  # the origin
    assert zeros % (Q - 1) == 0
    return PointCount(e, zeros // (Q - 1))


def point_to_json(E: FieldCtx, pt) -> list:
    return [list(E.decode(int(c))) for c in pt]


@dataclass
class SmoothnessReport:
    e_max: int
    witness: tuple | None  # (e, coordinate codes in GF(q^e))
    probed: list = field(default_factory=list)
    bounded: bool = True

    @property
    def singular_found(self) -> bool:
        return self.witness is not None

    def to_json(self, X: Hypersurface | None = None):
        w = None
        if self.witness is not None:
            e, pt = self.witness
            E = make_field(X.ctx.p, X.ctx.f * e) if X is not None else None
            w = {"e": e, "point": point_to_json(E, pt) if E else list(pt)}
        return {"e_max": self.e_max, "probed": self.probed, "witness": w, "bounded": self.bounded}


def smoothness_probe(X: Hypersurface, e_max: int = 1, budget: int | None = None) -> SmoothnessReport:
    """Search P^N(GF(q^e)), e <= e_max, for a common zero of f and all partials.

    A negative answer only covers the probed fields; it is not a proof of smoothness.
    """
    if e_max < 1:
        raise ValueError("e_max must be >= 1")
    partials = [partial_derivative(X.f, i) for i in range(X.N + 1)]
    required = sum(projective_size(X.ctx.q**e, X.N) for e in range(1, e_max + 1)) * (X.N + 2)
    _check_budget(required, budget)
    report = SmoothnessReport(e_max, None)
    for e in range(1, e_max + 1):
        emb = _extension(X, e)
        for pts in iter_projective_chunks(emb.sup.q, X.N):
            mask = evaluate_many(X.f, pts, emb) == 0
            for g in partials:
                if not mask.any():
                    break
                cand = pts[mask]
                mask[np.nonzero(mask)[0]] = evaluate_many(g, cand, emb) == 0
            if mask.any():
                first = pts[np.nonzero(mask)[0][0]]
                report.witness = (e, tuple(int(c) for c in first))
                report.probed.append(e)
                return report
        report.probed.append(e)
    return report


@dataclass
class CyclicAction:
    """The cyclic shift (x0 : x1 : ... : x_n-1) -> (x1 : ... : x_n-1 : x0)."""

    order: int

    def apply(self, pt):
        pt = list(pt)
        return tuple(pt[1:] + pt[:1])

    def act_on_poly(self, f: MultiPoly) -> MultiPoly:
        return rotate(f, 1)

    def preserves(self, f: MultiPoly) -> bool:
        return f.nvars == self.order and self.act_on_poly(f) == f


def _normalize(E: FieldCtx, pt):
    lead = next(c for c in pt if c)
    inv = E.inv(int(lead))
    return tuple(E.mul(inv, int(c)) for c in pt)


def ambient_fixed_points(n: int, E: FieldCtx) -> list[tuple]:
    """Fixed points of the shift on P^(n-1)(E): (1 : l : l^2 : ...) with l^n = 1."""
    out = []
    for lam in range(1, E.q):
        if E.pow(lam, n) == 1:
            out.append(tuple(E.pow(lam, i) for i in range(n)))
    return sorted(out)


def ambient_fixed_points_brute(n: int, E: FieldCtx) -> list[tuple]:
    """Same set by testing every projective point (independent check)."""
    out = []
    for pts in iter_projective_chunks(E.q, n - 1):
        for pt in pts:
            sh = tuple(int(c) for c in np.roll(pt, -1))
            if _normalize(E, sh) == tuple(int(c) for c in pt):
                out.append(tuple(int(c) for c in pt))
    return out


@dataclass
class FixedPointReport:
    e_max: int
    ambient: dict  # e -> list of points over GF(q^e)
    on_X: list  # (e, point) pairs

    def to_json(self, X: Hypersurface):
        def js(e, pt):
            return point_to_json(make_field(X.ctx.p, X.ctx.f * e), pt)

        return {
            "e_max": self.e_max,
            "ambient": {str(e): [js(e, pt) for pt in pts] for e, pts in self.ambient.items()},
            "on_X": [{"e": e, "point": js(e, pt)} for e, pt in self.on_X],
        }


def sigma_fixed_points(X: Hypersurface, act: CyclicAction | None = None, e_max: int = 1,
                       budget: int | None = None) -> FixedPointReport:
    act = act or CyclicAction(X.N + 1)
    if act.order != X.N + 1:
        raise ContextMismatch("shift order does not match the number of variables")
    if not act.preserves(X.f):
        raise ValueError("polynomial is not invariant under the shift")
    _check_budget(e_max * X.N, budget)
    ambient, on_X = {}, []
    for e in range(1, e_max + 1):
        emb = _extension(X, e)
        pts = ambient_fixed_points(X.N + 1, emb.sup)
        ambient[e] = pts
        for pt in pts:
            if evaluate(X.f, [FieldElem(emb.sup, c) for c in pt], emb).code == 0:
                on_X.append((e, pt))
    return FixedPointReport(e_max, ambient, on_X)


def orbit_sizes_ok(X: Hypersurface, e: int = 1) -> tuple[int, int]:
    """(#X(GF(q^e)), #fixed) after checking that the shift permutes X's points."""
    emb = _extension(X, e)
    E = emb.sup
    pts = set()
    for chunk in iter_projective_chunks(E.q, X.N):
        vals = evaluate_many(X.f, chunk, emb)
        for pt in chunk[vals == 0]:
            pts.add(tuple(int(c) for c in pt))
    act = CyclicAction(X.N + 1)
    fixed = 0
    for pt in pts:
        img = _normalize(E, act.apply(pt))
        if img not in pts:
            raise AssertionError("shift does not preserve the point set")
        fixed += img == pt
    return len(pts), fixed


def subfield_points(X: Hypersurface, e: int, j: int) -> int:
    """Points over GF(q^(e*j)) whose normalized coordinates lie in GF(q^e)."""
    small = make_field(X.ctx.p, X.ctx.f * e)
    big = make_field(X.ctx.p, X.ctx.f * e * j)
    emb_big = tower(X.ctx, e * j)
    sub = make_embedding(small, big)
    image = set(int(c) for c in sub.code_map) if small.tabled else None
    count = 0
    for pts in iter_projective_chunks(big.q, X.N):
        vals = evaluate_many(X.f, pts, emb_big)
        for pt in pts[vals == 0]:
            if image is None or all(int(c) in image for c in pt):
                count += 1
    return count


# ---------------------------------------------------------------------------
# coherent cohomology
# ---------------------------------------------------------------------------


def h_projective(N: int, m: int, i: int) -> int:
    """dim H^i(P^N, O(m))."""
    if i == 0:
        return comb(m + N, N) if m >= 0 else 0
    if i == N:
        return comb(-m - 1, N) if m <= -N - 1 else 0
    return 0


def cohomology_dims(X: Hypersurface) -> list[int]:
    """(h^0, ..., h^(N-1)) of O_X from 0 -> O(-d) -> O -> O_X -> 0.

    The maps H^i(O(-d)) -> H^i(O) are multiplication by f; for d >= 1 one side
    is always zero, so h^i(O_X) = h^i(O) + h^(i+1)(O(-d)).
    """
    N, d = X.N, X.d
    return cohomology_dims_nd(N, d)


def cohomology_dims_nd(N: int, d: int) -> list[int]:
    if d < 1:
        raise ValueError("degree must be >= 1")
    out = []
    for i in range(N):
        # H^i(O(-d)) -> H^i(O) -> H^i(O_X) -> H^(i+1)(O(-d)) -> H^(i+1)(O)
        src, tgt = h_projective(N, -d, i), h_projective(N, 0, i)
        src1, tgt1 = h_projective(N, -d, i + 1), h_projective(N, 0, i + 1)
        assert src * tgt == 0 and src1 * tgt1 == 0
        out.append(tgt + src1)
    return out
