"""Moduli of modules as configuration spaces over rank-1 fiber spaces.

The length-n moduli in every incarnation (holonomy characters, flat
connections, tau-connections, co-Higgs data) is a symmetric product of
the corresponding rank-1 space, and the marked moduli is its Hilbert
scheme of points.  This module represents those points concretely:

* a SymPoint is a weighted support: fiber points with multiplicities;
* a HilbPoint is a list of punctual pieces, each a base point in the
  fiber space's chart plus commuting nilpotents and a cyclic marking;
* hilbert_chow forgets the punctual structure, keeping the weights;
* betti_marked / betti_unmarked read the two off a matrix tuple, and
  betti_assemble inverts the marked direction up to base change;
* rh_to_derham / rh_to_betti move Hilbert points between holonomy and
  exponent charts by substituting nilpotents into log / exp germs;
* hodge_deform / hodge_rescale / hodge_undeform run the tau-scaling
  family connecting exponent data with cotangent data.

Chart conventions.  Betti pieces store the unit part of the local
holonomy: the operator of coordinate k is z_k (Id + N_k).  All other
charts are additive: the operator is a_k Id + N_k.  Hodge and cotangent
charts use split coordinates (fiber u_1..u_d, then base w_1..w_d), so
the tau-scaling is a diagonal map and composes exactly on exact data;
natural-chart points are canonical branch representatives, and
hodge-chart points are plain cover coordinates (the lattice is only
quotiented out on the natural and dual-torus sides).
"""

from __future__ import annotations

import numpy as np

from .adhm import (
    CommutingTuple,
    MarkedTuple,
    PunctualData,
    _exp_scalar,
    _log_scalar,
    _scale_matrix,
    _scale_pair,
    _sort_key,
    decompose_punctual,
    expm1_matrix,
    is_stable,
    log1p_matrix,
    spectrum_support,
)
from .errors import (
    ModeMismatchError,
    PieceCollisionError,
    TauZeroError,
    ZeroEigenvalueError,
)
from .linalg import DEFAULT_FRAME, EXACT, FLOAT, Matrix, Scalar, ToleranceFrame
from .torus import (
    AbelianVarietyModel,
    DualPoint,
    fold_imag,
    square_model,
)

__all__ = [
    "FiberSpace",
    "SymPoint",
    "HilbPoint",
    "assemble_pieces",
    "hilbert_chow",
    "betti_marked",
    "betti_unmarked",
    "betti_assemble",
    "rh_to_derham",
    "rh_to_betti",
    "hodge_deform",
    "hodge_undeform",
    "hodge_rescale",
    "rank1_identify",
    "diagram_check",
]

TWO_PI = 2.0 * np.pi

BETTI = "betti"
DUAL_TORUS = "dual-torus"
COTANGENT = "cotangent"
NATURAL = "natural"
HODGE = "hodge"
PRODUCT_ALPHA_ZERO = "product-alpha-zero"

_KINDS = (BETTI, DUAL_TORUS, COTANGENT, NATURAL, HODGE, PRODUCT_ALPHA_ZERO)


def _coord_from_json(obj) -> Scalar:
    # exact scalars serialize re/im as strings, float ones as numbers
    mode = EXACT if isinstance(obj["re"], str) else FLOAT
    return Scalar.from_json(obj, mode)


class FiberSpace:
    """One of the rank-1 moduli the length-n spaces are built from.

    kind        chart (arity = chart_dim)
    betti       z in (C*)^{2d}, multiplicative pieces; model-free
    natural     exponents a in C^{2d}, canonical branch Im in (-pi, pi]
    hodge       split coordinates (u, w) in C^d x C^d at parameter tau
    cotangent   split coordinates (u, w), the tau = 0 degeneration
    dual-torus  cover coordinates w in C^d
    product-alpha-zero  (xi in C^vdim, w in C^d), the alpha = 0 family
    """

    __slots__ = ("kind", "d", "model", "tau", "vdim", "frame")

    def __init__(self, kind, d=None, model=None, tau=None, vdim=None, frame=None):
        if kind not in _KINDS:
            raise ValueError(f"unknown fiber-space kind {kind!r}")
        if kind == BETTI:
            if d is None:
                raise ValueError("betti spaces need a dimension")
            model = None
        else:
            if model is None:
                raise ValueError(f"{kind} spaces need a torus model")
            d = model.d
        if kind == HODGE:
            if tau is None:
                raise ValueError("hodge spaces need a tau")
            tau = tau if isinstance(tau, Scalar) else Scalar.from_complex(tau)
        else:
            tau = None
        if kind == PRODUCT_ALPHA_ZERO:
            if vdim is None or vdim < 1:
                raise ValueError("product spaces need a positive vdim")
        else:
            vdim = None
        self.kind = kind
        self.d = d
        self.model = model
        self.tau = tau
        self.vdim = vdim
        self.frame = model.frame if model is not None else (frame or DEFAULT_FRAME)

    # convenience constructors

    @staticmethod
    def betti(d: int, frame: ToleranceFrame | None = None) -> "FiberSpace":
        return FiberSpace(BETTI, d=d, frame=frame)

    @staticmethod
    def natural(model: AbelianVarietyModel) -> "FiberSpace":
        return FiberSpace(NATURAL, model=model)

    @staticmethod
    def hodge(model: AbelianVarietyModel, tau) -> "FiberSpace":
        return FiberSpace(HODGE, model=model, tau=tau)

    @staticmethod
    def cotangent(model: AbelianVarietyModel) -> "FiberSpace":
        return FiberSpace(COTANGENT, model=model)

    @staticmethod
    def dual_torus(model: AbelianVarietyModel) -> "FiberSpace":
        return FiberSpace(DUAL_TORUS, model=model)

    @staticmethod
    def product_alpha_zero(model: AbelianVarietyModel, vdim: int) -> "FiberSpace":
        return FiberSpace(PRODUCT_ALPHA_ZERO, model=model, vdim=vdim)

    @property
    def chart_dim(self) -> int:
        if self.kind == DUAL_TORUS:
            return self.d
        if self.kind == PRODUCT_ALPHA_ZERO:
            return self.vdim + self.d
        return 2 * self.d

    @property
    def multiplicative(self) -> bool:
        return self.kind == BETTI

    def __eq__(self, other):
        if not isinstance(other, FiberSpace):
            return NotImplemented
        if self.kind != other.kind or self.d != other.d or self.vdim != other.vdim:
            return False
        if (self.model is None) != (other.model is None):
            return False
        if self.model is not None and self.model != other.model:
            return False
        if (self.tau is None) != (other.tau is None):
            return False
        if self.tau is not None and abs(self.tau.cx - other.tau.cx) > self.frame.eps_eq:
            return False
        return True

    def __repr__(self):
        extra = f" tau={self.tau.cx}" if self.tau is not None else ""
        return f"<FiberSpace {self.kind} d={self.d}{extra}>"

    def canonical_coord(self, c: Scalar) -> Scalar:
        """Canonical chart representative of one coordinate."""
        if self.kind != NATURAL:
            return c
        z = c.cx
        if c.mode == EXACT and -np.pi < z.imag <= np.pi:
            return c
        if -np.pi < z.imag <= np.pi and c.mode == FLOAT:
            return c
        return Scalar.from_complex(fold_imag(z))

    def canonical_point(self, coords) -> tuple[Scalar, ...]:
        return tuple(self.canonical_coord(c) for c in coords)

    def points_equal(self, p, q, tol: float | None = None) -> bool:
        """Chart equality: exact when both sides are exact, otherwise
        within tol (imaginary parts compared modulo 2 pi on the natural
        chart, where coordinates are branch representatives)."""
        if len(p) != len(q):
            return False
        if all(c.mode == EXACT for c in p) and all(c.mode == EXACT for c in q):
            return all(a == b for a, b in zip(p, q))
        tol = tol if tol is not None else self.frame.eps_eq
        for a, b in zip(p, q):
            delta = a.cx - b.cx
            if self.kind == NATURAL:
                im = abs(delta.imag) % TWO_PI
                if abs(delta.real) > tol or min(im, TWO_PI - im) > tol:
                    return False
            elif abs(delta) > tol:
                return False
        return True

    def to_json(self):
        out = {"kind": self.kind, "d": self.d}
        if self.model is not None:
            out["model"] = self.model.to_json()
        if self.tau is not None:
            out["tau"] = self.tau.to_json()
        if self.vdim is not None:
            out["vdim"] = self.vdim
        return out

    @staticmethod
    def from_json(obj) -> "FiberSpace":
        model = AbelianVarietyModel.from_json(obj["model"]) if "model" in obj else None
        tau = _coord_from_json(obj["tau"]) if "tau" in obj else None
        return FiberSpace(
            obj["kind"], d=obj.get("d"), model=model, tau=tau, vdim=obj.get("vdim")
        )


def _point_json(coords) -> dict:
    return {"coords": [c.to_json() for c in coords]}


def _point_from_json(obj) -> tuple[Scalar, ...]:
    return tuple(_coord_from_json(c) for c in obj["coords"])


def _point_key(coords):
    return tuple(_sort_key(c) for c in coords)


class SymPoint:
    """A point of the length-n unmarked moduli: the weighted support.

    support is a list of (chart point, multiplicity) with pairwise
    distinct points, canonically ordered.
    """

    __slots__ = ("space", "support")

    def __init__(self, space: FiberSpace, support):
        items = [(tuple(p), int(k)) for p, k in support]
        for p, k in items:
            if len(p) != space.chart_dim:
                raise ValueError("support point arity differs from the chart")
            if k < 1:
                raise ValueError("multiplicities must be >= 1")
        for i in range(len(items)):
            for j in range(i + 1, len(items)):
                if space.points_equal(items[i][0], items[j][0]):
                    raise ValueError("support points must be pairwise distinct")
        items.sort(key=lambda t: _point_key(t[0]))
        self.space = space
        self.support = items

    @property
    def total(self) -> int:
        return sum(k for _, k in self.support)

    def __repr__(self):
        pts = [([c.cx for c in p], k) for p, k in self.support]
        return f"<SymPoint {self.space.kind} {pts}>"

    def close_to(self, other: "SymPoint", tol: float | None = None) -> bool:
        """Multiset match of supports within tol (weights equal)."""
        if self.space.kind != other.space.kind or len(self.support) != len(other.support):
            return False
        used = [False] * len(other.support)
        for p, k in self.support:
            hit = False
            for i, (q, l) in enumerate(other.support):
                if not used[i] and k == l and self.space.points_equal(p, q, tol):
                    used[i] = True
                    hit = True
                    break
            if not hit:
                return False
        return True

    def to_json(self):
        return {
            "space": self.space.to_json(),
            "support": [
                {"point": _point_json(p), "multiplicity": k} for p, k in self.support
            ],
        }

    @staticmethod
    def from_json(obj) -> "SymPoint":
        space = FiberSpace.from_json(obj["space"])
        support = [
            (_point_from_json(s["point"]), s["multiplicity"]) for s in obj["support"]
        ]
        return SymPoint(space, support)


class HilbPoint:
    """A point of the length-n marked moduli: punctual pieces over
    pairwise distinct chart points.

    Each piece is a PunctualData whose point holds the chart coordinates
    and whose marking is cyclic.  Pieces are kept canonically ordered.
    """

    __slots__ = ("space", "pieces")

    def __init__(self, space: FiberSpace, pieces):
        pieces = list(pieces)
        for P in pieces:
            if len(P.point) != space.chart_dim:
                raise ValueError("piece arity differs from the chart")
            if P.marking is None:
                raise ValueError("pieces must carry a marking")
            if not is_stable(MarkedTuple(P.N, P.marking)):
                raise ValueError("piece marking is not cyclic")
        for i in range(len(pieces)):
            for j in range(i + 1, len(pieces)):
                if space.points_equal(pieces[i].point, pieces[j].point):
                    raise ValueError("piece base points must be pairwise distinct")
        pieces.sort(key=lambda P: _point_key(P.point))
        self.space = space
        self.pieces = pieces

    @property
    def total(self) -> int:
        return sum(P.length for P in self.pieces)

    def __repr__(self):
        return f"<HilbPoint {self.space.kind} n={self.total} pieces={len(self.pieces)}>"

    def close_to(self, other: "HilbPoint", tol: float | None = None) -> bool:
        """Piecewise match: base points within tol, nilpotents and
        markings entrywise within tol."""
        if self.space.kind != other.space.kind or len(self.pieces) != len(other.pieces):
            return False
        tol_ = tol if tol is not None else self.space.frame.eps_eq
        used = [False] * len(other.pieces)
        for P in self.pieces:
            hit = False
            for i, Q in enumerate(other.pieces):
                if used[i] or P.length != Q.length:
                    continue
                if not self.space.points_equal(P.point, Q.point, tol):
                    continue
                if not all(
                    A.close_to(B, tol_) for A, B in zip(P.N.B, Q.N.B)
                ) or not P.marking.close_to(Q.marking, tol_):
                    continue
                used[i] = True
                hit = True
                break
            if not hit:
                return False
        return True

    def to_json(self):
        out = {"space": self.space.to_json(), "pieces": []}
        for P in self.pieces:
            out["pieces"].append(
                {
                    "point": _point_json(P.point),
                    "punctual": {
                        "mode": P.N.mode,
                        "N": [M.to_json() for M in P.N.B],
                        "v": [P.marking[i, 0].to_json() for i in range(P.length)],
                    },
                }
            )
        return out

    @staticmethod
    def from_json(obj) -> "HilbPoint":
        space = FiberSpace.from_json(obj["space"])
        frame = space.frame
        pieces = []
        for pj in obj["pieces"]:
            point = _point_from_json(pj["point"])
            pd = pj["punctual"]
            mode = pd.get("mode", EXACT)
            N = CommutingTuple([Matrix.from_json(MJ, mode, frame) for MJ in pd["N"]])
            v = Matrix.column([Scalar.from_json(x, mode) for x in pd["v"]])
            if mode == FLOAT:
                v = Matrix(FLOAT, v.rows, 1, v._a, frame)
            pieces.append(PunctualData(point, N, v))
        return HilbPoint(space, pieces)


# ----------------------------------------------------------------------
# assembly with collision handling


def _direct_sum(space: FiberSpace, group: list[PunctualData]) -> PunctualData:
    """Merge same-point pieces: mean base point, block-diagonal nilpotent
    parts (absorbing the point offsets), stacked marking.  If the stacked
    marking is not cyclic, a deterministic family of candidate markings is
    tried; PieceCollision if none is cyclic."""
    if len(group) == 1:
        return group[0]
    m = group[0].N.m
    total = sum(P.length for P in group)
    exact_all = all(
        P.N.mode == EXACT and all(c.mode == EXACT for c in P.point) for P in group
    )
    if exact_all:
        point = group[0].point  # exact merge only happens on exact equality
        mats = []
        for j in range(m):
            rows = []
            off = 0
            for P in group:
                ell = P.length
                for r in range(ell):
                    row = [Scalar.zero(EXACT)] * total
                    for c in range(ell):
                        row[off + c] = P.N[j][r, c]
                    rows.append(row)
                off += ell
            mats.append(Matrix(EXACT, total, total, rows))
        N = CommutingTuple(mats)
        mark = Matrix.column(
            [P.marking[i, 0] for P in group for i in range(P.length)]
        )
    else:
        frame = space.frame
        pts = np.array([[c.cx for c in P.point] for P in group])
        mean = pts.mean(axis=0)
        point = tuple(Scalar.from_complex(z) for z in mean)
        mats = []
        for j in range(m):
            a = np.zeros((total, total), dtype=np.complex128)
            off = 0
            for i, P in enumerate(group):
                ell = P.length
                block = P.N[j].to_numpy() + (pts[i, j] - mean[j]) * np.eye(ell)
                a[off : off + ell, off : off + ell] = block
                off += ell
            mats.append(Matrix(FLOAT, total, total, a, frame))
        N = CommutingTuple(mats)
        mark = np.concatenate([P.marking.to_numpy().reshape(-1) for P in group])
        mark = Matrix(FLOAT, total, 1, mark.reshape(-1, 1), frame)
    candidates = [mark]
    mode = N.mode
    for t in range(1, 2 * total + 1):
        if mode == EXACT:
            vals = [Scalar.one(EXACT)]
            for _ in range(total - 1):
                vals.append(vals[-1] * Scalar.exact(t))
            candidates.append(Matrix.column(vals))
        else:
            arr = np.array([float(t) ** k for k in range(total)], dtype=np.complex128)
            candidates.append(Matrix(FLOAT, total, 1, arr.reshape(-1, 1), space.frame))
    for v in candidates:
        if is_stable(MarkedTuple(N, v)):
            return PunctualData(point, N, v)
    raise PieceCollisionError("merged pieces admit no cyclic marking")


def assemble_pieces(space: FiberSpace, pieces, tol: float | None = None) -> HilbPoint:
    """Canonicalize a list of pieces into a HilbPoint: chart points are
    canonicalized, colliding base points are merged (direct sum), and the
    result is ordered."""
    staged = [
        PunctualData(space.canonical_point(P.point), P.N, P.marking) for P in pieces
    ]
    groups: list[list[PunctualData]] = []
    for P in staged:
        for g in groups:
            if space.points_equal(g[0].point, P.point, tol):
                g.append(P)
                break
        else:
            groups.append([P])
    merged = [_direct_sum(space, g) for g in groups]
    return HilbPoint(space, merged)


def hilbert_chow(h: HilbPoint) -> SymPoint:
    """Forget the punctual structure, keeping the weighted support."""
    return SymPoint(h.space, [(P.point, P.length) for P in h.pieces])


# ----------------------------------------------------------------------
# Betti models of matrix data


def _spectrum_invertible(support, eps: float):
    for pt, _ in support:
        for c in pt:
            if (c.mode == EXACT and c.is_zero()) or (
                c.mode == FLOAT and abs(c.cx) <= eps
            ):
                raise ZeroEigenvalueError(
                    "joint eigenvalue has a zero coordinate; holonomy is singular"
                )


def betti_marked(M: MarkedTuple) -> HilbPoint:
    """Read a stable tuple of 2d invertible commuting matrices as a point
    of the marked length-n moduli over (C*)^{2d}.  Pieces carry the unit
    parts: at base z the operator of coordinate k is z_k (Id + N_k)."""
    if M.m % 2 != 0:
        raise ValueError("need an even number of members (one per lattice generator)")
    d = M.m // 2
    eps = M.tuple.frame.eps_eq if M.mode == FLOAT else DEFAULT_FRAME.eps_eq
    pieces = decompose_punctual(M)
    _spectrum_invertible([(P.point, P.length) for P in pieces], eps)
    space = FiberSpace.betti(d, M.tuple.frame)
    normalized = []
    for P in pieces:
        units = []
        for k in range(2 * d):
            inv = Scalar.one(P.point[k].mode) / P.point[k]
            units.append(_scale_matrix(P.N[k], inv))
        normalized.append(
            PunctualData(P.point, CommutingTuple._unchecked(units), P.marking)
        )
    return HilbPoint(space, normalized)


def betti_unmarked(T: CommutingTuple) -> SymPoint:
    """The weighted joint spectrum of an invertible tuple as a point of
    the unmarked moduli over (C*)^{2d}."""
    if T.m % 2 != 0:
        raise ValueError("need an even number of members (one per lattice generator)")
    support = spectrum_support(T)
    eps = T.frame.eps_eq if T.mode == FLOAT else DEFAULT_FRAME.eps_eq
    _spectrum_invertible(support, eps)
    return SymPoint(FiberSpace.betti(T.m // 2, T.frame), support)


def betti_assemble(h: HilbPoint) -> MarkedTuple:
    """Rebuild a marked tuple from a Betti HilbPoint: block-diagonal
    operators z_k (Id + N_k) with the stacked marking.  Inverse of
    betti_marked up to base change (the ideal normal form agrees)."""
    if h.space.kind != BETTI:
        raise ValueError("betti_assemble needs a betti-chart point")
    m = h.space.chart_dim
    exact_all = all(
        P.N.mode == EXACT
        and P.marking.mode == EXACT
        and all(c.mode == EXACT for c in P.point)
        for P in h.pieces
    )
    total = h.total
    if exact_all:
        mats = []
        for k in range(m):
            rows = []
            off = 0
            for P in h.pieces:
                ell = P.length
                eye = Matrix.identity(ell, EXACT)
                block = (eye + P.N[k]).scale(P.point[k])
                for r in range(ell):
                    row = [Scalar.zero(EXACT)] * total
                    for c in range(ell):
                        row[off + c] = block[r, c]
                    rows.append(row)
                off += ell
            mats.append(Matrix(EXACT, total, total, rows))
        mark = Matrix.column(
            [P.marking[i, 0] for P in h.pieces for i in range(P.length)]
        )
    else:
        frame = h.space.frame
        mats = []
        for k in range(m):
            a = np.zeros((total, total), dtype=np.complex128)
            off = 0
            for P in h.pieces:
                ell = P.length
                z = P.point[k].cx
                a[off : off + ell, off : off + ell] = z * (
                    np.eye(ell) + P.N[k].to_numpy()
                )
                off += ell
            mats.append(Matrix(FLOAT, total, total, a, frame))
        vals = np.concatenate(
            [P.marking.to_numpy().reshape(-1) for P in h.pieces]
        )
        mark = Matrix(FLOAT, total, 1, vals.reshape(-1, 1), frame)
    return MarkedTuple(CommutingTuple(mats), mark)


# ----------------------------------------------------------------------
# Riemann-Hilbert at the Hilbert level


def rh_to_derham(h: HilbPoint, model: AbelianVarietyModel) -> HilbPoint:
    """Holonomy chart to exponent chart: base points through the
    principal logarithm, unit parts through log(Id + N).  The nilpotent
    series is finite with rational coefficients, so exact nilpotent data
    stays exact; only the base points pick up floating point."""
    if h.space.kind != BETTI:
        raise ValueError("rh_to_derham starts from a betti-chart point")
    if model.d != h.space.d:
        raise ValueError("model dimension differs from the chart")
    eps = model.frame.eps_eq
    out = []
    for P in h.pieces:
        point = tuple(_log_scalar(z, eps) for z in P.point)
        logs = [log1p_matrix(Nk) for Nk in P.N.B]
        out.append(PunctualData(point, CommutingTuple._unchecked(logs), P.marking))
    return assemble_pieces(FiberSpace.natural(model), out)


def rh_to_betti(h: HilbPoint) -> HilbPoint:
    """Exponent chart to holonomy chart: the inverse of rh_to_derham,
    exact on nilpotent data for the same reason."""
    if h.space.kind != NATURAL:
        raise ValueError("rh_to_betti starts from a natural-chart point")
    out = []
    for P in h.pieces:
        point = tuple(_exp_scalar(a) for a in P.point)
        units = [expm1_matrix(Mk) for Mk in P.N.B]
        out.append(PunctualData(point, CommutingTuple._unchecked(units), P.marking))
    return assemble_pieces(FiberSpace.betti(h.space.d, h.space.frame), out)


# ----------------------------------------------------------------------
# Hodge family


def _tau_nonzero(tau: Scalar, eps: float):
    if (tau.mode == EXACT and tau.is_zero()) or (
        tau.mode == FLOAT and abs(tau.cx) <= eps
    ):
        raise TauZeroError("tau-scaling is undefined at tau = 0")


def hodge_deform(h: HilbPoint, tau) -> HilbPoint:
    """Exponent chart to the tau-scaled split chart: split each piece
    into (u, w) coordinates through the model's period pairing, then
    scale the fiber block by tau.  The split mixes coordinates with the
    model's (floating point) coefficients; the subsequent scalings are
    where exactness lives (see hodge_rescale)."""
    if h.space.kind != NATURAL:
        raise ValueError("hodge_deform starts from a natural-chart point")
    model = h.space.model
    tau = tau if isinstance(tau, Scalar) else Scalar.from_complex(tau)
    _tau_nonzero(tau, model.frame.eps_eq)
    d = model.d
    C = model.split_coeffs()
    tz = tau.cx
    frame = model.frame
    out = []
    for P in h.pieces:
        a = np.array([c.cx for c in P.point])
        x = C @ a
        x[:d] *= tz
        stack = np.stack([Nk.to_numpy() for Nk in P.N.B])
        X = np.tensordot(C, stack, axes=1)
        X[:d] *= tz
        mats = [Matrix(FLOAT, P.length, P.length, X[i], frame) for i in range(2 * d)]
        mark = P.marking if P.marking.mode == FLOAT else P.marking.to_float(frame)
        out.append(
            PunctualData(
                tuple(Scalar.from_complex(z) for z in x),
                CommutingTuple._unchecked(mats),
                mark,
            )
        )
    return assemble_pieces(FiberSpace.hodge(model, tau), out)


def hodge_undeform(h: HilbPoint) -> HilbPoint:
    """Invert hodge_deform: divide the fiber block by tau and reassemble
    the exponent coordinates."""
    if h.space.kind != HODGE:
        raise ValueError("hodge_undeform starts from a hodge-chart point")
    model = h.space.model
    tau = h.space.tau
    _tau_nonzero(tau, model.frame.eps_eq)
    d = model.d
    K = model.split_matrix
    tz = tau.cx
    frame = model.frame
    out = []
    for P in h.pieces:
        x = np.array([c.cx for c in P.point])
        x[:d] /= tz
        a = K @ x
        stack = np.stack([Nk.to_numpy() for Nk in P.N.B]).astype(np.complex128)
        stack[:d] /= tz
        A = np.tensordot(K, stack, axes=1)
        mats = [Matrix(FLOAT, P.length, P.length, A[i], frame) for i in range(2 * d)]
        mark = P.marking if P.marking.mode == FLOAT else P.marking.to_float(frame)
        out.append(
            PunctualData(
                tuple(Scalar.from_complex(z) for z in a),
                CommutingTuple._unchecked(mats),
                mark,
            )
        )
    return assemble_pieces(FiberSpace.natural(model), out)


def hodge_rescale(h: HilbPoint, factor) -> HilbPoint:
    """Scale the fiber block by a further factor, moving tau to
    tau * factor.  Pure coordinate scaling: exact data with an exact
    factor stays exact, and rescaling by t then t' is bitwise the same
    as rescaling by t * t'."""
    if h.space.kind != HODGE:
        raise ValueError("hodge_rescale needs a hodge-chart point")
    factor = factor if isinstance(factor, Scalar) else Scalar.from_complex(factor)
    _tau_nonzero(factor, h.space.frame.eps_eq)
    d = h.space.d
    out = []
    for P in h.pieces:
        point = tuple(
            _scale_pair(c, factor) if i < d else c for i, c in enumerate(P.point)
        )
        mats = [
            _scale_matrix(Nk, factor) if i < d else Nk for i, Nk in enumerate(P.N.B)
        ]
        out.append(PunctualData(point, CommutingTuple._unchecked(mats), P.marking))
    new_tau = _scale_pair(h.space.tau, factor)
    return HilbPoint(FiberSpace.hodge(h.space.model, new_tau), out)


# ----------------------------------------------------------------------
# rank-1 identification and the marked diagram


def rank1_identify(space: FiberSpace, point) -> dict:
    """Describe the rank-1 module a chart point corresponds to."""
    coords = tuple(
        c if isinstance(c, Scalar) else Scalar.from_complex(c) for c in point
    )
    if len(coords) != space.chart_dim:
        raise ValueError("point arity differs from the chart")
    d = space.d
    if space.kind == BETTI:
        return {"kind": "local-system", "character": [c.to_json() for c in coords]}
    model = space.model
    if space.kind == NATURAL:
        u, w = model.split_solve(np.array([c.cx for c in coords]))
        return {
            "kind": "connection",
            "line_bundle": DualPoint(model, w).to_json(),
            "connection_form": [Scalar.from_complex(z).to_json() for z in u],
        }
    if space.kind == DUAL_TORUS:
        w = np.array([c.cx for c in coords])
        return {"kind": "line-bundle", "point": DualPoint(model, w).to_json()}
    if space.kind in (COTANGENT, HODGE):
        u = coords[:d]
        w = np.array([c.cx for c in coords[d:]])
        out = {
            "kind": "higgs" if space.kind == COTANGENT else "tau-connection",
            "line_bundle": DualPoint(model, w).to_json(),
            "fiber": [c.to_json() for c in u],
        }
        if space.kind == HODGE:
            out["tau"] = space.tau.to_json()
        return out
    xi = coords[: space.vdim]
    w = np.array([c.cx for c in coords[space.vdim :]])
    return {
        "kind": "alpha-zero",
        "line_bundle": DualPoint(model, w).to_json(),
        "covector": [c.to_json() for c in xi],
    }


def diagram_check(
    M: MarkedTuple,
    model: AbelianVarietyModel | None = None,
    tol: float | None = None,
) -> bool:
    """The marked square commutes: forgetting the marking and taking the
    weighted support equals passing to the Hilbert point and applying
    Hilbert-Chow, on both sides of the Riemann-Hilbert transform.  The
    natural chart does not depend on the model, so any model of the
    right dimension (default: the square one) verifies the second
    square."""
    h = betti_marked(M)
    s_marked = hilbert_chow(h)
    s_plain = betti_unmarked(M.tuple)
    if not s_marked.close_to(s_plain, tol):
        return False
    if model is None:
        model = square_model(M.m // 2)
    n = rh_to_derham(h, model)
    s_rh = hilbert_chow(n)
    eps = model.frame.eps_eq
    space_n = FiberSpace.natural(model)
    logged = [
        (space_n.canonical_point(tuple(_log_scalar(c, eps) for c in p)), k)
        for p, k in s_plain.support
    ]
    s_logged = SymPoint(space_n, logged)
    return s_rh.close_to(s_logged, tol)
