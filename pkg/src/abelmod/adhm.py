"""Commuting-matrix models for finite-length modules and their moduli.

A length-n module over a polynomial (or Laurent) algebra in m variables
is a tuple of m pairwise commuting n x n matrices; a marking is a vector
whose orbit under the generated algebra is everything.  This module
implements the finite-dimensional operations that drive the moduli
pictures downstream:

* stability: a marked tuple is stable iff the marking is cyclic, iff no
  proper invariant subspace contains it; for commuting tuples this is
  also equivalent to the marked automorphism group being trivial;
* triangularization: commuting matrices over C always share a complete
  invariant flag, found deterministically by intersecting eigenspaces
  member by member;
* joint spectrum and the semisimple (direct sum of joint eigenlines)
  normal form, reached along a one-parameter Rees degeneration attached
  to an invariant flag and nonincreasing integer weights;
* the canonical form of the defining ideal: the staircase of standard
  monomials in graded lexicographic order together with the
  multiplication matrices in the staircase basis, an invariant of the
  marked isomorphism class (identical after any base change);
* punctual decomposition: a stable tuple splits along joint generalized
  eigenspaces into local pieces (base point, commuting nilpotents,
  cyclic marking), and local pieces transport through analytic germs by
  finite nilpotent series.

Exact mode keeps every decision bit-reproducible; float mode thresholds
every rank decision through the tuple's ToleranceFrame.
"""

from __future__ import annotations

import cmath
import heapq
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    DuplicatePointError,
    FlagNotInvariantError,
    LogAtZeroError,
    ModeMismatchError,
    NonSplitCharPolyError,
    NotCommutingError,
    NotStableError,
    WeightsNotDecreasingError,
)
from .linalg import (
    DEFAULT_FRAME,
    EXACT,
    FLOAT,
    Matrix,
    Scalar,
    ToleranceFrame,
    char_poly,
    exact_roots,
    kernel_basis,
    rank,
    solve_matrix,
)

__all__ = [
    "CommutingTuple",
    "MarkedTuple",
    "InvariantFlag",
    "PunctualData",
    "IdealNormalForm",
    "GermExp",
    "GermLog",
    "GermScale",
    "GermSeries",
    "GermId",
    "check_commuting",
    "krylov_span",
    "is_stable",
    "common_eigenvector",
    "triangularize",
    "joint_spectrum",
    "spectrum_support",
    "sequiv_normal_form",
    "rees_family",
    "rees_limit",
    "centralizer_dim",
    "marked_automorphisms_trivial",
    "ideal_normal_form",
    "from_points",
    "decompose_punctual",
    "punctual_transport",
    "expm1_matrix",
    "log1p_matrix",
]


class CommutingTuple:
    """m pairwise commuting n x n matrices over one scalar mode.

    Construction validates commutativity: exactly in exact mode, within
    eps_eq * |B_i| * |B_j| (Frobenius) in float mode, reporting the first
    violating pair.
    """

    __slots__ = ("B", "m", "n", "mode", "frame")

    def __init__(self, B):
        B = list(B)
        if not B:
            raise ValueError("need at least one matrix")
        n = B[0].rows
        mode = B[0].mode
        for M in B:
            if M.rows != n or M.cols != n:
                raise ValueError("all members must be square of equal size")
            if M.mode != mode:
                raise ModeMismatchError("tuple members in different modes")
        for i in range(len(B)):
            for j in range(i + 1, len(B)):
                comm = B[i] @ B[j] - B[j] @ B[i]
                if mode == EXACT:
                    if not comm.is_zero():
                        raise NotCommutingError(i, j, comm.norm())
                else:
                    tol = B[i].frame.eps_eq * max(B[i].norm() * B[j].norm(), 1e-300)
                    cn = comm.norm()
                    if cn > tol:
                        raise NotCommutingError(i, j, cn)
        self.B = tuple(B)
        self.m = len(B)
        self.n = n
        self.mode = mode
        self.frame = B[0].frame if mode == FLOAT else None

    @staticmethod
    def _unchecked(B) -> "CommutingTuple":
        """Wrap without the commutativity check.  Internal: for tuples
        derived from validated ones by operations that preserve
        commutativity exactly (conjugation, invariant restriction)."""
        self = object.__new__(CommutingTuple)
        B = tuple(B)
        self.B = B
        self.m = len(B)
        self.n = B[0].rows
        self.mode = B[0].mode
        self.frame = B[0].frame if self.mode == FLOAT else None
        return self

    def __iter__(self):
        return iter(self.B)

    def __getitem__(self, j) -> Matrix:
        return self.B[j]

    def __eq__(self, other):
        if not isinstance(other, CommutingTuple):
            return NotImplemented
        return self.B == other.B

    def __repr__(self):
        return f"<CommutingTuple m={self.m} n={self.n} {self.mode}>"

    def conjugate(self, g: Matrix) -> "CommutingTuple":
        """g^{-1} B g for invertible g."""
        from .linalg import inverse

        gi = inverse(g)
        return CommutingTuple([gi @ M @ g for M in self.B])

    def to_float(self, frame: ToleranceFrame | None = None) -> "CommutingTuple":
        return CommutingTuple([M.to_float(frame) for M in self.B])

    def to_json(self):
        return {"m": self.m, "n": self.n, "mode": self.mode, "B": [M.to_json() for M in self.B]}

    @staticmethod
    def from_json(obj, frame: ToleranceFrame | None = None) -> "CommutingTuple":
        mode = obj.get("mode", EXACT)
        return CommutingTuple([Matrix.from_json(MJ, mode, frame) for MJ in obj["B"]])


def check_commuting(B) -> CommutingTuple:
    """Validate a list of matrices as a commuting tuple."""
    return CommutingTuple(B)


class MarkedTuple:
    """A commuting tuple with a nonzero marking vector."""

    __slots__ = ("tuple", "v")

    def __init__(self, tup: CommutingTuple, v: Matrix):
        if v.cols != 1 or v.rows != tup.n:
            raise ValueError("marking must be an n x 1 column")
        if v.mode != tup.mode:
            raise ModeMismatchError("marking mode differs from tuple")
        if tup.mode == EXACT:
            if v.is_zero():
                raise ValueError("marking must be nonzero")
        elif v.norm() <= tup.frame.eps_eq:
            raise ValueError("marking must be nonzero")
        self.tuple = tup
        self.v = v

    @property
    def n(self):
        return self.tuple.n

    @property
    def m(self):
        return self.tuple.m

    @property
    def mode(self):
        return self.tuple.mode

    def __repr__(self):
        return f"<MarkedTuple m={self.m} n={self.n} {self.mode}>"

    def to_json(self):
        out = self.tuple.to_json()
        out["v"] = [self.v[i, 0].to_json() for i in range(self.n)]
        return out

    @staticmethod
    def from_json(obj, frame: ToleranceFrame | None = None) -> "MarkedTuple":
        tup = CommutingTuple.from_json(obj, frame)
        mode = obj.get("mode", EXACT)
        v = Matrix.column([Scalar.from_json(x, mode) for x in obj["v"]])
        if mode == FLOAT and frame is not None:
            v = Matrix(FLOAT, v.rows, 1, v._a, frame)
        return MarkedTuple(tup, v)


class InvariantFlag:
    """A complete flag given by a basis matrix; step i is the span of the
    first i columns.  Invariance for a given tuple is checked where it is
    consumed (rees_family / rees_limit)."""

    __slots__ = ("basis",)

    def __init__(self, basis: Matrix):
        if basis.rows != basis.cols:
            raise ValueError("flag basis must be square")
        if rank(basis) < basis.rows:
            raise ValueError("flag basis is singular")
        self.basis = basis

    @property
    def n(self):
        return self.basis.rows

    @staticmethod
    def coordinate(n: int, mode: str, frame: ToleranceFrame | None = None) -> "InvariantFlag":
        return InvariantFlag(Matrix.identity(n, mode, frame))


# ----------------------------------------------------------------------
# incremental spans


class _Span:
    """Incremental linear independence bookkeeping for column vectors."""

    def __init__(self, n, mode, frame):
        self.n = n
        self.mode = mode
        self.frame = frame or DEFAULT_FRAME
        self.rows = []  # exact: (pivot, reduced row)
        self.ortho = []  # float: orthonormal numpy vectors

    @property
    def dim(self):
        return len(self.rows) if self.mode == EXACT else len(self.ortho)

    def add(self, vec: Matrix) -> bool:
        """Try to add a column; True if it enlarged the span."""
        if self.mode == EXACT:
            cur = [vec[i, 0] for i in range(self.n)]
            for pivot, row in self.rows:
                c = cur[pivot]
                if c.re or c.im:
                    for k in range(self.n):
                        s = row[k]
                        if s.re or s.im:
                            t = cur[k]
                            cur[k] = Scalar(EXACT, t.re - (c.re * s.re - c.im * s.im), t.im - (c.re * s.im + c.im * s.re))
            pivot = next((k for k in range(self.n) if not cur[k].is_zero()), None)
            if pivot is None:
                return False
            inv = Scalar.one(EXACT) / cur[pivot]
            self.rows.append((pivot, [x * inv for x in cur]))
            return True
        c = vec.to_numpy().reshape(-1)
        nrm = np.linalg.norm(c)
        if nrm == 0.0:
            return False
        r = c.copy()
        for _ in range(2):  # re-orthogonalize once for stability
            for q in self.ortho:
                r = r - (q.conj() @ r) * q
        rn = np.linalg.norm(r)
        if rn <= self.frame.eps_rank * nrm:
            return False
        self.ortho.append(r / rn)
        return True


def krylov_span(M: MarkedTuple) -> Matrix:
    """Smallest subspace containing the marking and invariant under every
    member, as a matrix of basis columns (the accepted generating words,
    breadth first: v, B_1 v, B_2 v, ...)."""
    tup, v = M.tuple, M.v
    span = _Span(tup.n, tup.mode, tup.frame)
    span.add(v)
    accepted = [v]
    queue = [v]
    while queue and span.dim < tup.n:
        w = queue.pop(0)
        for Bj in tup.B:
            c = Bj @ w
            if span.add(c):
                accepted.append(c)
                queue.append(c)
                if span.dim == tup.n:
                    break
    out = accepted[0]
    for c in accepted[1:]:
        out = out.hstack(c)
    return out


def is_stable(M: MarkedTuple) -> bool:
    """Stability = the marking is cyclic: its Krylov span is everything.
    Equivalently no proper invariant subspace contains the marking."""
    return krylov_span(M).cols == M.n


# ----------------------------------------------------------------------
# eigen machinery


def _sort_key(s: Scalar):
    if s.mode == EXACT:
        return (float(s.re), float(s.im), str(s.re), str(s.im))
    return (s.re, s.im, "", "")


def _exact_distinct_eigs(R: Matrix) -> list[tuple[Scalar, int]]:
    """Distinct eigenvalues with algebraic multiplicities, canonically
    sorted.  NonSplitCharPoly when the spectrum is not Gaussian rational."""
    return exact_roots(char_poly(R))


def _float_eig_clusters(R: Matrix) -> list[tuple[complex, float]]:
    """Cluster numpy eigenvalues within eps_eq; returns (mean, spread)
    sorted by (Re, Im)."""
    w = np.linalg.eig(R._a)[0]
    scale = 1.0 + float(np.abs(w).max())
    tol = R.frame.eps_eq * scale
    clusters: list[list[complex]] = []
    for z in sorted(w, key=lambda x: (x.real, x.imag)):
        placed = False
        for cl in clusters:
            if abs(z - cl[0]) <= tol:
                cl.append(z)
                placed = True
                break
        if not placed:
            clusters.append([z])
    out = []
    for cl in clusters:
        mean = sum(cl) / len(cl)
        spread = max(abs(z - mean) for z in cl)
        out.append((mean, spread))
    out.sort(key=lambda t: (t[0].real, t[0].imag))
    return out


def _float_eigenspace(R: Matrix, lam: complex, spread: float) -> Matrix:
    """Approximate eigenspace via small singular vectors of R - lam.
    Falls back to the single best vector when thresholding rejects all
    (defective eigenvalues split by roughly sqrt(machine eps))."""
    n = R.rows
    A = R._a - lam * np.eye(n)
    u, s, vh = np.linalg.svd(A)
    smax = s[0] if s[0] > 0 else 1.0
    thresh = max(R.frame.eps_rank * smax, 2.0 * spread)
    cols = [vh[i].conj() for i in range(n) if s[i] <= thresh]
    if not cols:
        cols = [vh[n - 1].conj()]
    return Matrix(FLOAT, n, len(cols), np.array(cols).T, R.frame)


def common_eigenvector(T: CommutingTuple):
    """A simultaneous eigenvector with its eigenvalue tuple.

    Walks the members in order, holding a subspace on which all processed
    members act as scalars: a member acting non-scalarly is restricted to
    the eigenspace of its canonically smallest eigenvalue (ordered by
    (Re, Im)).  Exact mode raises NonSplitCharPoly when some restricted
    spectrum is not Gaussian rational.
    """
    n = T.n
    S = Matrix.identity(n, T.mode, T.frame)
    lams = []
    for Bj in T.B:
        R = solve_matrix(S, Bj @ S) if S.cols < n else Bj
        if T.mode == EXACT:
            eigs = _exact_distinct_eigs(R)
            lam, _ = eigs[0]
            shifted = R - Matrix.identity(R.rows, EXACT).scale(lam)
            E = kernel_basis(shifted)
            lams.append(lam)
            if len(E) < R.rows:
                Emat = E[0]
                for e in E[1:]:
                    Emat = Emat.hstack(e)
                S = S @ Emat
        else:
            clusters = _float_eig_clusters(R)
            lam, spread = clusters[0]
            lams.append(Scalar(FLOAT, lam.real, lam.imag))
            E = _float_eigenspace(R, lam, spread)
            if E.cols < R.rows:
                S = S @ E
    return S.col(0), tuple(lams)


def _complete_to_basis_exact(w: Matrix) -> Matrix:
    """[w | standard vectors] chosen greedily to stay invertible."""
    n = w.rows
    cols = [w]
    span = _Span(n, EXACT, None)
    span.add(w)
    for j in range(n):
        if len(cols) == n:
            break
        e = Matrix.exact([[1 if i == j else 0] for i in range(n)])
        if span.add(e):
            cols.append(e)
    out = cols[0]
    for c in cols[1:]:
        out = out.hstack(c)
    return out


def _complete_to_unitary(w: np.ndarray, frame) -> Matrix:
    n = w.shape[0]
    i0 = int(np.argmax(np.abs(w)))
    others = [np.eye(n)[:, j] for j in range(n) if j != i0]
    A = np.column_stack([w] + others)
    Q, _ = np.linalg.qr(A)
    return Matrix(FLOAT, n, n, Q, frame)


def triangularize(T: CommutingTuple):
    """Simultaneous triangularization: returns (g, flag, upper) with
    g^{-1} B_j g upper triangular and the flag spanned by the leading
    columns of g.  Deflation is by common eigenvectors, so the result is
    deterministic; float mode accumulates unitary deflation steps."""
    n = T.n
    mode = T.mode
    g = Matrix.identity(n, mode, T.frame)
    current = list(T.B)
    k = n
    offset = 0
    while k > 1:
        w, _ = common_eigenvector(CommutingTuple._unchecked(current))
        if mode == EXACT:
            P = _complete_to_basis_exact(w)
        else:
            P = _complete_to_unitary(w.to_numpy().reshape(-1), T.frame)
        from .linalg import inverse

        Pi = inverse(P)
        current = [(Pi @ M @ P) for M in current]
        # embed P into the ambient space at the current offset
        if offset == 0:
            emb = P
        else:
            emb = Matrix.identity(n, mode, T.frame)
            if mode == EXACT:
                rows = [[emb[i, j] for j in range(n)] for i in range(n)]
                for i in range(k):
                    for j in range(k):
                        rows[offset + i][offset + j] = P[i, j]
                emb = Matrix(EXACT, n, n, rows)
            else:
                a = emb._a.copy()
                a[offset:, offset:] = P._a
                emb = Matrix(FLOAT, n, n, a, T.frame)
        g = g @ emb
        # recurse on the trailing block
        if mode == EXACT:
            current = [Matrix(EXACT, k - 1, k - 1, [row[1:] for row in M._a[1:]]) for M in current]
        else:
            current = [Matrix(FLOAT, k - 1, k - 1, M._a[1:, 1:].copy(), T.frame) for M in current]
        offset += 1
        k -= 1
    from .linalg import inverse

    gi = inverse(g)
    upper = [gi @ M @ g for M in T.B]
    return g, InvariantFlag(g), CommutingTuple._unchecked(upper)


def joint_spectrum(T: CommutingTuple) -> list[tuple[Scalar, ...]]:
    """The multiset of joint eigenvalue m-tuples, from the diagonal of a
    simultaneous triangularization; float mode merges tuples whose every
    coordinate agrees within eps_eq, reporting cluster means.  Sorted by
    coordinatewise (Re, Im)."""
    _, _, upper = triangularize(T)
    n = T.n
    tuples = [tuple(upper[j][k, k] for j in range(T.m)) for k in range(n)]
    if T.mode == EXACT:
        return sorted(tuples, key=lambda t: tuple(_sort_key(s) for s in t))
    vals = np.array([[s.cx for s in t] for t in tuples])  # n x m
    scales = 1.0 + np.abs(vals).max(axis=0)
    tol = T.frame.eps_eq * scales
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if np.all(np.abs(vals[i] - vals[j]) <= tol):
                pi, pj = find(i), find(j)
                if pi != pj:
                    parent[max(pi, pj)] = min(pi, pj)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    reps = []
    for members in groups.values():
        mean = vals[members].mean(axis=0)
        reps.append((mean, len(members)))
    reps.sort(key=lambda t: tuple(x for z in t[0] for x in (z.real, z.imag)))
    out = []
    for mean, count in reps:
        tup = tuple(Scalar(FLOAT, z.real, z.imag) for z in mean)
        out.extend([tup] * count)
    return out


_EPS_M = float(np.finfo(np.float64).eps)


def _float_local_subspace(T: CommutingTuple, pt, mult: int) -> Matrix:
    """Joint generalized eigenspace at a support point, grown one power
    at a time: V_{i+1} = {x : (B_j - p_j) x in V_i for all j}.

    Stacked n-th powers would compress the separation between pieces
    like gap^n, below the noise floor for moderate n; the staged chain
    keeps the gap linear while accepting the eps^(1/(mult+1)) fuzz that
    defective structure puts on computed eigenvalues."""
    n = T.n
    eye = np.eye(n)
    shifted = [Bj.to_numpy() - pt[j].cx * eye for j, Bj in enumerate(T.B)]
    scale = 1.0 + max(np.linalg.norm(S) for S in shifted)
    tol = scale * _EPS_M ** (1.0 / (mult + 1))
    V = None
    dim = 0
    for _ in range(n):
        if V is None:
            blocks = shifted
        else:
            proj = eye - V @ V.conj().T
            blocks = [proj @ S for S in shifted]
        _, s, vh = np.linalg.svd(np.vstack(blocks))
        k = int(np.sum(s <= tol))
        if k <= dim:
            break
        V = vh[n - k :, :].conj().T
        dim = k
        if dim >= mult:
            break
    if dim != mult or V is None:
        raise NonSplitCharPolyError(
            f"generalized eigenspace dimension {dim} != multiplicity {mult}"
        )
    return Matrix(FLOAT, n, dim, V.copy(), T.frame)


def _float_support_refine(T: CommutingTuple, entries):
    """Recluster fragmented float support and refine the points.

    Defective length-ell structure scatters computed eigenvalues by
    roughly eps^(1/ell), far beyond eps_eq, so entries are merged at the
    Jordan radius eps^(1/(n+1)) per coordinate; each merged point is then
    sharpened to the trace mean of the restriction to its local invariant
    subspace, which is accurate at working precision.  Refinement is best
    effort: a point whose subspace cannot be confirmed keeps its cluster
    mean."""
    n = T.n
    m = T.m
    radius = [
        (1.0 + max(abs(pt[j]) for pt, _ in entries)) * _EPS_M ** (1.0 / (n + 1))
        for j in range(m)
    ]
    vals = [np.array([c.cx for c in pt]) for pt, _ in entries]
    parent = list(range(len(entries)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(entries)):
        for j in range(i + 1, len(entries)):
            if all(abs(vals[i][k] - vals[j][k]) <= radius[k] for k in range(m)):
                pi, pj = find(i), find(j)
                if pi != pj:
                    parent[max(pi, pj)] = min(pi, pj)
    groups: dict[int, list[int]] = {}
    for i in range(len(entries)):
        groups.setdefault(find(i), []).append(i)
    out = []
    for members in groups.values():
        total = sum(entries[i][1] for i in members)
        mean = sum(vals[i] * entries[i][1] for i in members) / total
        pt = tuple(Scalar(FLOAT, z.real, z.imag) for z in mean)
        try:
            E = _float_local_subspace(T, pt, total)
            inv = Scalar.flt(total)
            pt = tuple(
                solve_matrix(E, T.B[j] @ E).trace() / inv for j in range(m)
            )
        except NonSplitCharPolyError:
            pass
        out.append((pt, total))
    out.sort(key=lambda e: tuple(_sort_key(c) for c in e[0]))
    return out


def spectrum_support(T: CommutingTuple) -> list[tuple[tuple[Scalar, ...], int]]:
    """Distinct joint eigenvalue tuples with multiplicities.

    Float mode reads the support at the Jordan radius rather than eps_eq
    (see _float_support_refine), so a defective piece reports one point
    with its full length."""
    spec = joint_spectrum(T)
    out = []
    for t in spec:
        if out and all(a == b for a, b in zip(out[-1][0], t)):
            out[-1] = (out[-1][0], out[-1][1] + 1)
        else:
            out.append((t, 1))
    if T.mode == FLOAT and out:
        out = _float_support_refine(T, out)
    return out


def sequiv_normal_form(T: CommutingTuple) -> CommutingTuple:
    """The semisimplification: diagonal matrices carrying the sorted joint
    spectrum.  Two tuples with equal joint spectra get the identical
    normal form."""
    spec = joint_spectrum(T)
    mats = []
    for j in range(T.m):
        mats.append(Matrix.diag([t[j] for t in spec], T.frame))
    return CommutingTuple(mats)


# ----------------------------------------------------------------------
# Rees degenerations


def _adapted(T: CommutingTuple, F: InvariantFlag) -> list[Matrix]:
    """Tuple in the flag basis; FlagNotInvariant unless upper triangular."""
    if F.basis.mode != T.mode:
        raise ModeMismatchError("flag mode differs from tuple")
    if F.n != T.n:
        raise ValueError("flag size differs from tuple")
    from .linalg import inverse

    gi = inverse(F.basis)
    adapted = [gi @ M @ F.basis for M in T.B]
    n = T.n
    for A in adapted:
        if T.mode == EXACT:
            for i in range(n):
                for j in range(i):
                    if not A[i, j].is_zero():
                        raise FlagNotInvariantError("flag is not invariant for the tuple")
        else:
            scale = max(1.0, A.norm())
            low = sum(abs(A[i, j].cx) ** 2 for i in range(n) for j in range(i))
            if math.sqrt(low) > A.frame.eps_eq * scale * 10:
                raise FlagNotInvariantError("flag is not invariant for the tuple")
    return adapted

def _check_weights(weights, n: int):
    w = list(weights)
    if len(w) != n:
        raise ValueError("need one weight per flag step")
    if any(int(x) != x for x in w):
        raise ValueError("weights must be integers")
    w = [int(x) for x in w]
    if any(w[i] < w[i + 1] for i in range(n - 1)):
        raise WeightsNotDecreasingError("weights must be nonincreasing along the flag")
    return w


def rees_family(T: CommutingTuple, F: InvariantFlag, weights, t: Scalar) -> CommutingTuple:
    """Member at parameter t != 0 of the degeneration attached to (F,
    weights): in the flag basis, conjugate by diag(t^{w_k}).  Entry (k, l)
    scales by t^{w_k - w_l}; invariance of the flag plus nonincreasing
    weights keeps all exponents of surviving entries nonnegative, so the
    family extends across t = 0 (see rees_limit)."""
    w = _check_weights(weights, T.n)
    if t.mode != T.mode:
        raise ModeMismatchError("parameter mode differs from tuple")
    if t.is_zero():
        raise ValueError("t must be nonzero; the limit is rees_limit")
    adapted = _adapted(T, F)
    n = T.n
    powers: dict[int, Scalar] = {0: Scalar.one(T.mode)}

    def tpow(e: int) -> Scalar:
        if e not in powers:
            if e > 0:
                powers[e] = tpow(e - 1) * t
            else:
                powers[e] = tpow(e + 1) / t
        return powers[e]

    out = []
    for A in adapted:
        if T.mode == EXACT:
            rows = [[A[i, j] * tpow(w[i] - w[j]) for j in range(n)] for i in range(n)]
            out.append(Matrix(EXACT, n, n, rows))
        else:
            a = A._a.copy()
            for i in range(n):
                for j in range(n):
                    a[i, j] *= tpow(w[i] - w[j]).cx
            out.append(Matrix(FLOAT, n, n, a, A.frame))
    return CommutingTuple(out)


def rees_limit(T: CommutingTuple, F: InvariantFlag, weights) -> CommutingTuple:
    """The t -> 0 limit of rees_family: entries with equal weights
    survive, entries with strictly larger row weight are killed (they
    scale by positive powers of t).  Strictly decreasing weights leave
    the diagonal: the semisimplification in the flag basis."""
    w = _check_weights(weights, T.n)
    adapted = _adapted(T, F)
    n = T.n
    out = []
    for A in adapted:
        if T.mode == EXACT:
            z = Scalar.zero(EXACT)
            rows = [[A[i, j] if w[i] == w[j] else z for j in range(n)] for i in range(n)]
            out.append(Matrix(EXACT, n, n, rows))
        else:
            a = A._a.copy()
            for i in range(n):
                for j in range(n):
                    if w[i] != w[j]:
                        a[i, j] = 0.0
            out.append(Matrix(FLOAT, n, n, a, A.frame))
    return CommutingTuple(out)


# ----------------------------------------------------------------------
# automorphisms


def _commutant_rows(T: CommutingTuple) -> tuple[list, int]:
    """Rows of the linear system cutting out {g : g B_j = B_j g}, over
    unknowns g_{ab} indexed a * n + b."""
    n = T.n
    rows = []
    for Bj in T.B:
        for r in range(n):
            for c in range(n):
                if T.mode == EXACT:
                    row = [Scalar.zero(EXACT)] * (n * n)
                    for k in range(n):
                        row[r * n + k] = row[r * n + k] + Bj[k, c]
                        row[k * n + c] = row[k * n + c] - Bj[r, k]
                    rows.append(row)
                else:
                    row = np.zeros(n * n, dtype=np.complex128)
                    for k in range(n):
                        row[r * n + k] += Bj._a[k, c]
                        row[k * n + c] -= Bj._a[r, k]
                    rows.append(row)
    return rows, n


def centralizer_dim(T: CommutingTuple) -> int:
    """Dimension of the algebra of matrices commuting with every member."""
    rows, n = _commutant_rows(T)
    if T.mode == EXACT:
        M = Matrix(EXACT, len(rows), n * n, rows)
    else:
        M = Matrix(FLOAT, len(rows), n * n, np.array(rows), T.frame)
    return n * n - rank(M)


def marked_automorphisms_trivial(M: MarkedTuple) -> bool:
    """True iff the only g commuting with the tuple and fixing the marking
    is the identity: writing g = Id + h, iff no nonzero h commutes with
    every member and kills the marking."""
    T = M.tuple
    n = T.n
    rows, _ = _commutant_rows(T)
    if T.mode == EXACT:
        for i in range(n):
            row = [Scalar.zero(EXACT)] * (n * n)
            for j in range(n):
                row[i * n + j] = M.v[j, 0]
            rows.append(row)
        mat = Matrix(EXACT, len(rows), n * n, rows)
    else:
        vv = M.v.to_numpy().reshape(-1)
        for i in range(n):
            row = np.zeros(n * n, dtype=np.complex128)
            row[i * n : (i + 1) * n] = vv
            rows.append(row)
        mat = Matrix(FLOAT, len(rows), n * n, np.array(rows), T.frame)
    return rank(mat) == n * n


# ----------------------------------------------------------------------
# ideal normal form


def _grlex_key(e: tuple[int, ...]):
    # graded, ties by lex with x_1 smallest: compare reversed exponents
    return (sum(e), tuple(reversed(e)))


class IdealNormalForm:
    """Canonical form of a stable marked tuple: the staircase of standard
    monomials (graded lex, x_1 < ... < x_m) and the multiplication
    matrices in the staircase-image basis.  Identical, bit for bit in
    exact mode, across the base-change orbit of the input."""

    __slots__ = ("staircase", "mult_matrices", "m", "n", "_support")

    def __init__(self, staircase, mult_matrices):
        self.staircase = tuple(tuple(e) for e in staircase)
        self.mult_matrices = tuple(mult_matrices)
        self.m = len(mult_matrices)
        self.n = len(self.staircase)
        self._support = None

    @property
    def support(self):
        """Joint spectrum of the multiplication matrices (computed on
        first use; exact mode may raise NonSplitCharPoly)."""
        if self._support is None:
            self._support = spectrum_support(CommutingTuple(list(self.mult_matrices)))
        return self._support

    def __eq__(self, other):
        if not isinstance(other, IdealNormalForm):
            return NotImplemented
        return self.staircase == other.staircase and self.mult_matrices == other.mult_matrices

    def __repr__(self):
        return f"<IdealNormalForm n={self.n} staircase={self.staircase}>"

    def divisor_closed(self) -> bool:
        stairs = set(self.staircase)
        for e in stairs:
            for k in range(len(e)):
                if e[k]:
                    d = list(e)
                    d[k] -= 1
                    if tuple(d) not in stairs:
                        return False
        return True

    def to_json(self):
        out = {
            "staircase": [list(e) for e in self.staircase],
            "mult_matrices": [M.to_json() for M in self.mult_matrices],
        }
        try:
            out["support"] = [
                {"point": [s.to_json() for s in pt], "multiplicity": mult} for pt, mult in self.support
            ]
        except NonSplitCharPolyError:
            out["support"] = None
        return out


def ideal_normal_form(M: MarkedTuple) -> IdealNormalForm:
    """Greedy staircase construction: walk monomials in graded lex order
    (via the border of the accepted set), accept a monomial iff its image
    under evaluation at the tuple applied to the marking is independent of
    the images already accepted.  The accepted set is the complement of
    the leading-term ideal, hence closed under division; the
    multiplication matrices are the tuple rewritten in the image basis."""
    if not is_stable(M):
        raise NotStableError("ideal normal form needs a cyclic marking")
    T, v = M.tuple, M.v
    n, m = T.n, T.m
    zero = (0,) * m
    heap = [(_grlex_key(zero), zero)]
    seen = {zero}
    images: dict[tuple[int, ...], Matrix] = {zero: v}
    span = _Span(n, T.mode, T.frame)
    staircase: list[tuple[int, ...]] = []
    while heap and len(staircase) < n:
        _, e = heapq.heappop(heap)
        img = images[e]
        if not span.add(img):
            del images[e]
            continue
        staircase.append(e)
        for j in range(m):
            child = list(e)
            child[j] += 1
            child = tuple(child)
            if child not in seen:
                seen.add(child)
                images[child] = T.B[j] @ img
                heapq.heappush(heap, (_grlex_key(child), child))
    if len(staircase) < n:
        raise NotStableError("staircase closed before reaching full length")
    P = images[staircase[0]]
    for e in staircase[1:]:
        P = P.hstack(images[e])
    mult = [solve_matrix(P, T.B[j] @ P) for j in range(m)]
    return IdealNormalForm(staircase, mult)


# ----------------------------------------------------------------------
# points and punctual pieces


def _coerce_scalar(c, mode: str) -> Scalar:
    if isinstance(c, Scalar):
        return c
    if mode == EXACT:
        return Scalar.exact(c)
    return Scalar.from_complex(complex(c))


def from_points(points, mode: str = EXACT, frame: ToleranceFrame | None = None) -> MarkedTuple:
    """The semisimple marked tuple of n distinct points of C^m: diagonal
    members, marking all ones.  DuplicatePoint when two points collide
    (exact equality, or within eps_eq coordinatewise in float mode)."""
    pts = [tuple(_coerce_scalar(c, mode) for c in p) for p in points]
    if not pts:
        raise ValueError("need at least one point")
    m = len(pts[0])
    eps = (frame or DEFAULT_FRAME).eps_eq
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if mode == EXACT:
                if all(a == b for a, b in zip(pts[i], pts[j])):
                    raise DuplicatePointError(f"points {i} and {j} coincide")
            elif all(abs(a.cx - b.cx) <= eps for a, b in zip(pts[i], pts[j])):
                raise DuplicatePointError(f"points {i} and {j} collide within eps_eq")
    mats = [Matrix.diag([p[j] for p in pts], frame) for j in range(m)]
    ones = Matrix.column([Scalar.one(mode) for _ in pts])
    if mode == FLOAT and frame is not None:
        mats = [Matrix(FLOAT, M.rows, M.cols, M._a, frame) for M in mats]
        ones = Matrix(FLOAT, ones.rows, 1, ones._a, frame)
    return MarkedTuple(CommutingTuple(mats), ones)


class PunctualData:
    """A local piece: base point in C^m, commuting nilpotent parts, and an
    optional marking on the piece.  The operator convention is additive:
    member j acts as point_j * Id + N_j."""

    __slots__ = ("point", "N", "marking")

    def __init__(self, point, N: CommutingTuple, marking: Matrix | None = None):
        pt = tuple(_coerce_scalar(c, N.mode) for c in point)
        if len(pt) != N.m:
            raise ValueError("point dimension differs from tuple arity")
        ell = N.n
        for Nj in N.B:
            P = Nj.power(ell)
            if N.mode == EXACT:
                if not P.is_zero():
                    raise ValueError("parts are not nilpotent")
            elif P.norm() > N.frame.eps_eq * max(1.0, Nj.norm()) ** ell:
                raise ValueError("parts are not nilpotent within tolerance")
        if marking is not None and (marking.cols != 1 or marking.rows != ell):
            raise ValueError("marking must be an ell x 1 column")
        self.point = pt
        self.N = N
        self.marking = marking

    @property
    def length(self):
        return self.N.n

    def operators(self) -> CommutingTuple:
        """The affine operators point_j * Id + N_j (modes must agree)."""
        mats = []
        for pj, Nj in zip(self.point, self.N.B):
            if pj.mode != Nj.mode:
                raise ModeMismatchError("point and nilpotent parts in different modes")
            mats.append(Nj + Matrix.identity(Nj.rows, Nj.mode, Nj.frame).scale(pj))
        return CommutingTuple(mats)

    def __repr__(self):
        return f"<PunctualData length={self.length} at {[c.cx for c in self.point]}>"

    def to_json(self):
        out = {
            "point": [c.to_json() for c in self.point],
            "mode": self.N.mode,
            "N": [M.to_json() for M in self.N.B],
        }
        if self.marking is not None:
            out["v"] = [self.marking[i, 0].to_json() for i in range(self.length)]
        return out

    @staticmethod
    def from_json(obj, frame: ToleranceFrame | None = None) -> "PunctualData":
        mode = obj.get("mode", EXACT)
        N = CommutingTuple([Matrix.from_json(MJ, mode, frame) for MJ in obj["N"]])
        pt = [Scalar.from_json(x, mode) for x in obj["point"]]
        marking = None
        if "v" in obj:
            marking = Matrix.column([Scalar.from_json(x, mode) for x in obj["v"]])
        return PunctualData(pt, N, marking)


def decompose_punctual(M: MarkedTuple) -> list[PunctualData]:
    """Split a stable tuple along joint generalized eigenspaces: one local
    piece per support point, carrying the restricted nilpotent parts and
    the component of the marking.  Pieces are sorted by base point."""
    if not is_stable(M):
        raise NotStableError("punctual decomposition needs a cyclic marking")
    T = M.tuple
    n = T.n
    support = spectrum_support(T)
    pieces = []
    bases = []
    for pt, mult in support:
        if T.mode == FLOAT:
            bases.append((pt, _float_local_subspace(T, pt, mult)))
            continue
        stacked = None
        for j in range(T.m):
            Bs = T.B[j] - Matrix.identity(n, T.mode, T.frame).scale(pt[j])
            P = Bs.power(n)
            stacked = P if stacked is None else stacked.vstack(P)
        kb = kernel_basis(stacked)
        if len(kb) != mult:
            raise NonSplitCharPolyError(
                f"generalized eigenspace dimension {len(kb)} != multiplicity {mult}"
            )
        E = kb[0]
        for b in kb[1:]:
            E = E.hstack(b)
        bases.append((pt, E))
    big = bases[0][1]
    for _, E in bases[1:]:
        big = big.hstack(E)
    coeffs = solve_matrix(big, M.v)
    offset = 0
    for pt, E in bases:
        ell = E.cols
        R = [solve_matrix(E, T.B[j] @ E) for j in range(T.m)]
        if T.mode == FLOAT:
            # trace mean of the restriction: working-precision point even
            # when the cluster mean carries Jordan-split fuzz
            inv = Scalar.flt(ell)
            pt = tuple(R[j].trace() / inv for j in range(T.m))
        N = CommutingTuple(
            [R[j] - Matrix.identity(ell, T.mode, T.frame).scale(pt[j]) for j in range(T.m)]
        )
        if T.mode == EXACT:
            mark = Matrix(EXACT, ell, 1, [[coeffs[offset + i, 0]] for i in range(ell)])
        else:
            mark = Matrix(FLOAT, ell, 1, coeffs._a[offset : offset + ell].copy(), T.frame)
        pieces.append(PunctualData(pt, N, mark))
        offset += ell
    pieces.sort(key=lambda p: tuple(_sort_key(c) for c in p.point))
    return pieces


# ----------------------------------------------------------------------
# analytic germs on punctual pieces


@dataclass(frozen=True)
class GermId:
    pass


@dataclass(frozen=True)
class GermExp:
    pass


@dataclass(frozen=True)
class GermLog:
    pass


@dataclass(frozen=True)
class GermScale:
    c: Scalar


@dataclass(frozen=True)
class GermSeries:
    coeffs: tuple  # (c_0, c_1, ...) Scalars, truncation at least the length


def _rat_coeff(mode: str, num: int, den: int) -> Scalar:
    if mode == EXACT:
        return Scalar.exact(Fraction(num, den))
    return Scalar.flt(num / den)


def expm1_matrix(N: Matrix) -> Matrix:
    """exp(N) - Id for nilpotent N, by the finite series sum N^k / k!.
    Coefficients are rational, so exact input gives exact output."""
    ell = N.rows
    out = Matrix.zeros(ell, ell, N.mode, N.frame)
    term = Matrix.identity(ell, N.mode, N.frame)
    for k in range(1, ell):
        term = term @ N
        out = out + term.scale(_rat_coeff(N.mode, 1, math.factorial(k)))
    return out


def log1p_matrix(N: Matrix) -> Matrix:
    """log(Id + N) for nilpotent N: sum (-1)^{k+1} N^k / k.  Rational
    coefficients; exact inverse of expm1_matrix on nilpotents."""
    ell = N.rows
    out = Matrix.zeros(ell, ell, N.mode, N.frame)
    term = Matrix.identity(ell, N.mode, N.frame)
    for k in range(1, ell):
        term = term @ N
        out = out + term.scale(_rat_coeff(N.mode, 1 if k % 2 else -1, k))
    return out


def _exp_scalar(p: Scalar) -> Scalar:
    if p.mode == EXACT and p.is_zero():
        return Scalar.one(EXACT)
    z = cmath.exp(p.cx)
    return Scalar(FLOAT, z.real, z.imag)


def _log_scalar(p: Scalar, eps: float) -> Scalar:
    if p.mode == EXACT:
        if p.is_zero():
            raise LogAtZeroError("log of zero base point")
        if p == Scalar.one(EXACT):
            return Scalar.zero(EXACT)
    elif abs(p.cx) <= eps:
        raise LogAtZeroError("log of zero base point")
    z = cmath.log(p.cx)
    return Scalar(FLOAT, z.real, z.imag)


def _scale_pair(x: Scalar, c: Scalar) -> Scalar:
    """c * x, dropping to float unless both factors are exact."""
    if x.mode == c.mode:
        return x * c
    if x.mode == EXACT:
        x = Scalar.from_complex(x.cx)
    if c.mode == EXACT:
        c = Scalar.from_complex(c.cx)
    return x * c


def _scale_matrix(N: Matrix, c: Scalar) -> Matrix:
    if N.mode == c.mode:
        return N.scale(c)
    if N.mode == FLOAT:
        return N.scale(Scalar.from_complex(c.cx))
    return N.to_float().scale(Scalar.from_complex(c.cx))


def punctual_transport(P: PunctualData, germs) -> PunctualData:
    """Move a local piece through per-coordinate analytic germs.

    ``germs`` is one germ (applied to every coordinate) or a list with one
    germ per coordinate.  The operator p Id + N maps to g(p Id + N),
    expanded as the germ's finite Taylor series around p (the nilpotent
    truncates it):

    * GermExp: e^p (Id + expm1(N)), so base e^p, nilpotent e^p expm1(N);
    * GermLog: log(p) Id + log1p(N / p), principal branch, LogAtZero at
      p = 0; with exact data the nilpotent stays exact for any exact p;
    * GermScale(c): base c p, nilpotent c N;
    * GermSeries(c_0..c_t): the polynomial evaluated at p Id + N, with
      t + 1 at least the piece length.

    Mutually inverse germs compose to the identity on the nilpotent data
    up to the scalar prefactors they introduce; transcendental base values
    are floating point (only exp at 0 and log at 1 stay exact)."""
    m = P.N.m
    if isinstance(germs, (GermId, GermExp, GermLog, GermScale, GermSeries)):
        germs = [germs] * m
    germs = list(germs)
    if len(germs) != m:
        raise ValueError("need one germ per coordinate")
    eps = (P.N.frame or DEFAULT_FRAME).eps_eq
    new_point = []
    new_N = []
    for j, g in enumerate(germs):
        p = P.point[j]
        N = P.N.B[j]
        if isinstance(g, GermId):
            new_point.append(p)
            new_N.append(N)
        elif isinstance(g, GermExp):
            ep = _exp_scalar(p)
            new_point.append(ep)
            new_N.append(_scale_matrix(expm1_matrix(N), ep))
        elif isinstance(g, GermLog):
            lp = _log_scalar(p, eps)
            new_point.append(lp)
            inv_p = Scalar.one(p.mode) / p
            new_N.append(log1p_matrix(_scale_matrix(N, inv_p)))
        elif isinstance(g, GermScale):
            new_point.append(_scale_pair(p, g.c))
            new_N.append(_scale_matrix(N, g.c))
        elif isinstance(g, GermSeries):
            coeffs = list(g.coeffs)
            if len(coeffs) < P.length:
                raise ValueError("series truncated below the piece length")
            allexact = (
                p.mode == EXACT and N.mode == EXACT and all(c.mode == EXACT for c in coeffs)
            )
            if not allexact:
                if p.mode == EXACT:
                    p = Scalar.from_complex(p.cx)
                if N.mode == EXACT:
                    N = N.to_float()
                coeffs = [
                    c if c.mode == FLOAT else Scalar.from_complex(c.cx) for c in coeffs
                ]
            A = N + Matrix.identity(P.length, N.mode, N.frame).scale(p)
            acc = Matrix.zeros(P.length, P.length, N.mode, N.frame)
            pw = Matrix.identity(P.length, N.mode, N.frame)
            base = Scalar.zero(p.mode)
            ppow = Scalar.one(p.mode)
            for k, ck in enumerate(coeffs):
                if k:
                    pw = pw @ A
                    ppow = ppow * p
                acc = acc + pw.scale(ck)
                base = base + ppow * ck
            new_point.append(base)
            new_N.append(acc - Matrix.identity(P.length, acc.mode, acc.frame).scale(base))
        else:
            raise TypeError(f"unknown germ {g!r}")
    return PunctualData(new_point, CommutingTuple(new_N), P.marking)
