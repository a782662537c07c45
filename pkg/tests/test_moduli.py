"""Assembled length-n moduli: charts, assembly, transforms, diagrams."""

import cmath
import json
import math

import numpy as np
import pytest

from abelmod.adhm import CommutingTuple, MarkedTuple, PunctualData, from_points
from abelmod.errors import (
    LogAtZeroError,
    PieceCollisionError,
    TauZeroError,
    ZeroHolonomyError,
)
from abelmod.linalg import EXACT, FLOAT, Matrix, Scalar, ToleranceFrame
from abelmod.moduli import (
    FiberSpace,
    HilbPoint,
    SymPoint,
    assemble_pieces,
    betti_assemble,
    betti_marked,
    betti_unmarked,
    diagram_check,
    hilbert_chow,
    hodge_deform,
    hodge_rescale,
    hodge_undeform,
    rank1_identify,
    rh_to_betti,
    rh_to_derham,
)
from abelmod.torus import BettiPoint, exp_rh, log_rh, square_model


def _exact_pt(*vals):
    return tuple(Scalar.exact(v) for v in vals)


def _piece(point, shift_len, m):
    if shift_len == 1:
        mats = [Matrix.zeros(1, 1, EXACT) for _ in range(m)]
        mark = Matrix.column([Scalar.exact(1)])
    else:
        rows = [[0] * shift_len for _ in range(shift_len)]
        for i in range(shift_len - 1):
            rows[i][i + 1] = 1
        mats = [Matrix.exact(rows)] + [Matrix.zeros(shift_len, shift_len, EXACT) for _ in range(m - 1)]
        mark = Matrix.column([Scalar.exact(int(i == shift_len - 1)) for i in range(shift_len)])
    return PunctualData(point, CommutingTuple(mats), mark)


class TestSpaces:
    def test_chart_dims(self):
        m = square_model(2)
        assert FiberSpace.betti(2).chart_dim == 4
        assert FiberSpace.natural(m).chart_dim == 4
        assert FiberSpace.hodge(m, 1.0).chart_dim == 4
        assert FiberSpace.dual_torus(m).chart_dim == 2
        assert FiberSpace.product_alpha_zero(m, 3).chart_dim == 5

    def test_json_roundtrip(self):
        sp = FiberSpace.hodge(square_model(1), Scalar.exact("1/2"))
        assert FiberSpace.from_json(sp.to_json()) == sp

    def test_natural_points_equal_mod_2pi(self):
        sp = FiberSpace.natural(square_model(1))
        a = (Scalar.flt(0.3, 1.0), Scalar.flt(0.0))
        b = (Scalar.flt(0.3, 1.0 - 2 * math.pi), Scalar.flt(0.0))
        assert sp.points_equal(a, b)


class TestPoints:
    def test_sym_orders_support(self):
        sp = FiberSpace.betti(1)
        s = SymPoint(sp, [(_exact_pt(3, 1), 2), (_exact_pt(1, 1), 1)])
        assert [k for _, k in s.support] == [1, 2]
        assert s.total == 3

    def test_sym_rejects_duplicates(self):
        sp = FiberSpace.betti(1)
        with pytest.raises(ValueError):
            SymPoint(sp, [(_exact_pt(1, 1), 1), (_exact_pt(1, 1), 2)])

    def test_hilb_requires_cyclic_markings(self):
        sp = FiberSpace.betti(1)
        P = _piece(_exact_pt(1, 1), 2, 2)
        bad = PunctualData(P.point, P.N, Matrix.column([Scalar.exact(1), Scalar.exact(0)]))
        with pytest.raises(ValueError):
            HilbPoint(sp, [bad])

    def test_hilb_json_roundtrip(self):
        sp = FiberSpace.betti(1)
        h = HilbPoint(sp, [_piece(_exact_pt(1, 1), 2, 2), _piece(_exact_pt(3, 1), 1, 2)])
        back = HilbPoint.from_json(h.to_json())
        assert back.close_to(h, 0.0)
        assert json.dumps(back.to_json(), sort_keys=True) == json.dumps(h.to_json(), sort_keys=True)

    def test_exact_collision_never_cyclic(self):
        # two cyclic modules at the same exact point never add to a
        # cyclic one (their ideals both sit inside the maximal ideal)
        sp = FiberSpace.betti(1)
        a = _piece(_exact_pt(2, 1), 1, 2)
        b = _piece(_exact_pt(2, 1), 1, 2)
        with pytest.raises(PieceCollisionError):
            assemble_pieces(sp, [a, b])

    def test_float_near_collision_merges(self):
        # a loose equality frame with a tight rank frame: the offsets
        # absorbed into the nilpotent parts keep the merged module cyclic
        fr = ToleranceFrame(eps_rank=1e-12, eps_eq=1e-6, eps_lattice=1e-5)
        sp = FiberSpace.betti(1, frame=fr)

        def one_pt(x):
            mats = [Matrix.flt([[0.0]], fr), Matrix.flt([[0.0]], fr)]
            return PunctualData(
                (Scalar.flt(x), Scalar.flt(1.0)),
                CommutingTuple(mats),
                Matrix.flt([[1.0]], fr),
            )

        h = assemble_pieces(sp, [one_pt(1.0), one_pt(1.0 + 1e-7)])
        assert len(h.pieces) == 1 and h.total == 2


class TestBettiAssembly:
    def test_marked_roundtrip(self):
        M = from_points([(2, 1), (3, 1), (5, 1)])
        h = betti_marked(M)
        assert h.total == 3 and len(h.pieces) == 3
        M2 = betti_assemble(h)
        assert joint_spectrum_eq(M, M2)

    def test_unmarked_support(self):
        T = CommutingTuple([Matrix.exact([[2, 1], [0, 2]]), Matrix.exact([[3, 0], [0, 3]])])
        s = betti_unmarked(T)
        assert s.support[0][1] == 2

    def test_hilbert_chow_weights(self):
        sp = FiberSpace.betti(1)
        h = HilbPoint(sp, [_piece(_exact_pt(1, 1), 2, 2), _piece(_exact_pt(3, 1), 1, 2)])
        s = hilbert_chow(h)
        assert {(p[0], k) for p, k in s.support} == {
            (Scalar.exact(1), 2),
            (Scalar.exact(3), 1),
        }


def joint_spectrum_eq(M1, M2):
    from abelmod.adhm import joint_spectrum

    return joint_spectrum(M1.tuple) == joint_spectrum(M2.tuple)


class TestRiemannHilbert:
    def _hilb(self):
        sp = FiberSpace.betti(1)
        return HilbPoint(sp, [_piece(_exact_pt(2, 1), 2, 2), _piece(_exact_pt("1/2", 3), 1, 2)])

    def test_roundtrip_nilpotents_bitwise(self):
        h = self._hilb()
        model = square_model(1)
        back = rh_to_betti(rh_to_derham(h, model))
        assert len(back.pieces) == len(h.pieces)
        for P, Q in zip(h.pieces, back.pieces):
            for A, B in zip(P.N.B, Q.N.B):
                assert A == B  # exact nilpotent data survives bitwise
            assert max(abs(a.cx - b.cx) for a, b in zip(P.point, Q.point)) <= 1e-10

    def test_rank1_leg_matches_torus_maps(self):
        model = square_model(1)
        sp = FiberSpace.betti(1)
        h = HilbPoint(sp, [_piece(_exact_pt(2, 1), 1, 2)])
        mid = rh_to_derham(h, model)
        want = log_rh(BettiPoint([2.0, 1.0]), model)
        got = [c.cx for c in mid.pieces[0].point]
        assert got == list(want.cx())  # bitwise: same log on both paths
        back = exp_rh(want)
        assert [c.cx for c in rh_to_betti(mid).pieces[0].point] == list(back.cx())

    def test_zero_holonomy_rejected(self):
        sp = FiberSpace.betti(1)
        h = HilbPoint(sp, [_piece(_exact_pt(0, 1), 1, 2)])
        with pytest.raises(LogAtZeroError):
            rh_to_derham(h, square_model(1))


class TestHodge:
    def _natural(self):
        model = square_model(1)
        sp = FiberSpace.betti(1)
        h = HilbPoint(sp, [_piece(_exact_pt(2, 1), 2, 2)])
        return rh_to_derham(h, model)

    @pytest.mark.parametrize("tau", [1.0, 2.0, 0.5, 1j])
    def test_deform_undeform_roundtrip(self, tau):
        h = self._natural()
        assert hodge_undeform(hodge_deform(h, tau)).close_to(h, 1e-8)

    def test_tau_zero_rejected(self):
        with pytest.raises(TauZeroError):
            hodge_deform(self._natural(), 0.0)

    def test_rescale_composition_exact(self):
        # exact split coordinates with exact factors compose bitwise;
        # the float pieces a deformation produces would not
        model = square_model(1)
        sp = FiberSpace.hodge(model, Scalar.exact(1))
        shift = Matrix.exact([[0, 1], [0, 0]])
        piece = PunctualData(
            (Scalar.exact("1/3"), Scalar.exact("1/7")),
            CommutingTuple([shift, Matrix.zeros(2, 2, EXACT)]),
            Matrix.column([Scalar.exact(0), Scalar.exact(1)]),
        )
        h = HilbPoint(sp, [piece])
        f1, f2 = Scalar.exact("2/3"), Scalar.exact("-3/5", "1/2")
        a = hodge_rescale(hodge_rescale(h, f1), f2)
        b = hodge_rescale(h, f1 * f2)
        assert json.dumps(a.to_json(), sort_keys=True) == json.dumps(b.to_json(), sort_keys=True)


class TestRank1Identify:
    def test_betti_character(self):
        sp = FiberSpace.betti(1)
        out = rank1_identify(sp, _exact_pt(2, 3))
        assert out["kind"] == "local-system"

    def test_natural_connection(self):
        m = square_model(1)
        out = rank1_identify(FiberSpace.natural(m), (Scalar.flt(0.1), Scalar.flt(0.2)))
        assert out["kind"] == "connection" and "line_bundle" in out

    def test_hodge_kind(self):
        m = square_model(1)
        sp = FiberSpace.hodge(m, 0.5)
        out = rank1_identify(sp, (Scalar.flt(0.1), Scalar.flt(0.2)))
        assert out["kind"] == "tau-connection" and "tau" in out


class TestDiagram:
    def test_marked_square_commutes(self):
        M = from_points([(2, 1), (3, 1), (1, 2)])
        assert diagram_check(M, tol=1e-8)

    def test_float_instance(self):
        M = from_points([(2.0, 1.0), (0.5, 1.5)], mode=FLOAT)
        assert diagram_check(M, tol=1e-8)
