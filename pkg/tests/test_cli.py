"""Front-end contract: schemas, exit codes, determinism."""

import json
import math

import pytest

from abelmod.cli import main


def _write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def _read(tmp_path, name):
    return json.loads((tmp_path / name).read_text())


def _sc(p, q="0"):
    return {"re": p, "im": q}


def _stable_pair():
    return {
        "m": 2,
        "n": 2,
        "mode": "exact",
        "B": [
            [[_sc("0"), _sc("1")], [_sc("0"), _sc("0")]],
            [[_sc("1/2"), _sc("0")], [_sc("0"), _sc("1/2")]],
        ],
        "v": [_sc("0"), _sc("1")],
    }


def _unstable_diag():
    return {
        "m": 1,
        "n": 2,
        "mode": "exact",
        "B": [[[_sc("1"), _sc("0")], [_sc("0"), _sc("2")]]],
        "v": [_sc("1"), _sc("0")],
    }


class TestStability:
    def test_unstable_with_witness(self, tmp_path):
        inp = _write(tmp_path, "in.json", _unstable_diag())
        rc = main(["stability", "--in", inp, "--out", str(tmp_path / "out.json")])
        assert rc == 0
        doc = _read(tmp_path, "out.json")
        assert doc["schema"] == "abelmod/1"
        assert doc["stable"] is False
        # the span of e_1: the invariant line the marking generates
        assert doc["witness_subspace"] == [[_sc("1")], [_sc("0")]]

    def test_stable(self, tmp_path):
        inp = _write(tmp_path, "in.json", _stable_pair())
        rc = main(["stability", "--in", inp, "--out", str(tmp_path / "out.json")])
        assert rc == 0
        doc = _read(tmp_path, "out.json")
        assert doc["stable"] is True and doc["witness_subspace"] is None


class TestClassify:
    def test_de_rham_label_and_dual(self, tmp_path):
        eye = [[_sc("1"), _sc("0")], [_sc("0"), _sc("1")]]
        zero = [[_sc("0"), _sc("0")], [_sc("0"), _sc("0")]]
        doc = {"d": 2, "v": 2, "mode": "exact", "alpha": eye, "beta": zero, "gamma": zero}
        inp = _write(tmp_path, "in.json", doc)
        rc = main(["classify-dalgebra", "--in", inp, "--out", str(tmp_path / "out.json")])
        assert rc == 0
        out = _read(tmp_path, "out.json")
        assert out["label"] == "DeRham"
        # the dual triple carries alpha into beta
        assert out["fm_dual"]["beta"] == eye
        assert out["invariants"]["rank_alpha"] == 2


class TestCanonicalizeAndSpectrum:
    def test_canonicalize_staircase(self, tmp_path):
        inp = _write(tmp_path, "in.json", _stable_pair())
        rc = main(["canonicalize", "--in", inp, "--out", str(tmp_path / "out.json")])
        assert rc == 0
        out = _read(tmp_path, "out.json")
        assert out["staircase"] == [[0, 0], [1, 0]]

    def test_canonicalize_unstable_is_domain_error(self, tmp_path):
        inp = _write(tmp_path, "in.json", _unstable_diag())
        rc = main(["canonicalize", "--in", inp, "--out", str(tmp_path / "out.json")])
        assert rc == 2
        assert _read(tmp_path, "out.json")["error"] == "NotStable"

    def test_spectrum_support(self, tmp_path):
        inp = _write(tmp_path, "in.json", _stable_pair())
        rc = main(["spectrum", "--in", inp, "--out", str(tmp_path / "out.json")])
        assert rc == 0
        out = _read(tmp_path, "out.json")
        assert out["support"][0]["multiplicity"] == 2


class TestRees:
    def test_family_and_limit(self, tmp_path):
        doc = {
            "m": 1,
            "n": 2,
            "mode": "exact",
            "B": [[[_sc("1"), _sc("1")], [_sc("0"), _sc("2")]]],
            "g": [[_sc("1"), _sc("0")], [_sc("0"), _sc("1")]],
        }
        inp = _write(tmp_path, "in.json", doc)
        rc = main(["rees", "--weights", "1,0", "--t", "1/3", "--in", inp, "--out", str(tmp_path / "f.json")])
        assert rc == 0
        fam = _read(tmp_path, "f.json")
        assert fam["B"][0][0][1] == _sc("1/3")
        rc = main(["rees", "--weights", "1,0", "--in", inp, "--out", str(tmp_path / "l.json")])
        assert rc == 0
        lim = _read(tmp_path, "l.json")
        assert lim["B"][0][0][1] == _sc("0")

    def test_increasing_weights_rejected(self, tmp_path):
        doc = {
            "m": 1,
            "n": 2,
            "mode": "exact",
            "B": [[[_sc("1"), _sc("0")], [_sc("0"), _sc("2")]]],
            "g": [[_sc("1"), _sc("0")], [_sc("0"), _sc("1")]],
        }
        inp = _write(tmp_path, "in.json", doc)
        rc = main(["rees", "--weights", "0,1", "--in", inp, "--out", str(tmp_path / "out.json")])
        assert rc == 2
        assert _read(tmp_path, "out.json")["error"] == "WeightsNotDecreasing"


def _hilb_doc():
    # one punctual piece of length 2 over z = (2, 3) in the betti chart
    shift = [[_sc("0"), _sc("1")], [_sc("0"), _sc("0")]]
    zero = [[_sc("0"), _sc("0")], [_sc("0"), _sc("0")]]
    return {
        "space": {"kind": "betti", "d": 1},
        "pieces": [
            {
                "point": {"coords": [_sc("2"), _sc("3")]},
                "punctual": {"mode": "exact", "N": [shift, zero], "v": [_sc("0"), _sc("1")]},
            }
        ],
    }


class TestHilbCommands:
    def test_hilbert_chow_mult(self, tmp_path):
        inp = _write(tmp_path, "in.json", _hilb_doc())
        rc = main(["hilbert-chow", "--in", inp, "--out", str(tmp_path / "out.json")])
        assert rc == 0
        out = _read(tmp_path, "out.json")
        assert out["support"][0]["multiplicity"] == 2

    def test_rh_roundtrip_through_files(self, tmp_path):
        inp = _write(tmp_path, "in.json", _hilb_doc())
        rc = main(["rh-transform", "--from", "betti", "--to", "derham", "--in", inp, "--out", str(tmp_path / "mid.json")])
        assert rc == 0
        mid = _read(tmp_path, "mid.json")
        assert mid["space"]["kind"] == "natural"
        mid.pop("schema")
        inp2 = _write(tmp_path, "mid2.json", mid)
        rc = main(["rh-transform", "--from", "derham", "--to", "betti", "--in", inp2, "--out", str(tmp_path / "back.json")])
        assert rc == 0
        back = _read(tmp_path, "back.json")
        z = back["pieces"][0]["point"]["coords"]
        assert abs(z[0]["re"] - 2) < 1e-9 and abs(z[1]["re"] - 3) < 1e-9

    def test_wrong_chart_is_malformed(self, tmp_path):
        inp = _write(tmp_path, "in.json", _hilb_doc())
        rc = main(["rh-transform", "--from", "derham", "--to", "betti", "--in", inp, "--out", str(tmp_path / "out.json")])
        assert rc == 1

    def test_hodge_deform_tau(self, tmp_path):
        inp = _write(tmp_path, "in.json", _hilb_doc())
        main(["rh-transform", "--from", "betti", "--to", "derham", "--in", inp, "--out", str(tmp_path / "mid.json")])
        mid = _read(tmp_path, "mid.json")
        mid.pop("schema")
        inp2 = _write(tmp_path, "mid2.json", mid)
        rc = main(["hodge-deform", "--tau", "1/2", "--in", inp2, "--out", str(tmp_path / "out.json")])
        assert rc == 0
        out = _read(tmp_path, "out.json")
        assert out["space"]["kind"] == "hodge"
        assert out["space"]["tau"] == _sc("1/2")

    def test_hodge_tau_zero_is_domain_error(self, tmp_path):
        inp = _write(tmp_path, "in.json", _hilb_doc())
        main(["rh-transform", "--from", "betti", "--to", "derham", "--in", inp, "--out", str(tmp_path / "mid.json")])
        mid = _read(tmp_path, "mid.json")
        mid.pop("schema")
        inp2 = _write(tmp_path, "mid2.json", mid)
        rc = main(["hodge-deform", "--tau", "0", "--in", inp2, "--out", str(tmp_path / "out.json")])
        assert rc == 2
        assert _read(tmp_path, "out.json")["error"] == "TauZero"


class TestPlumbing:
    def test_unknown_flag_rejected(self, tmp_path):
        inp = _write(tmp_path, "in.json", _unstable_diag())
        assert main(["stability", "--in", inp, "--bogus"]) == 1

    def test_malformed_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{nope")
        assert main(["stability", "--in", str(p), "--out", str(tmp_path / "o.json")]) == 1

    def test_wrong_schema_tag(self, tmp_path):
        doc = _unstable_diag()
        doc["schema"] = "abelmod/999"
        inp = _write(tmp_path, "in.json", doc)
        assert main(["stability", "--in", inp, "--out", str(tmp_path / "o.json")]) == 1

    def test_batch_ordering_and_partial_failure(self, tmp_path):
        good = {"m": 1, "n": 1, "mode": "exact", "B": [[[_sc("5")]]], "v": [_sc("1")]}
        inp = _write(tmp_path, "in.json", [good, _unstable_diag(), good])
        rc = main(["canonicalize", "--in", inp, "--out", str(tmp_path / "out.json")])
        assert rc == 2
        out = _read(tmp_path, "out.json")
        kinds = ["error" in r and r["error"] or "ok" for r in out["results"]]
        assert kinds == ["ok", "NotStable", "ok"]

    def test_mode_coercion(self, tmp_path):
        inp = _write(tmp_path, "in.json", _stable_pair())
        rc = main(["spectrum", "--mode", "float", "--in", inp, "--out", str(tmp_path / "out.json")])
        assert rc == 0
        out = _read(tmp_path, "out.json")
        assert isinstance(out["support"][0]["point"][0]["re"], float)

    def test_float_to_exact_refused(self, tmp_path):
        doc = {"m": 1, "n": 1, "mode": "float", "B": [[[{"re": 0.5, "im": 0.0}]]], "v": [{"re": 1.0, "im": 0.0}]}
        inp = _write(tmp_path, "in.json", doc)
        assert main(["stability", "--mode", "exact", "--in", inp, "--out", str(tmp_path / "o.json")]) == 1

    def test_byte_determinism(self, tmp_path):
        inp = _write(tmp_path, "in.json", _stable_pair())
        main(["canonicalize", "--in", inp, "--out", str(tmp_path / "a.json")])
        main(["canonicalize", "--in", inp, "--out", str(tmp_path / "b.json")])
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
