from collections import Counter
from fractions import Fraction as F

import pytest

from sclgap.errors import SclError
from sclgap.forge import (EnumerationBudget, commutator_torus, enumerate_surfaces, from_pairing,
                          power_cover)
from sclgap.letterqm import LetterQM, stabilize
from sclgap.pipeline import (NONDEGENERATE, _check_gamma, assign_angles, audit, certify,
                             correct_boundary, extend_discs, extract_regions,
                             opposite_orientation_witness, subdivide_handles, theta, to_dot,
                             unzip)
from sclgap.surface import BaseComplex, Piece, TransverseSurface, boundary_words
from sclgap.words import free_reduce

SIGN = LetterQM.sign()


def one_handle(image):
    base = BaseComplex({"a": "a", "b": "b", "c": image})
    pieces = {"h0": Piece("h0", "handle", "c"), "v0": Piece("v0", "vertex_disc", None, 4)}
    return TransverseSurface(base, pieces, [("v0.1", "h0.s"), ("v0.3", "h0.t")], "c", 1)


def stages(s, g=None):
    stable = stabilize(SIGN, s.base.image(g or s.target))
    p1 = subdivide_handles(s, SIGN)
    p2 = extend_discs(p1)
    p3 = correct_boundary(p2, stable)
    p4 = unzip(p3)
    return stable, p1, p2, p3, p4


def cell_instances(edges, tris, g, handles, cells=2):
    base = BaseComplex(edges, tris)
    return [s for s in enumerate_surfaces(g, EnumerationBudget(max_handles=handles,
                                                               max_cell_discs=cells), base=base)
            if any(p.kind == "cell_disc" for p in s.pieces.values())]


def test_handle_stripes_follow_the_image():
    p = subdivide_handles(one_handle("aBABab"), SIGN)
    stripes = sorted(p.stripes(), key=lambda x: x.face)
    assert [x.kind for x in stripes] == list("ABABAB")
    assert [x.direction for x in stripes] == [1, -1, -1, -1, 1, 1]
    assert p.cells.euler_characteristic() == p.chi0


def test_single_letter_handle():
    p = subdivide_handles(one_handle("a"), SIGN)
    assert [(x.kind, x.direction) for x in p.stripes()] == [("A", 1)]


def test_empty_image_handle_is_absorbed():
    p = subdivide_handles(one_handle(""), SIGN)
    assert p.stripes() == []
    assert p.cells.faces["h0"].material == "D"


def test_degenerate_cell_fill():
    s = cell_instances({"a": "a", "b": "b", "c": "ab"}, {"T": "abC"}, "cAB", 4, 1)[0]
    p = extend_discs(subdivide_handles(s, SIGN))
    fills = [f for f in p.fills if f.host.startswith("c")]
    assert len(fills) == 1
    f = fills[0]
    assert f.kind == "DEGENERATE" and 0 in f.legs
    assert sorted(f.words) == sorted(["ab", "B", "A"])
    assert not [h for h in p.hexagons() if h.host == f.host]


def test_nondegenerate_cell_fill_has_one_hexagon():
    s = cell_instances({"a": "a", "b": "b", "c": "aa"}, {"T": "aaC"}, "cbAAB", 5, 1)[0]
    p = extend_discs(subdivide_handles(s, SIGN))
    f = [f for f in p.fills if f.host.startswith("c")][0]
    assert f.kind == NONDEGENERATE and f.legs == (0, 0, 0)
    hexes = [h for h in p.hexagons() if h.host == f.host]
    assert len(hexes) == 1
    h = hexes[0]
    assert h.kind == "A"
    assert sorted(h.x1 + h.x2 + h.x3) == sorted("aAA")
    assert len(free_reduce(h.x1 + h.x2 + h.x3)) == 1


def test_empty_cell_is_absorbed():
    s = cell_instances({"a": "a", "b": "b", "c": ""}, {"T": "ccC"}, "cabAB", 6)[0]
    p = extend_discs(subdivide_handles(s, SIGN))
    f = [f for f in p.fills if f.host.startswith("c")][0]
    assert f.kind == "EMPTY"
    assert any(x.kind == "absorbed_cell" for x in p.cells.faces.values())
    assert certify(s, SIGN).report.passed


def test_torus_boundary_correction():
    stable, p1, p2, p3, p4 = stages(commutator_torus())
    collars = [f for f in p3.fills if f.collar]
    assert collars and all(f.kind == "DEGENERATE" for f in collars)
    assert p3.index_sequences() == [(1, 1, 2, 2)]


def test_correction_hexagons_match_nondegenerate_merges():
    for s in enumerate_surfaces("aabAAB", EnumerationBudget(max_handles=4)):
        stable, p1, p2, p3, p4 = stages(s)
        merges = sum(1 for f in p3.fills if f.collar and f.kind == NONDEGENERATE)
        assert len(p3.hexagons()) - len(p2.hexagons()) == merges
        assert p3.cells.euler_characteristic() == p3.chi0


def test_correction_is_a_no_op_on_single_sections():
    # g = c with c -> [a,b]: the circuit already reads Φ(g)
    base = BaseComplex({"a": "a", "b": "b", "c": "abAB", "d": "ab", "e": "AB"},
                       {"T": "deC", "U": "abD", "V": "ABE"})
    s = next(iter(enumerate_surfaces("c", EnumerationBudget(max_handles=5, max_cell_discs=3),
                                     base=base)))
    stable, p1, p2, p3, p4 = stages(s)
    assert not [f for f in p3.fills if f.collar]
    assert len(p3.cells.faces) == len(p2.cells.faces)
    assert p3.index_sequences() == [(1, 1, 2, 2)]
    assert certify(s, SIGN).report.passed


def test_torus_folds_once_per_extra_letter():
    stable, p1, p2, p3, p4 = stages(commutator_torus())
    assert [f.host for f in p3.fills if f.collar] == ["k0.1", "k0.2", "k0.3"]


def test_unzip_steps_and_gamma():
    stable, p1, p2, p3, p4 = stages(commutator_torus())
    degenerate = sum(1 for f in p3.fills if f.kind == "DEGENERATE")
    assert p4.unzipped and p4.unzip_steps == degenerate == 3
    _check_gamma(p4.cells)
    assert p4.cells.euler_characteristic() == p4.chi0


def test_unzip_without_degenerate_discs_is_a_no_op():
    s = one_handle("a")
    p = extend_discs(subdivide_handles(s, SIGN))
    q = unzip(p)
    assert q.unzip_steps == 0
    assert len(q.cells.faces) == len(p.cells.faces)


def test_chain_of_degenerate_discs_terminates():
    for s in enumerate_surfaces("abABabAB", EnumerationBudget(max_handles=4)):
        stable, p1, p2, p3, p4 = stages(s)
        degenerate = sum(1 for f in p3.fills if f.kind == "DEGENERATE")
        assert p4.unzip_steps <= degenerate
        _check_gamma(p4.cells)


def test_regions_need_unzipped_pattern():
    stable, p1, p2, p3, p4 = stages(commutator_torus())
    with pytest.raises(SclError):
        extract_regions(p3)


def test_torus_regions():
    r = certify(commutator_torus(), SIGN).regions
    assert r.census() == {"D": 1, "A": 1, "B": 1}
    shape = sorted((R.role, R.chi, len(R.boundary_arcs)) for R in r.regions.values())
    assert shape == [("A", 1, 2), ("B", 1, 2), ("D", 1, 0)]
    assert all(not arc.loop for arc in r.arcs)


def test_theta_rule():
    assert theta(2, 1) == 2
    assert theta(1, 2) == 0
    assert theta(2, 2) == 2


def test_torus_audit():
    rep = certify(commutator_torus(), SIGN).report
    assert rep.passed
    assert rep.total == -2 and rep.n == 1 and rep.chi == -1
    assert rep.index_sequences == [(1, 1, 2, 2)]
    assert rep.scl_lower_bound == F(1, 2) and rep.ratio == F(1, 2)
    assert rep.index_one_a_arcs == 1
    for a, b in rep.vertex_discs.values():
        assert a == b


def test_degree_two_circuit():
    s = [s for s in enumerate_surfaces("abAB", EnumerationBudget(max_handles=4))
         if boundary_words(s) == ["abABabAB"]][0]
    rep = certify(s, SIGN).report
    assert rep.n == 2 and rep.total <= -4
    assert rep.index_sequences == [(1, 1, 2, 2, 1, 1, 2, 2)]


def test_covers():
    for k in (2, 3):
        rep = certify(power_cover(commutator_torus(), k), SIGN).report
        assert rep.total == -2 * k and rep.n == k


def test_torus_witness():
    r = certify(commutator_torus(), SIGN).regions
    for R in r.regions.values():
        if R.role == "D":
            with pytest.raises(SclError) as e:
                opposite_orientation_witness(R)
            assert e.value.code == "WITNESS_NOT_FOUND"
            continue
        x, y = opposite_orientation_witness(R)
        assert x.letter.islower() != y.letter.islower()
        assert x.mate is None and y.mate is None


def test_witness_needs_two_arcs():
    r = certify(commutator_torus(), SIGN).regions
    R = next(R for R in r.regions.values() if R.role == "A")
    R.boundary_arcs = R.boundary_arcs[:1]
    with pytest.raises(SclError) as e:
        opposite_orientation_witness(R)
    assert e.value.code == "WITNESS_NOT_FOUND"


def test_witness_through_hexagons():
    found = 0
    for s in enumerate_surfaces("aabAAB", EnumerationBudget(max_handles=4)):
        cert = certify(s, SIGN)
        r = cert.regions
        for R in r.regions.values():
            if R.role == "D" or len(R.boundary_arcs) < 2:
                continue
            if any(r.cells.faces[f].kind == "hexagon" for f in R.faces):
                x, y = opposite_orientation_witness(R)
                assert x.letter.islower() != y.letter.islower()
                found += 1
    assert found


def test_role_swap_gives_same_report():
    swapped = from_pairing(["baBA"], {(0, 0): (0, 2), (0, 2): (0, 0),
                                      (0, 1): (0, 3), (0, 3): (0, 1)}, "baBA")
    r1 = certify(commutator_torus(), SIGN)
    r2 = certify(swapped, SIGN)
    assert r2.stable.swapped and not r1.stable.swapped
    a, b = r1.report, r2.report
    assert (a.total, a.n, a.chi, a.claim3_total, a.index_sequences, a.verdicts) == \
        (b.total, b.n, b.chi, b.claim3_total, b.index_sequences, b.verdicts)
    assert sorted(a.regions.values()) == sorted(b.regions.values())


def test_every_angle_corruption_is_caught():
    cert = certify(commutator_torus(), SIGN)
    X, r = cert.angles, cert.regions
    for key, val in list(X.angles.items()):
        v = X.corner_vertex(*key)
        rid = r.face_region[key[0]]
        for delta in (F(1, 2), F(-2)):
            X.angles[key] = val + delta
            with pytest.raises(SclError) as e:
                audit(r, X, 1, strict=True, chi_surface=-1)
            assert e.value.code == "CLAIM_VIOLATION"
            rep = audit(r, X, 1, strict=False, chi_surface=-1)
            loci = [f[1] for f in rep.failures]
            assert (v, rid) in loci or v in loci or rid in loci
        X.angles[key] = val
    assert audit(r, X, 1, strict=True, chi_surface=-1).passed


def test_index_corruption_is_caught():
    cert = certify(commutator_torus(), SIGN)
    for i in range(4):
        p = cert.pattern.copy()
        arc = p.boundary_arcs()[i]
        arc.index = 3 - arc.index
        r = extract_regions(p)
        X = assign_angles(r, cert.stable)
        with pytest.raises(SclError) as e:
            audit(r, X, 1, strict=True, chi_surface=-1)
        assert e.value.code == "CLAIM_VIOLATION"
        rep = audit(r, X, 1, strict=False, chi_surface=-1)
        assert ("index_pattern", "circuit 0") in [f[:2] for f in rep.failures]


def test_gluing_corruption_is_caught():
    s = commutator_torus()
    for i, (a, b) in enumerate(s.glue):
        glue = list(s.glue)
        del glue[i]
        with pytest.raises(SclError) as e:
            certify(TransverseSurface(s.base, s.pieces, glue, s.target, 1), SIGN)
        assert e.value.code == "MALFORMED_GLUING"
        assert e.value.locus in (a, b)


def test_pipeline_on_other_words():
    seen = Counter()
    for g in ("aabAAB", "aaabAAAB", "abbaBBAA"):
        for s in enumerate_surfaces(g, EnumerationBudget(max_handles=5)):
            cert = certify(s, SIGN)
            rep = cert.report
            assert rep.passed
            assert rep.total == 2 * rep.chi <= -2 * rep.n
            assert rep.index_one_a_arcs == rep.n
            for k in rep.transition_vertices.values():
                assert k in (0, -2)
            # stripes of one handle alternate kinds
            by_host = {}
            for x in cert.pattern.stripes():
                if x.host.startswith("h"):
                    by_host.setdefault(x.host, []).append(x)
            for xs in by_host.values():
                kinds = [x.kind for x in sorted(xs, key=lambda x: int(x.face.split("/")[1]))]
                assert all(u != v for u, v in zip(kinds, kinds[1:]))
            seen[g] += 1
    assert all(seen[g] for g in ("aabAAB", "aaabAAAB", "abbaBBAA"))


def test_pipeline_over_triangle_bases():
    cases = [({"a": "a", "b": "b", "c": "ab"}, {"T": "abC"}, "cAB", 5),
             ({"a": "a", "b": "b", "c": "aa"}, {"T": "aaC"}, "cbAAB", 5),
             ({"a": "a", "b": "b", "c": ""}, {"T": "acA"}, "abAB", 5)]
    for edges, tris, g, h in cases:
        got = cell_instances(edges, tris, g, h)
        assert got
        for s in got:
            rep = certify(s, SIGN).report
            assert rep.passed and rep.total <= -2 * rep.n


def test_dot_output():
    text = to_dot(certify(commutator_torus(), SIGN).regions)
    assert text.startswith("graph stripes {") and text.rstrip().endswith("}")
    assert "lightcoral" in text and "lightblue" in text
