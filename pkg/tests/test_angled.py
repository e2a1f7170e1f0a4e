from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from sclgap.angled import (AngledComplex, boundary_vertices, check_gauss_bonnet, face_curvature,
                           format_complex, interior_curvature, parse_complex, pi_text,
                           subsurface, total_curvature, vertex_curvature)
from sclgap.errors import SclError

import oracles


def polygon(n, angle):
    vs = ["v%d" % i for i in range(n)]
    edges = {"e%d" % i: (vs[i], vs[(i + 1) % n]) for i in range(n)}
    X = AngledComplex(vs, edges, {"f": [("e%d" % i, 1) for i in range(n)]})
    for k in range(n):
        X.set_angle("f", k, angle)
    return X


def torus(angle):
    X = AngledComplex(["p"], {"x": ("p", "p"), "y": ("p", "p")},
                      {"f": [("x", 1), ("y", 1), ("x", -1), ("y", -1)]})
    for k in range(4):
        X.set_angle("f", k, angle)
    return X


def grid(w, h):
    """w x h unit squares, all corners π/2."""
    vs = ["%d,%d" % (i, j) for i in range(w + 1) for j in range(h + 1)]
    edges, faces = {}, {}
    for i in range(w + 1):
        for j in range(h + 1):
            if i < w:
                edges["h%d,%d" % (i, j)] = ("%d,%d" % (i, j), "%d,%d" % (i + 1, j))
            if j < h:
                edges["v%d,%d" % (i, j)] = ("%d,%d" % (i, j), "%d,%d" % (i, j + 1))
    for i in range(w):
        for j in range(h):
            faces["s%d,%d" % (i, j)] = [("h%d,%d" % (i, j), 1), ("v%d,%d" % (i + 1, j), 1),
                                       ("h%d,%d" % (i, j + 1), -1), ("v%d,%d" % (i, j), -1)]
    X = AngledComplex(vs, edges, faces)
    for f, k in list(X.corners()):
        X.set_angle(f, k, F(1, 2))
    return X


def test_pi_text():
    assert pi_text(F(-2)) == "-2π"
    assert pi_text(F(1, 2)) == "π/2"
    assert pi_text(0) == "0"
    assert pi_text(F(-3, 2)) == "-3π/2"


def test_face_curvature_examples():
    assert face_curvature(polygon(3, F(1, 3)), "f") == 0
    assert face_curvature(polygon(4, F(1, 2)), "f") == 0
    assert face_curvature(polygon(1, 0), "f") == 1


def test_vertex_curvature_examples():
    X = polygon(3, F(1, 3))
    X.set_angle("f", 0, 1)
    assert vertex_curvature(X, "v0") == 0
    assert vertex_curvature(torus(F(1, 2)), "p") == 0
    assert vertex_curvature(torus(F(3, 4)), "p") == -1


def test_total_curvature_examples():
    assert total_curvature(polygon(3, F(1, 3))) == 2
    assert total_curvature(torus(F(1, 2))) == 0
    assert total_curvature(AngledComplex([], {}, {})) == 0
    assert check_gauss_bonnet(polygon(3, F(1, 3)))
    assert check_gauss_bonnet(torus(F(1, 2)))


def test_link_of_torus_vertex_is_a_circle():
    nodes, arcs = torus(0).link("p")
    assert len(nodes) == 4 and len(arcs) == 4


def test_malformed_complexes():
    with pytest.raises(SclError) as e:
        AngledComplex(["p", "q"], {"x": ("p", "q")}, {"f": [("x", 1)]})
    assert e.value.code == "MALFORMED_COMPLEX"
    with pytest.raises(SclError):
        AngledComplex(["p"], {"x": ("p", "z")}, {})
    with pytest.raises(SclError) as e:
        face_curvature(torus(0), "nope")
    assert e.value.code == "UNKNOWN_FACE"
    with pytest.raises(SclError) as e:
        vertex_curvature(torus(0), "nope")
    assert e.value.code == "UNKNOWN_VERTEX"


def test_interior_curvature_single_face():
    X = polygon(5, F(2, 3))
    assert interior_curvature(X, subsurface(X, ["f"])) == face_curvature(X, "f")


def test_interior_curvature_annulus():
    X = AngledComplex(["p", "q"], {"a": ("p", "p"), "b": ("q", "q"), "s": ("p", "q")},
                      {"f": [("a", 1), ("s", 1), ("b", -1), ("s", -1)]})
    for k in range(4):
        X.set_angle("f", k, F(1, 2))
    spec = subsurface(X, ["f"])
    assert spec.chi == 0
    assert boundary_vertices(X, ["f"]) == {"p", "q"}
    assert interior_curvature(X, spec) == 0


def test_interior_curvature_subdivided_square():
    X = grid(2, 1)
    X.set_angle("s0,0", 1, F(1, 3))
    X.set_angle("s1,0", 3, F(5, 4))
    spec = subsurface(X, X.faces)
    assert interior_curvature(X, spec) == sum(face_curvature(X, f) for f in X.faces)


def test_interior_vertex_is_rejected():
    X = grid(2, 2)
    with pytest.raises(SclError) as e:
        interior_curvature(X, subsurface(X, X.faces))
    assert e.value.code == "INVALID_SUBSURFACE"
    assert e.value.locus == "1,1"


def test_text_round_trip():
    X = grid(2, 1)
    X.set_angle("s0,0", 0, F(-7, 3))
    Y = parse_complex(format_complex(X))
    assert Y.faces == X.faces and Y.edges == X.edges
    assert {k: v for k, v in Y.angles.items() if v} == {k: v for k, v in X.angles.items() if v}


def test_parse_errors():
    with pytest.raises(SclError) as e:
        parse_complex("edges:\n  e0 v0\n")
    assert e.value.code == "PARSE_ERROR"
    with pytest.raises(SclError):
        parse_complex("e0 v0 v1\n")


def _build(seed):
    verts, edges, faces, angles, chi = oracles.random_complex(oracles.seeded(seed))
    return AngledComplex(verts, edges, faces, angles), chi


@settings(max_examples=300)
@given(st.integers(0, 10 ** 9))
def test_gauss_bonnet_random(seed):
    X, chi = _build(seed)
    assert total_curvature(X) == 2 * chi
    # link-graph route to vertex curvature agrees with the fast sum
    kv = sum((vertex_curvature(X, v) for v in X.vertices), F(0))
    assert kv + sum((face_curvature(X, f) for f in X.faces), F(0)) == 2 * chi


@given(st.integers(0, 10 ** 9), st.fractions(min_value=-3, max_value=3))
def test_gauss_bonnet_after_scaling(seed, t):
    X, chi = _build(seed)
    for key in list(X.angles):
        X.angles[key] *= t
    assert check_gauss_bonnet(X)


@given(st.integers(0, 10 ** 9))
def test_single_face_pieces_decompose_total(seed):
    X, chi = _build(seed)
    parts = F(0)
    for f in X.faces:
        spec = subsurface(X, [f])
        try:
            k = interior_curvature(X, spec)
        except SclError:
            k = None
        # only an embedded polygon is a disc subsurface
        embedded = len(spec.vertices) == len(X.faces[f]) == len({e for e, _ in X.faces[f]})
        if k is not None and embedded:
            assert spec.chi == 1
            assert k == face_curvature(X, f)
        parts += face_curvature(X, f)
    assert parts + sum((vertex_curvature(X, v) for v in X.vertices), F(0)) == total_curvature(X)


@given(st.integers(1, 5), st.booleans(), st.integers(0, 10 ** 9))
def test_strip_interior_curvature_is_face_sum(n, tall, seed):
    # a 1 x n strip has every vertex on its boundary
    rng = oracles.seeded(seed)
    X = grid(1, n) if tall else grid(n, 1)
    for f, k in list(X.corners()):
        X.set_angle(f, k, F(rng.randint(-4, 8), rng.randint(1, 4)))
    spec = subsurface(X, X.faces)
    assert interior_curvature(X, spec) == sum((face_curvature(X, f) for f in X.faces), F(0))
