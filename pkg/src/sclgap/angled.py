"""Combinatorial 2-complexes carrying exact angles at corners.

Angles and curvatures are :class:`fractions.Fraction` values in units of
π, so ``Fraction(1, 2)`` is a right angle and Gauss-Bonnet reads
``total_curvature(X) == 2 * euler_characteristic(X)``.

Corner ``k`` of a face sits at the start vertex of its ``k``-th signed edge,
between the incoming edge ``k-1`` and the outgoing edge ``k``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

from .errors import SclError


def pi_text(x):
    """Format a multiple of π exactly: ``-2π``, ``π/2``, ``0``."""
    x = Fraction(x)
    if x == 0:
        return "0"
    sign = "-" if x < 0 else ""
    x = abs(x)
    num = "" if x.numerator == 1 else str(x.numerator)
    if x.denominator == 1:
        return "%s%sπ" % (sign, num)
    return "%s%sπ/%d" % (sign, num, x.denominator)


class AngledComplex:
    def __init__(self, vertices, edges, faces, angles=None):
        """``edges`` maps id -> (tail, head); ``faces`` maps id -> list of
        (edge, +1/-1); ``angles`` maps (face, corner) -> Fraction."""
        self.vertices = list(vertices)
        self.edges = dict(edges)
        self.faces = {f: list(cyc) for f, cyc in faces.items()}
        self.angles = {}
        self._check()
        for key, val in (angles or {}).items():
            self.set_angle(key[0], key[1], val)

    def _end(self, e, sign, head):
        t, h = self.edges[e]
        if sign > 0:
            return h if head else t
        return t if head else h

    def _check(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise SclError("MALFORMED_COMPLEX", "duplicate vertex")
        for e, (t, h) in self.edges.items():
            if t not in vs or h not in vs:
                raise SclError("MALFORMED_COMPLEX", "edge endpoint unknown", locus=e)
        for f, cyc in self.faces.items():
            if not cyc:
                raise SclError("MALFORMED_COMPLEX", "empty face", locus=f)
            for e, s in cyc:
                if e not in self.edges or s not in (1, -1):
                    raise SclError("MALFORMED_COMPLEX", "bad edge %r" % (e,), locus=f)
            for k in range(len(cyc)):
                e1, s1 = cyc[k - 1]
                e2, s2 = cyc[k]
                if self._end(e1, s1, True) != self._end(e2, s2, False):
                    raise SclError("MALFORMED_COMPLEX",
                                   "boundary is not a closed edge path",
                                   locus="%s corner %d" % (f, k))

    # corners ---------------------------------------------------------------

    def corner_vertex(self, f, k):
        e, s = self.faces[f][k]
        return self._end(e, s, False)

    def corners(self):
        for f, cyc in self.faces.items():
            for k in range(len(cyc)):
                yield f, k

    def set_angle(self, f, k, value):
        if f not in self.faces or not 0 <= k < len(self.faces[f]):
            raise SclError("MALFORMED_COMPLEX", "no such corner", locus=(f, k))
        self.angles[(f, k)] = Fraction(value)

    def angle(self, f, k):
        return self.angles.get((f, k), Fraction(0))

    def corners_at(self):
        at = defaultdict(list)
        for f, k in self.corners():
            at[self.corner_vertex(f, k)].append((f, k))
        return at

    # links ---------------------------------------------------------------------

    def half_edges(self, v):
        out = []
        for e, (t, h) in self.edges.items():
            if t == v:
                out.append((e, 0))
            if h == v:
                out.append((e, 1))
        return out

    def link(self, v):
        """Link graph at v: (vertices, edges) with vertices the half-edges at v
        and one edge per corner at v."""
        if v not in set(self.vertices):
            raise SclError("UNKNOWN_VERTEX", locus=v)
        nodes = self.half_edges(v)
        arcs = []
        for f, cyc in self.faces.items():
            for k in range(len(cyc)):
                if self.corner_vertex(f, k) != v:
                    continue
                ein, sin = cyc[k - 1]
                eout, sout = cyc[k]
                arcs.append(((ein, 1 if sin > 0 else 0),
                             (eout, 0 if sout > 0 else 1), (f, k)))
        return nodes, arcs

    def link_euler(self, v):
        nodes, arcs = self.link(v)
        return len(nodes) - len(arcs)

    # curvature -----------------------------------------------------------------

    def euler_characteristic(self):
        return len(self.vertices) - len(self.edges) + len(self.faces)


def face_curvature(X, f):
    if f not in X.faces:
        raise SclError("UNKNOWN_FACE", locus=f)
    n = len(X.faces[f])
    return 2 + sum((X.angle(f, k) - 1 for k in range(n)), Fraction(0))


def vertex_curvature(X, v, _corners=None):
    if v not in set(X.vertices):
        raise SclError("UNKNOWN_VERTEX", locus=v)
    at = _corners if _corners is not None else X.corners_at()
    total = sum((X.angle(f, k) for f, k in at.get(v, ())), Fraction(0))
    return 2 - X.link_euler(v) - total


def total_curvature(X):
    at = X.corners_at()
    out = sum((face_curvature(X, f) for f in X.faces), Fraction(0))
    out += _vertex_sum(X, at)
    return out


def _vertex_sum(X, at):
    # link Euler characteristics in one pass over edges and corners
    half = defaultdict(int)
    for t, h in X.edges.values():
        half[t] += 1
        half[h] += 1
    out = Fraction(0)
    for v in X.vertices:
        cs = at.get(v, ())
        chi = half[v] - len(cs)
        out += 2 - chi - sum((X.angle(f, k) for f, k in cs), Fraction(0))
    return out


def check_gauss_bonnet(X):
    X._check()
    return total_curvature(X) == 2 * X.euler_characteristic()


# subsurfaces -------------------------------------------------------------------

@dataclass(frozen=True)
class SubsurfaceSpec:
    faces: frozenset
    vertices: frozenset
    chi: int


def closure_counts(X, faces):
    """(V, E, F) of the closed subcomplex spanned by ``faces``."""
    vs, es = set(), set()
    for f in faces:
        for k, (e, s) in enumerate(X.faces[f]):
            es.add(e)
            vs.add(X.corner_vertex(f, k))
    return len(vs), len(es), len(faces)


def subsurface(X, faces):
    """Spec for the subsurface spanned by ``faces`` with χ counted from cells."""
    faces = frozenset(faces)
    for f in faces:
        if f not in X.faces:
            raise SclError("UNKNOWN_FACE", locus=f)
    V, E, F = closure_counts(X, faces)
    verts = frozenset(X.corner_vertex(f, k) for f in faces
                      for k in range(len(X.faces[f])))
    return SubsurfaceSpec(faces, verts, V - E + F)


def boundary_vertices(X, faces):
    """Vertices of the faces lying on the frontier of their union."""
    faces = set(faces)
    uses = defaultdict(int)
    for f in faces:
        for e, _ in X.faces[f]:
            uses[e] += 1
    outside = defaultdict(int)
    for f, cyc in X.faces.items():
        if f in faces:
            continue
        for e, _ in cyc:
            outside[e] += 1
    out = set()
    for e, n in uses.items():
        # an edge used once by the subsurface is a frontier edge
        if n == 1:
            out.update(X.edges[e])
    # vertices met only through corners (no frontier edge) but with corners
    # outside the subsurface are pinch points, also on the frontier
    at = X.corners_at()
    for f in faces:
        for k in range(len(X.faces[f])):
            v = X.corner_vertex(f, k)
            if any(g not in faces for g, _ in at[v]):
                out.add(v)
    return out


def interior_curvature(X, spec):
    for f in spec.faces:
        if f not in X.faces:
            raise SclError("INVALID_SUBSURFACE", "unknown face", locus=f)
    verts = {X.corner_vertex(f, k) for f in spec.faces
             for k in range(len(X.faces[f]))}
    if set(spec.vertices) != verts:
        raise SclError("INVALID_SUBSURFACE",
                       "vertex set differs from the vertices of the faces")
    bnd = boundary_vertices(X, spec.faces)
    for v in sorted(verts - bnd, key=str):
        raise SclError("INVALID_SUBSURFACE", "vertex not on the subsurface boundary",
                       locus=v)
    total = {v: Fraction(0) for v in verts}
    for f in spec.faces:
        for k in range(len(X.faces[f])):
            total[X.corner_vertex(f, k)] += X.angle(f, k)
    return 2 * spec.chi + sum((t - 1 for t in total.values()), Fraction(0))


# text format ---------------------------------------------------------------

def parse_complex(text):
    """Read the sectioned text format.

    ::

        vertices: v0 v1
        edges:
          e0 v0 v1
        faces:
          f0 e0 -e1 e2
        angles:
          f0 0 1/2
    """
    section = None
    vertices, edges, faces, angles = [], {}, {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, rest = line.partition(":")
        if sep and head.strip() in ("vertices", "edges", "faces", "angles"):
            section = head.strip()
            line = rest.strip()
            if not line:
                continue
        parts = line.split()
        try:
            if section == "vertices":
                vertices += parts
            elif section == "edges":
                e, t, h = parts
                edges[e] = (t, h)
            elif section == "faces":
                cyc = []
                for tok in parts[1:]:
                    if tok.startswith("-"):
                        cyc.append((tok[1:], -1))
                    else:
                        cyc.append((tok.lstrip("+"), 1))
                faces[parts[0]] = cyc
            elif section == "angles":
                f, k, val = parts
                angles[(f, int(k))] = Fraction(val)
            else:
                raise ValueError("line outside a section")
        except ValueError as e:
            raise SclError("PARSE_ERROR", str(e), locus="line %d" % lineno)
    return AngledComplex(vertices, edges, faces, angles)


def format_complex(X):
    lines = ["vertices: " + " ".join(str(v) for v in X.vertices), "edges:"]
    for e, (t, h) in X.edges.items():
        lines.append("  %s %s %s" % (e, t, h))
    lines.append("faces:")
    for f, cyc in X.faces.items():
        lines.append("  %s %s" % (f, " ".join(
            ("" if s > 0 else "-") + str(e) for e, s in cyc)))
    lines.append("angles:")
    for (f, k), val in sorted(X.angles.items(), key=lambda kv: (str(kv[0][0]), kv[0][1])):
        if val:
            lines.append("  %s %d %s" % (f, k, val))
    return "\n".join(lines) + "\n"
