"""Transverse admissible surfaces over a one-vertex triangular 2-complex.

A surface is assembled from three kinds of pieces, each an oriented polygon
with named ports listed counter-clockwise:

* ``vertex_disc v k``: ports ``v.0`` .. ``v.{k-1}``
* ``handle h x``: over the signed base edge ``x``; ports ``h.L h.t h.R h.s``.
  ``L`` reads ``x`` along the handle orientation, ``R`` reads ``x⁻¹``,
  ``t``/``s`` are the ends at the head/tail of the edge.
* ``cell_disc c T``: over base triangle ``T``; ports
  ``c.s0 c.k0 c.s1 c.k1 c.s2 c.k2`` (sides ``s``, corners ``k``).

Handle ends and cell corners attach to vertex-disc ports, handle long sides
to cell sides.  Unglued vertex-disc ports and handle long sides form ∂Σ.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .cells import PolyComplex, Side
from .errors import SclError
from .words import free_reduce, inv

HANDLE_PORTS = ("L", "t", "R", "s")
CELL_PORTS = ("s0", "k0", "s1", "k1", "s2", "k2")


@dataclass
class BaseComplex:
    """One vertex, loop edges named by single lowercase letters.

    ``edges`` maps each edge to its image in F(a,b); ``triangles`` maps a
    name to a three-letter boundary word over the edges.
    """
    edges: dict
    triangles: dict = field(default_factory=dict)

    def __post_init__(self):
        for e, img in self.edges.items():
            if len(e) != 1 or not e.islower():
                raise SclError("PARSE_ERROR", "edge names are single lowercase letters",
                               locus=e)
            if any(ch.lower() not in "ab" for ch in img):
                raise SclError("PARSE_ERROR", "edge image must be a word in a, b",
                               locus=e)
            self.edges[e] = free_reduce(img)
        for t, word in self.triangles.items():
            if len(word) != 3 or any(ch.lower() not in self.edges for ch in word):
                raise SclError("PARSE_ERROR", "triangle needs three base edges",
                               locus=t)
            if self.image(word) != "":
                raise SclError("PARSE_ERROR",
                               "triangle relation does not hold in F(a,b)", locus=t)

    @property
    def alphabet(self):
        return "".join(sorted(self.edges))

    def image(self, word):
        """Image in F(a,b) of a word over the edges."""
        out = []
        for ch in word:
            img = self.edges[ch.lower()]
            out.append(img if ch.islower() else inv(img))
        return free_reduce("".join(out))

    @classmethod
    def wedge(cls):
        return cls({"a": "a", "b": "b"})


@dataclass
class Piece:
    name: str
    kind: str
    label: Optional[str] = None
    nports: int = 0

    def ports(self):
        if self.kind == "handle":
            return ["%s.%s" % (self.name, p) for p in HANDLE_PORTS]
        if self.kind == "cell_disc":
            return ["%s.%s" % (self.name, p) for p in CELL_PORTS]
        return ["%s.%d" % (self.name, i) for i in range(self.nports)]


@dataclass
class TransverseSurface:
    base: BaseComplex
    pieces: dict
    glue: list
    target: str
    n: int

    def piece_of(self, port):
        name, _, _ = port.rpartition(".")
        if name not in self.pieces or port not in self.pieces[name].ports():
            raise SclError("MALFORMED_GLUING", "unknown port", locus=port)
        return self.pieces[name]

    def handles(self):
        return [p for p in self.pieces.values() if p.kind == "handle"]


def port_role(piece, port):
    tail = port.rpartition(".")[2]
    if piece.kind == "vertex_disc":
        return "disc"
    if piece.kind == "handle":
        return "end" if tail in ("s", "t") else "long"
    return "corner" if tail.startswith("k") else "side"


COMPATIBLE = {frozenset(("end", "disc")), frozenset(("long", "side")),
              frozenset(("corner", "disc"))}


def build_cells(s):
    """The piece cellulation as a PolyComplex; side tags are port names."""
    pc = PolyComplex()
    sides = {}
    for piece in s.pieces.values():
        lst = []
        for port in piece.ports():
            side = Side("port", tag=port)
            sides[port] = side
            lst.append(side)
        if not lst:
            raise SclError("MALFORMED_GLUING", "piece without ports", locus=piece.name)
        pc.new_face("D" if piece.kind == "vertex_disc" else None, piece.kind, lst,
                    info={"piece": piece.name, "label": piece.label}, fid=piece.name)
    used = set()
    for a, b in s.glue:
        pa, pb = s.piece_of(a), s.piece_of(b)
        for p in (a, b):
            if p in used:
                raise SclError("MALFORMED_GLUING", "port glued twice", locus=p)
            used.add(p)
        if a == b:
            raise SclError("MALFORMED_GLUING", "port glued to itself", locus=a)
        roles = frozenset((port_role(pa, a), port_role(pb, b)))
        if roles not in COMPATIBLE:
            raise SclError("MALFORMED_GLUING", "incompatible ports",
                           locus="%s~%s" % (a, b))
        pc.glue(sides[a], sides[b])
    for port, side in sides.items():
        if side.mate is None:
            role = port_role(s.piece_of(port), port)
            if role not in ("disc", "long"):
                raise SclError("MALFORMED_GLUING", "%s port left free" % role,
                               locus=port)
    return pc


def side_word(s, port):
    """Base word read along a handle long side in its own orientation."""
    piece = s.piece_of(port)
    x = piece.label
    return x if port.endswith(".L") else inv(x)


def cell_side_words(s, cell):
    """Words read along the three sides of a cell disc (disc orientation)."""
    lookup = {}
    for a, b in s.glue:
        lookup[a] = b
        lookup[b] = a
    out = []
    for k in ("s0", "s1", "s2"):
        other = lookup["%s.%s" % (cell.name, k)]
        out.append(inv(side_word(s, other)))
    return out


def euler_characteristic(s):
    pc = build_cells(s)
    comps = pc.components()
    return pc.euler_characteristic(), [pc.component_chi(c) for c in comps]


def _rotation_offset(word, g):
    """Offset r such that word[r:] + word[:r] == g^k, or None."""
    if not g or len(word) % len(g):
        return None
    target = g * (len(word) // len(g))
    for r in range(len(g)):
        if word[r:] + word[:r] == target:
            return r
    return None


def circuits(s, pc=None):
    """Boundary circuits as (free sides, handle sides, word)."""
    pc = pc or build_cells(s)
    out = []
    for cyc in pc.boundary_cycles():
        hs = [x for x in cyc if x.face.kind == "handle"]
        out.append((cyc, hs, "".join(side_word(s, x.tag) for x in hs)))
    return out


def boundary_words(s, base=None):
    return [w for _, _, w in circuits(s)]


@dataclass
class SurfaceCheckReport:
    verdicts: dict
    messages: list
    chi: int
    chi_minus: int
    components: list
    n: int
    degrees: list
    incompressible: str = "asserted-by-input"

    @property
    def passed(self):
        return all(self.verdicts.values())


def validate(s, base=None, g=None):
    base = base or s.base
    g = s.target if g is None else str(g)
    g = "" if g == "1" else g
    msgs = []
    verdicts = {}
    pc = build_cells(s)

    ok = True
    for piece in s.pieces.values():
        if piece.kind == "handle":
            if len(piece.label or "") != 1 or piece.label.lower() not in base.edges:
                ok = False
                msgs.append("handle %s: label %r is not a base edge" % (piece.name, piece.label))
        elif piece.kind == "cell_disc":
            tri = base.triangles.get(piece.label)
            if tri is None:
                ok = False
                msgs.append("cell disc %s: unknown triangle %r" % (piece.name, piece.label))
                continue
            got = "".join(cell_side_words(s, piece))
            rots = {w[i:] + w[:i] for w in (tri, inv(tri)) for i in range(3)}
            if got not in rots:
                ok = False
                msgs.append("cell disc %s: sides read %s, triangle is %s"
                            % (piece.name, got, tri))
        elif piece.nports < 1:
            ok = False
            msgs.append("vertex disc %s has no ports" % piece.name)
    verdicts["labels"] = ok

    gword = free_reduce(g)
    if not gword or gword != g or len(g) > 1 and g[0] == inv(g[-1]):
        verdicts["target"] = False
        msgs.append("target %r must be a nonempty cyclically reduced word" % (g or "1"))
    else:
        verdicts["target"] = all(ch.lower() in base.edges for ch in g)
        if not verdicts["target"]:
            msgs.append("target uses letters outside the base edges")

    structure = True
    monotone = True
    degrees = []
    circs = circuits(s, pc)
    for idx, (cyc, hs, word) in enumerate(circs):
        kinds = [x.face.kind for x in cyc]
        for i, k in enumerate(kinds):
            if k == "handle" and kinds[(i + 1) % len(kinds)] == "handle":
                structure = False
                msgs.append("circuit %d: two handle sides meet on the boundary" % idx)
                break
        r = _rotation_offset(word, g) if verdicts["target"] else None
        if r is None or not word:
            monotone = False
            msgs.append("circuit %d reads %s, not a positive power of %s"
                        % (idx, word or "1", g or "1"))
            degrees.append(0)
        else:
            degrees.append(len(word) // len(g))
    verdicts["boundary_structure"] = structure
    verdicts["monotone"] = monotone
    n = sum(degrees)
    verdicts["degree"] = n == s.n and n >= 1
    if not verdicts["degree"]:
        msgs.append("boundary degree %d, declared n=%d" % (n, s.n))

    comps = []
    free_ok = True
    for c in pc.components():
        chi = pc.component_chi(c)
        has_bnd = any(s_.mate is None for fid in c for s_ in pc.faces[fid].sides)
        comps.append({"faces": len(c), "chi": chi, "boundary": has_bnd})
        if chi >= 1:
            free_ok = False
            msgs.append("component containing %s has χ=%d (disc or sphere)" % (c[0], chi))
        elif not has_bnd:
            free_ok = False
            msgs.append("component containing %s is closed" % c[0])
    verdicts["disc_sphere_free"] = free_ok
    chi = pc.euler_characteristic()
    chi_minus = sum(min(0, c["chi"]) for c in comps)
    return SurfaceCheckReport(verdicts, msgs, chi, chi_minus, comps, n, degrees)


# text format -------------------------------------------------------------------

def parse_surface(text):
    section = None
    edges, tris = {}, {}
    pieces = {}
    glue = []
    target = None
    n = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        loc = "line %d" % lineno
        head, sep, rest = line.partition(":")
        key = head.strip()
        if sep and key in ("base", "pieces", "glue"):
            section = key
            if rest.strip():
                raise SclError("PARSE_ERROR", "content after section header", locus=loc)
            continue
        if sep and key == "target":
            parts = rest.split()
            try:
                target = parts[0]
                n = int(parts[1].split("=", 1)[1]) if len(parts) > 1 else None
                if len(parts) > 1 and not parts[1].startswith("n="):
                    raise ValueError
            except (IndexError, ValueError):
                raise SclError("PARSE_ERROR", "expected 'target: <word> n=<int>'", locus=loc)
            continue
        parts = line.split()
        if section == "base":
            if parts[0] == "edge" and len(parts) in (2, 3):
                edges[parts[1]] = parts[2] if len(parts) == 3 else parts[1]
            elif parts[0] == "tri" and len(parts) == 3:
                tris[parts[1]] = parts[2]
            else:
                raise SclError("PARSE_ERROR", "bad base line", locus=loc)
        elif section == "pieces":
            if len(parts) != 3 or parts[0] not in ("vertex_disc", "handle", "cell_disc"):
                raise SclError("PARSE_ERROR", "bad piece line", locus=loc)
            kind, name, arg = parts
            if name in pieces or "." in name:
                raise SclError("PARSE_ERROR", "bad or duplicate piece name", locus=loc)
            if kind == "vertex_disc":
                try:
                    pieces[name] = Piece(name, kind, None, int(arg))
                except ValueError:
                    raise SclError("PARSE_ERROR", "port count must be an integer", locus=loc)
            else:
                pieces[name] = Piece(name, kind, arg)
        elif section == "glue":
            if len(parts) != 2:
                raise SclError("PARSE_ERROR", "glue lines hold two ports", locus=loc)
            glue.append((parts[0], parts[1]))
        else:
            raise SclError("PARSE_ERROR", "line outside a section", locus=loc)
    if target is None:
        raise SclError("PARSE_ERROR", "missing target line")
    if not edges:
        edges = {"a": "a", "b": "b"}
    base = BaseComplex(edges, tris)
    if n is None:
        n = 0
    return TransverseSurface(base, pieces, glue, target, n)


def load_surface(path):
    with open(path) as fh:
        return parse_surface(fh.read())


def format_surface(s):
    lines = ["base:"]
    for e, img in s.base.edges.items():
        lines.append("  edge %s %s" % (e, img or "1"))
    for t, w in s.base.triangles.items():
        lines.append("  tri %s %s" % (t, w))
    lines.append("pieces:")
    for p in s.pieces.values():
        arg = p.nports if p.kind == "vertex_disc" else p.label
        lines.append("  %s %s %s" % (p.kind, p.name, arg))
    lines.append("glue:")
    for a, b in s.glue:
        lines.append("  %s %s" % (a, b))
    lines.append("target: %s n=%d" % (s.target, s.n))
    return "\n".join(lines) + "\n"
