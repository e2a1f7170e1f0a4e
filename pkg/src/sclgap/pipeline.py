"""From a transverse surface and a letter-quasimorphism to an audited
angle structure.

Stages, each returning a fresh snapshot:

1. ``subdivide_handles``: every handle over ``x`` is cut into one stripe per
   letter of Φ(x).
2. ``extend_discs``: each cell disc is filled by three fans of stripes and,
   when its triangle splits non-degenerately, one hexagon.
3. ``correct_boundary``: collars are glued along every boundary circuit
   until it reads Φ(g)^k; boundary letters get their indices.
4. ``unzip``: the singular points left by degenerate fills are removed by
   inserting thin D strips along their leaves.
5. ``extract_regions`` / ``assign_angles`` / ``audit``.

Angles and curvatures are Fractions in units of π.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .angled import (AngledComplex, face_curvature, interior_curvature,
                     pi_text, subsurface, total_curvature)
from .cells import PolyComplex, Side, UnionFind
from .errors import SclError
from .letterqm import StableImage, stabilize
from .surface import (_rotation_offset, build_cells, side_word, validate)
from .words import DEGENERATE, NONDEGENERATE, Word, free_reduce, inv, power, split_triangle


# pattern records -----------------------------------------------------------------

@dataclass(frozen=True)
class Stripe:
    kind: str            # "A" or "B" after role normalisation
    direction: int       # +1 when its letter is a generator, -1 for an inverse
    triangular: bool     # innermost stripe of a fan (meets a corner)
    host: str
    face: str


@dataclass(frozen=True)
class Hexagon:
    kind: str
    x1: str
    x2: str
    x3: str
    host: str
    face: str


@dataclass
class DiscFill:
    host: str
    kind: str            # DEGENERATE, NONDEGENERATE or "EMPTY"
    words: tuple
    legs: tuple
    collar: bool = False


@dataclass
class StripePattern:
    surface: object
    phi: object
    cells: PolyComplex
    stage: str
    chi0: int
    stable: Optional[StableImage] = None
    fills: list = field(default_factory=list)
    unzipped: bool = False
    unzip_steps: int = 0
    notes: list = field(default_factory=list)

    def copy(self):
        pc, _ = self.cells.copy()
        return StripePattern(self.surface, self.phi, pc, self.stage, self.chi0,
                             self.stable, list(self.fills), self.unzipped,
                             self.unzip_steps, list(self.notes))

    def _kind(self, letter):
        a = self.stable.a_role if self.stable else "a"
        return "A" if letter.lower() == a else "B"

    def stripes(self):
        out = []
        for f in self.cells.faces.values():
            if f.kind == "stripe":
                y = f.info["letter"]
                out.append(Stripe(self._kind(y), 1 if y.islower() else -1,
                                  f.info.get("triangular", False), f.info["host"], f.id))
        return out

    def hexagons(self):
        out = []
        for f in self.cells.faces.values():
            if f.kind == "hexagon":
                x1, x2, x3 = f.info["x"]
                out.append(Hexagon(self._kind(x1), x1, x2, x3, f.info["host"], f.id))
        return out

    def gamma(self):
        """Transition sides: one side per glued pair whose faces differ in material."""
        return _gamma(self.cells)

    def boundary_arcs(self):
        return [s for s in self.cells.free_sides() if s.kind == "dir"]

    def index_sequences(self):
        out = []
        for cyc in self.cells.boundary_cycles():
            seq = [s.index for s in cyc if s.kind == "dir"]
            out.append(_rotate_to_start(seq))
        return out


def _rotate_to_start(seq):
    # canonical rotation: start at the first 1 preceded by something else
    n = len(seq)
    for r in range(n):
        if seq[r] == 1 and seq[r - 1] != 1:
            return tuple(seq[r:] + seq[:r])
    return tuple(seq)


def _gamma(pc):
    out = []
    seen = set()
    for s in pc.sides():
        t = s.mate
        if t is None or t in seen:
            continue
        seen.add(s)
        if s.face.material != t.face.material:
            out.append(s)
    return out


def _phi_word(s, phi, word):
    img = s.base.image(word)
    try:
        return phi.image(img)
    except SclError as e:
        if e.code == "PHI_UNEVALUABLE":
            raise
        raise SclError("PHI_UNEVALUABLE", e.message, locus=img or "1") from e


def _cut(pc, side, m):
    """Cut a side (and its mate) into m pieces, returned in face order."""
    pieces = [side]
    while len(pieces) < m:
        a, b = pc.split_side(pieces[-1])
        pieces[-1:] = [a, b]
    return pieces


# stage 1: handles ---------------------------------------------------------------------

def subdivide_handles(s, phi):
    pc = build_cells(s)
    chi0 = pc.euler_characteristic()
    for h in s.handles():
        face = pc.faces[h.name]
        y = _phi_word(s, phi, h.label)
        L, t, R, sd = face.sides
        if not y:
            face.material = "D"
            face.kind = "absorbed_handle"
            for x in face.sides:
                x.kind = "plain"
                if x.mate is not None:
                    x.mate.kind = "plain"
            continue
        m = len(y)
        Ls = _cut(pc, L, m)
        Rs = _cut(pc, R, m)
        mates_L = [x.mate for x in Ls]
        mates_R = [x.mate for x in Rs]
        mt, ms = t.mate, sd.mate
        pc.remove_face(face)
        prev = None
        for j in range(m):
            a = Side("dir", y[j], tag=L.tag)
            b = Side("dir", y[j].swapcase(), tag=R.tag)
            right = Side("fib", tag=t.tag if j == m - 1 else "%s.f%d" % (h.name, j + 1))
            left = Side("fib", tag=sd.tag if j == 0 else "%s.f%d" % (h.name, j))
            pc.new_face(y[j].lower(), "stripe", [a, right, b, left],
                        info={"host": h.name, "letter": y[j], "j": j},
                        fid="%s/%d" % (h.name, j))
            for mine, other, letter in ((a, mates_L[j], y[j].swapcase()),
                                        (b, mates_R[m - 1 - j], y[j])):
                if other is not None:
                    other.kind, other.letter = "dir", letter
                    pc.glue(mine, other)
            if j == 0 and ms is not None:
                pc.glue(left, ms)
            if j == m - 1 and mt is not None:
                pc.glue(right, mt)
            if prev is not None:
                pc.glue(left, prev)
            prev = right
    return StripePattern(s, phi, pc, "handles", chi0)


# stage 2: discs -------------------------------------------------------------------------

def _word(group):
    return "".join(x.letter for x in group if x.kind == "dir")


def _letters(group):
    return [x for x in group if x.kind == "dir"]


def _fill(pc, face, groups, host, decomposer=None):
    """Replace a hexagonal face with sides grouped as (p, k0, q, k1, r, k2)
    by its stripe fans and, if needed, a hexagon.

    Returns (DiscFill, map from old boundary sides to their replacements).
    """
    P, K0, Q, K1, R, K2 = [list(g) for g in groups]
    p, q, r = _word(P), _word(Q), _word(R)
    if decomposer is not None:
        d = decomposer(Word(p), Word(q), Word(r))
        got = (d.kind,) + d.legs
    else:
        got = split_triangle(p, q, r)
    if got is None:
        raise SclError("NO_DECOMPOSITION", "(%s, %s, %s)" % (p or "1", q or "1", r or "1"),
                       locus=host)
    kind, lu, lv, lw = got
    Pd, Qd, Rd = _letters(P), _letters(Q), _letters(R)
    lens = {"u": lu, "v": lv, "w": lw}

    def B(xs):
        return [("b", x, None) for x in xs]

    def I(key, tag=None):
        return [("i", key, tag)]

    outer = {}
    hexagon = None
    if kind == NONDEGENERATE:
        outer = {"u": I("U"), "v": I("V"), "w": I("W")}
        hexagon = (B([Pd[lu]]) + (I("V") if lv else B(K0)) + B([Qd[lv]])
                   + (I("W") if lw else B(K1)) + B([Rd[lw]]) + (I("U") if lu else B(K2)))
    else:
        busy = [x for x in "uvw" if lens[x]]
        if len(busy) == 2:
            empty = ({"u", "v", "w"} - set(busy)).pop()
            corner = {"u": K2, "v": K0, "w": K1}[empty]
            if len(corner) >= 2:
                Ka, Kb = corner[:len(corner) // 2], corner[len(corner) // 2:]
            else:
                a, b = pc.split_side(corner[0])
                Ka, Kb = [a], [b]
            # the fan whose outer curve leaves the corner gets Ka, the other Kb
            first, second = {"w": ("v", "u"), "u": ("w", "v"), "v": ("u", "w")}[empty]
            outer[first] = B(Ka) + I("apex", ("apex", host, "QP"))
            outer[second] = I("apex", ("apex", host, "PQ")) + B(Kb)
        elif len(busy) == 1:
            x = busy[0]
            outer[x] = {"u": B(K0) + B(Q) + B(K1),
                        "v": B(K1) + B(R) + B(K2),
                        "w": B(K2) + B(P) + B(K0)}[x]

    faces = []   # (material, kind, slots, info, suffix)

    def inner(x, j, corner):
        return B(corner) if j == 0 else I((x, j))

    def out_(x, j):
        return I((x, j + 1)) if j < lens[x] - 1 else outer[x]

    for j in range(lu):
        a, b = Pd[j], Rd[len(r) - 1 - j]
        faces.append((a.letter.lower(), "stripe",
                      B([a]) + out_("u", j) + B([b]) + inner("u", j, K2),
                      {"fan": "u", "j": j, "letter": a.letter}, "u%d" % j))
    for j in range(lv):
        a, b = Pd[len(p) - 1 - j], Qd[j]
        faces.append((a.letter.lower(), "stripe",
                      B([a]) + inner("v", j, K0) + B([b]) + out_("v", j),
                      {"fan": "v", "j": j, "letter": a.letter}, "v%d" % j))
    for j in range(lw):
        a, b = Qd[len(q) - 1 - j], Rd[j]
        faces.append((a.letter.lower(), "stripe",
                      B([a]) + inner("w", j, K1) + B([b]) + out_("w", j),
                      {"fan": "w", "j": j, "letter": a.letter}, "w%d" % j))
    if hexagon is not None:
        xs = (Pd[lu].letter, Qd[lv].letter, Rd[lw].letter)
        faces.append((xs[0].lower(), "hexagon", hexagon, {"x": xs}, "hex"))
    if not faces:
        faces.append(("D", "absorbed_cell", B(P) + B(K0) + B(Q) + B(K1) + B(R) + B(K2),
                      {}, "D"))

    mates = {x: x.mate for x in face.sides}
    pc.remove_face(face)
    replaced = {}
    pending = {}
    for material, fkind, slots, info, suffix in faces:
        sides = []
        for typ, obj, tag in slots:
            if typ == "b":
                new = Side(obj.kind, obj.letter, obj.tag)
                new.index = obj.index
                replaced[obj] = new
                sides.append(new)
            else:
                sides.append(Side("fib", tag=tag or ("int", host)))
        info = dict(info, host=host)
        if fkind == "stripe":
            info["triangular"] = any(t == "b" and o in (K0 + K1 + K2) for t, o, _ in slots)
        pc.new_face(material, fkind, sides, info=info, fid="%s/%s" % (host, suffix))
        for (typ, obj, _), new in zip(slots, sides):
            if typ == "b":
                if mates[obj] is not None:
                    pc.glue(new, mates[obj])
            elif obj in pending:
                pc.glue(new, pending.pop(obj))
            else:
                pending[obj] = new
    if pending:
        raise SclError("MALFORMED_GLUING", "unpaired interior curve", locus=host)
    fill = DiscFill(host, kind if faces[0][1] != "absorbed_cell" else "EMPTY",
                    (p, q, r), (lu, lv, lw))
    return fill, replaced


def extend_discs(p, decomposer=None):
    p = p.copy()
    pc = p.cells
    cells = [f for f in pc.faces.values() if f.kind == "cell_disc"]
    for face in cells:
        groups = defaultdict(list)
        for x in face.sides:
            groups[x.tag.rpartition(".")[2]].append(x)
        order = [groups[k] for k in ("s0", "k0", "s1", "k1", "s2", "k2")]
        fill, _ = _fill(pc, face, order, face.id, decomposer)
        p.fills.append(fill)
    p.stage = "discs"
    return p


# stage 3: boundary collars ---------------------------------------------------------

def _is_section(s, side):
    tag = side.tag
    if not isinstance(tag, str) or not (tag.endswith(".L") or tag.endswith(".R")):
        return False
    piece = s.pieces.get(tag.rpartition(".")[0])
    return piece is not None and piece.kind == "handle"


def _sections(s, cyc):
    """Split a circuit into alternating (section tag, sides) and junction lists."""
    n = len(cyc)
    start = None
    for i in range(n):
        if _is_section(s, cyc[i]) and not _is_section(s, cyc[i - 1]):
            start = i
            break
    if start is None:
        return None, None
    cyc = cyc[start:] + cyc[:start]
    secs, juns = [], []
    for x in cyc:
        if _is_section(s, x):
            if len(juns) == len(secs):
                secs.append((x.tag, []))
            if secs[-1][0] != x.tag:
                raise SclError("MALFORMED_GLUING", "two handle sides meet on the boundary",
                               locus=x.tag)
            secs[-1][1].append(x)
        else:
            if len(juns) < len(secs):
                juns.append([])
            juns[-1].append(x)
    return secs, juns


def correct_boundary(p, stable):
    p = p.copy()
    p.stable = stable
    pc, s, phi = p.cells, p.surface, p.phi
    target = s.target
    base = stable.phi_g.s
    for ci, cyc in enumerate(pc.boundary_cycles()):
        secs, juns = _sections(s, cyc)
        if secs is None:
            raise SclError("NONPOSITIVE_POWER", "boundary circuit crosses no handle",
                           locus="circuit %d" % ci)
        words = [side_word(s, tag) for tag, _ in secs]
        r = _rotation_offset("".join(words), target)
        if r is None or any(len(w) != 1 for w in words):
            raise SclError("NONPOSITIVE_POWER", "circuit reads %s" % "".join(words),
                           locus="circuit %d" % ci)
        m = len(secs)
        order = [(r + t) % m for t in range(m)]
        h_sides = list(secs[order[0]][1])
        h_word = words[order[0]]
        x_list = juns[(order[0] - 1) % m]
        for t in range(1, m):
            i = order[t]
            S = secs[i][1]
            J = juns[(i - 1) % m]
            y_list = juns[i]
            head, tail = pc.split_side(y_list[0])
            y_list[0] = tail
            xh, xt = pc.split_side(x_list[-1])
            x_list[-1] = xh
            ph_h = _phi_word(s, phi, h_word)
            ph_s = _phi_word(s, phi, words[i])
            h_word = h_word + words[i]
            ph_r = _phi_word(s, phi, h_word)

            def group(letters, glued_to):
                if letters:
                    out = [Side("dir", ch, tag="collar") for ch in letters]
                else:
                    out = [Side("plain", tag="collar")]
                if glued_to is not None:
                    if len(glued_to) != len(out):
                        raise SclError("MALFORMED_GLUING", "section length mismatch",
                                       locus="circuit %d" % ci)
                    for a, b in zip(out, reversed(glued_to)):
                        pc.glue(a, b)
                return out

            Pg = group(inv(ph_s), S)
            K0 = [Side("plain", tag="corner") for _ in J]
            for a, b in zip(K0, reversed(J)):
                pc.glue(a, b)
            Qg = group(inv(ph_h), h_sides)
            K1 = [Side("plain", tag="corner")]
            pc.glue(K1[0], xt)
            Rg = group(ph_r, None)
            K2 = [Side("plain", tag="corner")]
            pc.glue(K2[0], head)
            host = "k%d.%d" % (ci, t)
            face = pc.new_face(None, "collar", Pg + K0 + Qg + K1 + Rg + K2, fid=host)
            fill, rep = _fill(pc, face, (Pg, K0, Qg, K1, Rg, K2), host)
            fill.collar = True
            p.fills.append(fill)
            h_sides = [rep[x] for x in Rg]
        word = _word(h_sides)
        k = len(h_word) // len(target)
        if word != power(base, k):
            raise SclError("POWER_INCOMPATIBLE",
                           "Φ(g^%d)=%s but Φ(g)^%d=%s" % (k, word or "1", k, power(base, k)),
                           locus="circuit %d" % ci)
        for pos, x in enumerate(h_sides):
            x.index = stable.index(pos)
    p.stage = "corrected"
    return p


# stage 4: unzipping -------------------------------------------------------------------

NONTERMINATION_GUARD = "NONTERMINATION_GUARD"


def _is_apex(side):
    return isinstance(side.tag, tuple) and side.tag[0] == "apex"


def _trace(pc, first, limit):
    """Follow the leaf of Γ leaving an apex point.

    Returns the list of sides x_k, each oriented along the leaf in its own
    face, and the far end: None on ∂Σ, else the last side (an apex).
    """
    adj = defaultdict(list)
    for e in _gamma(pc):
        adj[pc.start(e)].append(e)
        adj[pc.end(e)].append(e)
    bnd = pc.boundary_vertices()
    path = [first]
    used = {first, first.mate}
    cur = pc.end(first)
    while True:
        if len(path) > limit:
            raise SclError(NONTERMINATION_GUARD, "leaf does not close up",
                           locus=first.tag[1])
        if cur in bnd:
            return path, None
        others = [e for e in adj[cur] if e not in used]
        if len(others) == 1:
            e = others[0]
            x = e if pc.start(e) == cur else e.mate
            path.append(x)
            used.update((e, e.mate))
            cur = pc.end(x)
        elif len(others) == 0:
            raise SclError("MALFORMED_GLUING", "leaf ends inside the surface", locus=cur)
        else:
            if not _is_apex(path[-1]):
                raise SclError("MALFORMED_GLUING", "leaf meets a singular point "
                               "away from an apex", locus=cur)
            return path, path[-1]


def _insert_at(pc, before, after, new):
    """Insert ``new`` between consecutive sides ``before``/``after`` of one face."""
    if before.face is not after.face:
        raise SclError("MALFORMED_GLUING", "apex corner pieces lie in different faces",
                       locus=before.face.id)
    f = before.face
    i = f.sides.index(after)
    if f.sides[i - 1] is not before:
        raise SclError("MALFORMED_GLUING", "apex corner pieces not adjacent", locus=f.id)
    pc.insert_sides(f, i, [new])


def unzip(p):
    p = p.copy()
    pc = p.cells
    apexes = [x for x in pc.sides() if _is_apex(x) and x.tag[2] == "QP"]
    guard = len([f for f in p.fills if f.kind == DEGENERATE]) + 1
    limit = sum(len(f.sides) for f in pc.faces.values())
    done = set()
    steps = 0
    for first in apexes:
        host = first.tag[1]
        if host in done:
            continue
        steps += 1
        if steps > guard:
            raise SclError(NONTERMINATION_GUARD, "more unzip steps than degenerate discs",
                           locus=host)
        done.add(host)
        path, last = _trace(pc, first, limit)
        # D faces at the two ends, located before anything is reglued
        fa = first.face.sides
        before0 = fa[fa.index(first) - 1].mate
        fb = first.mate.face.sides
        after0 = fb[(fb.index(first.mate) + 1) % len(fb)].mate
        if last is not None:
            done.add(last.tag[1])
            gl = last.face.sides
            before1 = gl[(gl.index(last) + 1) % len(gl)].mate
            gr = last.mate.face.sides
            after1 = gr[gr.index(last.mate) - 1].mate
        prev = None
        ends = []
        for k, x in enumerate(path):
            y = pc.unglue(x)
            zx, e0, zy, e1 = (Side("plain", tag="zip") for _ in range(4))
            pc.new_face("D", "unzip", [zx, e0, zy, e1], info={"host": host, "k": k},
                        fid="z%s.%d" % (host, k))
            pc.glue(zx, x)
            pc.glue(zy, y)
            if prev is None:
                ends.append(e0)
            else:
                pc.glue(e0, prev)
            prev = e1
        d0 = Side("plain", tag="zip")
        _insert_at(pc, after0, before0, d0)
        pc.glue(d0, ends[0])
        if last is not None:
            d1 = Side("plain", tag="zip")
            _insert_at(pc, before1, after1, d1)
            pc.glue(d1, prev)
        for x in path:
            if _is_apex(x):
                x.tag = x.mate.tag = ("leaf", x.tag[1])
    p.unzip_steps = steps
    _check_gamma(pc)
    chi = pc.euler_characteristic()
    if chi != p.chi0:
        raise SclError("MALFORMED_GLUING", "χ changed from %d to %d" % (p.chi0, chi))
    p.unzipped = True
    p.stage = "unzipped"
    return p


def _check_gamma(pc):
    deg = defaultdict(int)
    for e in _gamma(pc):
        deg[pc.start(e)] += 1
        deg[pc.end(e)] += 1
    bnd = pc.boundary_vertices()
    for v, d in deg.items():
        if d != (1 if v in bnd else 2):
            raise SclError("MALFORMED_GLUING",
                           "transition graph is not a 1-manifold (degree %d)" % d, locus=v)


# stage 5: regions ------------------------------------------------------------------------

@dataclass
class Region:
    id: str
    material: str        # "D", "a" or "b"
    role: str            # "A", "B" or "D"
    faces: list
    chi: int
    boundary_arcs: list = field(default_factory=list)
    arcs: list = field(default_factory=list)
    cells: Optional[PolyComplex] = field(default=None, repr=False)


@dataclass
class TransitionArc:
    id: str
    pairs: list
    vertices: list
    loop: bool
    regions: tuple
    chains: dict
    tvertex: str
    flanks: dict = field(default_factory=dict)   # region -> (i, j)
    theta: dict = field(default_factory=dict)    # region -> total angle at tvertex

    @property
    def endpoints(self):
        return () if self.loop else (self.vertices[0], self.vertices[-1])


@dataclass
class RegionDecomposition:
    pattern: StripePattern
    cells: PolyComplex
    regions: dict
    face_region: dict
    arcs: list
    boundary_arcs: list
    notes: list = field(default_factory=list)

    def region_of(self, face):
        return self.face_region[face.id if hasattr(face, "id") else face]

    def census(self):
        out = defaultdict(int)
        for R in self.regions.values():
            out[R.role] += 1
        return dict(out)


def _walk_arcs(pc):
    gam = _gamma(pc)
    adj = defaultdict(list)
    for e in gam:
        adj[pc.start(e)].append(e)
        adj[pc.end(e)].append(e)
    bnd = pc.boundary_vertices()
    used = set()
    out = []

    def walk(v, e):
        verts, pairs = [v], []
        while e is not None:
            used.add(e)
            pairs.append(e)
            v = pc.end(e) if pc.start(e) == v else pc.start(e)
            verts.append(v)
            nxt = [f for f in adj[v] if f not in used]
            e = nxt[0] if nxt and v not in bnd else None
        return verts, pairs

    for v in pc.vertex_ids():
        if v in bnd:
            for e in adj[v]:
                if e not in used:
                    out.append(walk(v, e))
    for e in gam:
        if e not in used:
            out.append(walk(pc.start(e), e))
    return out


def _abstract_chi(pc, fids):
    fids = set(fids)
    uf = UnionFind()
    edges = 0.0
    for fid in fids:
        f = pc.faces[fid]
        n = len(f.sides)
        for k, s in enumerate(f.sides):
            uf.find((fid, k))
            t = s.mate
            if t is None or t.face.id not in fids:
                edges += 1
                continue
            edges += 0.5
            g = t.face
            j = g.sides.index(t)
            uf.union((fid, k), (g.id, (j + 1) % len(g.sides)))
            uf.union((fid, (k + 1) % n), (g.id, j))
    verts = {uf.find((fid, k)) for fid in fids for k in range(len(pc.faces[fid].sides))}
    return len(verts) - int(edges) + len(fids)


def _material_components(pc):
    uf = UnionFind()
    for f in pc.faces.values():
        uf.find(f.id)
        for s in f.sides:
            t = s.mate
            if t is not None and t.face.material == f.material:
                uf.union(f.id, t.face.id)
    groups = defaultdict(list)
    for fid in pc.faces:
        groups[uf.find(fid)].append(fid)
    return list(groups.values())


def extract_regions(p):
    if not p.unzipped:
        raise SclError("MALFORMED_GLUING", "pattern must be unzipped first")
    p = p.copy()
    pc = p.cells
    # every non-loop arc needs an interior vertex to carry its transition vertex
    for verts, pairs in _walk_arcs(pc):
        loop = verts[0] == verts[-1] and verts[0] not in pc.boundary_vertices()
        if len(pairs) == 1 and not loop:
            pc.split_side(pairs[0])
    notes = list(p.notes)
    # a disc region sealed off from ∂Σ by one surrounding region (bounded by
    # a single loop of Γ) is merged into it; repeat for nested discs
    changed = True
    while changed:
        changed = False
        for fids in _material_components(pc):
            if _abstract_chi(pc, fids) != 1:
                continue
            inside = set(fids)
            sides = [s for fid in fids for s in pc.faces[fid].sides]
            if any(s.mate is None for s in sides):
                continue
            outer = {s.mate.face.material for s in sides if s.mate.face.id not in inside}
            if len(outer) != 1:
                continue
            mat = outer.pop()
            kind = "vertex disc" if pc.faces[fids[0]].material == "D" else \
                "%s-disc" % pc.faces[fids[0]].material
            for fid in fids:
                pc.faces[fid].material = mat
            notes.append("enclosed %s %s merged into %s-material" % (kind, fids[0], mat))
            changed = True
            break
    groups = _material_components(pc)
    a_role = p.stable.a_role if p.stable else "a"
    regions, face_region = {}, {}
    for k, fids in enumerate(groups):
        rid = "R%d" % k
        mat = pc.faces[fids[0]].material
        role = "D" if mat == "D" else ("A" if mat == a_role else "B")
        regions[rid] = Region(rid, mat, role, fids, _abstract_chi(pc, fids), cells=pc)
        for fid in fids:
            face_region[fid] = rid
    barcs = [s for s in pc.free_sides() if s.kind == "dir"]
    for s in barcs:
        regions[face_region[s.face.id]].boundary_arcs.append(s)
    for s in barcs:
        if pc.start(s) == pc.end(s):
            notes.append("boundary arc %r is a loop" % s)
    bnd = pc.boundary_vertices()
    arcs = []
    for k, (verts, pairs) in enumerate(_walk_arcs(pc)):
        loop = verts[0] == verts[-1] and verts[0] not in bnd
        r1 = face_region[pairs[0].face.id]
        r2 = face_region[pairs[0].mate.face.id]
        chains = {}
        for rid in (r1, r2):
            chain = [e if face_region[e.face.id] == rid else e.mate for e in pairs]
            if pc.start(chain[0]) != verts[0]:
                chain.reverse()
            chains[rid] = chain
        aid = "T%d" % k
        arc = TransitionArc(aid, pairs, verts, loop, (r1, r2), chains,
                            verts[0] if loop else verts[1])
        if loop:
            notes.append("transition arc %s is a loop" % aid)
        arcs.append(arc)
        regions[r1].arcs.append(aid)
        regions[r2].arcs.append(aid)
    return RegionDecomposition(p, pc, regions, face_region, arcs, barcs, notes)


# stage 6: angles ------------------------------------------------------------------------------

def theta(i, j):
    """Total angle at a transition vertex inside an A/B region, flanked by
    boundary arcs of indices i (before) and j (after)."""
    return Fraction(2) if i >= j else Fraction(0)


def _flank(r, arc, rid):
    pc = r.cells
    chain = arc.chains[rid]
    e1, e2 = pc.start(chain[0]), pc.end(chain[-1])
    before = after = None
    for f in r.regions[rid].faces:
        for s in pc.faces[f].sides:
            if s.mate is None:
                if pc.end(s) == e1:
                    before = s
                if pc.start(s) == e2:
                    after = s
    for s in (before, after):
        if s is None or s.kind != "dir":
            raise SclError("UNINDEXED_ARC", "transition arc not flanked by boundary arcs",
                           locus=arc.id)
        if s.index is None:
            raise SclError("UNINDEXED_ARC", "boundary arc without index", locus=repr(s))
    return before.index, after.index


def _regions_at(r):
    pc = r.cells
    at = defaultdict(list)
    for f in pc.faces.values():
        rid = r.face_region[f.id]
        for k in range(len(f.sides)):
            at[(pc.corner_vertex(f, k), rid)].append((f.id, k))
    by_vertex = defaultdict(list)
    for v, rid in at:
        by_vertex[v].append(rid)
    return at, by_vertex


def expected_totals(r):
    """Total angle per (vertex, region) demanded by the angle rule."""
    pc = r.cells
    _, by_vertex = _regions_at(r)
    bnd = pc.boundary_vertices()
    totals, roles = {}, {}
    for arc in r.arcs:
        if arc.loop:
            for v in arc.vertices:
                roles[v] = "loop"
                for rid in arc.regions:
                    totals[(v, rid)] = Fraction(1)
            continue
        v = arc.tvertex
        roles[v] = "transition"
        for rid in arc.regions:
            if r.regions[rid].role != "D":
                i, j = _flank(r, arc, rid)
                arc.flanks[rid] = (i, j)
                arc.theta[rid] = theta(i, j)
        for rid in arc.regions:
            if r.regions[rid].role == "D":
                other = [x for x in arc.regions if x != rid][0]
                arc.theta[rid] = 2 - arc.theta[other]
            totals[(v, rid)] = arc.theta[rid]
    for v, rids in by_vertex.items():
        if len(rids) > 2:
            raise SclError("MALFORMED_GLUING", "%d regions meet at a vertex" % len(rids),
                           locus=v)
        for rid in rids:
            if (v, rid) in totals:
                continue
            if v in bnd:
                roles.setdefault(v, "endpoint" if len(rids) == 2 else "boundary")
                totals[(v, rid)] = Fraction(1, 2) if len(rids) == 2 else Fraction(1)
            else:
                roles.setdefault(v, "gamma" if len(rids) == 2 else "interior")
                totals[(v, rid)] = Fraction(1) if len(rids) == 2 else Fraction(2)
    return totals, roles


def assign_angles(r, stable=None):
    for s in r.boundary_arcs:
        if s.index is None:
            raise SclError("UNINDEXED_ARC", "boundary arc without index", locus=repr(s))
    totals, roles = expected_totals(r)
    at, _ = _regions_at(r)
    angles = {}
    for key, val in totals.items():
        fid, k = at[key][0]
        angles[(fid, k)] = val
    X, side_edge = r.cells.to_angled(angles)
    X.totals = totals
    X.roles = roles
    X.side_edge = side_edge
    return X


# stage 7: audit -----------------------------------------------------------------------------

def opposite_orientation_witness(region):
    """Two boundary arcs of an A/B region with opposite orientations.

    Walks from a boundary arc across stripes and hexagons, always leaving a
    tile through a lettered side of the opposite sign to the one it entered
    by, until a lettered side on ∂Σ is reached.
    """
    if region.role == "D" or len(region.boundary_arcs) < 2:
        raise SclError("WITNESS_NOT_FOUND", "needs an A/B region with two boundary arcs",
                       locus=region.id)
    start = region.boundary_arcs[0]
    sign = 1 if start.letter.islower() else -1
    seen = {start}
    stack = [start]
    while stack:
        entry = stack.pop()
        for s in entry.face.sides:
            if s is entry or s.kind != "dir" or s in seen:
                continue
            if (1 if s.letter.islower() else -1) != -sign:
                continue
            seen.add(s)
            if s.mate is None:
                return start, s
            if s.mate.face.material == region.material and s.mate not in seen:
                seen.add(s.mate)
                stack.append(s.mate)
    raise SclError("WITNESS_NOT_FOUND", "no oppositely oriented boundary arc reached",
                   locus=region.id)


@dataclass
class CurvatureReport:
    n: int
    chi: int
    chi_minus: int
    endpoints: dict
    regions: dict            # region id -> (role, chi, κ_int, boundary arcs)
    transition_vertices: dict
    vertex_discs: dict       # region id -> (κ_int generic, κ_int closed formula)
    claim3_total: Fraction
    index_one_a_arcs: int
    total: Fraction
    verdicts: dict
    failures: list
    witnesses: dict
    index_sequences: list
    scl_lower_bound: Optional[Fraction]
    ratio: Optional[Fraction]
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return all(self.verdicts.values())


def _index_ok(seq, ell):
    unit = [i // 2 + 1 for i in range(2 * ell)]
    if not seq or len(seq) % len(unit):
        return False
    k = len(seq) // len(unit)
    want = unit * k
    return any(list(seq[r:]) + list(seq[:r]) == want for r in range(len(seq)))


def audit(r, angles, n, strict=True, chi_surface=None):
    X = angles
    pc = r.cells
    stable = r.pattern.stable
    fail = []

    def check(name, ok, locus, msg):
        if not ok:
            fail.append((name, locus, msg))
        return ok

    at = X.corners_at()
    half = defaultdict(int)
    for t, h in X.edges.values():
        half[t] += 1
        half[h] += 1
    kappa = {}
    for v in X.vertices:
        cs = at.get(v, ())
        kappa[v] = 2 - (half[v] - len(cs)) - sum((X.angle(f, k) for f, k in cs), Fraction(0))
    tot = defaultdict(Fraction)
    for v, cs in at.items():
        for f, k in cs:
            tot[(v, r.face_region[f])] += X.angle(f, k)
    rid_at = defaultdict(set)
    for v, rid in tot:
        rid_at[v].add(rid)

    want, roles = expected_totals(r)
    for key in sorted(set(want) | set(tot)):
        check("angle_rule", want.get(key) == tot.get(key, Fraction(0)), key,
              "total %s, rule gives %s" % (pi_text(tot.get(key, 0)), pi_text(want.get(key, 0))))

    bnd = pc.boundary_vertices()
    endpoints = {v: kappa[v] for v in X.vertices if v in bnd}
    c1 = all([check("claim1", k == 0, v, "κ=%s" % pi_text(k)) for v, k in endpoints.items()])
    tverts = {arc.tvertex: kappa[arc.tvertex] for arc in r.arcs}
    flat = all([check("flat_vertices", kappa[v] == 0, v, "κ=%s" % pi_text(kappa[v]))
                for v in X.vertices if v not in bnd and v not in tverts
                and len(rid_at[v]) == 2])

    interior = defaultdict(list)
    for v, rids in rid_at.items():
        if len(rids) == 1 and v not in bnd:
            interior[next(iter(rids))].append(v)
    kint, table, witnesses = {}, {}, {}
    for rid, R in r.regions.items():
        k_faces = sum((face_curvature(X, f) for f in R.faces), Fraction(0))
        k_faces += sum((kappa[v] for v in interior[rid]), Fraction(0))
        kint[rid] = k_faces
        if not interior[rid]:
            spec = subsurface(X, R.faces)
            if spec.chi == R.chi:
                check("cross_paths", interior_curvature(X, spec) == k_faces, rid,
                      "interior curvature disagrees with the face sum")
        table[rid] = (R.role, R.chi, k_faces, len(R.boundary_arcs))

    c2 = True
    for rid, R in r.regions.items():
        if R.role == "D":
            continue
        c2 &= check("claim2", kint[rid] <= 0, rid, "κ_int=%s" % pi_text(kint[rid]))
        if len(R.boundary_arcs) >= 2:
            try:
                a, b = opposite_orientation_witness(R)
                witnesses[rid] = (a.letter, b.letter)
            except SclError as e:
                c2 &= check("claim2", False, rid, e.message)
        elif R.chi == 1:
            c2 &= check("claim2", False, rid, "disc region with fewer than two boundary arcs")

    discs = {}
    for rid, R in r.regions.items():
        if R.role != "D":
            continue
        closed = 2 * R.chi - sum((arc.theta[other] for arc in r.arcs if not arc.loop
                                  and rid in arc.regions
                                  for other in arc.regions if other != rid), Fraction(0))
        discs[rid] = (kint[rid], closed)
        check("cross_paths", closed == kint[rid], rid,
              "closed formula %s vs generic %s" % (pi_text(closed), pi_text(kint[rid])))

    seqs = r.pattern.index_sequences()
    ell = stable.ell if stable else 1
    idx_ok = all([check("index_pattern", _index_ok(seq, ell), "circuit %d" % i,
                        "indices %s" % (seq,)) for i, seq in enumerate(seqs)])
    a_role = stable.a_role if stable else "a"
    ones = sum(1 for s in r.boundary_arcs if s.index == 1 and s.letter.lower() == a_role)
    claim3 = sum(tverts.values(), Fraction(0)) + sum((d[0] for d in discs.values()), Fraction(0))
    c3 = check("claim3", claim3 <= -2 * n, "transition vertices + vertex discs",
               "%s > %s" % (pi_text(claim3), pi_text(-2 * n)))
    c3 &= check("claim3", ones == n, "index-1 arcs", "%d index-1 arcs, n=%d" % (ones, n))

    on_gamma = [v for v in X.vertices if not (len(rid_at[v]) == 1 and v not in bnd)]
    total = sum((kappa[v] for v in on_gamma), Fraction(0)) + sum(kint.values(), Fraction(0))
    chi = r.pattern.chi0 if chi_surface is None else chi_surface
    gb = check("gauss_bonnet", total == 2 * chi and total_curvature(X) == total,
               "Σ", "total %s, 2πχ=%s" % (pi_text(total), pi_text(2 * chi)))
    thm = check("total_bound", total <= -2 * n, "Σ",
                "κ(Σ)=%s > %s" % (pi_text(total), pi_text(-2 * n)))

    verdicts = {
        "angle_rule": not any(f[0] == "angle_rule" for f in fail),
        "claim1": c1 and flat,
        "claim2": c2,
        "claim3": c3,
        "index_pattern": idx_ok,
        "cross_paths": not any(f[0] == "cross_paths" for f in fail),
        "total_bound": thm,
        "gauss_bonnet": gb,
    }
    chi_minus = sum(min(0, c) for c in
                    (pc.component_chi(cc) for cc in pc.components()))
    ok = all(verdicts.values())
    bound = Fraction(1, 2) if ok and -chi >= n else None
    ratio = Fraction(-chi_minus, 2 * n) if n else None
    rep = CurvatureReport(n, chi, chi_minus, endpoints, table, tverts, discs, claim3, ones,
                          total, verdicts, fail, witnesses, seqs, bound, ratio,
                          list(r.notes))
    if strict and fail:
        name, locus, msg = fail[0]
        raise SclError("CLAIM_VIOLATION", "%s: %s" % (name, msg), locus=locus)
    return rep


# driver --------------------------------------------------------------------------------

@dataclass
class Certificate:
    surface: object
    stable: StableImage
    pattern: StripePattern
    regions: RegionDecomposition
    angles: AngledComplex
    report: CurvatureReport


def certify(s, phi, g=None, strict=True):
    """Run every stage on a surface; raises SclError on the first failure."""
    check = validate(s, g=g)
    if not check.passed:
        bad = [k for k, v in check.verdicts.items() if not v]
        code = "NONPOSITIVE_POWER" if bad in (["monotone"], ["monotone", "degree"]) \
            else "MALFORMED_GLUING"
        raise SclError(code, "; ".join(check.messages), locus=",".join(bad))
    target = s.target if g is None else str(g)
    stable = stabilize(phi, Word(s.base.image(target), phi.alphabet))
    p = subdivide_handles(s, phi)
    p = extend_discs(p)
    p = correct_boundary(p, stable)
    p = unzip(p)
    r = extract_regions(p)
    X = assign_angles(r, stable)
    rep = audit(r, X, check.n, strict=strict, chi_surface=check.chi)
    return Certificate(s, stable, p, r, X, rep)


def format_report(rep, stable=None):
    lines = []
    if stable is not None:
        lines.append("Φ(g) = %s  (ℓ = %d%s)" % (stable.phi_g, stable.ell,
                                               ", roles of a and b swapped" if stable.swapped else ""))
    lines.append("n = %d, χ = %d, χ⁻ = %d" % (rep.n, rep.chi, rep.chi_minus))
    for seq in rep.index_sequences:
        lines.append("boundary indices (%s)" % ",".join(str(i) for i in seq))
    lines.append("")
    lines.append("regions:")
    for rid, (role, chi, k, nb) in rep.regions.items():
        lines.append("  %-5s %s  χ=%-3d κ_int=%-6s boundary arcs=%d" % (rid, role, chi, pi_text(k), nb))
    lines.append("transition vertices:")
    for v, k in rep.transition_vertices.items():
        lines.append("  %-6s κ=%s" % (v, pi_text(k)))
    lines.append("vertex discs (generic / closed formula):")
    for rid, (a, b) in rep.vertex_discs.items():
        lines.append("  %-5s %s / %s" % (rid, pi_text(a), pi_text(b)))
    lines.append("")
    status = lambda ok: "PASS" if ok else "FAIL"
    v = rep.verdicts
    lines.append("Claim 1 (arc endpoints flat): %s" % status(v["claim1"]))
    lines.append("Claim 2 (A/B regions κ_int ≤ 0): %s" % status(v["claim2"]))
    lines.append("Claim 3 (transition vertices + vertex discs = %s ≤ %s): %s"
                 % (pi_text(rep.claim3_total), pi_text(-2 * rep.n), status(v["claim3"])))
    lines.append("angle rule: %s, indices: %s, cross paths: %s"
                 % (status(v["angle_rule"]), status(v["index_pattern"]), status(v["cross_paths"])))
    lines.append("κ(Σ) = %s = 2πχ: %s" % (pi_text(rep.total), status(v["gauss_bonnet"])))
    lines.append("κ(Σ) ≤ -2πn: %s" % status(v["total_bound"]))
    for name, locus, msg in rep.failures:
        lines.append("  violation %s at %s: %s" % (name, locus, msg))
    for note in rep.notes:
        lines.append("note: %s" % note)
    if rep.scl_lower_bound is not None:
        lines.append("scl(g) ≥ %s" % rep.scl_lower_bound)
    if rep.ratio is not None:
        lines.append("this surface: -χ⁻/2n = %s" % rep.ratio)
    return "\n".join(lines) + "\n"


COLORS = {"a": "lightcoral", "b": "lightblue", "D": "gray85"}


def to_dot(r):
    pc = r.cells
    lines = ["graph stripes {", "  node [shape=box, style=filled];"]
    for fid, f in pc.faces.items():
        label = fid
        arcs = ["%s%s" % (s.letter, "/%d" % s.index if s.index else "")
                for s in f.sides if s.mate is None and s.kind == "dir"]
        if arcs:
            label += "\\n" + " ".join(arcs)
        lines.append('  "%s" [label="%s", fillcolor=%s];'
                     % (fid, label, COLORS.get(f.material, "white")))
    seen = set()
    for s in pc.sides():
        t = s.mate
        if t is None or t in seen:
            continue
        seen.add(s)
        style = "bold" if s.face.material != t.face.material else "solid"
        lines.append('  "%s" -- "%s" [style=%s];' % (s.face.id, t.face.id, style))
    lines.append("}")
    return "\n".join(lines) + "\n"
