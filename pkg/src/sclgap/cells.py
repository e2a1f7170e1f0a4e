"""Oriented polygons glued side to side.

Every surface in the package is held as a :class:`PolyComplex`: a set of
polygons, each with a counter-clockwise list of sides, plus an involution
gluing some sides in pairs (always orientation-reversing).  Unglued sides
form the boundary.  Vertices are not stored; they are the classes of
polygon corners under the gluing, recomputed on demand.

Corner ``k`` of a face is the start point of side ``k``.
"""

from __future__ import annotations

from collections import defaultdict

from .angled import AngledComplex
from .errors import SclError


class Side:
    __slots__ = ("face", "kind", "letter", "mate", "tag", "index")

    def __init__(self, kind="plain", letter=None, tag=None):
        self.face = None
        self.index = None       # position in 1..ell once the boundary is corrected
        self.kind = kind        # "dir" (carries a letter), "fib", "plain", "port"
        self.letter = letter    # letter read along the face orientation
        self.mate = None
        self.tag = tag

    def __repr__(self):
        f = self.face.id if self.face is not None else "?"
        return "<%s.%s%s>" % (f, self.kind, ":" + self.letter if self.letter else "")


class Face:
    __slots__ = ("id", "material", "kind", "sides", "info")

    def __init__(self, fid, material, kind, info=None):
        self.id = fid
        self.material = material   # "D", "a", "b" or None before filling
        self.kind = kind
        self.sides = []
        self.info = info or {}

    def __repr__(self):
        return "<Face %s %s/%s %d>" % (self.id, self.kind, self.material, len(self.sides))


class UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        while p != x:
            self.parent[x] = self.parent.setdefault(p, p)
            x, p = p, self.parent[p]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


class PolyComplex:
    def __init__(self):
        self.faces = {}
        self._next = 0
        self._vcache = None

    # construction --------------------------------------------------------

    def new_face(self, material, kind, sides, info=None, fid=None):
        if fid is None:
            fid = "f%d" % self._next
            self._next += 1
        if fid in self.faces:
            raise SclError("MALFORMED_GLUING", "duplicate face id", locus=fid)
        face = Face(fid, material, kind, info)
        for s in sides:
            s.face = face
            face.sides.append(s)
        self.faces[fid] = face
        self._vcache = None
        return face

    def remove_face(self, face):
        for s in face.sides:
            if s.mate is not None:
                s.mate.mate = None
        del self.faces[face.id]
        self._vcache = None

    def glue(self, s, t):
        if s is t or s.mate is not None or t.mate is not None:
            raise SclError("MALFORMED_GLUING", "side glued twice",
                           locus="%r/%r" % (s, t))
        s.mate, t.mate = t, s
        self._vcache = None

    def unglue(self, s):
        t = s.mate
        if t is not None:
            s.mate = t.mate = None
        self._vcache = None
        return t

    def insert_sides(self, face, index, sides):
        for k, s in enumerate(sides):
            s.face = face
            face.sides.insert(index + k, s)
        self._vcache = None

    def split_side(self, s, kinds=None):
        """Cut side ``s`` (and its mate) in two; returns the two new pieces of
        ``s`` in face order."""
        face = s.face
        i = face.sides.index(s)
        s1 = Side(s.kind, s.letter, s.tag)
        s2 = Side(s.kind, s.letter, s.tag)
        t = s.mate
        face.sides[i:i + 1] = [s1, s2]
        s1.face = s2.face = face
        if t is not None:
            g = t.face
            j = g.sides.index(t)
            t1 = Side(t.kind, t.letter, t.tag)
            t2 = Side(t.kind, t.letter, t.tag)
            g.sides[j:j + 1] = [t1, t2]
            t1.face = t2.face = g
            s1.mate, t2.mate = t2, s1
            s2.mate, t1.mate = t1, s2
        self._vcache = None
        return s1, s2

    def replace_side(self, s, pieces):
        """Replace side ``s`` by an unglued list of pieces; returns the old mate."""
        face = s.face
        i = face.sides.index(s)
        t = self.unglue(s)
        face.sides[i:i + 1] = pieces
        for p in pieces:
            p.face = face
        self._vcache = None
        return t

    def copy(self):
        other = PolyComplex()
        other._next = self._next
        smap = {}
        for fid, f in self.faces.items():
            g = Face(fid, f.material, f.kind, dict(f.info))
            for s in f.sides:
                t = Side(s.kind, s.letter, s.tag)
                t.index = s.index
                t.face = g
                g.sides.append(t)
                smap[s] = t
            other.faces[fid] = g
        for s, t in smap.items():
            if s.mate is not None:
                t.mate = smap[s.mate]
        return other, smap

    # queries ----------------------------------------------------------------

    def sides(self):
        for f in self.faces.values():
            yield from f.sides

    def check(self):
        for f in self.faces.values():
            if not f.sides:
                raise SclError("MALFORMED_GLUING", "face without sides", locus=f.id)
            for s in f.sides:
                if s.face is not f:
                    raise SclError("MALFORMED_GLUING", "stale side", locus=f.id)
                if s.mate is not None:
                    if s.mate.mate is not s or s.mate.face.id not in self.faces:
                        raise SclError("MALFORMED_GLUING", "broken gluing", locus=repr(s))

    def position(self, s):
        return s.face.sides.index(s)

    def _vertices(self):
        if self._vcache is not None:
            return self._vcache
        uf = UnionFind()
        pos = {}
        for f in self.faces.values():
            for k, s in enumerate(f.sides):
                pos[s] = k
                uf.find((f.id, k))
        for f in self.faces.values():
            n = len(f.sides)
            for k, s in enumerate(f.sides):
                t = s.mate
                if t is None:
                    continue
                g = t.face
                j = pos[t]
                m = len(g.sides)
                uf.union((f.id, k), (g.id, (j + 1) % m))
                uf.union((f.id, (k + 1) % n), (g.id, j))
        names = {}
        corner = {}
        for f in self.faces.values():
            for k in range(len(f.sides)):
                r = uf.find((f.id, k))
                if r not in names:
                    names[r] = "v%d" % len(names)
                corner[(f.id, k)] = names[r]
        self._vcache = (corner, pos)
        return self._vcache

    def corner_vertex(self, face, k):
        corner, _ = self._vertices()
        return corner[(face.id, k % len(face.sides))]

    def start(self, s):
        corner, pos = self._vertices()
        return corner[(s.face.id, pos[s])]

    def end(self, s):
        corner, pos = self._vertices()
        f = s.face
        return corner[(f.id, (pos[s] + 1) % len(f.sides))]

    def vertex_ids(self):
        corner, _ = self._vertices()
        seen = {}
        for v in corner.values():
            seen[v] = None
        return list(seen)

    def edge_count(self):
        n = 0
        for s in self.sides():
            n += 1 if s.mate is None else 0.5
        return int(n)

    def euler_characteristic(self):
        return len(self.vertex_ids()) - self.edge_count() + len(self.faces)

    def free_sides(self):
        return [s for s in self.sides() if s.mate is None]

    def boundary_vertices(self):
        out = set()
        for s in self.free_sides():
            out.add(self.start(s))
            out.add(self.end(s))
        return out

    def components(self):
        """Connected components as lists of face ids (glued-side adjacency)."""
        uf = UnionFind()
        for f in self.faces.values():
            uf.find(f.id)
            for s in f.sides:
                if s.mate is not None:
                    uf.union(f.id, s.mate.face.id)
        comps = defaultdict(list)
        for fid in self.faces:
            comps[uf.find(fid)].append(fid)
        return list(comps.values())

    def component_chi(self, fids):
        fids = set(fids)
        verts = set()
        edges = 0.0
        for fid in fids:
            f = self.faces[fid]
            for k, s in enumerate(f.sides):
                verts.add(self.corner_vertex(f, k))
                edges += 1 if s.mate is None else 0.5
        return len(verts) - int(edges) + len(fids)

    def boundary_cycles(self):
        """Boundary circuits as lists of free sides in boundary order."""
        free = self.free_sides()
        by_start = defaultdict(list)
        for s in free:
            by_start[self.start(s)].append(s)
        for v, lst in by_start.items():
            if len(lst) > 1:
                raise SclError("MALFORMED_GLUING", "boundary is pinched", locus=v)
        seen = set()
        cycles = []
        for s in free:
            if s in seen:
                continue
            cyc = []
            t = s
            while t not in seen:
                seen.add(t)
                cyc.append(t)
                t = by_start[self.end(t)][0]
            cycles.append(cyc)
        return cycles

    # angled complex --------------------------------------------------------

    def to_angled(self, angles=None):
        """AngledComplex with one edge per glued pair or free side.

        ``angles`` maps (face id, corner) -> value.  Returns the complex and
        the side -> edge id map.
        """
        edges = {}
        side_edge = {}
        for f in self.faces.values():
            for s in f.sides:
                if s in side_edge:
                    continue
                eid = "e%d" % len(edges)
                edges[eid] = (self.start(s), self.end(s))
                side_edge[s] = (eid, 1)
                if s.mate is not None:
                    side_edge[s.mate] = (eid, -1)
        faces = {fid: [side_edge[s] for s in f.sides] for fid, f in self.faces.items()}
        X = AngledComplex(self.vertex_ids(), edges, faces, angles)
        return X, side_edge
