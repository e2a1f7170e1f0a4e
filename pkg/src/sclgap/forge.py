"""Concrete admissible surfaces: the punctured torus for [a,b], its cyclic
covers, and exhaustive fatgraph enumeration over the wedge of two circles.

A boundary made of circuits reading g^{k_1}, ..., g^{k_m} is closed up by
pairing every letter x with a letter x⁻¹; each pair becomes a handle.  The
vertex discs are then forced: following a corner from the end of one
letter to the start of the next and across the paired handle traces the
cycles of σ(o) = partner(next(o)).
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Optional

from .surface import BaseComplex, Piece, TransverseSurface, validate
from .words import free_reduce, inv, Word


@dataclass
class EnumerationBudget:
    max_handles: int = 8
    max_cell_discs: int = 0
    max_vertex_discs: int = 8
    time_budget: Optional[float] = None

    def __post_init__(self):
        if self.max_handles < 0 or self.max_cell_discs < 0 or self.max_vertex_discs < 0:
            raise ValueError("budget bounds must be non-negative")


def from_pairing(words, pairing, target, base=None, cells=None):
    """Build the fatgraph surface for circuits ``words`` and a pairing of
    occurrences (circuit, position) -> (circuit, position).

    Each paired x/x⁻¹ becomes handle ``h<i>`` over x, its L side on the
    occurrence of x.  Every vertex disc alternates junction ports and
    handle ends.  ``cells`` maps circuit index -> triangle name for circuits
    that are holes capped by a cell disc (they read the inverse of the
    triangle word); their junctions go to the cell corners.
    """
    base = base or BaseComplex.wedge()
    cells = cells or {}
    occ = [(c, i) for c, w in enumerate(words) for i in range(len(w))]

    def letter(o):
        return words[o[0]][o[1]]

    def nxt(o):
        return (o[0], (o[1] + 1) % len(words[o[0]]))

    pieces = {}
    glue = []
    side_of = {}
    k = 0
    for o in occ:
        if letter(o).islower():
            name = "h%d" % k
            k += 1
            pieces[name] = Piece(name, "handle", letter(o))
            side_of[o] = (name, "L")
            side_of[pairing[o]] = (name, "R")
    for c, tri in cells.items():
        name = "c%d" % c
        pieces[name] = Piece(name, "cell_disc", tri)
        for i in range(3):
            h, sd = side_of[(c, i)]
            glue.append(("%s.s%d" % (name, 2 - i), "%s.%s" % (h, sd)))
    # the start of the occurrence after o is an end of its handle: s for an L
    # side, t for an R side (the R side runs against the handle)
    seen = set()
    d = 0
    for o in occ:
        if o in seen:
            continue
        cyc = []
        x = o
        while x not in seen:
            seen.add(x)
            cyc.append(x)
            x = pairing[nxt(x)]
        name = "v%d" % d
        d += 1
        pieces[name] = Piece(name, "vertex_disc", None, 2 * len(cyc))
        for m, x in enumerate(cyc):
            if x[0] in cells:
                glue.append(("%s.%d" % (name, 2 * m), "c%d.k%d" % (x[0], (1 - x[1]) % 3)))
            h, sd = side_of[nxt(x)]
            glue.append(("%s.%d" % (name, 2 * m + 1), "%s.%s" % (h, "s" if sd == "L" else "t")))
    n = sum(len(w) for c, w in enumerate(words) if c not in cells) // len(target)
    return TransverseSurface(base, pieces, glue, target, n)


def commutator_torus():
    """Once-punctured torus bounding [a,b] = abAB."""
    return from_pairing(["abAB"], {(0, 0): (0, 2), (0, 2): (0, 0),
                                   (0, 1): (0, 3), (0, 3): (0, 1)}, "abAB")


def power_cover(s, k):
    """Degree-k cyclic cover: k copies, with the tail end of the first handle
    glued one sheet up."""
    if k < 1:
        raise ValueError("cover degree must be positive")
    if k == 1:
        return s
    first = s.handles()[0].name if s.handles() else None
    pieces = {}
    for i in range(k):
        for p in s.pieces.values():
            name = "%s_%d" % (p.name, i)
            pieces[name] = Piece(name, p.kind, p.label, p.nports)

    def lift(port, i):
        piece, _, tail = port.rpartition(".")
        return "%s_%d.%s" % (piece, i, tail)

    glue = []
    for a, b in s.glue:
        shift = 0
        if a == "%s.t" % first:
            shift = 1
        elif b == "%s.t" % first:
            a, b, shift = b, a, 1
        for i in range(k):
            glue.append((lift(a, i), lift(b, (i + shift) % k)))
    return TransverseSurface(s.base, pieces, glue, s.target, s.n * k)


# enumeration --------------------------------------------------------------------

def _partitions(n, largest=None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


def _canonical(words, pairing, steps, kinds):
    """Smallest encoding of the pairing over rotations of each circuit by
    its step (whole copies of g, or single letters on cell holes) and
    permutations of interchangeable circuits."""
    groups = {}
    for c in range(len(words)):
        groups.setdefault(kinds[c], []).append(c)
    best = None
    perms = [list(itertools.permutations(cs)) for _, cs in sorted(groups.items())]
    for choice in itertools.product(*perms):
        order = [c for cs in choice for c in cs]
        for rots in itertools.product(*[range(len(words[c]) // steps[c]) for c in order]):
            new = {}
            for pos, (c, rot) in enumerate(zip(order, rots)):
                new[c] = (pos, rot * steps[c], len(words[c]))
            code = []
            for (c, i), (d, j) in pairing.items():
                pc, sc, Lc = new[c]
                pd, sd, Ld = new[d]
                a = (pc, (i - sc) % Lc)
                b = (pd, (j - sd) % Ld)
                if a < b:
                    code.append((a, b))
            code = tuple(sorted(code))
            if best is None or code < best:
                best = code
    return best


def _cell_choices(base, limit):
    """Multisets of capped holes: tuples of (triangle, hole word).  A cell
    may map with either orientation."""
    kinds = []
    for t, w in sorted(base.triangles.items()):
        kinds.append((t, inv(w)))
        kinds.append((t, w))
    for size in range(limit + 1):
        yield from itertools.combinations_with_replacement(kinds, size)


def _homology_trivial(word, alphabet):
    return all(word.count(x) == word.count(x.upper()) for x in alphabet)


def enumerate_surfaces(g, budget=None, base=None):
    """Every fatgraph surface bounding positive powers of g (with up to
    ``max_cell_discs`` cell discs when the base has triangles), one per
    combinatorial type, smallest first.  Only surfaces passing validate are
    yielded."""
    budget = budget or EnumerationBudget()
    base = base or BaseComplex.wedge()
    g = str(g) if isinstance(g, Word) else g
    g = free_reduce("" if g == "1" else g)
    while len(g) > 1 and g[0] == inv(g[-1]):
        g = g[1:-1]
    if not g or any(ch.lower() not in base.edges for ch in g):
        return
    if not _homology_trivial(base.image(g), "ab"):
        return
    start = time.monotonic()
    seen = set()
    letters = sorted(base.edges)
    n = 1
    while n * len(g) <= 2 * budget.max_handles:
        for parts in _partitions(n):
            for holes in _cell_choices(base, budget.max_cell_discs):
                words = [g * k for k in parts] + [w for _, w in holes]
                if sum(map(len, words)) > 2 * budget.max_handles:
                    continue
                if not _homology_trivial("".join(words), letters):
                    continue
                nb = len(parts)
                cells = {nb + i: t for i, (t, _) in enumerate(holes)}
                steps = [len(g)] * nb + [1] * len(holes)
                kinds = [("g", len(w)) for w in words[:nb]] + [("c", t, w) for t, w in holes]
                yield from _pairings(g, words, cells, steps, kinds, base, budget, start, seen)
        n += 1


def _pairings(g, words, cells, steps, kinds, base, budget, start, seen):
    occ = [(c, i) for c, w in enumerate(words) for i in range(len(w))]
    letters = sorted(base.edges)
    pos = [[o for o in occ if words[o[0]][o[1]] == x] for x in letters]
    neg = [[o for o in occ if words[o[0]][o[1]] == x.upper()] for x in letters]
    for perms in itertools.product(*[itertools.permutations(ns) for ns in neg]):
        if budget.time_budget is not None and time.monotonic() - start > budget.time_budget:
            return
        pairing = {}
        for ps, perm in zip(pos, perms):
            for o, q in zip(ps, perm):
                pairing[o] = q
                pairing[q] = o
        key = (tuple(kinds), _canonical(words, pairing, steps, kinds))
        if key in seen:
            continue
        seen.add(key)
        s = from_pairing(words, pairing, g, base, cells)
        discs = sum(1 for p in s.pieces.values() if p.kind == "vertex_disc")
        if discs > budget.max_vertex_discs:
            continue
        if validate(s).passed:
            yield s


def ratio(s):
    """-χ⁻/2n of a valid surface."""
    from fractions import Fraction
    rep = validate(s)
    return Fraction(-rep.chi_minus, 2 * rep.n)
