"""Free-group words and the triangle splitting used by letter-quasimorphisms.

Words are stored as compact strings: a lowercase character is a generator,
the matching uppercase character its inverse.  The empty word prints as
``1``.  All hot paths work on raw strings; :class:`Word` is the public,
alphabet-aware wrapper.
"""

from __future__ import annotations

from typing import NamedTuple, Optional

from .errors import SclError

AB = "ab"


class Letter(NamedTuple):
    generator: str
    sign: int

    def __str__(self):
        return self.generator if self.sign > 0 else self.generator.upper()

    @classmethod
    def parse(cls, ch):
        if ch.islower():
            return cls(ch, 1)
        return cls(ch.lower(), -1)

    def inverse(self):
        return Letter(self.generator, -self.sign)


# string level helpers ------------------------------------------------------

def inv(s):
    return s[::-1].swapcase()


def free_reduce(s):
    out = []
    for ch in s:
        if out and out[-1] == ch.swapcase():
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def alternates(s):
    for x, y in zip(s, s[1:]):
        if x.lower() == y.lower():
            return False
    return True


def cyclically_reduced(s):
    return len(s) < 2 or s[0] != s[-1].swapcase()


def power(s, n):
    if n < 0:
        s, n = inv(s), -n
    return free_reduce(s * n)


class Word:
    """A freely reduced word over a finite alphabet of generators."""

    __slots__ = ("s", "alphabet")

    def __init__(self, letters="", alphabet=AB):
        if not isinstance(letters, str):
            letters = "".join(str(x) for x in letters)
        if letters == "1":
            letters = ""
        alphabet = "".join(sorted(set(alphabet)))
        for ch in letters:
            if ch.lower() not in alphabet or not ch.isalpha():
                raise SclError("ALPHABET_MISMATCH",
                               "letter %r not in alphabet %r" % (ch, alphabet))
        self.s = free_reduce(letters)
        self.alphabet = alphabet

    @classmethod
    def parse(cls, text, alphabet=AB):
        return cls(text.strip(), alphabet)

    @property
    def letters(self):
        return tuple(Letter.parse(ch) for ch in self.s)

    def __len__(self):
        return len(self.s)

    def __iter__(self):
        return iter(self.letters)

    def __str__(self):
        return self.s or "1"

    def __repr__(self):
        return "Word(%r)" % str(self)

    def __eq__(self, other):
        if isinstance(other, Word):
            return self.s == other.s and self.alphabet == other.alphabet
        if isinstance(other, str):
            return self.s == free_reduce("" if other == "1" else other)
        return NotImplemented

    def __hash__(self):
        return hash((self.s, self.alphabet))

    def __mul__(self, other):
        return concat(self, other)

    def is_empty(self):
        return not self.s


def _same_alphabet(*ws):
    alpha = ws[0].alphabet
    for w in ws[1:]:
        if w.alphabet != alpha:
            raise SclError("ALPHABET_MISMATCH",
                           "%r vs %r" % (alpha, w.alphabet))
    return alpha


def reduce(letters, alphabet=AB):
    """Freely reduce a sequence of letters (or a string)."""
    return Word(letters, alphabet)


def concat(w1, w2):
    alpha = _same_alphabet(w1, w2)
    out = Word("", alpha)
    out.s = free_reduce(w1.s + w2.s)
    return out


def invert(w):
    out = Word("", w.alphabet)
    out.s = inv(w.s)
    return out


def is_alternating(w):
    if w.alphabet != AB:
        raise SclError("ALPHABET_MISMATCH",
                       "alternation is defined over {a,b}, got %r" % w.alphabet)
    return alternates(w.s)


# triangle splitting ------------------------------------------------------------

DEGENERATE = "DEGENERATE"
NONDEGENERATE = "NONDEGENERATE"


class TriangleDecomposition(NamedTuple):
    kind: str
    u: Word
    v: Word
    w: Word
    x1: Optional[Letter]
    x2: Optional[Letter]
    x3: Optional[Letter]

    def sides(self):
        """Recompose (p, q, r) from the pieces."""
        xs = [str(x) if x is not None else "" for x in (self.x1, self.x2, self.x3)]
        u, v, w = self.u.s, self.v.s, self.w.s
        return (inv(u) + xs[0] + v, inv(v) + xs[1] + w, inv(w) + xs[2] + u)

    @property
    def legs(self):
        return (len(self.u), len(self.v), len(self.w))


def split_triangle(p, q, r):
    """String version of :func:`triangle_decompose`.

    Returns ``(kind, lu, lv, lw)`` or None.  The leg lengths are forced by
    the word lengths (parity picks the case), so at most one candidate is
    ever checked.
    """
    P, Q, R = len(p), len(q), len(r)
    odd = (P + Q + R) % 2
    lv = (P + Q - R - odd) // 2
    lw = (Q + R - P - odd) // 2
    lu = (R + P - Q - odd) // 2
    if lu < 0 or lv < 0 or lw < 0:
        return None
    if p[:lu] != inv(r[R - lu:]) or q[:lv] != inv(p[P - lv:]) \
            or r[:lw] != inv(q[Q - lw:]):
        return None
    if not odd:
        if lu and lv and lw:
            return None
        return (DEGENERATE, lu, lv, lw)
    x1, x2, x3 = p[lu], q[lv], r[lw]
    if not (x1.lower() == x2.lower() == x3.lower()):
        return None
    # product of three letters of one generator is a single letter iff
    # the signs do not all agree
    if x1.islower() == x2.islower() == x3.islower():
        return None
    return (NONDEGENERATE, lu, lv, lw)


def triangle_decompose(p, q, r):
    ws = [x if isinstance(x, Word) else Word(x) for x in (p, q, r)]
    _same_alphabet(*ws)
    for x in ws:
        if not is_alternating(x):
            raise SclError("NO_DECOMPOSITION", "%s is not alternating" % x)
    p, q, r = (x.s for x in ws)
    got = split_triangle(p, q, r)
    if got is None:
        raise SclError("NO_DECOMPOSITION",
                       "(%s, %s, %s)" % (p or "1", q or "1", r or "1"))
    kind, lu, lv, lw = got
    u = Word(r[len(r) - lu:])
    v = Word(p[len(p) - lv:])
    w = Word(q[len(q) - lw:])
    if kind == DEGENERATE:
        return TriangleDecomposition(kind, u, v, w, None, None, None)
    return TriangleDecomposition(kind, u, v, w, Letter.parse(p[lu]),
                                 Letter.parse(q[lv]), Letter.parse(r[lw]))


def reduced_words(alphabet, max_len):
    """All reduced words of length <= max_len, shortest first."""
    letters = []
    for g in alphabet:
        letters += [g, g.upper()]
    layer = [""]
    out = [""]
    for _ in range(max_len):
        nxt = []
        for s in layer:
            for ch in letters:
                if s and s[-1] == ch.swapcase():
                    continue
                nxt.append(s + ch)
        out += nxt
        layer = nxt
    return out


def alternating_words(max_len):
    return [s for s in reduced_words(AB, max_len) if alternates(s)]
