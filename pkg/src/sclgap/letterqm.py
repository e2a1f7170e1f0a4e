"""Letter-quasimorphisms: maps into alternating words of F(a,b).

A :class:`LetterQM` evaluates on words over its own domain alphabet.  The
built-in rule is sign compression on F(a,b); table-backed maps cover
finite experiments and arbitrary callables cover anything else.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import SclError
from .words import (AB, DEGENERATE, Word, alternates, free_reduce, inv,
                    power, reduced_words, split_triangle)


def compress(s):
    """Sign compression on a raw reduced string over {a, b}."""
    out = []
    for ch in s:
        if not out or out[-1].lower() != ch.lower():
            out.append(ch)
        # a reduced word never has x followed by X, so a repeated generator
        # inside a syllable always repeats the same sign
    return "".join(out)


def sign_compress(w):
    if not isinstance(w, Word):
        w = Word(w)
    if w.alphabet != AB:
        raise SclError("ALPHABET_MISMATCH", "sign compression lives on F(a,b)")
    out = Word()
    out.s = compress(w.s)
    return out


class LetterQM:
    """A map from a free group (given by its alphabet) to alternating words."""

    def __init__(self, rule: Callable[[str], Optional[str]], alphabet=AB,
                 name="custom", table=None):
        self._rule = rule
        self.alphabet = "".join(sorted(set(alphabet)))
        self.name = name
        self.table = table
        self._cache = {}

    @classmethod
    def sign(cls):
        return cls(compress, AB, name="sign")

    @classmethod
    def from_function(cls, fn, alphabet, name="custom"):
        return cls(fn, alphabet, name=name)

    @classmethod
    def from_table(cls, entries, name="table"):
        """``entries`` maps element strings to image strings.

        Every element must come with its inverse.
        """
        table = {}
        gens = set()
        for g, img in entries.items():
            g = free_reduce("" if g == "1" else g)
            img = "" if img == "1" else img
            if free_reduce(img) != img or not alternates(img):
                raise SclError("PARSE_ERROR",
                               "image %r is not a reduced alternating word" % img,
                               locus=g or "1")
            for ch in img:
                if ch.lower() not in AB:
                    raise SclError("ALPHABET_MISMATCH", "image %r" % img,
                                   locus=g or "1")
            table[g] = img
            gens.update(ch.lower() for ch in g)
        for g in table:
            if inv(g) not in table:
                raise SclError("PARSE_ERROR", "missing inverse entry",
                               locus=inv(g) or "1")
        alphabet = "".join(sorted(gens)) or AB
        return cls(table.get, alphabet, name=name, table=table)

    @classmethod
    def load_table(cls, path):
        entries = {}
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) != 2:
                    raise SclError("PARSE_ERROR", "expected '<element> <image>'",
                                   locus="%s:%d" % (path, lineno))
                if parts[0] in entries:
                    raise SclError("PARSE_ERROR", "duplicate entry",
                                   locus="%s:%d" % (path, lineno))
                entries[parts[0]] = parts[1]
        return cls.from_table(entries, name=str(path))

    def image(self, s):
        """Φ on a raw reduced string; raises PHI_UNEVALUABLE outside the domain."""
        try:
            return self._cache[s]
        except KeyError:
            pass
        out = self._rule(s)
        if out is None:
            raise SclError("PHI_UNEVALUABLE", "no image for element",
                           locus=s or "1")
        self._cache[s] = out
        return out

    def __call__(self, g):
        if isinstance(g, Word):
            if g.alphabet != self.alphabet:
                raise SclError("ALPHABET_MISMATCH",
                               "%r vs %r" % (g.alphabet, self.alphabet))
            g = g.s
        out = Word()
        out.s = self.image(free_reduce(g))
        return out


# verification ---------------------------------------------------------------

@dataclass
class Violation:
    kind: str          # "inverse" or "triangle"
    g: str
    h: Optional[str]
    detail: str

    def __str__(self):
        if self.kind == "inverse":
            return "inverse condition fails at g=%s: %s" % (self.g or "1", self.detail)
        return "triangle condition fails at (g,h)=(%s,%s): %s" % (
            self.g or "1", self.h or "1", self.detail)


@dataclass
class VerificationReport:
    radius: int
    elements: int = 0
    pairs: int = 0
    degenerate: int = 0
    degenerate_with_trivial_leg: int = 0
    nondegenerate: int = 0
    violations: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.violations


def verify_axioms(phi, radius, max_violations=None):
    """Check both letter-quasimorphism conditions on the ball of given radius.

    Pairs (g, h) range over the ball; Φ(gh) must be evaluable as well, so
    table maps need entries up to twice the radius.
    """
    if radius < 0:
        raise SclError("DOMAIN_NOT_ENUMERABLE", "negative radius")
    ball = reduced_words(phi.alphabet, radius)
    rep = VerificationReport(radius, elements=len(ball))

    def img(s):
        try:
            return phi.image(s)
        except SclError as e:
            raise SclError("DOMAIN_NOT_ENUMERABLE",
                           "map undefined at %s" % (s or "1"), locus=s or "1") from e

    images = {g: img(g) for g in ball}
    for g in ball:
        a, b = images[g], img(inv(g))
        if b != inv(a):
            rep.violations.append(Violation(
                "inverse", g, None,
                "Φ(g)=%s, Φ(g⁻¹)=%s" % (a or "1", b or "1")))
    for g in ball:
        p = images[g]
        for h in ball:
            rep.pairs += 1
            r = inv(img(free_reduce(g + h)))
            got = split_triangle(p, images[h], r)
            if got is None:
                rep.violations.append(Violation(
                    "triangle", g, h, "no splitting of (%s, %s, %s)" % (
                        p or "1", images[h] or "1", r or "1")))
                if max_violations and len(rep.violations) >= max_violations:
                    return rep
            elif got[0] == DEGENERATE:
                rep.degenerate += 1
                if 0 in got[1:]:
                    rep.degenerate_with_trivial_leg += 1
            else:
                rep.nondegenerate += 1
    return rep


# stable images ----------------------------------------------------------------

@dataclass(frozen=True)
class StableImage:
    g: Word
    phi_g: Word
    ell: int
    letters: tuple
    swapped: bool

    @property
    def a_role(self):
        """Generator playing the role of ``a`` after normalization."""
        return "b" if self.swapped else "a"

    def index(self, position):
        """Index in 1..ell of the letter at a position of Φ(g)^k."""
        return (position % (2 * self.ell)) // 2 + 1


def stabilize(phi, g, n_max=4):
    if not isinstance(g, Word):
        g = Word(g, phi.alphabet)
    if g.is_empty():
        raise SclError("TRIVIAL_IMAGE", "g is the identity")
    base = phi.image(g.s)
    if not base:
        raise SclError("TRIVIAL_IMAGE", "Φ(g) is empty", locus=str(g))
    for n in range(-n_max, n_max + 1):
        if n in (0, 1):
            continue
        got = phi.image(power(g.s, n))
        want = power(base, n)
        if got != want:
            raise SclError("POWER_INCOMPATIBLE",
                           "Φ(g^%d)=%s but Φ(g)^%d=%s" % (n, got or "1", n, want or "1"),
                           locus="n=%d" % n)
    if len(base) % 2 or not alternates(base + base):
        raise SclError("INVALID_STABLE_IMAGE",
                       "Φ(g)=%s is not cyclically alternating of even length" % base)
    phi_g = Word(base)
    return StableImage(g, phi_g, len(base) // 2, phi_g.letters,
                       base[0].lower() == "b")
