"""Error type shared by every module.

Each failure carries a stable code (used by tests and the CLI) and an
optional locus pointing at the offending object.
"""

CODES = (
    "ALPHABET_MISMATCH",
    "NO_DECOMPOSITION",
    "DOMAIN_NOT_ENUMERABLE",
    "TRIVIAL_IMAGE",
    "POWER_INCOMPATIBLE",
    "INVALID_STABLE_IMAGE",
    "UNKNOWN_FACE",
    "UNKNOWN_VERTEX",
    "MALFORMED_COMPLEX",
    "INVALID_SUBSURFACE",
    "MALFORMED_GLUING",
    "PHI_UNEVALUABLE",
    "NONPOSITIVE_POWER",
    "NONTERMINATION_GUARD",
    "UNINDEXED_ARC",
    "CLAIM_VIOLATION",
    "WITNESS_NOT_FOUND",
    "PARSE_ERROR",
)


class SclError(Exception):
    def __init__(self, code, message="", locus=None):
        if code not in CODES:
            raise ValueError("unknown error code %r" % code)
        self.code = code
        self.message = message
        self.locus = locus
        text = code
        if message:
            text += ": " + message
        if locus is not None:
            text += " [at %s]" % (locus,)
        super().__init__(text)
