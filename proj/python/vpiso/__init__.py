"""Profinite isomorphism testing for virtually polycyclic groups given by
rational matrices.

Instances and systems travel as text (`vpiso v1` and `dio v1`); reports come
back as dictionaries mirroring the CLI JSON. Matrices are lists of rows whose
entries are anything `fractions.Fraction` accepts.
"""

import json
from fractions import Fraction

from . import _core
from ._core import InstanceError, ParseError

__all__ = [
    "InstanceError",
    "ParseError",
    "parse_instance",
    "fingerprint",
    "build_system",
    "local_solvability",
    "solutions_mod",
    "residuals_vanish",
    "decide",
    "smith_invariants",
    "unipotent_log",
    "nilpotent_exp",
    "bch",
]


def _text(m):
    return [[str(Fraction(x)) for x in row] for row in m]


def _fractions(m):
    return [[Fraction(x) for x in row] for row in m]


def parse_instance(text):
    return json.loads(_core.parse_instance(text))


def fingerprint(text, side="G", moduli=(2, 3, 4, 5, 7, 8)):
    """Finite lattice quotient invariants; every modulus must be admissible."""
    return json.loads(_core.fingerprint(text, side, list(moduli)))


def build_system(text, theta_index=0, height=1, lie=False, literal=False):
    """F(theta) for the theta at `theta_index`, or the Lie subsystem, as dio v1 text."""
    return _core.build_system(text, theta_index, height, lie, literal)


def local_solvability(dio, primes=(2, 3, 5, 7), max_level=6, max_nodes=10**7, max_solutions=1 << 14):
    return json.loads(_core.local_solvability(dio, list(primes), max_level, max_nodes, max_solutions))


def solutions_mod(dio, p, k, max_nodes=10**7, max_solutions=1 << 16):
    """Returns (points, truncated, nodes); points are residues mod p**k in roster order."""
    points, truncated, nodes = _core.solutions_mod(dio, p, k, max_nodes, max_solutions)
    return [tuple(x) for x in points], truncated, nodes


def residuals_vanish(dio, witness):
    return _core.residuals_vanish(dio, [str(int(x)) for x in witness])


def decide(text, height=1, primes=(), slices=64, max_level=4, max_nodes=2 * 10**6,
           max_theta=256, max_modulus=16, lie_first=True):
    """Empty `primes` uses primes <= 97 plus the primes dividing each system's constants."""
    return json.loads(_core.decide(text, height, list(primes), slices, max_level, max_nodes,
                                   max_theta, max_modulus, lie_first))


def smith_invariants(rows, width=None):
    """(free_rank, invariant factors > 1) of Z^width modulo the row span."""
    rows = [list(map(int, r)) for r in rows]
    if width is None:
        width = len(rows[0]) if rows else 0
    free_rank, factors = _core.smith_invariants(rows, width)
    return free_rank, [int(f) for f in factors]


def unipotent_log(m):
    return _fractions(_core.unipotent_log(_text(m)))


def nilpotent_exp(m):
    return _fractions(_core.nilpotent_exp(_text(m)))


def bch(x, y):
    return _fractions(_core.bch(_text(x), _text(y)))
