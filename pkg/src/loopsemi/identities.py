"""Identity predicates for left-loop varieties, with minimal witnesses.

Every predicate evaluates its defining equation over all tuples and, on
failure, reports the lexicographically least violating tuple, so diagnostics
are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .finloop import (FiniteLeftLoop, inner_mapping, is_automorphism,
                      left_translation, pseudo_automorphism_companions,
                      right_inverse_map)


def _first_fail(n_axes, pred):
    """Least tuple violating pred over {0..k-1}^len(n_axes), or None."""
    import itertools
    for tup in itertools.product(*(range(k) for k in n_axes)):
        if not pred(*tup):
            return tup
    return None


def check_right_loop(B: FiniteLeftLoop):
    n = B.n
    for y in range(n):
        col = sorted(B.table[x][y] for x in range(n))
        if col != list(range(n)):
            return False, (y,)
    return True, None


def check_lip(B: FiniteLeftLoop):
    """L_x^-1 = L_{x^rho}: x^rho . (x . z) = z for all x, z."""
    t = B.table
    rho = [B.left_div(x, 0) for x in range(B.n)]
    w = _first_fail((B.n, B.n), lambda x, z: t[rho[x]][t[x][z]] == z)
    return w is None, w


def check_lap(B: FiniteLeftLoop):
    """L_x L_x = L_{x.x}."""
    t = B.table
    w = _first_fail((B.n, B.n), lambda x, z: t[x][t[x][z]] == t[t[x][x]][z])
    return w is None, w


def check_bol(B: FiniteLeftLoop):
    """L_x L_y L_x = L_{x.(y.x)}."""
    t = B.table
    w = _first_fail((B.n, B.n, B.n),
                    lambda x, y, z: t[x][t[y][t[x][z]]] == t[t[x][t[y][x]]][z])
    return w is None, w


def check_w(B: FiniteLeftLoop):
    """The intermediate variety: L_x L_{y.y} L_x = L_{x.((y.y).x)}."""
    t = B.table
    w = _first_fail((B.n, B.n, B.n),
                    lambda x, y, z: t[x][t[t[y][y]][t[x][z]]] == t[t[x][t[t[y][y]][x]]][z])
    return w is None, w


def check_aip(B: FiniteLeftLoop):
    """(x.y)^rho = x^rho . y^rho."""
    t = B.table
    rho = [B.left_div(x, 0) for x in range(B.n)]
    w = _first_fail((B.n, B.n), lambda x, y: rho[t[x][y]] == t[rho[x]][rho[y]])
    return w is None, w


def check_bruck1(B: FiniteLeftLoop):
    """L_x L_y L_y L_x = L_{x.y} L_{x.y}."""
    t = B.table
    w = _first_fail(
        (B.n, B.n, B.n),
        lambda x, y, z: t[x][t[y][t[y][t[x][z]]]] == t[t[x][y]][t[t[x][y]][z]])
    return w is None, w


def check_bruck2(B: FiniteLeftLoop):
    """x.(y.(y.x)) = (x.y).(x.y), i.e. bruck1 applied to the identity."""
    t = B.table
    w = _first_fail((B.n, B.n),
                    lambda x, y: t[x][t[y][t[y][x]]] == t[t[x][y]][t[x][y]])
    return w is None, w


def check_lc(B: FiniteLeftLoop):
    """LC property: L_x L_x L_y = L_{x.(x.y)}."""
    t = B.table
    w = _first_fail((B.n, B.n, B.n),
                    lambda x, y, z: t[x][t[x][t[y][z]]] == t[t[x][t[x][y]]][z])
    return w is None, w


def check_lcc(B: FiniteLeftLoop):
    """Left conjugacy closed: L_x L_y L_x^-1 is itself a left translation."""
    t = B.table
    for x in range(B.n):
        for y in range(B.n):
            q = tuple(t[x][t[y][B.left_div(x, z)]] for z in range(B.n))
            if q != t[q[0]]:
                return False, (x, y)
    return True, None


def check_Al(B: FiniteLeftLoop):
    """A_l property: every left inner mapping is an automorphism."""
    seen = set()
    for x in range(B.n):
        for y in range(B.n):
            phi = inner_mapping(B, x, y)
            if phi in seen:
                continue
            seen.add(phi)
            if not is_automorphism(B, phi):
                return False, (x, y)
    return True, None


def check_pseudo_Al(B: FiniteLeftLoop):
    """Pseudo-A_l property: every left inner mapping is a pseudo-automorphism."""
    seen = set()
    for x in range(B.n):
        for y in range(B.n):
            phi = inner_mapping(B, x, y)
            if phi in seen:
                continue
            seen.add(phi)
            if not pseudo_automorphism_companions(B, phi):
                return False, (x, y)
    return True, None


def check_kikkawa(B: FiniteLeftLoop):
    """Kikkawa left loop: A_l + LIP + AIP."""
    for tag in ("Al", "LIP", "AIP"):
        ok, w = check_identity(B, tag)
        if not ok:
            return False, (tag, w)
    return True, None


def check_bruck_loop(B: FiniteLeftLoop):
    """Bruck loop: Bol with AIP (equivalently, with bruck1)."""
    ok, w = check_bol(B)
    if not ok:
        return False, ("Bol", w)
    ok, w = check_aip(B)
    if not ok:
        return False, ("AIP", w)
    return True, None


def check_b_loop(B: FiniteLeftLoop):
    """B-loop: Bruck loop whose squaring map x -> x.x is a bijection."""
    ok, w = check_bruck_loop(B)
    if not ok:
        return False, w
    squares = sorted(B.table[x][x] for x in range(B.n))
    if squares != list(range(B.n)):
        return False, ("squaring", tuple(squares))
    return True, None


def check_loop(B: FiniteLeftLoop):
    return check_right_loop(B)


_CHECKS = {
    "right_loop": check_right_loop,
    "loop": check_loop,
    "LIP": check_lip,
    "LAP": check_lap,
    "Bol": check_bol,
    "W": check_w,
    "AIP": check_aip,
    "Bruck1": check_bruck1,
    "Bruck2": check_bruck2,
    "LC": check_lc,
    "LCC": check_lcc,
    "Al": check_Al,
    "PsAl": check_pseudo_Al,
    "Kikkawa": check_kikkawa,
    "Bruck": check_bruck_loop,
    "Bloop": check_b_loop,
}

IDENTITY_TAGS = tuple(_CHECKS)


def check_identity(B: FiniteLeftLoop, which: str):
    """Evaluate one named identity; returns (holds, witness-or-None)."""
    try:
        fn = _CHECKS[which]
    except KeyError:
        raise ValueError(f"unknown identity tag {which!r}; known: {', '.join(_CHECKS)}")
    return fn(B)


@dataclass
class IdentityReport:
    flags: dict
    witnesses: dict = field(default_factory=dict)

    def __getitem__(self, tag: str) -> bool:
        return self.flags[tag]

    def holds(self, *tags) -> bool:
        return all(self.flags[t] for t in tags)


def identity_report(B: FiniteLeftLoop, tags=IDENTITY_TAGS) -> IdentityReport:
    flags, wit = {}, {}
    for tag in tags:
        ok, w = check_identity(B, tag)
        flags[tag] = ok
        if not ok:
            wit[tag] = w
    return IdentityReport(flags, wit)


def verify_aip_equivalences(B: FiniteLeftLoop) -> list:
    """Executable form of the AIP equivalence theorem; returns violated clauses.

    (1) bruck1 forces LIP <=> AIP; (2) Kikkawa forces bruck1; (3) LAP and
    bruck2 force bruck1 <=> W; (4) Bol forces AIP <=> bruck1.  Expected empty
    on every left loop.
    """
    r = identity_report(B, ("LIP", "LAP", "Bol", "W", "AIP", "Bruck1", "Bruck2", "Kikkawa"))
    out = []
    if r["Bruck1"] and r["LIP"] != r["AIP"]:
        out.append("bruck1-lip-aip")
    if r["Kikkawa"] and not r["Bruck1"]:
        out.append("kikkawa-bruck1")
    if r["LAP"] and r["Bruck2"] and r["Bruck1"] != r["W"]:
        out.append("lap-bruck2-w")
    if r["Bol"] and r["AIP"] != r["Bruck1"]:
        out.append("bol-aip-bruck1")
    return out
