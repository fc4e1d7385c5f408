"""King-and-rook versus king, black to move.

Positions use the canonical encoding of the standard KRK depth-of-win
dataset: the white king sits in the a1-d1-d4 triangle
(a1 b1 c1 d1 b2 c2 d2 c3 d3 d4).  When the white king is on the a1-h8
diagonal the black king must satisfy rank <= file, and when the black king is
on the diagonal too the rook must satisfy rank <= file.  Under this
convention there are 28,056 legal positions, 27 of them checkmate.
"""
from __future__ import annotations

import csv
import functools
import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional

from ..hypothesis import Background, ExternalTheory

FILES = "abcdefgh"
CANONICAL_TOTAL = 28056
CHECKMATE_TOTAL = 27

_STEPS = [(df, dr) for df in (-1, 0, 1) for dr in (-1, 0, 1) if (df, dr) != (0, 0)]


class IllegalPositionError(ValueError):
    pass


class KrkPosition(NamedTuple):
    """Piece coordinates with files and ranks both stored as 1..8."""

    wkf: int
    wkr: int
    wrf: int
    wrr: int
    bkf: int
    bkr: int

    @property
    def wk(self) -> tuple[int, int]:
        return (self.wkf, self.wkr)

    @property
    def wr(self) -> tuple[int, int]:
        return (self.wrf, self.wrr)

    @property
    def bk(self) -> tuple[int, int]:
        return (self.bkf, self.bkr)

    def ground(self) -> tuple:
        """Ground clause arguments: files as letters, ranks as integers."""
        return (
            FILES[self.wkf - 1], self.wkr,
            FILES[self.wrf - 1], self.wrr,
            FILES[self.bkf - 1], self.bkr,
        )

    def encode(self) -> str:
        return "(" + ",".join(str(v) for v in self.ground()) + ")"

    def __str__(self) -> str:
        return self.encode()

    @classmethod
    def from_ground(cls, wkf, wkr, wrf, wrr, bkf, bkr) -> "KrkPosition":
        def file(v):
            return FILES.index(v) + 1 if isinstance(v, str) else int(v)

        return cls(file(wkf), int(wkr), file(wrf), int(wrr), file(bkf), int(bkr))


_TUPLE = re.compile(r"^\(\s*" + r"\s*,\s*".join([r"([a-h])", r"([1-8])"] * 3) + r"\s*\)$")


def decode(text: str) -> Optional[KrkPosition]:
    """Parse ``"(c,1,a,5,a,1)"``; anything else decodes to ``None``."""
    m = _TUPLE.match(text.strip())
    if m is None:
        return None
    return KrkPosition.from_ground(*m.groups())


def _adjacent(a, b) -> bool:
    return max(abs(a[0] - b[0]), abs(a[1] - b[1])) <= 1


def _on_board(sq) -> bool:
    return 1 <= sq[0] <= 8 and 1 <= sq[1] <= 8


def is_legal_btm(p: KrkPosition) -> bool:
    """Distinct squares and non-adjacent kings (white may not be in check)."""
    if any(not 1 <= v <= 8 for v in p):
        return False
    if len({p.wk, p.wr, p.bk}) < 3:
        return False
    return not _adjacent(p.wk, p.bk)


def rook_attacks(rook, target, blockers: Iterable = ()) -> bool:
    if rook == target or (rook[0] != target[0] and rook[1] != target[1]):
        return False
    df = (target[0] > rook[0]) - (target[0] < rook[0])
    dr = (target[1] > rook[1]) - (target[1] < rook[1])
    blockers = set(blockers)
    sq = (rook[0] + df, rook[1] + dr)
    while sq != target:
        if sq in blockers:
            return False
        sq = (sq[0] + df, sq[1] + dr)
    return True


def in_check(p: KrkPosition) -> bool:
    return rook_attacks(p.wr, p.bk, [p.wk])


def black_moves(p: KrkPosition) -> list[tuple[int, int]]:
    """Legal destination squares of the black king."""
    moves = []
    for df, dr in _STEPS:
        to = (p.bkf + df, p.bkr + dr)
        if not _on_board(to) or _adjacent(to, p.wk):
            continue
        if to == p.wr:
            # capture; the rook is defended only by the white king
            moves.append(to)
            continue
        # the black king leaves its square, so it no longer blocks the rook
        if not rook_attacks(p.wr, to, [p.wk]):
            moves.append(to)
    return moves


def is_checkmate(p: KrkPosition) -> bool:
    if not is_legal_btm(p):
        raise IllegalPositionError(str(p))
    return in_check(p) and not black_moves(p)


def is_canonical(p: KrkPosition) -> bool:
    """Whether ``p`` uses the symmetry-reduced coordinates of the dataset."""
    wkf, wkr = p.wk
    if not (wkf <= 4 and wkr <= wkf):
        return False
    if wkf == wkr:
        if p.bkr > p.bkf:
            return False
        if p.bkf == p.bkr and p.wrr > p.wrf:
            return False
    return True


_SYMMETRIES = [
    lambda f, r: (f, r),
    lambda f, r: (9 - f, r),
    lambda f, r: (f, 9 - r),
    lambda f, r: (9 - f, 9 - r),
    lambda f, r: (r, f),
    lambda f, r: (9 - r, f),
    lambda f, r: (r, 9 - f),
    lambda f, r: (9 - r, 9 - f),
]


def canonicalize(p: KrkPosition) -> KrkPosition:
    """Image of ``p`` under the board symmetry that lands in canonical form."""
    for sym in _SYMMETRIES:
        q = KrkPosition(*sym(*p.wk), *sym(*p.wr), *sym(*p.bk))
        if is_canonical(q):
            return q
    raise AssertionError(f"no canonical image for {p}")  # pragma: no cover


def _triangle():
    return [(f, r) for f in range(1, 5) for r in range(1, f + 1)]


_ALL_SQUARES = [(f, r) for f in range(1, 9) for r in range(1, 9)]


@functools.lru_cache(maxsize=None)
def enumerate_canonical() -> tuple[KrkPosition, ...]:
    out = []
    for wk in _triangle():
        for wr in _ALL_SQUARES:
            for bk in _ALL_SQUARES:
                p = KrkPosition(*wk, *wr, *bk)
                if is_legal_btm(p) and is_canonical(p):
                    out.append(p)
    return tuple(out)


def checkmates() -> list[KrkPosition]:
    return [p for p in enumerate_canonical() if is_checkmate(p)]


# ---------------------------------------------------------------- theory
#
# depth_of_win(0, c, 2, a, A, a, 2) :- not(ab3(0, c, 2, a, A, a, 2)).
# depth_of_win(0, c, A, a, B, a, 1) :- not(ab2(0, c, A, a, B, a, 1)).
# depth_of_win(0, A, 3, B, 1, A, 1) :- not(ab1(0, A, 3, B, 1, A, 1)).
# ab1(0, A, 3, B, 1, A, 1) :- diff(A, B, d1).
# ab2(0, c, A, a, 2, a, 1).
# ab3(0, c, 2, a, A, a, 2) :- diff(2, A, d1).
#
# Upper-case strings are variables; "not" is negation as failure.

THEORY_TEXT = """\
Sigma((WKF,WKR,WRF,WRR,BKF,BKR)) :- depth_of_win(0,WKF,WKR,WRF,WRR,BKF,BKR).
depth_of_win(0, c, 2, a, A, a, 2) :- not(ab3(0, c, 2, a, A, a, 2)).
depth_of_win(0, c, A, a, B, a, 1) :- not(ab2(0, c, A, a, B, a, 1)).
depth_of_win(0, A, 3, B, 1, A, 1) :- not(ab1(0, A, 3, B, 1, A, 1)).
ab1(0, A, 3, B, 1, A, 1) :- diff(A, B, d1).
ab2(0, c, A, a, 2, a, 1).
ab3(0, c, 2, a, A, a, 2) :- diff(2, A, d1)."""


def _is_var(term) -> bool:
    return isinstance(term, str) and term[:1].isupper()


def _unify(pattern: tuple, ground: tuple) -> Optional[dict]:
    binding: dict = {}
    for t, g in zip(pattern, ground):
        if _is_var(t):
            if binding.setdefault(t, g) != g:
                return None
        elif t != g:
            return None
    return binding


def _ordinal(v) -> int:
    return FILES.index(v) + 1 if isinstance(v, str) else int(v)


def diff(x, y, d: str) -> bool:
    """``diff(X, Y, dN)``: files (a..h as 1..8) or ranks exactly N apart."""
    return abs(_ordinal(x) - _ordinal(y)) == int(d[1:])


@dataclass(frozen=True)
class _Clause:
    head: tuple
    body: tuple = ()  # conjunction of ("diff", X, Y, dN) goals


_AB = {
    "ab1": [_Clause((0, "A", 3, "B", 1, "A", 1), (("diff", "A", "B", "d1"),))],
    "ab2": [_Clause((0, "c", "A", "a", 2, "a", 1))],
    "ab3": [_Clause((0, "c", 2, "a", "A", "a", 2), (("diff", 2, "A", "d1"),))],
}

_DEPTH_OF_WIN = [
    ((0, "c", 2, "a", "A", "a", 2), "ab3"),
    ((0, "c", "A", "a", "B", "a", 1), "ab2"),
    ((0, "A", 3, "B", 1, "A", 1), "ab1"),
]


def _provable(pred: str, args: tuple) -> bool:
    for clause in _AB[pred]:
        binding = _unify(clause.head, args)
        if binding is None:
            continue
        if all(diff(*(binding.get(t, t) for t in goal[1:])) for goal in clause.body):
            return True
    return False


def eval_theory(p: KrkPosition) -> bool:
    """Evaluate the learned depth-0 theory on any 6-tuple, legal or not."""
    args = (0,) + tuple(p.ground())
    for head, ab in _DEPTH_OF_WIN:
        binding = _unify(head, args)
        if binding is None:
            continue
        # the ab literal shares the head's arguments
        if not _provable(ab, args):
            return True
    return False


def _theory_predicate(x) -> bool:
    return isinstance(x, KrkPosition) and eval_theory(x)


KRK_THEORY = ExternalTheory("krk-wfw", _theory_predicate, THEORY_TEXT)


@dataclass(frozen=True)
class TheoryReport:
    scope: str
    legal_satisfiers: tuple[KrkPosition, ...]
    illegal_satisfiers: tuple[KrkPosition, ...]
    noncanonical_satisfiers: tuple[KrkPosition, ...]

    @property
    def positions(self) -> tuple[KrkPosition, ...]:
        return self.legal_satisfiers + self.illegal_satisfiers + self.noncanonical_satisfiers


def _coordinate_space(scope: str):
    wk_squares = _triangle() if scope == "canonical" else _ALL_SQUARES
    for wk in wk_squares:
        for wr in _ALL_SQUARES:
            for bk in _ALL_SQUARES:
                yield KrkPosition(*wk, *wr, *bk)


def theory_extension_report(scope: str = "canonical", theory=None) -> TheoryReport:
    """Cross-tabulate theory satisfiers against legality and canonical form.

    ``scope="canonical"`` covers every tuple with the white king in the
    canonical triangle (the rook and black king anywhere, including illegal
    placements); ``scope="full"`` covers all 64**3 tuples.
    """
    if scope not in ("canonical", "full"):
        raise ValueError(f"unknown scope {scope!r}")
    theory = theory or eval_theory
    legal, illegal, noncanon = [], [], []
    for p in _coordinate_space(scope):
        if not theory(p):
            continue
        if not is_legal_btm(p):
            illegal.append(p)
        elif is_canonical(p):
            legal.append(p)
        else:
            noncanon.append(p)
    return TheoryReport(scope, tuple(legal), tuple(illegal), tuple(noncanon))


def background() -> Background:
    """Background for generation runs over the canonical position space."""
    return Background(
        factors={},
        decode=decode,
        encode=lambda p: p.encode(),
        universe=tuple(p.encode() for p in enumerate_canonical()),
    )


CSV_COLUMNS = ("wkf", "wkr", "wrf", "wrr", "bkf", "bkr", "legal", "wfw", "theory")


def export_csv(path, positions: Optional[Iterable[KrkPosition]] = None) -> int:
    rows = 0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for p in positions if positions is not None else enumerate_canonical():
            legal = is_legal_btm(p)
            writer.writerow(
                list(p.ground())
                + [int(legal), int(legal and is_checkmate(p)), int(eval_theory(p))]
            )
            rows += 1
    return rows


def verify_counts(checkmate_oracle=is_checkmate, theory=eval_theory) -> dict:
    """Counts printed by ``sng krk verify``; oracles are injectable for mutation tests."""
    positions = enumerate_canonical()
    wfw = {p for p in positions if checkmate_oracle(p)}
    report = theory_extension_report(theory=theory)
    legal_set = set(report.legal_satisfiers)
    return {
        "total": len(positions),
        "wfw": len(wfw),
        "theory_legal": len(legal_set),
        "theory_illegal": len(report.illegal_satisfiers),
        "theory_noncanonical": len(report.noncanonical_satisfiers),
        "theory_matches_wfw": legal_set == wfw,
    }


def verification_passed(counts: dict) -> bool:
    return (
        counts["total"] == CANONICAL_TOTAL
        and counts["wfw"] == CHECKMATE_TOTAL
        and counts["theory_legal"] == CHECKMATE_TOTAL
        and counts["theory_matches_wfw"]
    )
