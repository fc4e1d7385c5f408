import csv
import itertools

import pytest

from sngen.domains import krk
from sngen.domains.krk import KrkPosition

SQUARES = [(f, r) for f in range(1, 9) for r in range(1, 9)]


def naive_mate(wk, wr, bk):
    """Independent checkmate test: build the set of squares white controls."""

    def ray_hits(target, occupied):
        hits = set()
        for df, dr in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            f, r = wr
            while True:
                f, r = f + df, r + dr
                if not (1 <= f <= 8 and 1 <= r <= 8):
                    break
                hits.add((f, r))
                if (f, r) in occupied:
                    break
        return target in hits

    king_zone = {(wk[0] + a, wk[1] + b) for a in (-1, 0, 1) for b in (-1, 0, 1)}
    if not ray_hits(bk, {wk, bk}):
        return False
    for a in (-1, 0, 1):
        for b in (-1, 0, 1):
            to = (bk[0] + a, bk[1] + b)
            if (a, b) == (0, 0) or not (1 <= to[0] <= 8 and 1 <= to[1] <= 8) or to in king_zone:
                continue
            if to == wr or not ray_hits(to, {wk}):
                return False
    return True


def legal(wk, wr, bk):
    return len({wk, wr, bk}) == 3 and max(abs(wk[0] - bk[0]), abs(wk[1] - bk[1])) > 1


def transforms(sq):
    f, r = sq
    out = []
    for swap in (False, True):
        a, b = (r, f) if swap else (f, r)
        for ff in (False, True):
            for fr in (False, True):
                out.append((9 - a if ff else a, 9 - b if fr else b))
    return out


@pytest.fixture(scope="module")
def orbit_reps():
    """Symmetry classes of legal positions, counted without the library."""
    reps = set()
    for wk, wr, bk in itertools.product(SQUARES, repeat=3):
        if legal(wk, wr, bk):
            images = zip(transforms(wk), transforms(wr), transforms(bk))
            reps.add(min(images))
    return reps


def test_enumeration_size_matches_orbit_count(orbit_reps):
    assert len(krk.enumerate_canonical()) == krk.CANONICAL_TOTAL == 28056
    assert len(orbit_reps) == 28056


def test_enumeration_picks_one_per_orbit(orbit_reps):
    seen = set()
    for p in krk.enumerate_canonical():
        rep = min(zip(transforms(p.wk), transforms(p.wr), transforms(p.bk)))
        assert rep not in seen
        seen.add(rep)
    assert seen == orbit_reps


def test_checkmates_match_naive_oracle():
    mates = {p for p in krk.enumerate_canonical() if naive_mate(p.wk, p.wr, p.bk)}
    assert mates == set(krk.checkmates())
    assert len(mates) == 27


def test_known_mate_and_non_mate():
    assert krk.is_checkmate(krk.decode("(c,1,a,5,a,1)"))
    assert krk.is_checkmate(krk.decode("(c,2,a,5,a,1)"))
    assert not krk.is_checkmate(krk.decode("(d,3,a,5,a,1)"))  # b1 and b2 are free
    assert not krk.is_checkmate(krk.decode("(c,3,b,2,a,1)"))  # rook captured
    with pytest.raises(krk.IllegalPositionError):
        krk.is_checkmate(krk.decode("(a,1,a,1,c,3)"))


def test_codec_round_trip_and_rejects():
    p = KrkPosition(3, 1, 1, 5, 1, 1)
    assert p.encode() == "(c,1,a,5,a,1)"
    assert krk.decode(p.encode()) == p
    assert krk.decode("( c , 1 , a , 5 , a , 1 )") == p
    for bad in ["(i,1,a,5,a,1)", "(c,9,a,5,a,1)", "c,1,a,5,a,1", "", "(c,1,a,5,a)"]:
        assert krk.decode(bad) is None


def test_canonicalize_is_idempotent_and_in_orbit():
    for p in list(krk.enumerate_canonical())[::997]:
        assert krk.is_canonical(p)
        assert krk.canonicalize(p) == p
    q = KrkPosition(8, 8, 1, 1, 6, 6)
    c = krk.canonicalize(q)
    assert krk.is_canonical(c)
    assert min(zip(transforms(q.wk), transforms(q.wr), transforms(q.bk))) == min(
        zip(transforms(c.wk), transforms(c.wr), transforms(c.bk))
    )


def test_diff_is_ordinal_distance_one():
    assert krk.diff("a", "b", "d1") and krk.diff("b", "a", "d1")
    assert not krk.diff("a", "c", "d1")
    assert krk.diff(3, 4, "d1") and not krk.diff(4, 4, "d1")


def test_theory_legal_satisfiers_are_the_mates():
    report = krk.theory_extension_report("canonical")
    assert set(report.legal_satisfiers) == set(krk.checkmates())
    assert len(report.illegal_satisfiers) == 6
    assert all(not krk.is_legal_btm(p) for p in report.illegal_satisfiers)
    assert len(report.noncanonical_satisfiers) == 6
    assert all(krk.is_legal_btm(p) and not krk.is_canonical(p) for p in report.noncanonical_satisfiers)
    # the theory is written for canonical coordinates; these six are not mates
    assert sorted(p.encode() for p in report.noncanonical_satisfiers) == [f"(c,3,a,{r},a,1)" for r in range(3, 9)]
    assert not any(krk.is_checkmate(p) for p in report.noncanonical_satisfiers)


def test_full_board_report_counts():
    report = krk.theory_extension_report("full")
    assert (len(report.legal_satisfiers), len(report.illegal_satisfiers), len(report.noncanonical_satisfiers)) == (27, 17, 68)
    assert all(naive_mate(p.wk, p.wr, p.bk) for p in report.legal_satisfiers)
    # off the canonical frame the theory both hits and misses
    assert sum(naive_mate(p.wk, p.wr, p.bk) for p in report.noncanonical_satisfiers) == 32


def test_theory_hypothesis_wrapper():
    bg = krk.background()
    mate = krk.decode("(c,2,a,5,a,1)")
    assert krk.KRK_THEORY.satisfies(mate, bg)
    assert not krk.KRK_THEORY.satisfies(krk.decode("(d,4,h,8,a,1)"), bg)
    assert bg.decode("(c,2,a,5,a,1)") == mate and bg.encode(mate) == "(c,2,a,5,a,1)"


def test_export_csv(tmp_path):
    path = tmp_path / "k.csv"
    assert krk.export_csv(path) == 28056
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == krk.CSV_COLUMNS
    assert len(rows) == 28057
    assert sum(int(r[7]) for r in rows[1:]) == 27


def test_verify_counts_and_tamper():
    counts = krk.verify_counts()
    assert krk.verification_passed(counts)
    assert counts["wfw"] == 27 and counts["theory_legal"] == 27
    assert not krk.verification_passed(krk.verify_counts(checkmate_oracle=lambda p: krk.in_check(p)))
