"""Acceptance gate: ten end-to-end criteria, exact over finite fields.

Each test prints/records one verdict line (see conftest's terminal summary).
All equalities are exact -- there is no tolerance anywhere.  Criterion 10
drives the full non-Cohen-Macaulay pipeline and is gated behind
MODINV_SLOW=1.
"""

import os
import random

import pytest

from modinv.annihilators import (exponent_ledger, nilpotency_search,
                                 pstar_invariance_check, windowed_annihilator)
from modinv.cohomology import (BarModel, Cochain, PeriodicModel, differential,
                               q_operator)
from modinv.field import Field
from modinv.group import close_generators
from modinv.homology import (KoszulComplex, QuotientSlices,
                             annihilation_check_koszul, colon_quotient_slice,
                             depth_estimate)
from modinv.invariants import (InvariantSlices, dickson_family, dickson_top,
                               invariant_space, validate_hsop)
from modinv.linalg import Mat, reduce_mat
from modinv.localcoh import (ext_annihilation_certificates, ext_slices,
                             free_resolution, present_over_hsop)
from modinv.polyring import PolyRing, poly_from_text
from modinv.steenrod import steenrod_p

slow = pytest.mark.skipif(os.environ.get("MODINV_SLOW") != "1",
                          reason="set MODINV_SLOW=1 to run the gated "
                                 "non-CM pipeline")


def _verdict(record, num, ok, detail):
    line = f"criterion {num:2d}: {'PASS' if ok else 'FAIL'} - {detail}"
    record(line)
    print(line)
    assert ok, line


# ------------------------------------------------------------ shared builders


@pytest.fixture(scope="module")
def transvection():
    ring = PolyRing(Field(2, 1), 2)
    return close_generators(ring, [[[1, 1], [0, 1]]])


@pytest.fixture(scope="module")
def trivial2():
    return close_generators(PolyRing(Field(2, 1), 2), [])


@pytest.fixture(scope="module")
def plus_minus():
    return close_generators(PolyRing(Field(3, 1), 2), [[[2, 0], [0, 2]]])


@pytest.fixture(scope="module")
def bertin():
    ring = PolyRing(Field(2, 1), 4)
    cycle = [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0]]
    return close_generators(ring, [cycle])


def _elementary_hsop(ring):
    return [poly_from_text(ring, t) for t in
            ("x0 + x1 + x2 + x3",
             "x0*x1 + x0*x2 + x0*x3 + x1*x2 + x1*x3 + x2*x3",
             "x0*x1*x2 + x0*x1*x3 + x0*x2*x3 + x1*x2*x3",
             "x0*x1*x2*x3")]


def _random_poly(ring, n, rng):
    dim = ring.basis(n).dim
    while True:
        vec = [rng.randrange(ring.field.q) for _ in range(dim)]
        if any(vec):
            return ring.from_vector(n, vec)


def _random_gl(ring, rng):
    fld, d = ring.field, ring.nvars
    while True:
        rows = [[rng.randrange(fld.q) for _ in range(d)] for _ in range(d)]
        if reduce_mat(Mat.from_rows(fld, d, rows)).rank == d:
            return rows


def _apply_gl(rows, f):
    ring = f.ring
    images = []
    for row in rows:
        acc = ring.zero()
        for k, c in enumerate(row):
            if c:
                acc = acc + ring.var(k).scale(c)
        images.append(acc)
    return f.substitute(images)


# --------------------------------------------------------------- criterion 1


def test_criterion_01_steenrod_laws(acceptance_record):
    checked = 0
    for p, r in ((2, 1), (3, 1), (2, 2)):
        ring = PolyRing(Field(p, r), 3)
        q = ring.field.q
        rng = random.Random(1000 * p + r)
        for _ in range(200):
            nf = rng.randrange(1, 5)
            f = _random_poly(ring, nf, rng)
            g = _random_poly(ring, rng.randrange(1, 7 - nf), rng)

            i = rng.randrange(4)
            cartan = ring.zero()
            for a in range(i + 1):
                cartan = cartan + steenrod_p(a, f) * steenrod_p(i - a, g)
            assert steenrod_p(i, f * g) == cartan

            sigma = _random_gl(ring, rng)
            j = rng.randrange(4)
            assert _apply_gl(sigma, steenrod_p(j, f)) == \
                steenrod_p(j, _apply_gl(sigma, f))

            assert steenrod_p(0, f) == f
            for k in range(ring.nvars):
                assert steenrod_p(2 + rng.randrange(3), ring.var(k)).is_zero()
            assert steenrod_p(f.degree(), f) == f ** q
            checked += 1
    _verdict(acceptance_record, 1, checked == 600,
             f"Steenrod laws exact on {checked} random instances over "
             f"GF(2), GF(3), GF(4)")


# --------------------------------------------------------------- criterion 2


def test_criterion_02_cochain_complex(acceptance_record, transvection,
                                      trivial2, bertin):
    pairs = 0
    for group in (trivial2, transvection, bertin):
        for n in range(3):
            for m in range(9):
                dd = differential(group, n + 1, m).mul(
                    differential(group, n, m))
                assert dd.is_zero(), (group, n, m)
                pairs += 1
    _verdict(acceptance_record, 2, pairs == 81,
             f"d² = 0 on {pairs} (group, level, degree) combinations")


# --------------------------------------------------------------- criterion 3


def test_criterion_03_reduced_power_operators(acceptance_record,
                                              transvection):
    group = transvection
    ring = group.ring
    rng = random.Random(3)
    instances = 0
    for _ in range(60):
        level = rng.randrange(3)
        m = rng.randrange(5)
        size = ring.basis(m).dim * group.order ** level
        psi = Cochain.from_vector(group, level, m,
                                  [rng.randrange(2) for _ in range(size)])
        mpow = rng.randrange(5)

        assert q_operator(mpow, psi).coboundary() == \
            q_operator(mpow, psi.coboundary())

        s = rng.choice(invariant_space(group, rng.randrange(1, 4)).polys)
        lhs = q_operator(mpow, psi.s_multiply(s))
        rhs = Cochain.zero(group, level, lhs.degree)
        for a in range(mpow + 1):
            ps = steenrod_p(a, s)
            if not ps.is_zero():
                rhs = rhs.add(q_operator(mpow - a, psi).s_multiply(ps))
        assert lhs == rhs
        instances += 1
    _verdict(acceptance_record, 3, instances == 60,
             f"chain-map and module laws for reduced-power operators on "
             f"{instances} random cochains")


# --------------------------------------------------------------- criterion 4


def test_criterion_04_bar_periodic_agreement(acceptance_record, transvection,
                                             bertin):
    compared = 0
    for group, imax, mmax in ((transvection, 3, 8), (bertin, 2, 4)):
        bar, per = BarModel(group), PeriodicModel(group)
        for i in range(imax + 1):
            for m in range(mmax + 1):
                assert bar.slice(i, m).dim == per.slice(i, m).dim, (i, m)
                compared += 1
    _verdict(acceptance_record, 4, compared == 51,
             f"bar and periodic cohomology dimensions agree on {compared} "
             f"slices")


# --------------------------------------------------------------- criterion 5


def test_criterion_05_transvection_certificate(acceptance_record,
                                               transvection):
    s = dickson_top(transvection.ring)
    got = nilpotency_search(transvection, 1, s, range(13), 4)
    ok = got.succeeded and got.power == 1
    _verdict(acceptance_record, 5, ok,
             f"top Dickson class annihilates H^1 through degree 12 at "
             f"power {got.power}")


# --------------------------------------------------------------- criterion 6


def test_criterion_06_pstar_invariance(acceptance_record, transvection):
    group = transvection
    ann = windowed_annihilator(group, 1, range(13), 6)
    assert ann.contains(dickson_top(group.ring))
    members = 0
    for k in sorted(ann.basis):
        for t in ann.basis[k]:
            rep = pstar_invariance_check(group, 1, t, 3, range(13))
            assert rep.violations == [], (k, t)
            members += 1
    _verdict(acceptance_record, 6, members > 0,
             f"all {members} windowed-annihilator basis elements keep "
             f"annihilating under reduced powers up to P^3")


# --------------------------------------------------------------- criterion 7


def test_criterion_07_dickson(acceptance_record):
    rng = random.Random(7)
    rings = 0
    for p, r, d in ((2, 1, 2), (2, 1, 3), (3, 1, 2)):
        ring = PolyRing(Field(p, r), d)
        q = ring.field.q
        top = dickson_top(ring)
        assert top.degree() == q ** d - 1
        for _ in range(100):
            assert _apply_gl(_random_gl(ring, rng), top) == top
        family = dickson_family(ring)
        assert [f.degree() for f in family] == \
            [q ** d - q ** i for i in range(d)]
        assert validate_hsop(close_generators(ring, []), family)
        rings += 1
    _verdict(acceptance_record, 7, rings == 3,
             "Dickson top class has degree q^d - 1, survives 100 random "
             "GL substitutions per ring, and the family is an hsop")


# --------------------------------------------------------------- criterion 8


def test_criterion_08_cohen_macaulay_koszul(acceptance_record, transvection,
                                            plus_minus):
    slices_checked = 0
    for group in (transvection, plus_minus):
        x = dickson_family(group.ring)
        cx = KoszulComplex(group, x)
        for i in range(1, group.dim + 1):
            for n in range(13):
                assert cx.slice(i, n).dim == 0, (group, i, n)
                slices_checked += 1
        for t in range(1, group.dim + 1):
            for n in range(13):
                assert colon_quotient_slice(group, x, t, n).dim == 0
                slices_checked += 1
        est = depth_estimate(group, x, 12)
        assert est.upper == est.lower == group.dim
    _verdict(acceptance_record, 8, slices_checked == 104,
             f"Koszul homology and colon quotients vanish on "
             f"{slices_checked} slices; depth equals dimension on both "
             f"Cohen-Macaulay examples")


# --------------------------------------------------------------- criterion 9


def test_criterion_09_cm_ext_vanishing(acceptance_record, transvection,
                                       plus_minus):
    positions = 0
    for group in (transvection, plus_minus):
        thetas = dickson_family(group.ring)
        window = 2 * max(t.degree() for t in thetas)
        res = free_resolution(present_over_hsop(group, thetas, window))
        assert res.complete and res.length == 0
        for j in range(group.dim):
            ext = ext_slices(res, j, range(-10, window + 1))
            assert ext.is_zero(), (group, j)
            positions += 1
    _verdict(acceptance_record, 9, positions == 4,
             "hsop presentations of both Cohen-Macaulay examples resolve "
             "freely and every lower local-cohomology stand-in vanishes")


# -------------------------------------------------------------- criterion 10


@slow
@pytest.mark.slow
def test_criterion_10_bertin_pipeline(acceptance_record, bertin):
    group = bertin
    ring = group.ring
    e = _elementary_hsop(ring)

    # (a) fixed space and the resulting depth lower bound
    est = depth_estimate(group, e, 10)
    assert est.fixed_dim == 1
    assert est.lower == 3

    # (c-first-half) depth exactly 3: H_1 of the low-degree hsop is nonzero
    assert est.upper == 3 and est.exact
    assert est.nonzero == {1: [6]} and est.stable
    cx = KoszulComplex(group, e)
    assert cx.slice(1, 6).dim == 1

    # (b) nonvanishing H^1 below degree 10 and the main nilpotency theorem
    pm = PeriodicModel(group)
    h1 = [pm.slice(1, m).dim for m in range(11)]
    assert h1 == [1, 0, 1, 0, 2, 0, 2, 0, 3, 0, 3]
    s = dickson_top(ring)
    assert s.degree() == 15
    cert = nilpotency_search(pm, 1, s, range(7), 4)
    assert cert.succeeded and cert.power == 1

    # (c) hsop presentation, resolution, Ext slices, nilpotent action
    pres = present_over_hsop(group, e, 23)
    assert pres.gen_degrees == [0, 2, 3, 4, 4, 5, 6]
    assert pres.relations.src.twists == [6]
    res = free_resolution(pres)
    assert res.complete and res.length == 1
    ext_degrees = range(-6, 22)
    ext1 = ext_slices(res, 3, ext_degrees)
    assert ext1.nonzero_degrees() == [-6, -2, 2, 6, 10, 14, 18]
    certs = ext_annihilation_certificates(res, s, ext_degrees, 4)
    assert [c.power for c in certs] == [1, 1, 1, 1]

    # (d) corollary tables driven by the certified exponent ledger
    ledger = exponent_ledger(certs)
    assert [qi.degree() for qi in ledger.products] == [15, 30, 45, 60]
    top = ledger.products[-1]
    window = top.degree() + 2
    slices = InvariantSlices(group)
    kx = KoszulComplex(group, e, slices)
    for t in range(1, 5):
        quotient = QuotientSlices(slices, e[:t - 1])
        targets = [colon_quotient_slice(group, e, t, n, quotient)
                   for n in range(3)]
        assert annihilation_check_koszul(top, targets, window).ok
    for i in range(1, 5):
        qi = ledger.q(4 - i)
        targets = [kx.slice(i, n) for n in range(3)]
        assert annihilation_check_koszul(qi, targets, window).ok
    # H_1(e) has finite length with socle exactly in degree 6; every slice
    # a ledger multiplier (degree >= 15) can land in is therefore zero, so
    # the band tables above carry the full checkable content.  Pin the
    # support scan, then run the checker once on the nonzero source slice
    # so the multiplication/audit path is exercised against a real class.
    support = []
    for n in range(22):
        d1 = kx.differential(1, n)
        d2 = kx.differential(2, n)
        dim = d1.ncols - reduce_mat(d1).rank - reduce_mat(d2).rank
        if dim:
            support.append((n, dim))
    assert support == [(6, 1)]
    socle = annihilation_check_koszul(s, [kx.slice(1, 6)], s.degree() + 6)
    assert socle.rows == [("H_1(x)", 6, 1, True)]

    _verdict(acceptance_record, 10, True,
             "non-CM pipeline: depth 3 via fixed-space and Koszul bounds, "
             "H^1 pattern pinned, all annihilation exponents equal 1, "
             "corollary tables pass and the degree-6 H_1 witness class "
             "is annihilated")
