"""Presentations over an hsop, syzygy resolutions, Ext slices, lifted actions."""

import pytest

from modinv.annihilators import exponent_ledger, nilpotency_search
from modinv.errors import AuditError
from modinv.field import make_field
from modinv.group import close_generators
from modinv.linalg import Mat
from modinv.localcoh import (
    ExtActionModel,
    FreeMap,
    FreeModule,
    GradedResolution,
    HsopAlgebra,
    LiftedAction,
    cm_short_circuit,
    ext_annihilation_certificates,
    ext_position_slices,
    ext_slices,
    free_resolution,
    lift_action,
    lift_chain,
    present_over_hsop,
    resolve_from,
)
from modinv.polyring import PolyRing, poly_from_text

F2 = make_field(2)
F3 = make_field(3)


@pytest.fixture(scope="module")
def alg12():
    return HsopAlgebra(F2, [1, 2])


@pytest.fixture(scope="module")
def koszul_toy(alg12):
    """A <- A(-1) + A(-2), the map (t1 t2); resolves the residue field."""
    cover = FreeModule(alg12, [0])
    src = FreeModule(alg12, [1, 2])
    phi = FreeMap(src, cover, [[alg12.var(0), alg12.var(1)]])
    return resolve_from(cover, phi, window=10, length=2)


@pytest.fixture(scope="module")
def cyclic_toy(alg12):
    """A <- A(-1), the map (t1); resolves A/(t1)."""
    cover = FreeModule(alg12, [0])
    src = FreeModule(alg12, [1])
    phi = FreeMap(src, cover, [[alg12.var(0)]])
    return resolve_from(cover, phi, window=10, length=2)


@pytest.fixture(scope="module")
def transvection_pres():
    group = close_generators(PolyRing(F2, 2), [[[1, 1], [0, 1]]])
    ring = group.ring
    thetas = [ring.var(1), poly_from_text(ring, "x0^2 + x0*x1")]
    return present_over_hsop(group, thetas, window=10)


@pytest.fixture(scope="module")
def transvection_res(transvection_pres):
    return free_resolution(transvection_pres)


@pytest.fixture(scope="module")
def bertin_res():
    group = close_generators(
        PolyRing(F2, 4),
        [[[0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]])
    texts = [
        "x0 + x1 + x2 + x3",
        "x0*x1 + x0*x2 + x0*x3 + x1*x2 + x1*x3 + x2*x3",
        "x0*x1*x2 + x0*x1*x3 + x0*x2*x3 + x1*x2*x3",
        "x0*x1*x2*x3",
    ]
    thetas = [poly_from_text(group.ring, t) for t in texts]
    return free_resolution(present_over_hsop(group, thetas, window=12))


# ------------------------------------------------------------------- algebra


def test_algebra_slices(alg12):
    assert [alg12.dim(m) for m in range(7)] == [1, 1, 2, 2, 3, 3, 4]
    assert alg12.monomials(4) == ((4, 0), (2, 1), (0, 2))
    assert alg12.monomials(-1) == ()
    assert alg12.index(-1) == {}
    assert alg12.index(4)[(2, 1)] == 1
    assert alg12.wdeg((2, 1)) == 4
    t1, t2 = alg12.var(0), alg12.var(1)
    assert alg12.is_homogeneous(t1 * t1 + t2, 2)
    assert not alg12.is_homogeneous(t1 + t2, 2)
    assert alg12.is_homogeneous(alg12.zero(), 7)


def test_algebra_rejects_bad_degrees():
    with pytest.raises(ValueError):
        HsopAlgebra(F2, [])
    with pytest.raises(ValueError):
        HsopAlgebra(F2, [2, 0])
    with pytest.raises(ValueError):
        HsopAlgebra(F2, [1, -3])


def test_free_module_slices(alg12):
    free = FreeModule(alg12, [0, 3])
    for n in range(9):
        assert free.dim(n) == alg12.dim(n) + alg12.dim(n - 3)
        assert free.dual_dim(n) == alg12.dim(n) + alg12.dim(n + 3)
    basis4 = free.basis(4)
    assert basis4[0][0] == 0 and basis4[-1][0] == 1
    # multiplication by t2 on slice coordinates agrees with A-side products
    t1, t2 = alg12.var(0), alg12.var(1)
    coords = free.element_coords([t1 * t1, alg12.zero()], 2)
    up = free.theta_mult(1, 2).apply(coords)
    comps = free.coords_components(up, 4)
    assert comps[0] == t1 * t1 * t2 and comps[1].is_zero()
    # roundtrip through coordinates
    vec = free.element_coords([t2 * t2, t1], 4)
    back = free.coords_components(vec, 4)
    assert back[0] == t2 * t2 and back[1] == t1


# ------------------------------------------------------------------ free maps


def test_free_map_validation(alg12):
    cover = FreeModule(alg12, [0])
    src = FreeModule(alg12, [1, 2])
    t1, t2 = alg12.var(0), alg12.var(1)
    with pytest.raises(ValueError):  # wrong homogeneity
        FreeMap(src, cover, [[t2, t2]])
    with pytest.raises(ValueError):  # wrong shape
        FreeMap(src, cover, [[t1], [t2]])
    other = HsopAlgebra(F2, [1, 2])
    with pytest.raises(ValueError):  # different algebra objects
        FreeMap(FreeModule(other, [1]), cover, [[t1]])
    phi = FreeMap(src, cover, [[t1, t2]])
    assert not phi.is_zero_map()
    scalar = FreeMap.scalar(cover, t2, 2)
    assert scalar.slice(3) == cover.theta_mult(1, 3)
    assert scalar.compose(scalar).shift == 4


def test_dual_slice_pinned(alg12):
    cover = FreeModule(alg12, [0])
    src = FreeModule(alg12, [1, 2])
    t1, t2 = alg12.var(0), alg12.var(1)
    phi = FreeMap(src, cover, [[t1, t2]])
    dual = phi.dual_slice(0)
    # rows: dual basis of src at 0 = [(0, t1), (1, t1^2), (1, t2)]
    assert src.dual_basis(0) == ((0, (1, 0)), (1, (2, 0)), (1, (0, 1)))
    assert dual.to_rows() == [[1], [0], [1]]


# ---------------------------------------------------------------- resolutions


def test_koszul_toy_resolution(alg12, koszul_toy):
    res = koszul_toy
    assert res.length == 2 and res.complete
    assert res.modules[2].twists == [3]
    assert res.maps[1].entries[0][0] == alg12.var(1)
    assert res.maps[1].entries[1][0] == alg12.var(0)
    top = ext_position_slices(res, 2, range(-6, 3))
    assert {n: d for n, d in top.dims.items() if d} == {-3: 1}
    assert ext_position_slices(res, 1, range(-6, 3)).is_zero()
    assert ext_position_slices(res, 0, range(-6, 3)).is_zero()
    assert res.margin == 10 - 3


def test_cyclic_toy_length_one(alg12, cyclic_toy):
    res = cyclic_toy
    assert res.length == 1 and res.complete
    ext1 = ext_position_slices(res, 1, range(-3, 6))
    assert ext1.dims == {-3: 0, -2: 0, -1: 1, 0: 0, 1: 1, 2: 0, 3: 1, 4: 0,
                         5: 1}
    assert ext1.nonzero_degrees() == [-1, 1, 3, 5]
    assert ext_position_slices(res, 0, range(-3, 6)).is_zero()


def test_toy_scalar_lifts(alg12, cyclic_toy):
    res = cyclic_toy
    cover = res.modules[0]
    t1, t2 = alg12.var(0), alg12.var(1)
    lam = FreeMap.scalar(cover, t1, 1)
    act = LiftedAction(res, lift_chain(res, lam, 0), lift_chain(res, lam, 1))
    assert all(act.induced(1, n).is_zero() for n in range(-2, 5))
    lam2 = FreeMap.scalar(cover, t2, 2)
    act2 = LiftedAction(res, lift_chain(res, lam2, 0),
                        lift_chain(res, lam2, 1))
    assert act2.induced(1, -1).to_rows() == [[1]]
    assert act2.induced(1, 1).to_rows() == [[1]]


def test_resolution_window_exhaustion(alg12):
    cover = FreeModule(alg12, [0])
    src = FreeModule(alg12, [1, 2])
    phi = FreeMap(src, cover, [[alg12.var(0), alg12.var(1)]])
    with pytest.raises(ValueError, match="exhausted"):
        resolve_from(cover, phi, window=10, length=1)


def test_incomplete_resolution_guards_high_positions(alg12, cyclic_toy):
    raw = GradedResolution(cyclic_toy.modules, cyclic_toy.maps,
                           cyclic_toy.window, complete=False)
    with pytest.raises(ValueError, match="incomplete"):
        raw.ext_slice(2, 0)
    # complete resolutions report exact zeros beyond their length
    assert cyclic_toy.ext_slice(2, 0).dim == 0
    with pytest.raises(AuditError):
        cyclic_toy.ext_slice(2, 0).project([1])


# --------------------------------------------------------------- presentations


def test_present_transvection_free(transvection_pres, transvection_res):
    pres = transvection_pres
    assert pres.gen_degrees == [0]
    assert pres.generators[0] == pres.group.ring.one()
    assert pres.relations.src.rank == 0
    res = transvection_res
    assert res.length == 0 and res.complete
    for j in (0, 1):
        assert ext_slices(res, j, range(-5, 8)).is_zero()
    top = ext_slices(res, 2, range(0, 6))
    assert top.dims == {0: 1, 1: 1, 2: 2, 3: 2, 4: 3, 5: 3}
    assert top.j == 2 and top.position == 0


def test_present_sign_representation():
    group = close_generators(PolyRing(F3, 2), [[[2, 0], [0, 2]]])
    ring = group.ring
    thetas = [poly_from_text(ring, "x0^2"), poly_from_text(ring, "x1^2")]
    pres = present_over_hsop(group, thetas, window=8)
    assert pres.gen_degrees == [0, 2]
    assert pres.generators[1] == poly_from_text(ring, "x0*x1")
    res = free_resolution(pres)
    assert res.length == 0
    assert all(ext_slices(res, j, range(-6, 6)).is_zero() for j in (0, 1))


def test_present_rejects_bad_input():
    group = close_generators(PolyRing(F2, 2), [[[1, 1], [0, 1]]])
    ring = group.ring
    y = ring.var(1)
    with pytest.raises(ValueError):
        present_over_hsop(group, [y, y * y], window=8)  # not an hsop
    h = poly_from_text(ring, "x0^2 + x0*x1")
    with pytest.raises(ValueError):
        present_over_hsop(group, [y, h], window=1)  # window below deg h
    with pytest.raises(ValueError):
        ext_slices(free_resolution(present_over_hsop(group, [y, h], 8)),
                   3, range(0, 4))  # index above the dimension


# ----------------------------------------------------------------- lifted maps


def test_lift_identity_and_thetas(transvection_pres, transvection_res):
    pres, res = transvection_pres, transvection_res
    ring = pres.group.ring
    one = ring.one()
    ident = lift_action(res, one)
    for n in range(0, 6):
        dim = res.ext_slice(0, n).dim
        assert ident.induced(0, n) == Mat.identity(F2, dim)
    y = ring.var(1)
    h = poly_from_text(ring, "x0^2 + x0*x1")
    lay = lift_action(res, y)
    scalar1 = FreeMap.scalar(pres.cover, pres.algebra.var(0), 1)
    lah = lift_action(res, h)
    scalar2 = FreeMap.scalar(pres.cover, pres.algebra.var(1), 2)
    for n in range(0, 6):
        assert lay.induced(0, n) == scalar1.dual_slice(n)
        assert lah.induced(0, n) == scalar2.dual_slice(n)


def test_lift_functoriality(transvection_pres, transvection_res):
    pres, res = transvection_pres, transvection_res
    ring = pres.group.ring
    y = ring.var(1)
    h = poly_from_text(ring, "x0^2 + x0*x1")
    lay, lah = lift_action(res, y), lift_action(res, h)
    lyh = lift_action(res, y * h)
    for n in range(0, 5):
        assert lyh.induced(0, n) == lay.induced(0, n + 2).mul(lah.induced(0, n))


def test_lift_rejects_bad_multipliers(transvection_pres, transvection_res):
    pres, res = transvection_pres, transvection_res
    ring = pres.group.ring
    with pytest.raises(ValueError):
        lift_action(res, ring.zero())
    with pytest.raises(ValueError):
        lift_action(res, ring.var(0))  # not invariant
    y = ring.var(1)
    with pytest.raises(ValueError, match="headroom"):
        lift_action(res, y ** 11)  # degree 11 exceeds window 10


# --------------------------------------------------------- Ext action adapter


def test_ext_action_model(transvection_pres, transvection_res):
    res = transvection_res
    ring = transvection_pres.group.ring
    h = poly_from_text(ring, "x0^2 + x0*x1")
    model = ExtActionModel(res)
    cert = nilpotency_search(model, 1, h, range(-4, 7), 3)
    assert cert.succeeded and cert.power == 1
    report = nilpotency_search(model, 2, h, range(0, 5), 3)
    assert not report.succeeded
    assert report.surviving == {0: 1, 1: 1, 2: 2, 3: 2, 4: 3}


def test_ext_certificates_and_ledger(transvection_pres, transvection_res):
    res = transvection_res
    ring = transvection_pres.group.ring
    h = poly_from_text(ring, "x0^2 + x0*x1")
    certs = ext_annihilation_certificates(res, h, range(-4, 7), 2,
                                          js=range(0, 2))
    assert isinstance(certs, list) and [c.power for c in certs] == [1, 1]
    ledger = exponent_ledger(certs)
    assert ledger.exponents == [1, 1]
    assert ledger.q(1).degree() == 4
    # including the top index must surface the exhaustion instead
    report = ext_annihilation_certificates(res, h, range(0, 5), 2,
                                           js=range(0, 3))
    assert not report.succeeded


# --------------------------------------------------------------------- bertin


def test_bertin_presentation_and_ext(bertin_res):
    res = bertin_res
    pres = res.presentation
    assert pres.gen_degrees == [0, 2, 3, 4, 4, 5, 6]
    assert pres.relations.src.twists == [6]
    assert res.length == 1 and res.complete
    ext1 = ext_slices(res, 3, range(-13, 4))
    assert {n: d for n, d in ext1.dims.items() if d} == {-6: 1, -2: 1, 2: 1}
    assert all(ext_slices(res, j, range(-13, 4)).is_zero() for j in (1, 2))
    assert cm_short_circuit(pres.group) is None


def test_cm_short_circuit_reasons(transvection_pres):
    assert "Cohen-Macaulay" in cm_short_circuit(transvection_pres.group)
    group = close_generators(PolyRing(F3, 2), [[[2, 0], [0, 2]]])
    assert cm_short_circuit(group) is not None
