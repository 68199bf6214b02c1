from collections import defaultdict

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from kappa_snyder.weyl import WeylAlgebra, WeylOp, pack, unpack, weyl_act, weyl_commutator

N_DIM, ORDER = 2, 2
W = WeylAlgebra(N_DIM, ORDER)


def naive_apply(op: WeylOp, poly: WeylOp) -> dict:
    """Apply op to a polynomial one derivative at a time.

    Keys are (eps, x exponents). D_mu acts as eta_{mu mu} times the partial derivative.
    """
    out = defaultdict(lambda: mpq(0))
    for (e1, xp1, dp1), c1 in op.terms.items():
        for (e2, xp2, _), c2 in poly.terms.items():
            if e1 + e2 > op.order:
                continue
            xs = list(unpack(xp2, op.n))
            coeff = c1 * c2
            for mu, k in enumerate(unpack(dp1, op.n)):
                for _ in range(k):
                    if xs[mu] == 0:
                        coeff = 0
                        break
                    coeff *= xs[mu] * op.signs[mu]
                    xs[mu] -= 1
            if coeff == 0:
                continue
            xs = tuple(a + b for a, b in zip(xs, unpack(xp1, op.n)))
            out[(e1 + e2, xs)] += coeff
    return {k: v for k, v in out.items() if v != 0}


def as_dict(poly: WeylOp) -> dict:
    return {(e, unpack(xp, poly.n)): c for (e, xp, _), c in poly.terms.items()}


exps = st.tuples(st.integers(0, 2), st.integers(0, 2))
coeffs = st.fractions(min_value=-3, max_value=3, max_denominator=4).filter(bool)
term = st.tuples(coeffs, exps, exps, st.integers(0, ORDER))
ops = st.lists(term, min_size=1, max_size=4).map(lambda ts: WeylOp.from_terms(ts, N_DIM, ORDER))
polys = st.lists(st.tuples(coeffs, exps, st.just((0, 0)), st.integers(0, ORDER)),
                 min_size=1, max_size=4).map(lambda ts: WeylOp.from_terms(ts, N_DIM, ORDER))


def test_pack_roundtrip():
    assert unpack(pack((3, 0, 7)), 3) == (3, 0, 7)
    with pytest.raises(ValueError):
        pack((256,))


def test_canonical_commutator():
    for mu in range(N_DIM):
        for nu in range(N_DIM):
            expected = W.scalar(W.signs[mu] if mu == nu else 0)
            assert weyl_commutator(W.D[mu], W.X[nu]) == expected
            assert weyl_commutator(W.X[mu], W.X[nu]).is_zero()


def test_known_reordering():
    # D0^2 X0^2 = X0^2 D0^2 - 4 X0 D0 + 2 with eta_00 = -1
    X0, D0 = W.X[0], W.D[0]
    lhs = D0 * D0 * X0 * X0
    rhs = X0 * X0 * D0 * D0 - 4 * (X0 * D0) + 2
    assert lhs == rhs


@settings(max_examples=60, deadline=None)
@given(ops, ops, polys)
def test_product_acts_as_composition(A, B, p):
    assert as_dict(weyl_act(A * B, p)) == naive_apply(A, as_dict_to_op(naive_apply(B, p)))


def as_dict_to_op(d: dict) -> WeylOp:
    return WeylOp.from_terms([(c, xs, (0,) * N_DIM, e) for (e, xs), c in d.items()], N_DIM, ORDER)


@settings(max_examples=60, deadline=None)
@given(ops, polys)
def test_act_matches_naive_application(A, p):
    assert as_dict(weyl_act(A, p)) == naive_apply(A, p)


@settings(max_examples=40, deadline=None)
@given(ops, ops, ops)
def test_associativity_and_jacobi(A, B, C):
    assert (A * B) * C == A * (B * C)
    jac = (weyl_commutator(A, weyl_commutator(B, C)) + weyl_commutator(B, weyl_commutator(C, A))
           + weyl_commutator(C, weyl_commutator(A, B)))
    assert jac.is_zero()


def test_eps_truncation():
    e = W.eps
    assert (e * e * e).is_zero()
    assert (e * e) == W.scalar(1, eps=2)


def test_act_rejects_operators():
    with pytest.raises(ValueError):
        weyl_act(W.X[0], W.D[0])


def test_box0_on_quadratic():
    # D_0 D_0 X0^2 = 2 (two factors eta_00 = -1) and D^0 D_0 = -D_0 D_0
    p = W.X[0] * W.X[0] + W.X[1] * W.X[1]
    assert weyl_act(W.box0(), p) == W.scalar(-2 + 2)
    assert weyl_act(W.box0(), W.X[1] * W.X[1]) == W.scalar(2)
