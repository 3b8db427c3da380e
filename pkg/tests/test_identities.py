"""Identity catalog, evaluation, verification loop, errata machinery."""

import json
from fractions import Fraction as F

import pytest

from umbralwalk import (
    IdentityId,
    IdentityParams,
    InvalidParamsError,
    Status,
    TruncationPolicy,
    catalog,
    eval_lhs,
    eval_rhs_partial,
    rhs_term,
    verify,
    verify_all_payload,
)
from umbralwalk.identities import (
    ensure_ground_truth,
    ground_truth_system,
    normalize_params,
    term_magnitudes,
    three_sites_block_term,
)


# --- catalog -----------------------------------------------------------------


def test_catalog_is_complete():
    entries = catalog()
    assert len(entries) == 10
    ids = {e.identity for e in entries}
    assert ids == set(IdentityId)


def test_catalog_references_and_variants():
    by_id = {e.identity: e for e in catalog()}
    assert "three concentric spheres" in by_id[IdentityId.N3_GENERAL].reference
    assert by_id[IdentityId.N4_UNIFORM_STATED].variant == "stated"
    assert by_id[IdentityId.N4_UNIFORM_CORRECTED].variant == "corrected"


# --- left-hand sides ------------------------------------------------------------


def test_lhs_examples():
    assert eval_lhs(IdentityId.N3_UNIFORM, IdentityParams(n=1, x=F(0))) == F(1, 2)
    assert eval_lhs(IdentityId.FOUR_UNIFORM_1D, IdentityParams(n=0, x=F(7))) == 1
    assert eval_lhs(
        IdentityId.THREE_SITES_1D_STATED,
        IdentityParams(n=1, x=F(0), levels=(1, 3)),
    ) == F(1, 3)
    assert eval_lhs(
        IdentityId.N4_UNIFORM_STATED, IdentityParams(n=1, x=F(0))
    ) == F(1, 6)
    assert eval_lhs(
        IdentityId.N4_UNIFORM_CORRECTED, IdentityParams(n=1, x=F(0))
    ) == 1


def test_params_validation():
    with pytest.raises(InvalidParamsError):
        eval_lhs(IdentityId.EULER_CHEB, IdentityParams(n=1))
    with pytest.raises(InvalidParamsError):
        eval_lhs(IdentityId.THREE_SITES_1D_STATED, IdentityParams(n=1))
    with pytest.raises(InvalidParamsError):
        eval_lhs(
            IdentityId.THREE_SITES_1D_STATED,
            IdentityParams(n=1, levels=(3, 1)),
        )
    with pytest.raises(InvalidParamsError):
        eval_lhs(IdentityId.EVEN_BERNOULLI, IdentityParams())
    with pytest.raises(InvalidParamsError):
        eval_lhs(IdentityId.FOUR_UNIFORM_1D, IdentityParams(n=-1))


# --- right-hand terms --------------------------------------------------------------


def test_four_uniform_degree_one_term_closed_form():
    # term k contributes 3^(k-1) 4^(-k-1) (3x - 3/2)
    for x in (F(0), F(2, 7), F(-1, 3)):
        params = IdentityParams(n=1, x=x)
        for k in (0, 1, 2, 5, 9):
            expected = F(3) ** (k - 1) / F(4) ** (k + 1) * (3 * x - F(3, 2))
            assert rhs_term(IdentityId.FOUR_UNIFORM_1D, params, k) == expected


def test_even_bernoulli_partial_approaches_one_sixth():
    params = IdentityParams(m=1)
    partial = eval_rhs_partial(IdentityId.EVEN_BERNOULLI, params, 40)
    assert abs(float(partial - F(1, 6))) < 1e-12
    # each term is the geometric weight times 1/2 behind the prefactor
    assert rhs_term(IdentityId.EVEN_BERNOULLI, params, 0) == F(1, 4) * F(1, 2)


def test_euler_cheb_n2_partial_approaches_euler_value():
    for x in (F(0), F(1, 2), F(1)):
        params = IdentityParams(n=1, x=x, cheb_index=2)
        # the tail after index l is of size 2^(-l/2)
        close = eval_rhs_partial(IdentityId.EULER_CHEB, params, 40)
        closer = eval_rhs_partial(IdentityId.EULER_CHEB, params, 80)
        limit = x - F(1, 2)
        assert abs(float(closer - limit)) < 1e-11
        if close != limit:
            assert abs(float(closer - limit)) < abs(float(close - limit))


def test_rhs_partial_negative_bound_rejected():
    with pytest.raises(InvalidParamsError):
        eval_rhs_partial(IdentityId.FOUR_UNIFORM_1D, IdentityParams(n=1), -1)


# --- verification -----------------------------------------------------------------


def test_verify_n3_uniform_small_case():
    report = verify(IdentityId.N3_UNIFORM, IdentityParams(n=1, x=F(0)))
    assert report.status is Status.VERIFIED
    assert report.lhs_exact == F(1, 2)
    assert report.converged


def test_verify_n4_stated_audit_values():
    report = verify(IdentityId.N4_UNIFORM_STATED, IdentityParams(n=1, x=F(0)))
    assert report.status is Status.RESIDUAL_NONZERO
    assert report.lhs_exact == F(1, 6)
    assert abs(float(report.rhs_partial_exact - F(1, 3))) < 1e-12


def test_verify_three_sites_degenerate_spacing():
    report = verify(
        IdentityId.THREE_SITES_1D_STATED,
        IdentityParams(n=1, x=F(7), levels=(1, 2)),
    )
    assert report.status is Status.DEGENERATE_TRIVIAL
    assert report.K_used == -1


def test_verify_respects_k_max():
    report = verify(
        IdentityId.FOUR_UNIFORM_1D,
        IdentityParams(n=4, x=F(0)),
        TruncationPolicy(tol=1e-12, k_max=20),
    )
    assert report.status is Status.NOT_CONVERGED
    assert report.K_used == 20


def test_verify_all_zero_tail_short_circuits():
    # odd degree at x = 1/2: every term vanishes and so does the left side
    report = verify(IdentityId.FOUR_UNIFORM_1D, IdentityParams(n=7, x=F(1, 2)))
    assert report.status is Status.VERIFIED
    assert report.residual_float == 0.0
    assert report.K_used <= 5


def test_four_uniform_full_matrix_verifies_at_engine_semantics():
    for n in range(0, 11):
        for x in (F(0), F(1, 2), F(1), F(-1, 3)):
            report = verify(IdentityId.FOUR_UNIFORM_1D, IdentityParams(n=n, x=x))
            assert report.status is Status.VERIFIED, (n, x, report)


def test_report_json_schema():
    report = verify(IdentityId.N3_UNIFORM, IdentityParams(n=2, x=F(1, 2)))
    payload = report.to_json()
    assert set(payload) >= {
        "identity", "variant", "n", "x", "levels", "K_used",
        "lhs", "rhs_partial", "residual", "status",
    }
    assert payload["x"] == "1/2"
    assert isinstance(payload["residual"], float)
    json.dumps(payload)


# --- ground truth -------------------------------------------------------------------


def test_ground_truth_systems_mapped():
    sys1 = ground_truth_system(
        IdentityId.THREE_SITES_1D_CORRECTED,
        IdentityParams(n=1, levels=(1, 3)),
    )
    assert sys1.levels == (0, 1, 3)
    assert ground_truth_system(IdentityId.EULER_CHEB, IdentityParams(n=1, cheb_index=2)) is None
    ensure_ground_truth(
        IdentityId.N4_UNIFORM_CORRECTED, IdentityParams(n=1, x=F(0))
    )


# --- truncation behaviour -------------------------------------------------------------

GEOMETRIC_CASES = [
    (IdentityId.FOUR_UNIFORM_1D, IdentityParams(n=3, x=F(1))),
    (IdentityId.THREE_SITES_1D_CORRECTED, IdentityParams(n=1, x=F(1), levels=(1, 3))),
    (IdentityId.N3_UNIFORM, IdentityParams(n=3, x=F(1))),
    (IdentityId.EVEN_BERNOULLI, IdentityParams(m=2)),
    (IdentityId.N4_UNIFORM_CORRECTED, IdentityParams(n=3, x=F(1))),
    (IdentityId.EULER_CHEB, IdentityParams(n=3, x=F(1), cheb_index=3)),
]


@pytest.mark.parametrize("identity,params", GEOMETRIC_CASES,
                         ids=lambda v: v.value if isinstance(v, IdentityId) else "")
def test_term_magnitudes_eventually_strictly_decreasing(identity, params):
    mags = term_magnitudes(identity, params, 33, 80)
    nonzero = [m for m in mags if m > 0.0]
    assert len(nonzero) >= 10
    assert all(a > b for a, b in zip(nonzero, nonzero[1:]))


# --- the three-site block-level ground truth -------------------------------------------


def test_three_sites_block_sum_matches_exact_left_side():
    """The uncollapsed block translation converges to the true moment."""
    from umbralwalk import Family, UmbralExpr, eval_poly, umbral_moment

    for levels in ((F(1), F(3)), (F(2), F(5))):
        a2 = levels[1]
        lhs = eval_poly(
            umbral_moment(
                UmbralExpr.build((Family.EULER, 2 * a2, 1), constant=a2), 3
            ),
            F(1),
        )
        partial = sum(
            three_sites_block_term(k, 3, F(1), levels) for k in range(90)
        )
        assert abs(float(lhs - partial)) < 1e-9


def test_three_sites_corrected_departs_beyond_degree_one():
    """From degree 2 on, the printed collapse is provably not the block sum."""
    report = verify(
        IdentityId.THREE_SITES_1D_CORRECTED,
        IdentityParams(n=2, x=F(0), levels=(1, 3)),
    )
    assert report.status is Status.RESIDUAL_NONZERO
    assert report.residual_float > 1e-3


# --- the batch payload -------------------------------------------------------------------


def test_verify_all_payload_stable_and_passing():
    policy = TruncationPolicy(tol=1e-6, k_max=256)
    first = verify_all_payload(policy)
    second = verify_all_payload(policy)
    assert first["all_passed"]
    for payload in (first, second):
        payload.pop("generated_at")
    assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)
    statuses = {r["status"] for r in first["reports"]}
    assert statuses == {"VERIFIED"}
    assert all(a["pass"] for a in first["stated_audits"])
    assert all(d["pass"] for d in first["known_discrepancies"])
    assert first["degenerate_check"]["pass"]
    # errata entries carry live numbers for every printed discrepancy
    errata = first["errata"]
    assert errata["four_sphere_chain_display"]["printed_residual"] > 1
    assert errata["four_sphere_chain_display"]["recomputed_residual"] == "0"
    assert errata["bessel_taboo_prefactor"]["adopted_residual"] == "0"
    assert errata["bessel_taboo_prefactor"]["printed_residual"] > 0.1
    assert errata["four_general_printed_blocks"]["printed_residual"] > 1
    assert (
        errata["three_sites_stated_vs_corrected"]["stated"]["status"]
        == "RESIDUAL_NONZERO"
    )
    assert (
        errata["three_sites_stated_vs_corrected"]["corrected"]["status"]
        == "VERIFIED"
    )


def test_normalize_even_bernoulli_pins_degree():
    params = normalize_params(IdentityId.EVEN_BERNOULLI, IdentityParams(m=3))
    assert params.n == 6
