"""Exact theorem checks and their sensitivity to transcription errors."""
import json

import pytest

from hampert import verify
from hampert.diffalg import euler_operator
from hampert.models import Mutation, ModelParams


@pytest.mark.parametrize("s_choice", ["free", "zero", "theorem2"])
def test_commuting_first_exact(s_choice):
    rep = verify.verify_commuting_first(s_choice)
    assert rep.passed
    assert [o.order for o in rep.orders] == [0, 1, 2, 3, 4]
    assert all(o.status == "exact-zero" for o in rep.orders)


def test_commuting_first_order_zero_alone():
    rep = verify.verify_commuting_first()
    assert rep.orders[0].ok and rep.orders[0].check == "E(bracket)"


def test_odd_orders_reported_not_skipped():
    rep = verify.verify_commuting_first()
    odd = [o for o in rep.orders if o.order % 2]
    assert len(odd) == 2 and all("parity" in o.check for o in odd)


def test_commuting_first_detects_480_mutation():
    rep = verify.verify_commuting_first(mutation=Mutation.parse("h_f:1/480=1/479"))
    assert not rep.passed
    fail = rep.first_failure()
    assert fail.order == 4 and fail.witness
    assert [o.ok for o in rep.orders[:4]] == [True] * 4


def test_commuting_second_exact():
    rep = verify.verify_commuting_second()
    assert rep.passed and len(rep.orders) == 5


def test_commuting_second_needs_constraint():
    rep = verify.verify_commuting_second(constrained=False)
    assert not rep.passed
    assert rep.orders[0].ok and rep.orders[2].ok
    assert rep.first_failure().order == 4
    fc = rep.notes["factor_check"]
    assert fc["vanishes_at_p_star"] and fc["every_term_contains_p_minus_p_star"]


def test_commuting_second_order_zero_is_classical():
    rep = verify.verify_commuting_second(constrained=False)
    assert rep.orders[0].ok


def test_quasitriviality_exact():
    rep = verify.verify_quasitriviality()
    assert rep.passed
    orders = {(o.check, o.order) for o in rep.orders}
    for k in range(1, 6):
        assert ("E(exp(-K) h_f - f)", k) in orders


def test_quasitriviality_detects_5760_mutation():
    rep = verify.verify_quasitriviality(mutation=Mutation.parse("K:1/5760=1/5761"))
    assert not rep.passed
    assert rep.first_failure().order in (3, 4)


def test_quasitriviality_needs_theorem_s():
    # with s = 0 instead of c c'''/3456 the trivialization fails at eps^4
    from hampert.diffalg import EpsSeries, J, S, lie_transform
    from hampert.models import build_hf_density, build_K_generator

    hf = EpsSeries(build_hf_density(ModelParams(s_choice="zero")).components, 5)
    K = EpsSeries(build_K_generator().components, 5)
    res = lie_transform(K.scale(-1), hf) - EpsSeries.of(S("f"), 5)
    assert not euler_operator(res[4]).is_zero()


def test_lax_exact():
    rep = verify.verify_lax_compatibility()
    assert rep.passed
    checks = {o.check.split()[0] for o in rep.orders}
    assert checks == {"X-compat", "T-compat"}


def test_lax_detects_prefactor_mutation():
    rep = verify.verify_lax_compatibility(mutation=Mutation.parse("lax:1/120:1e-6"))
    assert not rep.passed


def test_report_json_shape():
    d = json.loads(verify.verify("lax").to_json())
    assert d["theorem"] == "lax" and d["status"] == "pass"
    assert {"check", "order", "status", "witness"} <= set(d["orders"][0])


def test_unknown_theorem():
    with pytest.raises(KeyError):
        verify.verify("nonsense")


@pytest.mark.parametrize("theorem", list(verify.THEOREMS))
def test_every_sampled_literal_is_sensitive(theorem):
    results = verify.mutation_sensitivity(theorem)
    assert len(results) >= 10
    missed = [(r.table, r.index, r.value) for r in results if not r.detected]
    assert not missed
