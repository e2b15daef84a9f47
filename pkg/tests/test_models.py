"""Transcribed densities, maps, brackets, constraints and special cases."""
from fractions import Fraction
from math import factorial
from pathlib import Path

import pytest

from hampert import exprfn
from hampert.diffalg import (C, EpsSeries, J, Poly, S, euler_operator, is_null_lagrangian,
                             lie_transform, logux, render, total_derivative, total_derivative_n,
                             u_derivative, ux, variational_derivative)
from hampert.models import (Mutation, ModelParams, build_hf_density, build_K_generator,
                            build_quasitriviality_map, build_riem2_rhs, build_second_poisson,
                            build_string_density, check_p_domain, literal_counts, p_constraint_poly,
                            p_from_cq, specializations)
from hampert.numeric import evaluate_poly

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
R = lambda a, b=1: Poly.const(Fraction(a, b))  # noqa: E731


def golden(name):
    return (FIXTURES / name).read_text(encoding="utf-8").rstrip("\n")


# --- h_f

@pytest.mark.parametrize("s_choice", ["free", "zero", "theorem2"])
def test_casimir_density_is_unperturbed(s_choice):
    h = build_hf_density(ModelParams(s_choice=s_choice), f=J(0))
    assert h == EpsSeries.of(J(0))


@pytest.mark.parametrize("s_choice", ["free", "zero", "theorem2"])
def test_momentum_density_is_unperturbed(s_choice):
    h = build_hf_density(ModelParams(s_choice=s_choice), f=J(0) ** 2 * R(1, 2))
    assert h == EpsSeries.of(J(0) ** 2 * R(1, 2))


def test_cubic_density_is_riemann_hamiltonian():
    h = build_hf_density(ModelParams(s_choice="zero"), f=J(0) ** 3 * R(1, 6))
    expected = EpsSeries({0: J(0) ** 3 * R(1, 6), 2: -S("c") * ux(2) * R(1, 24),
                          4: S("p") * J(2) ** 2}, 4)
    assert h == expected


def test_cubic_density_with_free_s():
    h = build_hf_density(ModelParams(s_choice="free"), f=J(0) ** 3 * R(1, 6))
    assert h[4] == S("p") * J(2) ** 2 + S("s") * ux(4)


@pytest.mark.parametrize("k", [0, 1, 2, 3, 4, 5, 6])
def test_kdv_hierarchy_densities(k):
    # closed-form KdV hierarchy densities for constant c and p = s = 0
    c0 = C("c0")

    def mono(n, fact):
        if n < 0:
            return Poly()
        return J(0) ** n * R(1, factorial(fact)) if n else R(1, factorial(fact))

    f = mono(k + 2, k + 2)
    expected = EpsSeries({
        0: f,
        2: -c0 * mono(k - 1, k - 1) * ux(2) * R(1, 24),
        4: c0 ** 2 * R(1, 96) * (mono(k - 2, k - 2) * J(2) ** 2 * R(1, 5)
                                 - mono(k - 4, k - 4) * ux(4) * R(1, 36)),
    }, 4)
    h = build_hf_density(ModelParams(c=c0, p=0, s_choice="zero"), f=f)
    assert h == expected


def test_hf_golden_rendering():
    assert build_hf_density(ModelParams(s_choice="free")).render() == golden("h_f_s_free.txt")
    assert build_hf_density(ModelParams(s_choice="zero")).render() == golden("h_f_s_zero.txt")


def test_hf_grading():
    h = build_hf_density()
    for k in h.orders():
        assert h[k].is_homogeneous(k)


# --- riem2

def test_riem2_constant_c_is_kdv():
    rhs = build_riem2_rhs(C("c0"), 0)
    assert rhs == EpsSeries({0: J(0) * ux(), 2: C("c0") * J(3) * R(1, 12)}, 4)


def test_riem2_unperturbed():
    assert build_riem2_rhs(0, 0) == EpsSeries({0: J(0) * ux()}, 4)


def test_riem2_equals_flow_of_density():
    h = build_hf_density(ModelParams(s_choice="zero"), f=J(0) ** 3 * R(1, 6))
    assert build_riem2_rhs() == variational_derivative(h).map(total_derivative)


def test_riem2_golden_rendering():
    assert build_riem2_rhs().render() == golden("riem2.txt")


# --- K

def test_K_grading():
    K = build_K_generator()
    assert K[1].is_homogeneous(1)
    assert K[3].is_homogeneous(3)
    assert K[1] == S("c") * ux() * logux() * R(1, 24)


def test_K_vanishes_without_dispersion():
    assert build_K_generator(0, 0).is_zero()


def test_K_golden_rendering():
    assert build_K_generator().render() == golden("K_generator.txt")


# --- quasitriviality map

def test_quasi_map_second_order_term():
    c = S("c")
    expected = total_derivative(c * J(2) * ux(-1) + S("c", 1) * ux()) * R(1, 24)
    assert build_quasitriviality_map()[2] == expected


def test_quasi_map_constant_c_closed_form():
    # constant-c form: u = v + d_x^2 [eps^2 c0 log(v_x)/24 + eps^4 c0^2(...)]
    c0 = C("c0")
    inner4 = (J(2) ** 3 * ux(-4) * R(1, 360) - J(2) * J(3) * ux(-3) * R(7, 1920)
              + J(4) * ux(-2) * R(1, 1152))
    expected = EpsSeries({0: J(0), 2: total_derivative_n(c0 * logux() * R(1, 24), 2),
                          4: total_derivative_n(c0 ** 2 * inner4, 2)}, 4)
    assert build_quasitriviality_map(c0, 0) == expected


def test_quasi_map_is_lie_series_of_generator():
    q = build_quasitriviality_map()
    lie = lie_transform(-build_K_generator(), EpsSeries.of(J(0), max_order=5))
    assert (lie.truncate(4) - q).is_zero()
    assert lie[5].is_zero() and lie[1].is_zero() and lie[3].is_zero()


def test_quasi_map_golden_rendering():
    assert build_quasitriviality_map().render() == golden("quasitriviality_map.txt")


# --- constraint and specializations

def _exact(expr, value):
    return exprfn.equal(exprfn.simplify(expr), exprfn.parse(value))


def test_p_volterra():
    assert _exact(p_from_cq("2", "1 - exp(u)"), "-1/240")


def test_p_camassa_holm():
    assert _exact(p_from_cq("8*u", "u"), "u/3")


def test_p_kdv():
    assert _exact(p_from_cq("7", "u"), "0")


def test_p_domain_error():
    with pytest.raises(ZeroDivisionError):
        p_from_cq("2", "3")
    with pytest.raises(exprfn.DomainError):
        check_p_domain("u^2", [-1.0, 0.0, 1.0])
    check_p_domain("1 - exp(u)", [-1.0, 0.0, 1.0])


def test_p_constraint_poly_matches_expression_route():
    # exact algebra route versus expression route on a polynomial pair
    c, q = "3*u^2 + 1", "u^3 + u"
    poly = p_constraint_poly()
    expr = p_from_cq(c, q)
    for x in (-0.7, 0.2, 1.3):
        num = evaluate_poly(poly, [x, 1.0], functions={"c": c, "q": q})
        assert num == pytest.approx(float(exprfn.evaluate(expr, x)), rel=1e-14)


def test_p_constraint_golden_rendering():
    assert render(p_constraint_poly()) == golden("p_constraint.txt")


def test_specializations():
    recs = {s.name: s for s in specializations()}
    assert set(recs) == {"KdV", "Volterra", "CamassaHolm"}
    assert _exact(recs["Volterra"].p, "-1/240") and _exact(recs["Volterra"].s, "1/4320")
    assert _exact(recs["CamassaHolm"].c, "8*u") and _exact(recs["CamassaHolm"].p, "u/3")
    for rec in recs.values():
        assert exprfn.equal(exprfn.simplify(p_from_cq(rec.c, rec.q)), exprfn.simplify(rec.p))


# --- second bracket

def test_second_bracket_leading_terms():
    L = build_second_poisson()
    q = S("q")
    assert L.coefficient(0, 1) == q
    assert L.coefficient(0, 0) == S("q", 1) * ux() * R(1, 2)
    assert L.coefficient(2, 3) == S("c") * S("q", 1) * R(1, 8)
    assert L.coefficient(4, 5) == (R(3) * S("c") * S("c", 1) * S("q", 1)
                                   + S("c") ** 2 * S("q", 2)) * R(1, 192)


def test_second_bracket_grading():
    # coefficient of delta^(j) at eps^k has jet degree k + 1 - j
    L = build_second_poisson()
    for k, j, a in L.entries:
        assert a.is_homogeneous(k + 1 - j), (k, j)


def test_second_bracket_golden_rendering():
    assert build_second_poisson().render() == golden("second_poisson.txt")


# --- string relation

def test_string_leading_terms():
    s = build_string_density()
    a, b, t, c0 = S("a"), S("b"), C("t"), C("c0")
    assert s[0] == t * a + b
    expected2 = c0 * R(1, 24) * (t * (R(2) * S("a", 2) * J(2) + S("a", 3) * ux(2))
                                 + R(2) * S("b", 2) * J(2) + S("b", 3) * ux(2))
    assert s[2] == expected2


def test_string_without_dispersion_is_characteristic_relation():
    s = build_string_density(c0=0, p0=0)
    assert s == EpsSeries.of(C("t") * S("a") + S("b"))


def test_string_is_euler_derivative_of_shifted_density():
    # x = dH_F/du with F' = t a + b: the relation is the variational derivative
    # of the constant-coefficient density built on F
    t, c0, p0 = C("t"), C("c0"), C("p0")
    F1 = t * S("a") + S("b")
    derivs = [None, F1]
    for _ in range(5):
        derivs.append(u_derivative(derivs[-1]))
    h2 = -c0 * derivs[3] * ux(2) * R(1, 24)
    h4 = (p0 * derivs[3] + c0 ** 2 * derivs[4] * R(1, 480)) * J(2) ** 2 \
        - (c0 ** 2 * derivs[6] * R(1, 3456) + p0 * derivs[5] * R(1, 6)) * ux(4)
    expected = EpsSeries({0: F1, 2: euler_operator(h2), 4: euler_operator(h4)}, 4)
    assert build_string_density() == expected
    # the printed relation lacks the u_xx^2 terms
    assert build_string_density(include_missing_term=False) != expected


def test_string_golden_rendering():
    assert build_string_density().render() == golden("string_density.txt")
    assert build_string_density(include_missing_term=False).render() == golden("string_density_printed.txt")


# --- mutations

def test_mutation_syntax():
    m = Mutation.parse("h_f:1/480:+1e-6")
    assert m.table == "h_f"
    r = Mutation.parse("K:1/5760=1/5761")
    assert r.replacement == Fraction(1, 5761)
    assert Mutation.parse("L2:#3:1e-6").index == 3


def test_mutation_changes_a_builder():
    base = build_hf_density()
    mutated = build_hf_density(mutation=Mutation.parse("h_f:1/480=1/479"))
    assert base[0] == mutated[0] and base[2] == mutated[2]
    assert base[4] != mutated[4]


def test_literal_counts_cover_sampling():
    n = literal_counts()
    assert n["h_f"] >= 10 and n["quasi_map"] >= 10 and n["L2"] >= 10
