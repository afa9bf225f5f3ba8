"""Rewrite rules on opaque-function derivatives: reduction, derivative
closure, orientation checks, termination."""

import pytest

from conslaw_kit.expr import (IndependentVar, JetVar, OpaqueDeriv,
                              RewriteRule, RuleError, RuleSet, apply_rules,
                              atom_expr, exp_of, is_zero)

from conftest import Syms as S

XV, TV = IndependentVar("x"), IndependentVar("t")


def f(ix, it):
    return atom_expr(OpaqueDeriv("f", (XV, TV), (ix, it)))


@pytest.fixture()
def f_constraint():
    return RuleSet([
        RewriteRule(OpaqueDeriv("f", (XV, TV), (1, 1)),
                    -S.alpha * f(1, 0) - S.beta * f(0, 1)),
    ])


def test_residual_reduces_to_zero(f_constraint):
    e = f(1, 1) + S.alpha * f(1, 0) + S.beta * f(0, 1)
    assert apply_rules(e, f_constraint).is_zero


def test_derivative_closure_two_steps(f_constraint):
    # f_xxt -> -a f_xx - b f_xt -> -a f_xx + b(a f_x + b f_t)
    out = apply_rules(f(2, 1), f_constraint)
    assert out == -S.alpha * f(2, 0) + S.alpha * S.beta * f(1, 0) + S.beta**2 * f(0, 1)


def test_closure_reaches_inside_exponents(f_constraint):
    e = exp_of(f(1, 1))
    out = apply_rules(e, f_constraint)
    assert out == exp_of(-S.alpha * f(1, 0) - S.beta * f(0, 1))


def test_is_zero_without_rules():
    assert is_zero(S.ux - S.ux, ())
    assert not is_zero(S.ux - S.ut, ())


def test_non_orientable_rule_rejected():
    with pytest.raises(RuleError, match="non-orientable"):
        RewriteRule(OpaqueDeriv("f", (XV, TV), (1, 0)), f(1, 1))
    with pytest.raises(RuleError):
        RewriteRule(OpaqueDeriv("f", (XV, TV), (0, 0)), f(0, 0))


def test_duplicate_rule_rejected():
    r = RewriteRule(OpaqueDeriv("f", (XV, TV), (1, 1)), f(1, 0))
    with pytest.raises(RuleError, match="duplicate"):
        RuleSet([r, r])


def test_rule_with_dependent_argument():
    # g''(u) -> u * g'(u): closure must bump along the u slot.
    gp = atom_expr(OpaqueDeriv("g", (S.u_at,), (1,)))
    gpp_atom = OpaqueDeriv("g", (S.u_at,), (2,))
    gppp = atom_expr(OpaqueDeriv("g", (S.u_at,), (3,)))
    rules = RuleSet([RewriteRule(gpp_atom, S.u * gp)])
    # d/du (u g') = g' + u g'' -> g' + u^2 g'
    out = apply_rules(gppp, rules)
    assert out == gp + S.u**2 * gp


def test_termination_on_high_order_atoms(f_constraint):
    e = f(3, 2) + f(2, 2) * S.u
    out = apply_rules(e, f_constraint)
    for atom in out.atoms():
        if isinstance(atom, OpaqueDeriv):
            assert atom.index[0] == 0 or atom.index[1] == 0
