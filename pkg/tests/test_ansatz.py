"""Undetermined-coefficient solver: row construction, exact nullspaces,
side conditions, determinism."""

import random

import pytest

from conslaw_kit.ansatz import (AnsatzProblem, LinearSolveResult,
                                NullspaceVector, Row, build_and_split,
                                solve_ansatz, solve_linear)
from conslaw_kit.determining import adjoint_symmetry_residual
from conslaw_kit.expr import Expr, Parameter, atom_expr, exp_of
from conslaw_kit.expr.coeff import Coeff, Poly, mono
from conslaw_kit.expr.errors import AnsatzError
from conslaw_kit.variational import Characteristic

from conftest import Syms as S

A = Parameter("alpha", nonzero=True)
B = Parameter("beta", nonzero=True)
G = Parameter("gamma", nonzero=True)


def thomas_basis(theta):
    e2 = exp_of(2 * theta)
    return (e2, e2 * S.t * S.ut, e2 * S.ut, e2 * S.x * S.ux, e2 * S.ux,
            e2 * S.x, e2 * S.t, Expr.const(1))


class TestBuildAndSplit:
    def test_rows_are_linear_homogeneous(self, wave):
        p = AnsatzProblem(wave, "adjoint-symmetry",
                          (Characteristic.of(S.u), Characteristic.of(S.x * S.ux)))
        rows = build_and_split(p)
        assert rows
        assert all(len(r.entries) == 2 for r in rows)

    def test_zero_basis_rejected(self, wave):
        with pytest.raises(AnsatzError, match="zero basis"):
            AnsatzProblem(wave, "adjoint-symmetry",
                          (Characteristic.of(Expr.zero()),))

    def test_unknown_target_rejected(self, wave):
        with pytest.raises(AnsatzError, match="unknown target"):
            AnsatzProblem(wave, "cosymmetry", (Characteristic.of(S.u),))

    def test_empty_basis_rejected(self, wave):
        with pytest.raises(AnsatzError, match="empty"):
            AnsatzProblem(wave, "symmetry", ())

    def test_fresh_unknown_names_skip_taken(self, thomas, thomas_theta):
        c2 = exp_of(2 * thomas_theta)
        basis = (Characteristic.of(c2 * atom_expr(Parameter("c1"))),
                 Characteristic.of(c2 * S.ut))
        p = AnsatzProblem(thomas, "adjoint-symmetry", basis)
        assert "c1" not in {q.name for q in p.unknowns}


class TestWaveAnsatz:
    def test_scaling_direction(self, wave):
        p = AnsatzProblem(wave, "adjoint-symmetry",
                          (Characteristic.of(S.u), Characteristic.of(S.x * S.ux)))
        res = solve_ansatz(p)
        assert res.dimension == 1
        assert [str(e) for e in res.vectors[0].entry_exprs()] == ["1", "-1"]
        assert not res.side_conditions

    def test_multiplier_target(self, wave):
        p = AnsatzProblem(wave, "multiplier",
                          (Characteristic.of(S.ut), Characteristic.of(S.ux),
                           Characteristic.of(S.u - S.x * S.ux)))
        res = solve_ansatz(p)
        # scaling fails the multiplier conditions; u_t and u_x survive
        assert res.dimension == 2
        for v in res.vectors:
            assert v.numerators[2].is_zero


class TestThomasFamily:
    def test_dimension_exactly_four(self, thomas, thomas_theta):
        p = AnsatzProblem(thomas, "adjoint-symmetry",
                          tuple(Characteristic.of(b)
                                for b in thomas_basis(thomas_theta)))
        res = solve_ansatz(p)
        assert res.dimension == 4
        assert not res.side_conditions

    def test_each_vector_annihilates_residual(self, thomas, thomas_theta):
        basis = thomas_basis(thomas_theta)
        p = AnsatzProblem(thomas, "adjoint-symmetry",
                          tuple(Characteristic.of(b) for b in basis))
        res = solve_ansatz(p)
        for v in res.vectors:
            comp = Expr.zero()
            for entry, b in zip(v.entry_exprs(), basis):
                comp = comp + entry * b
            assert adjoint_symmetry_residual(
                thomas, Characteristic.of(comp))[0].is_zero

    def test_paper_family_members_lie_in_nullspace(self, thomas, thomas_theta):
        """Membership check by exact linear solve: each published family
        generator must be a combination of the computed basis."""
        p = AnsatzProblem(thomas, "adjoint-symmetry",
                          tuple(Characteristic.of(b)
                                for b in thomas_basis(thomas_theta)))
        res = solve_ansatz(p)
        one = Coeff.one()
        a_over_g = Coeff(Poly.param(A), mono((G, 1)))
        b_over_g = Coeff(Poly.param(B), mono((G, 1)))
        family = {
            # c1: e2
            "c1": {0: one},
            # c3: e2*u_t + (alpha/gamma) e2
            "c3": {2: one, 0: a_over_g},
            # c4: e2*u_x + (beta/gamma) e2
            "c4": {4: one, 0: b_over_g},
            # c2: e2*(x u_x - t u_t) + (beta/gamma) e2*x - (alpha/gamma) e2*t
            "c2": {3: one, 1: -one, 5: b_over_g, 6: -a_over_g},
        }
        for name, target in family.items():
            assert _in_span(res, target), f"family member {name} not in span"

    def test_determinism_bit_for_bit(self, thomas, thomas_theta):
        basis = tuple(Characteristic.of(b) for b in thomas_basis(thomas_theta))
        p = AnsatzProblem(thomas, "adjoint-symmetry", basis)
        r1 = solve_ansatz(p)
        r2 = solve_ansatz(AnsatzProblem(thomas, "adjoint-symmetry", basis))
        assert r1.vectors == r2.vectors
        assert r1.side_conditions == r2.side_conditions


def _in_span(res: LinearSolveResult, target: dict[int, Coeff]) -> bool:
    """Is the target coefficient vector a combination of res.vectors?
    Solved as a homogeneous system in (lambda_1..lambda_r, mu) and
    checking for a nullspace vector with mu != 0."""
    n = len(res.unknowns)
    unknowns = tuple(Parameter(f"q{i}") for i in range(len(res.vectors))) + (
        Parameter("mu"),)
    rows = []
    for k in range(n):
        entries = [Coeff(v.numerators[k]) for v in res.vectors]
        entries.append(-(target.get(k, Coeff.zero())))
        rows.append(Row((), k, tuple(entries)))
    sol = solve_linear(rows, unknowns)
    return any(not v.numerators[-1].is_zero for v in sol.vectors)


class TestSolveLinear:
    def test_single_relation(self):
        c = (Parameter("c1"), Parameter("c2"))
        rows = [Row((), 0, (Coeff.one(), Coeff.one()))]
        res = solve_linear(rows, c)
        assert res.dimension == 1
        assert [str(p) for p in res.vectors[0].numerators] == ["1", "-1"]

    def test_nonzero_parameter_pivot_no_side_condition(self):
        c = (Parameter("c1"),)
        rows = [Row((), 0, (Coeff.param(G),))]
        res = solve_linear(rows, c)
        assert res.dimension == 0
        assert not res.side_conditions

    def test_generic_pivot_records_side_condition(self):
        c1, c2 = Parameter("c1"), Parameter("c2")
        pivot = Coeff(Poly.param(A) + Poly.param(B))
        rows = [Row((), 0, (pivot, Coeff.one()))]
        res = solve_linear(rows, (c1, c2))
        assert res.dimension == 1
        assert res.side_conditions == ("1*beta + 1*alpha",)
        vec = res.vectors[0]
        assert [str(p) for p in vec.numerators] == ["1", "-1*beta + -1*alpha"]
        assert vec.denominator == Poly.const(1)

    def test_non_unit_leading_entry_keeps_exact_denominator(self):
        # c1 + (alpha+beta) c2 = 0: the c2-direction clears to
        # (alpha+beta, -1) with denominator alpha+beta, so the first
        # nonzero entry is exactly 1 as a rational function.
        c1, c2 = Parameter("c1"), Parameter("c2")
        rows = [Row((), 0, (Coeff.one(), Coeff(Poly.param(A) + Poly.param(B))))]
        res = solve_linear(rows, (c1, c2))
        assert res.dimension == 1
        vec = res.vectors[0]
        assert vec.denominator == Poly.param(A) + Poly.param(B)
        assert vec.numerators[0] == vec.denominator
        # cleared representative used when the denominator is not a unit
        assert [str(e) for e in vec.entry_exprs()] == \
            ["(1*beta + 1*alpha)", "-1"]

    def test_no_rows_full_space(self):
        c = (Parameter("c1"), Parameter("c2"))
        res = solve_linear([], c)
        assert res.dimension == 2

    def test_duplicate_rows_collapse(self):
        c = (Parameter("c1"), Parameter("c2"))
        row = Row((), 0, (Coeff.one(), -Coeff.one()))
        res = solve_linear([row, row, row], c)
        assert res.dimension == 1
