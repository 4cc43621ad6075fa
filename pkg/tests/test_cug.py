import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cugsim import gates
from cugsim.bench import random_unitary
from cugsim.circuit import embed
from cugsim.cug import (
    Conditional,
    CugSpec,
    UBlock,
    build_cug,
    build_cug_naive,
    build_cug_span,
    decomposition_symbols,
    decomposition_terms,
    format_decomposition,
    naive_term_count,
    naive_terms,
)
from cugsim.errors import InvalidConditionalError, NotUnitaryError, SpanError, SpecError
from cugsim.register import RegisterProfile
from cugsim.tensor import SparseMatrix, add_scaled, kron_all, unitarity_check

from conftest import dense_cug_oracle, random_unitary_dense

P0 = np.diag([1.0, 0.0])
P1 = np.diag([0.0, 1.0])


def eq1_spec(u):
    # anticontrol on wire 0, U on wire 1, control on wire 2
    return CugSpec(RegisterProfile.qubits(3), ((0, 0), (2, 1)), ((1, u),))


def test_three_qubit_form_explicit(rng):
    for _ in range(20):
        u = random_unitary_dense(2, rng)
        want = np.eye(8) + np.kron(np.kron(P0, u), P1) - np.kron(np.kron(P0, np.eye(2)), P1)
        np.testing.assert_allclose(build_cug(eq1_spec(u)).toarray(), want, atol=1e-12)


@st.composite
def cug_cases(draw, max_wires=5, max_level=4, max_conditionals=3, max_blocks=2):
    """Random valid specs: levels, conditionals, U-blocks on disjoint consecutive runs."""
    n = draw(st.integers(1, max_wires))
    levels = tuple(draw(st.lists(st.integers(2, max_level), min_size=n, max_size=n)))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    free = list(range(n))
    blocks = []
    for _ in range(draw(st.integers(1, max_blocks))):
        if not free:
            break
        start = draw(st.sampled_from(free))
        width = 1
        while width < 2 and start + width in free and draw(st.booleans()) and np.prod(levels[start:start + width + 1]) <= 16:
            width += 1
        for w in range(start, start + width):
            free.remove(w)
        d = int(np.prod(levels[start:start + width]))
        blocks.append((start, random_unitary_dense(d, rng)))
    k = draw(st.integers(0, min(max_conditionals, len(free))))
    cwires = draw(st.permutations(free))[:k] if free else []
    conds = [(w, draw(st.integers(0, levels[w] - 1))) for w in sorted(cwires)]
    return levels, conds, blocks


@settings(max_examples=200, deadline=None)
@given(cug_cases())
def test_irreducible_equals_naive_and_basis_oracle(case):
    levels, conds, blocks = case
    spec = CugSpec(RegisterProfile(levels), tuple(conds), tuple(blocks))
    fast = build_cug(spec)
    slow = build_cug_naive(spec)
    oracle = dense_cug_oracle(levels, conds, blocks)
    np.testing.assert_allclose(fast.toarray(), oracle, atol=1e-12)
    np.testing.assert_allclose(slow.toarray(), oracle, atol=1e-12)
    assert unitarity_check(fast, 1e-10)


@settings(max_examples=60, deadline=None)
@given(cug_cases())
def test_decomposition_terms_recombine(case):
    levels, conds, blocks = case
    spec = CugSpec(RegisterProfile(levels), tuple(conds), tuple(blocks))
    ident, active, inactive = decomposition_terms(spec)
    total = add_scaled(add_scaled(ident, active), inactive, -1)
    assert total.allclose(build_cug(spec), atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(cug_cases())
def test_span_build_embeds_to_full(case):
    levels, conds, blocks = case
    profile = RegisterProfile(levels)
    m, first, last = build_cug_span(conds, blocks, profile)
    assert m.n_rows == profile.dim_of(first, last + 1)
    full = build_cug(CugSpec(profile, tuple(conds), tuple(blocks)))
    assert embed(profile, m, first).allclose(full, atol=1e-12)


@pytest.mark.parametrize("k", range(0, 9))
def test_stats_two_additions_regardless_of_conditionals(k):
    n = 10
    spec = CugSpec(RegisterProfile.qubits(n), tuple((w, 1) for w in range(k)), ((n - 1, gates.not_gate()),))
    m, stats = build_cug(spec, return_stats=True)
    assert stats.full_additions == 2
    assert stats.dim == 2**n
    assert naive_term_count(spec) == 2**k
    assert len(list(naive_terms(spec))) == 2**k


def test_active_subspace_and_identity_elsewhere(rng):
    profile = RegisterProfile((3, 2, 3))
    u = random_unitary_dense(2, rng)
    spec = CugSpec(profile, ((0, 2), (2, 1)), ((1, u),))
    m = build_cug(spec).toarray()
    for col, digits in enumerate(profile.all_digits()):
        e = np.zeros(profile.dim)
        e[col] = 1
        if spec.is_active(digits):
            assert not np.allclose(m @ e, e)
        else:
            np.testing.assert_array_equal(m @ e, e)


def test_multi_wire_and_multiple_blocks(rng):
    profile = RegisterProfile((2, 3, 2, 2))
    u6 = random_unitary(6, rng)
    x = gates.not_gate()
    spec = CugSpec(profile, ((3, 1),), ((0, u6), (2, x)))
    oracle = dense_cug_oracle(profile.levels, [(3, 1)], [(0, u6), (2, x.toarray())])
    np.testing.assert_allclose(build_cug(spec).toarray(), oracle, atol=1e-12)


def test_no_conditionals_is_plain_embedding(rng):
    u = random_unitary_dense(3, rng)
    spec = CugSpec(RegisterProfile((2, 3)), (), ((1, u),))
    np.testing.assert_allclose(build_cug(spec).toarray(), np.kron(np.eye(2), u), atol=1e-12)


def test_spec_validation():
    p = RegisterProfile.qubits(3)
    x = gates.not_gate()
    with pytest.raises(SpecError):
        CugSpec(p, ((0, 1),), ())
    with pytest.raises(InvalidConditionalError):
        CugSpec(p, ((0, 2),), ((2, x),))
    with pytest.raises(SpecError):
        CugSpec(p, ((0, 1), (0, 0)), ((2, x),))
    with pytest.raises(SpecError):
        CugSpec(p, ((2, 1),), ((2, x),))
    with pytest.raises(SpecError):
        CugSpec(p, (), ((0, SparseMatrix.from_dense(np.eye(4))), (1, x)))
    with pytest.raises(SpanError):
        CugSpec(RegisterProfile((3, 2)), (), ((0, np.eye(2)),))
    with pytest.raises(SpecError):
        CugSpec(p, ((5, 1),), ((0, x),))
    with pytest.raises(SpecError):
        UBlock(0, np.ones((2, 3)))
    with pytest.raises(NotUnitaryError):
        build_cug(CugSpec(p, ((0, 1),), ((2, np.array([[1, 1], [0, 1]])),)))
    with pytest.raises(NotUnitaryError):
        build_cug_naive(CugSpec(p, ((0, 1),), ((2, 2 * np.eye(2)),)))


def test_restricted_and_range():
    p = RegisterProfile((2, 3, 2, 2, 2))
    spec = CugSpec(p, (Conditional(3, 1),), (UBlock(1, np.eye(3)),))
    assert spec.referenced_range() == (1, 3)
    sub, first, last = spec.restricted()
    assert (first, last) == (1, 3) and sub.profile.levels == (3, 2, 2)
    assert sub.conditionals == (Conditional(2, 1),) and sub.spans == ((0, 1),)


def test_format_qubit_three_terms():
    spec = eq1_spec(gates.hadamard())
    assert format_decomposition(spec) == "I₈ + P₀⊗U⊗P₁ − P₀⊗I₂⊗P₁"
    assert format_decomposition(spec, unicode=False) == "I8 + P0 (x) U (x) P1 - P0 (x) I2 (x) P1"


def test_format_qudit_labels():
    p = RegisterProfile((3, 5, 2))
    spec = CugSpec(p, ((0, 2), (2, 0)), ((1, gates.grover_g(5)),))
    ident, active, inactive = decomposition_symbols(spec)
    assert ident == "I₃₀"
    assert active == ["P₃,₃", "U", "P₁,₂"]
    assert inactive == ["P₃,₃", "I₅", "P₁,₂"]


def test_format_no_conditionals_and_several_blocks():
    spec = CugSpec(RegisterProfile.qubits(1), (), ((0, gates.hadamard()),))
    assert format_decomposition(spec) == "I₂ + U − I₂"
    spec = CugSpec(RegisterProfile.qubits(3), ((1, 1),), ((0, gates.hadamard()), (2, gates.not_gate())))
    assert format_decomposition(spec) == "I₈ + U₁⊗P₁⊗U₂ − I₂⊗P₁⊗I₂"


def test_free_wires_merge_into_one_factor():
    spec = CugSpec(RegisterProfile.qubits(6), ((0, 1),), ((5, gates.not_gate()),))
    _, stats = build_cug(spec, return_stats=True)
    assert stats.kron_factors == (3, 3)
