import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cugsim import gates
from cugsim.circuit import (
    Circuit,
    SpanGate,
    WireRotation,
    WireSwap,
    apply_circuit,
    compile_circuit,
    embed,
    generalized_step,
    rotate_wires,
    step_gate,
    swap_wires,
)
from cugsim.cug import CugSpec
from cugsim.errors import InvalidArgumentError, LevelMismatchError, ShapeError, SpanError, SpecError
from cugsim.register import RegisterProfile
from cugsim.state import basis_state, equal_superposition, StateVector
from cugsim.tensor import identity, unitarity_check

from conftest import dense_permutation, digits_of, index_of, random_unitary_dense


def cascade_oracle(levels, sign):
    """Digit-level trace of the controlled-shift cascade."""
    n = len(levels)

    def step(k):
        d = list(digits_of(k, levels))
        for t in range(n - 1):
            ctrl = [levels[w] - 1 if sign == 1 else 0 for w in range(t + 1, n)]
            if all(d[w] == c for w, c in zip(range(t + 1, n), ctrl)):
                d[t] = (d[t] - sign) % levels[t]
        d[n - 1] = (d[n - 1] - sign) % levels[n - 1]
        return index_of(d, levels)

    return dense_permutation(levels, step)


@pytest.mark.parametrize("n", range(1, 9))
def test_step_gate_is_modular_increment(n):
    inc = step_gate(n, "increment").toarray()
    dec = step_gate(n, "decrement").toarray()
    np.testing.assert_array_equal(inc, dense_permutation((2,) * n, lambda k: (k + 1) % 2**n))
    np.testing.assert_array_equal(dec, dense_permutation((2,) * n, lambda k: (k - 1) % 2**n))


def test_step_gate_examples():
    inc2 = step_gate(2).toarray()
    assert [int(np.argmax(inc2[:, k])) for k in range(4)] == [1, 2, 3, 0]
    v = step_gate(4) @ basis_state(RegisterProfile.qubits(4), [1, 0, 0, 0]).amplitudes
    assert np.argmax(np.abs(v)) == 0b1001
    for n in range(1, 6):
        m = step_gate(n)
        acc = identity(2**n)
        for _ in range(2**n):
            acc = m @ acc
        assert acc.allclose(identity(2**n), atol=0)
    with pytest.raises(InvalidArgumentError):
        step_gate(0)
    with pytest.raises(InvalidArgumentError):
        step_gate(3, "sideways")


@pytest.mark.parametrize("levels", [(2,), (3,), (3, 3), (2, 3), (3, 2, 4), (4, 4), (3, 3, 3), (2, 5, 3, 2)])
@pytest.mark.parametrize("direction,sign", [("plus", 1), ("minus", -1)])
def test_generalized_step_matches_cascade_trace(levels, direction, sign):
    m = generalized_step(levels, direction).toarray()
    np.testing.assert_array_equal(m, cascade_oracle(levels, sign))
    # permutation: one unit entry per row and column
    assert np.all((m == 0) | (m == 1))
    assert np.all(m.sum(axis=0) == 1) and np.all(m.sum(axis=1) == 1)


@pytest.mark.parametrize("levels", [(2,), (2, 2), (2, 2, 2, 2)])
def test_generalized_step_inverse_on_qubits(levels):
    d = int(np.prod(levels))
    prod = generalized_step(levels, "plus") @ generalized_step(levels, "minus")
    assert prod.allclose(identity(d), atol=0)


@pytest.mark.parametrize("levels", [(3, 3), (3, 3, 3), (4, 4)])
def test_generalized_step_directions_beyond_qubits(levels):
    # top-level carries paired with downward shifts: minus is not the inverse of plus
    d = int(np.prod(levels))
    plus, minus = generalized_step(levels, "plus"), generalized_step(levels, "minus")
    assert not (plus @ minus).allclose(identity(d), atol=0)
    assert (plus @ plus.dagger()).allclose(identity(d), atol=0)
    np.testing.assert_array_equal((plus @ minus).toarray(), cascade_oracle(levels, 1) @ cascade_oracle(levels, -1))


def test_generalized_step_qubits_equals_step_gate():
    assert generalized_step((2, 2, 2, 2), "plus").allclose(step_gate(4, "increment"), atol=0)
    assert generalized_step((2, 2, 2), "minus").allclose(step_gate(3, "decrement"), atol=0)


def test_generalized_step_3x3_is_single_cycle():
    m = generalized_step((3, 3), "plus").toarray()
    k, seen = 0, []
    for _ in range(9):
        seen.append(k)
        k = int(np.argmax(m[:, k]))
    assert k == 0 and sorted(seen) == list(range(9))
    with pytest.raises(InvalidArgumentError):
        generalized_step((3, 3), "up")


def test_embed_matches_kron(rng):
    profile = RegisterProfile((2, 3, 2, 2))
    u = random_unitary_dense(6, rng)
    want = np.kron(np.kron(np.eye(2), u), np.eye(2))
    np.testing.assert_allclose(embed(profile, u_sparse(u), 1).toarray(), want, atol=1e-14)
    with pytest.raises(SpanError):
        embed(profile, u_sparse(np.eye(4)), 1)


def u_sparse(a):
    from cugsim.tensor import SparseMatrix

    return SparseMatrix.from_dense(a)


def digit_perm_oracle(levels, order):
    """Matrix sending digits d to digits d[order]."""
    def f(k):
        d = digits_of(k, levels)
        return index_of([d[o] for o in order], levels)
    return dense_permutation(levels, f)


@pytest.mark.parametrize("i,j", [(0, 2), (2, 0), (1, 3), (1, 1)])
def test_swap_wires(i, j):
    levels = (3, 2, 3, 2)
    order = list(range(4))
    order[i], order[j] = order[j], order[i]
    m = swap_wires(levels, i, j)
    np.testing.assert_array_equal(m.toarray(), digit_perm_oracle(levels, order))
    assert m.allclose(swap_wires(levels, j, i), atol=0)
    assert (m @ m).allclose(identity(36), atol=0)


def test_swap_level_mismatch():
    with pytest.raises(LevelMismatchError):
        swap_wires((2, 3), 0, 1)


def test_rotation_moves_last_digit_first():
    levels = (2,) * 4
    r = rotate_wires(levels, "R", (0, 3)).toarray()
    l = rotate_wires(levels, "L", (0, 3)).toarray()
    # R: new digits (d3, d0, d1, d2)
    np.testing.assert_array_equal(r, digit_perm_oracle(levels, [3, 0, 1, 2]))
    np.testing.assert_array_equal(l, digit_perm_oracle(levels, [1, 2, 3, 0]))
    np.testing.assert_array_equal(r @ l, np.eye(16))
    sub = rotate_wires((3, 2, 2, 2, 3), "R", (1, 3)).toarray()
    np.testing.assert_array_equal(sub, digit_perm_oracle((3, 2, 2, 2, 3), [0, 3, 1, 2, 4]))
    with pytest.raises(InvalidArgumentError):
        rotate_wires(levels, "X", (0, 3))
    with pytest.raises(LevelMismatchError):
        rotate_wires((2, 3), "R", (0, 1))
    with pytest.raises(InvalidArgumentError):
        rotate_wires(levels, "R", (3, 1))


def test_empty_circuit():
    c = Circuit(RegisterProfile((2, 2)))
    assert compile_circuit(c).allclose(identity(4), atol=0)
    v = equal_superposition((2, 2))
    assert apply_circuit(c, v).allclose(v, atol=0)


def test_compile_single_element_is_embedding(rng):
    u = random_unitary_dense(2, rng)
    c = Circuit(RegisterProfile.qubits(3), (SpanGate(u, 1),))
    assert c.compile().allclose(embed(c.profile, u_sparse(u), 1), atol=1e-14)


def test_later_elements_multiply_on_the_left():
    x, h = gates.not_gate(), gates.hadamard()
    c = Circuit(RegisterProfile.qubits(1), (SpanGate(x, 0), SpanGate(h, 0)))
    np.testing.assert_allclose(c.compile().toarray(), h.toarray() @ x.toarray(), atol=1e-15)


@st.composite
def random_circuits(draw):
    levels = tuple(draw(st.lists(st.sampled_from([2, 3]), min_size=2, max_size=4)))
    profile = RegisterProfile(levels)
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    n = len(levels)
    elements = []
    for _ in range(draw(st.integers(0, 6))):
        kind = draw(st.sampled_from(["span", "cug", "swap", "rotate"]))
        if kind == "span":
            w = draw(st.integers(0, n - 1))
            elements.append(SpanGate(random_unitary_dense(levels[w], rng), w))
        elif kind == "cug":
            t, c = draw(st.permutations(range(n)))[:2]
            elements.append(CugSpec(profile, ((c, draw(st.integers(0, levels[c] - 1))),),
                                    ((t, random_unitary_dense(levels[t], rng)),)))
        else:
            i = draw(st.integers(0, n - 1))
            same = [j for j in range(n) if levels[j] == levels[i]]
            j = draw(st.sampled_from(same))
            if kind == "swap":
                elements.append(WireSwap(i, j))
            else:
                first, last = min(i, j), max(i, j)
                if len(set(levels[first:last + 1])) == 1:
                    elements.append(WireRotation(draw(st.sampled_from("RL")), first, last))
    v = rng.standard_normal(profile.dim) + 1j * rng.standard_normal(profile.dim)
    return Circuit(profile, tuple(elements)), StateVector.normalized(profile, v)


@settings(max_examples=80, deadline=None)
@given(random_circuits())
def test_apply_matches_compile(case):
    c, v = case
    m = compile_circuit(c)
    assert unitarity_check(m, 1e-10)
    np.testing.assert_allclose(apply_circuit(c, v).amplitudes, m @ v.amplitudes, atol=1e-12)


def test_circuit_validation():
    p = RegisterProfile((2, 3))
    with pytest.raises(LevelMismatchError):
        Circuit(p, (WireSwap(0, 1),))
    with pytest.raises(SpanError):
        Circuit(p, (SpanGate(np.eye(2), 1),))
    with pytest.raises(SpecError):
        Circuit(p, (CugSpec((2, 2), (), ((0, np.eye(2)),)),))
    with pytest.raises(InvalidArgumentError):
        Circuit(p, ("not an element",))
    with pytest.raises(IndexError):
        Circuit(p, (WireSwap(0, 5),))
    c = Circuit(p, ())
    with pytest.raises(ShapeError):
        apply_circuit(c, equal_superposition((2, 2)))
