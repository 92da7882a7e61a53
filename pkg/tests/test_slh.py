import itertools

import numpy as np
import pytest

from photonic_ldpc import BudgetError, CompositionError, FeedbackLoopError, ParameterError
from photonic_ldpc.slh import (
    Operator,
    basis_jump_targets,
    basis_state,
    build_feedback_fragment,
    build_parity_fragment,
    concat,
    feedback,
    identity_triple,
    jump_rates,
    latch_in_out,
    latch_set_reset,
    lindblad_rhs,
    make_beamsplitter,
    make_latch,
    make_weyl,
    proj,
    series,
    sigma,
    SlhTriple,
    s_unitarity_defect,
)

RT2 = 1.0 / np.sqrt(2.0)


def random_unitary_triple(rng, n_port, label="a"):
    """Random triple with operator entries on one qubit; S unitary on the
    (port x qubit) space by construction."""
    d = 2
    z = rng.normal(size=(n_port * d, n_port * d)) + 1j * rng.normal(size=(n_port * d, n_port * d))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    S = tuple(
        tuple(
            Operator((label,), q[i * d : (i + 1) * d, j * d : (j + 1) * d])
            for j in range(n_port)
        )
        for i in range(n_port)
    )
    L = tuple(
        Operator((label,), rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
        for _ in range(n_port)
    )
    h = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return SlhTriple(S, L, Operator((label,), (h + h.conj().T) / 2))


def triples_close(a, b, tol=1e-10):
    if a.n_port != b.n_port:
        return False
    ok = all(
        a.S[i][j].allclose(b.S[i][j], tol) for i in range(a.n_port) for j in range(a.n_port)
    )
    ok = ok and all(a.L[i].allclose(b.L[i], tol) for i in range(a.n_port))
    return ok and a.H.allclose(b.H, tol)


def test_operator_embedding_commutes():
    rng = np.random.default_rng(0)
    a = Operator(("x",), rng.normal(size=(2, 2)))
    b = Operator(("y",), rng.normal(size=(2, 2)))
    ab = a * b
    ba = b * a
    assert ab.labels == ("x", "y")
    assert ab.allclose(ba)  # disjoint subsystems commute
    assert np.allclose(ab.matrix, np.kron(a.matrix, b.matrix))


def test_operator_scalar_mixing():
    a = proj("x", 1)
    assert (2.0 * a - a).allclose(a)
    assert (1 - proj("x", 0)).allclose(proj("x", 1))


def test_beamsplitter_cases():
    assert triples_close(make_beamsplitter(1.0), identity_triple(2))
    bs = make_beamsplitter(0.5)
    expect = np.array([[RT2, RT2], [-RT2, RT2]])
    got = np.array([[bs.S[i][j].matrix[0, 0].real for j in range(2)] for i in range(2)])
    assert np.allclose(got, expect)
    bs = make_beamsplitter(0.01)
    assert abs(bs.S[0][0].matrix[0, 0]) ** 2 == pytest.approx(0.01)
    assert abs(bs.S[1][0].matrix[0, 0]) ** 2 == pytest.approx(0.99)
    with pytest.raises(ParameterError):
        make_beamsplitter(0.0)
    with pytest.raises(ParameterError):
        make_beamsplitter(1.2)


def test_weyl_amplitudes_add_in_series():
    w1 = make_weyl((1.0 + 0.5j,))
    w2 = make_weyl((0.5 + 0.25j,))  # same phase: no Hamiltonian shift
    combined = series(w2, w1)
    assert combined.L[0].allclose(1.5 + 0.75j)
    assert combined.H.allclose(0.0)
    assert make_weyl(()).n_port == 0


def test_weyl_into_beamsplitter_mixes():
    a, b = 0.8, -0.3 + 0.1j
    g = series(make_beamsplitter(0.5), make_weyl((a, b)))
    assert g.L[0].allclose((a + b) * RT2)
    assert g.L[1].allclose((-a + b) * RT2)


def test_series_identity_element():
    rng = np.random.default_rng(1)
    g = random_unitary_triple(rng, 2)
    assert triples_close(series(identity_triple(2), g), g)
    assert triples_close(series(g, identity_triple(2)), g)


def test_series_associative():
    rng = np.random.default_rng(2)
    for _ in range(5):
        g1 = random_unitary_triple(rng, 2, "a")
        g2 = random_unitary_triple(rng, 2, "b")
        g3 = random_unitary_triple(rng, 2, "c")
        assert triples_close(series(series(g3, g2), g1), series(g3, series(g2, g1)))


def test_series_port_mismatch():
    with pytest.raises(CompositionError):
        series(identity_triple(2), identity_triple(3))


def test_concat_identities_and_port_count():
    assert triples_close(concat(identity_triple(1), identity_triple(1)), identity_triple(2))
    rng = np.random.default_rng(3)
    g1 = random_unitary_triple(rng, 2, "a")
    g2 = random_unitary_triple(rng, 3, "b")
    assert concat(g1, g2).n_port == 5


def test_latch_block_structure():
    latch = make_latch("q")
    assert latch.n_port == 4
    sr, io = latch_set_reset("q"), latch_in_out("q")
    for i, j in itertools.product(range(2), range(2)):
        assert latch.S[i][j].allclose(sr.S[i][j])
        assert latch.S[2 + i][2 + j].allclose(io.S[i][j])
        assert latch.S[i][2 + j].allclose(0.0)
        assert latch.S[2 + i][j].allclose(0.0)
    assert s_unitarity_defect(latch) <= 1e-12


def test_latch_routing_by_state():
    io = latch_in_out("q")
    # state |0>: rails pass through; state |1>: rails exchanged with a sign
    p0 = np.array([1, 0])
    p1 = np.array([0, 1])
    S = [[io.S[i][j].matrix for j in range(2)] for i in range(2)]
    assert np.allclose(p0 @ S[0][0] @ p0, 1) and np.allclose(p0 @ S[1][0] @ p0, 0)
    assert np.allclose(p1 @ S[0][0] @ p1, 0) and np.allclose(p1 @ S[1][0] @ p1, -1)


def test_latch_set_drive_rates():
    alpha = 1.3
    drv = series(make_latch("q"), make_weyl((0.0, alpha, 0.0, 0.0)))
    from_0 = basis_jump_targets(drv, (0,))
    from_1 = basis_jump_targets(drv, (1,))
    assert from_0 == [(0, pytest.approx(alpha**2), (1,))]  # jumps into |1>
    assert [(r, t) for (_, r, t) in from_1] == [(pytest.approx(alpha**2), (1,))]  # no escape


def test_feedback_scalar_beamsplitter():
    g = feedback(make_beamsplitter(0.5), 1, 1)
    assert g.n_port == 1
    assert g.S[0][0].allclose(-1.0)


def test_feedback_singular_loop():
    with pytest.raises(FeedbackLoopError):
        feedback(identity_triple(2), 0, 0)


def test_feedback_preserves_unitarity():
    rng = np.random.default_rng(4)
    for _ in range(10):
        g = random_unitary_triple(rng, 3)
        try:
            gf = feedback(g, int(rng.integers(3)), int(rng.integers(3)))
        except FeedbackLoopError:
            continue
        assert s_unitarity_defect(gf) <= 1e-10


def test_feedback_reproduces_series():
    # routing out of g1 into g2 through a loop equals the series product
    rng = np.random.default_rng(5)
    g1 = random_unitary_triple(rng, 1, "a")
    g2 = random_unitary_triple(rng, 1, "b")
    big = concat(g2, g1)  # ports: 0 = g2, 1 = g1
    reduced = feedback(big, out_port=1, in_port=0)
    assert triples_close(reduced, series(g2, g1))


def test_feedback_disjoint_loops_commute():
    rng = np.random.default_rng(6)
    for _ in range(5):
        g = random_unitary_triple(rng, 4)
        try:
            a = feedback(feedback(g, 0, 1), 1, 2)  # loops (0->1), then old (2->3)
            b = feedback(feedback(g, 2, 3), 0, 1)
        except FeedbackLoopError:
            continue
        assert triples_close(a, b)


def test_lindblad_trace_free_and_hermitian():
    rng = np.random.default_rng(7)
    g = random_unitary_triple(rng, 2)
    for _ in range(10):
        z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        rho_m = z @ z.conj().T
        rho = Operator(("a",), rho_m / np.trace(rho_m))
        out = lindblad_rhs(g, rho)
        assert abs(np.trace(out.matrix)) <= 1e-12
        assert out.allclose(out.adjoint(), tol=1e-12)


def test_lindblad_amplitude_decay():
    # H = 0, single channel L = |0><1|: d<P1>/dt = -<P1>
    g = SlhTriple(
        ((Operator.scalar(1.0),),), (sigma("a", 0, 1),), Operator.scalar(0.0)
    )
    rng = np.random.default_rng(8)
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho_m = z @ z.conj().T
    rho = Operator(("a",), rho_m / np.trace(rho_m))
    out = lindblad_rhs(g, rho)
    p1 = proj("a", 1)
    lhs = np.trace((p1 * out).matrix)
    rhs = -np.trace((p1 * rho).matrix)
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_jump_rates_basics():
    w = make_weyl((2.0 - 1.0j, 0.0))
    psi = np.array([1.0])  # no internal degrees of freedom
    rates = jump_rates(w, psi)
    assert rates[0] == pytest.approx(5.0)
    assert rates[1] == 0.0


def test_parity_fragment_examples():
    alpha = 0.9
    g1 = build_parity_fragment(1, alpha)
    # variable |0>, check |0>: power exits the reset channel, none on set
    rates = jump_rates(g1, basis_state(g1.labels, {"c": 0, "v0": 0}))
    assert rates[0] == pytest.approx(alpha**2) and rates[1] == pytest.approx(0.0)
    # odd parity drives the check toward |1>
    g2 = build_parity_fragment(2, alpha)
    targets = basis_jump_targets(g2, {"c": 0, "v0": 0, "v1": 1})
    flips = [(r, t) for (_, r, t) in targets if t != (0, 0, 1)]
    assert len(flips) == 1
    rate, target = flips[0]
    assert rate == pytest.approx(alpha**2)
    assert target == (1, 0, 1)


def test_parity_fragment_exhaustive_routing():
    alpha = 1.1
    for k_vars in (1, 2, 3, 4):
        g = build_parity_fragment(k_vars, alpha)
        labels = g.labels
        for bits in itertools.product((0, 1), repeat=k_vars + 1):
            named = dict(zip(labels, bits))
            rates = jump_rates(g, basis_state(labels, bits))
            # exactly one of the two output channels carries the full power
            assert sorted(rates) == pytest.approx([0.0, alpha**2])
            parity = sum(named[f"v{i}"] for i in range(k_vars)) % 2
            toggles = [
                t for (_, _, t) in basis_jump_targets(g, bits) if t != tuple(bits)
            ]
            if named["c"] != parity:
                assert len(toggles) == 1  # driven toward the true parity
            else:
                assert toggles == []  # power reflects out without a state change


def test_feedback_fragment_examples():
    beta, gamma = 1.0, 0.3
    g = build_feedback_fragment(1, beta, gamma)
    for c, expect in ((0, gamma * beta**2), (1, beta**2)):
        for v in (0, 1):
            toggles = [
                r
                for (_, r, t) in basis_jump_targets(g, {"c0": c, "v": v})
                if t != (c, v)
            ]
            assert sum(toggles) == pytest.approx(expect)
    g3 = build_feedback_fragment(3, beta, gamma)
    toggles = [
        r
        for (_, r, t) in basis_jump_targets(g3, {"c0": 0, "c1": 0, "c2": 0, "v": 0})
        if t != (0, 0, 0, 0)
    ]
    assert sum(toggles) == pytest.approx(gamma**3 * beta**2)


def test_feedback_fragment_zero_drive():
    g = build_feedback_fragment(2, 0.0, 0.5)
    rates = jump_rates(g, basis_state(g.labels, (0, 1, 0)))
    assert np.all(rates == 0.0)


def test_fragment_budgets():
    with pytest.raises(BudgetError):
        build_parity_fragment(8, 1.0)
    with pytest.raises(BudgetError):
        build_feedback_fragment(8, 1.0, 0.5)
    with pytest.raises(ParameterError):
        build_parity_fragment(0, 1.0)


def test_products_preserve_unitarity_on_circuit_blocks():
    g = series(latch_set_reset("c"), series(latch_in_out("v0"), make_weyl((1.0, 0.0))))
    assert s_unitarity_defect(g) <= 1e-10
    h = concat(make_latch("a"), make_beamsplitter(0.3))
    assert s_unitarity_defect(h) <= 1e-10
