"""Acceptance gate: one test per release criterion, each printing a single
PASS/FAIL line with the measured figure of merit before asserting it.

Every expected number here is either a closed-form value cross-checked in the
unit suites against independent integrators/optimizers, or a property whose
oracle is computed inline (direct superoperator evaluation, explicit
dilation, high-precision product formulas).
"""

import math
import time

import numpy as np

from lindfork.channels import (
    DensityMatrix,
    generator_matrix,
    one_one_norm,
    transfer_from_generator,
)
from lindfork.circuits import (
    CircuitIR,
    Gate,
    circuit_unitary,
    controlled_su2,
    forking_circuit,
    rotation_y,
    synthesize_stinespring,
    zyz,
    zyz_matrix,
)
from lindfork.cli import compile_circuit, main
from lindfork.decompose import GeneratorSpec, decompose
from lindfork.extreme import canonical_choi, canonical_params, extreme_pair
from lindfork.simulator import apply_gate, partial_trace, product_state, run_step
from lindfork.trotter import (
    StepFactor,
    TrotterPlan,
    error_bound,
    lambda_cap,
    plan,
    reference_product,
)

from _oracles import kraus_apply, random_density, random_hermitian, random_psd, random_unitary

E0 = np.array([1.0, 0.0], dtype=np.complex128)
PROBES = (
    np.diag([1.0, 0.0]).astype(np.complex128),
    np.diag([0.0, 1.0]).astype(np.complex128),
    np.full((2, 2), 0.5, dtype=np.complex128),
    np.array([[0.5, -0.5j], [0.5j, 0.5]], dtype=np.complex128),
    np.array([[0.3, 0.1 + 0.2j], [0.1 - 0.2j, 0.7]], dtype=np.complex128),
)


def report(num: int, label: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {num} ({label}): {detail}")
    assert ok, f"criterion {num} ({label}): {detail}"


def su2(rng) -> np.ndarray:
    u = random_unitary(rng)
    return u / np.sqrt(np.linalg.det(u))


def grid_20x20():
    thetas = np.linspace(-np.pi / 4, np.pi / 4, 20)
    ss = np.linspace(0.0, 3.0, 20)
    return [(th, s) for th in thetas for s in ss]


def test_criterion_1_decomposition_round_trip():
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst_residual = worst_theta = 0.0
    for _ in range(1000):
        a = random_psd(rng, 3)
        dec = decompose(GeneratorSpec(np.zeros((2, 2)), a, 1.0))
        worst_residual = max(
            worst_residual, float(np.abs(dec.reconstruct_gks() - a).max())
        )
        for t in dec.terms:
            worst_theta = max(worst_theta, abs(t.theta))
    elapsed = time.perf_counter() - start
    ok = worst_residual < 1e-9 and worst_theta <= np.pi / 4 + 1e-12 and elapsed < 10.0
    report(
        1,
        "decomposition round trip",
        ok,
        f"max residual {worst_residual:.3g}, max |theta| {worst_theta:.6f}, "
        f"{elapsed:.2f}s for 1000 matrices",
    )


def test_criterion_2_quasi_extreme_convexity():
    start = time.perf_counter()
    worst_mix = worst_rank = 0.0
    for theta, s in grid_20x20():
        pars = canonical_params(theta, s)
        pair = extreme_pair(pars)
        tau1, tau2 = pair.choi_pair()
        mix = 0.5 * (tau1.matrix + tau2.matrix)
        worst_mix = max(worst_mix, float(np.abs(mix - canonical_choi(pars).matrix).max()))
        for tau in (tau1, tau2):
            eigs = np.sort(np.linalg.eigvalsh(tau.matrix))
            worst_rank = max(worst_rank, float(eigs[-3]))  # third-largest
    elapsed = time.perf_counter() - start
    ok = worst_mix < 1e-10 and worst_rank < 1e-10 and elapsed < 5.0
    report(
        2,
        "quasi-extreme convexity",
        ok,
        f"max mixture deviation {worst_mix:.3g}, max third eigenvalue "
        f"{worst_rank:.3g}, {elapsed:.2f}s over the 20x20 grid",
    )


def test_criterion_3_stinespring_kraus_consistency():
    rng = np.random.default_rng(103)
    zero = np.zeros((2, 2), dtype=np.complex128)
    zero[0, 0] = 1.0
    worst_complete = worst_dilation = 0.0
    for theta, s in grid_20x20():
        pair = extreme_pair(canonical_params(theta, s))
        rhos = np.stack([random_density(rng) for _ in range(100)])
        for u, ks in ((pair.u1, pair.kraus1), (pair.u2, pair.kraus2)):
            total = sum(k.conj().T @ k for k in ks.operators)
            worst_complete = max(
                worst_complete, float(np.abs(total - np.eye(2)).max())
            )
            # build |0><0| (x) rho for the whole batch, conjugate, trace env
            batch = np.zeros((100, 4, 4), dtype=np.complex128)
            batch[:, :2, :2] = rhos
            evolved = np.einsum("ab,nbc,dc->nad", u, batch, u.conj())
            reduced = evolved.reshape(100, 2, 2, 2, 2).trace(axis1=1, axis2=3)
            direct = np.stack([kraus_apply(ks.operators, r) for r in rhos])
            worst_dilation = max(worst_dilation, float(np.abs(reduced - direct).max()))
    ok = worst_complete < 1e-9 and worst_dilation < 1e-10
    report(
        3,
        "Stinespring/Kraus consistency",
        ok,
        f"max completeness defect {worst_complete:.3g}, max dilation-vs-Kraus "
        f"deviation {worst_dilation:.3g} (100 states per grid point)",
    )


def test_criterion_4_circuit_synthesis_fidelity():
    rng = np.random.default_rng(104)
    worst_circ = 0.0
    for _ in range(100):
        theta = rng.uniform(-np.pi / 4, np.pi / 4)
        s = rng.uniform(0.05, 2.5)
        pair = extreme_pair(canonical_params(theta, s))
        for which, target in ((1, pair.u1), (2, pair.u2)):
            gates = synthesize_stinespring(pair, which, env=0, sys=1)
            got = circuit_unitary(CircuitIR(2, {}, tuple(gates)).lowered())
            z = np.trace(target.conj().T @ got)
            got = got * (np.conj(z) / abs(z)) if abs(z) > 0 else got
            worst_circ = max(worst_circ, float(np.abs(got - target).max()))

    worst_zyz = 0.0
    for _ in range(100):
        u = random_unitary(rng)
        delta, alpha, th, beta = zyz(u)
        worst_zyz = max(worst_zyz, float(np.abs(zyz_matrix(delta, alpha, th, beta) - u).max()))

    worst_ctrl = 0.0
    for _ in range(100):
        v = su2(rng)
        for on_zero in (False, True):
            gates = controlled_su2(v, 0, 1, control_on_zero=on_zero)
            got = circuit_unitary(CircuitIR(2, {}, tuple(gates)))
            blocks = (np.eye(2), v) if not on_zero else (v, np.eye(2))
            want = np.zeros((4, 4), dtype=np.complex128)
            want[:2, :2], want[2:, 2:] = blocks
            worst_ctrl = max(worst_ctrl, float(np.abs(got - want).max()))

    ok = worst_circ < 1e-9 and worst_zyz < 1e-10 and worst_ctrl < 1e-9
    report(
        4,
        "circuit synthesis fidelity",
        ok,
        f"dilation circuits {worst_circ:.3g} (up to phase), ZYZ {worst_zyz:.3g}, "
        f"controlled-SU(2) {worst_ctrl:.3g} over 100 draws each",
    )


def test_criterion_5_forking_circuit_theorem():
    rng = np.random.default_rng(105)
    worst_mix = worst_fork = 0.0
    for trial in range(100):
        theta = rng.uniform(-np.pi / 4, np.pi / 4)
        s = rng.uniform(0.05, 2.5)
        u_k = su2(rng)
        rho = random_density(rng)
        pair = extreme_pair(canonical_params(theta, s))
        circ = forking_circuit(pair, u_k, ancilla_prep=True)

        def run(fork1, fork2):
            state = product_state(E0, E0, rho, fork1, fork2)
            for g in circ.gates:
                state = apply_gate(state, g)
            return partial_trace(state, [2]).matrix

        got = run(E0, E0)
        conj = u_k @ rho @ u_k.conj().T
        mixture = 0.5 * (
            kraus_apply(pair.kraus1.operators, conj)
            + kraus_apply(pair.kraus2.operators, conj)
        )
        want = u_k.conj().T @ mixture @ u_k
        worst_mix = max(worst_mix, float(np.abs(got - want).max()))
        if trial % 10 == 0:  # fork-register invariance on a subsample
            alt = run(random_density(rng), random_density(rng))
            worst_fork = max(worst_fork, float(np.abs(alt - got).max()))
    ok = worst_mix < 1e-9 and worst_fork < 1e-10
    report(
        5,
        "forking-circuit mixture",
        ok,
        f"circuit vs direct superoperator {worst_mix:.3g} over 100 draws, "
        f"fork-register invariance {worst_fork:.3g}",
    )


def test_criterion_6_product_formula_order():
    rng = np.random.default_rng(106)
    start = time.perf_counter()
    ns = np.array([4, 8, 16, 32, 64])
    worst_slope_dev = 0.0
    slopes = []
    bound_ok = True
    for _ in range(3):
        gspec = GeneratorSpec(
            random_hermitian(rng) * 0.5, random_psd(rng, 3, scale=0.5), 1.0
        )
        dec = decompose(gspec)
        cap = lambda_cap(dec)
        exact = transfer_from_generator(
            generator_matrix(gspec.hamiltonian, gspec.gks_matrix), 1.0
        ).matrix
        base = plan(dec, 1.0, 1.0)
        errors = []
        for n in ns:
            scale = base.n_steps / n
            p_n = TrotterPlan(
                n_steps=int(n),
                tau=1.0 / n,
                epsilon_target=base.epsilon_target,
                lambda_cap=base.lambda_cap,
                block=tuple(StepFactor(f.k, f.duration * scale) for f in base.block),
            )
            diff = exact - reference_product(dec, p_n).matrix
            err = one_one_norm(diff)
            errors.append(err)
            bound = error_bound(1.0, cap, int(n))
            if err > bound or float(np.linalg.norm(diff, 2)) > bound:
                bound_ok = False
        slope = -float(np.polyfit(np.log(ns), np.log(errors), 1)[0])
        slopes.append(slope)
    elapsed = time.perf_counter() - start
    slopes_ok = all(1.7 <= s <= 2.3 for s in slopes)
    ok = slopes_ok and bound_ok and elapsed < 60.0
    report(
        6,
        "second-order product formula",
        ok,
        f"slopes {[f'{s:.3f}' for s in slopes]}, bound respected: {bound_ok}, "
        f"{elapsed:.1f}s",
    )


def test_criterion_7_step_count_arithmetic():
    rng = np.random.default_rng(42)
    h, a = random_hermitian(rng), random_psd(rng, 3)
    cap0 = lambda_cap(decompose(GeneratorSpec(h, a, 1.0)))
    dec = decompose(GeneratorSpec(h / cap0, a / cap0, 1.0))
    cap = lambda_cap(dec)
    p = plan(dec, 1.0, 0.01)
    _, rep = compile_circuit(dec, p)
    ok = (
        abs(cap - 1.0) < 1e-12
        and p.n_steps == 47
        and len(p.block) == 7
        and rep["channel_invocations"] <= 329
    )
    report(
        7,
        "step-count arithmetic",
        ok,
        f"lambda_cap {cap:.15f}, N = {p.n_steps}, block of {len(p.block)}, "
        f"{rep['channel_invocations']} channel invocations (limit 329)",
    )


def test_criterion_8_amplitude_damping_fixture():
    # dissipation toward the ground state: GKS matrix (1/2)(x - iy)(x - iy)^dag
    a_ad = 0.5 * np.array(
        [[1.0, -1.0j, 0.0], [1.0j, 1.0, 0.0], [0.0, 0.0, 0.0]], dtype=complex
    )
    dec = decompose(GeneratorSpec(np.zeros((2, 2)), a_ad, 1.0))
    (term,) = dec.terms

    def damping_circuit_output(p: float, rho: np.ndarray) -> np.ndarray:
        theta_ad = 2.0 * math.asin(math.sqrt(p))
        gates = controlled_su2(rotation_y(theta_ad), control=1, target=0)
        gates.append(Gate("cnot", (0, 1)))
        state = product_state(E0, rho)  # environment first, starts in |0>
        for g in gates:
            state = apply_gate(state, g)
        return partial_trace(state, [1]).matrix

    worst_pop = worst_equiv = 0.0
    excited = np.diag([0.0, 1.0]).astype(complex)
    for p in (0.0, 0.36, 0.75, 1.0):
        out = damping_circuit_output(p, excited)
        worst_pop = max(worst_pop, abs(float(out[1, 1].real) - (1.0 - p)))
        s = 400.0 if p == 1.0 else -0.5 * math.log1p(-p)
        for rho in PROBES:
            pipeline = run_step(DensityMatrix(rho), StepFactor(term.k, s), dec)
            circuit = damping_circuit_output(p, rho)
            worst_equiv = max(worst_equiv, float(np.abs(pipeline.matrix - circuit).max()))
    ok = worst_pop < 1e-10 and worst_equiv < 1e-9 and abs(term.theta - np.pi / 4) < 1e-12
    report(
        8,
        "amplitude-damping fixture",
        ok,
        f"excited-population defect {worst_pop:.3g}, circuit-vs-pipeline "
        f"deviation {worst_equiv:.3g}, canonical angle {term.theta:.12f}",
    )


def test_criterion_9_end_to_end_determinism(repo_root, tmp_path):
    cfg = str(repo_root / "configs" / "example.json")
    outs = []
    for tag in ("a", "b"):
        qasm = tmp_path / f"{tag}.qasm"
        crep = tmp_path / f"{tag}-compile.json"
        csvf = tmp_path / f"{tag}.csv"
        srep = tmp_path / f"{tag}-simulate.json"
        assert main(["compile", cfg, "--qasm", str(qasm), "--report", str(crep)]) == 0
        assert main(["simulate", cfg, "--trajectory", str(csvf), "--report", str(srep)]) == 0
        outs.append(
            (qasm.read_bytes(), crep.read_bytes(), csvf.read_bytes(), srep.read_bytes())
        )
    sizes = [len(b) for b in outs[0]]
    ok = outs[0] == outs[1]
    report(
        9,
        "end-to-end determinism",
        ok,
        f"byte-identical reruns of compile+simulate on the bundled config "
        f"(artifact sizes {sizes})",
    )
