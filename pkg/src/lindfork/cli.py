"""Command-line pipeline: problem JSON in, artifacts out.

Subcommands: decompose (term table as JSON), compile (OpenQASM of the full
factor schedule), simulate (trajectory CSV plus summary), verify (invariant
report, exit 1 on failure). Everything is deterministic: identical configs
produce byte-identical outputs, and no RNG exists anywhere in the pipeline.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .channels import DensityMatrix, generator_matrix, one_one_norm, transfer_from_generator
from .circuits import (
    CircuitIR,
    Gate,
    emit_qasm,
    forking_circuit,
    gate_counts,
    hamiltonian_gate,
)
from .decompose import DecomposedGenerator, GeneratorSpec, decompose
from .errors import ConfigError, LindforkError, ValidationError
from .extreme import canonical_choi, canonical_params, canonical_transfer, extreme_pair
from .numerics import DEFAULT_TOL
from .simulator import run_step, run_trajectory
from .trotter import StepFactor, TrotterPlan, error_bound, plan, reference_product

_DURATION_EPS = 1e-12

#: Deterministic probe states used by `verify` (the pipeline has no RNG).
_PROBES = (
    np.array([[1.0, 0.0], [0.0, 0.0]], dtype=np.complex128),
    np.array([[0.5, 0.5], [0.5, 0.5]], dtype=np.complex128),
    np.array([[0.5, -0.5j], [0.5j, 0.5]], dtype=np.complex128),
    np.array([[0.3, 0.1 + 0.2j], [0.1 - 0.2j, 0.7]], dtype=np.complex128),
)


# --------------------------------------------------------------------------
# config ingestion
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ProblemConfig:
    gspec: GeneratorSpec
    rho0: DensityMatrix
    epsilon: float
    samples: int
    tolerances: dict[str, float]


def _complex_matrix(node: Any, shape: tuple[int, int], what: str) -> np.ndarray:
    if not isinstance(node, dict) or "re" not in node:
        raise ConfigError(f"{what}: expected an object with 're' (and optional 'im') blocks")
    try:
        re = np.asarray(node["re"], dtype=float)
        im = np.asarray(node.get("im", np.zeros(shape)), dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{what}: non-numeric entries ({exc})") from None
    if re.shape != shape or im.shape != shape:
        raise ConfigError(f"{what}: expected shape {shape}, got {re.shape}/{im.shape}")
    return re + 1j * im


def load_config(path: str) -> ProblemConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    missing = {"hamiltonian", "gks_matrix", "time", "epsilon", "initial_state"} - raw.keys()
    if missing:
        raise ConfigError(f"config missing keys: {sorted(missing)}")

    h = _complex_matrix(raw["hamiltonian"], (2, 2), "hamiltonian")
    a = _complex_matrix(raw["gks_matrix"], (3, 3), "gks_matrix")
    time = raw["time"]
    epsilon = raw["epsilon"]
    if not isinstance(time, (int, float)) or not math.isfinite(float(time)):
        raise ConfigError("time must be a finite number")
    if not isinstance(epsilon, (int, float)) or not 0.0 < float(epsilon) <= 1.0:
        raise ConfigError(f"BadEpsilon: epsilon must lie in (0, 1], got {epsilon!r}")

    tol = {k: float(v) for k, v in (raw.get("tolerances") or {}).items()}
    tol["validation"] = float(os.environ.get("LF_TOL", tol.get("validation", DEFAULT_TOL)))
    tol.setdefault("circuit", 1e-7)

    state_node = raw["initial_state"]
    if not isinstance(state_node, dict):
        raise ConfigError("initial_state must be an object")
    if "bloch" in state_node:
        v = np.asarray(state_node["bloch"], dtype=float)
        if v.shape != (3,):
            raise ConfigError("initial_state.bloch must be a 3-vector")
        rho0 = DensityMatrix.from_bloch(v, tol=tol["validation"])
    else:
        rho0 = DensityMatrix(_complex_matrix(state_node, (2, 2), "initial_state"))

    samples = int(raw.get("samples", 10))
    if samples < 2:
        raise ConfigError("samples must be at least 2")
    gspec = GeneratorSpec(hamiltonian=h, gks_matrix=a, time=float(time))
    return ProblemConfig(
        gspec=gspec, rho0=rho0, epsilon=float(epsilon), samples=samples, tolerances=tol
    )


# --------------------------------------------------------------------------
# compile pipeline
# --------------------------------------------------------------------------

_AUX_ROLES = ("ancilla", "environment", "fork1", "fork2")


def _remap(gates: Sequence[Gate], mapping: dict[int, int]) -> list[Gate]:
    return [
        Gate(g.kind, tuple(mapping[q] for q in g.qubits), g.angle, g.matrix, g.on_zero)
        for g in gates
    ]


def compile_circuit(
    dec: DecomposedGenerator, p: TrotterPlan
) -> tuple[CircuitIR, dict[str, int]]:
    """Flatten the whole factor schedule into one lowered circuit.

    The system lives on q[0]; the j-th dissipative invocation gets four
    fresh qubits q[4j+1..4j+4] (ancilla, environment, fork1, fork2) so no
    auxiliary register is ever reused. Zero-duration factors are skipped.
    """
    terms = {t.k: t for t in dec.terms}
    gates: list[Gate] = []
    roles: dict[int, str] = {0: "system"}
    invocations = 0
    dissipative = 0
    for factor in p.steps:
        if factor.duration < _DURATION_EPS:
            continue
        invocations += 1
        if factor.k == 0:
            gates += hamiltonian_gate(dec.hamiltonian, factor.duration, qubit=0)
            continue
        term = terms[factor.k]
        pair = extreme_pair(canonical_params(term.theta, factor.duration))
        circ = forking_circuit(pair, term.lift, ancilla_prep=True)
        base = 1 + 4 * dissipative
        mapping = {0: base, 1: base + 1, 2: 0, 3: base + 2, 4: base + 3}
        for offset, role in enumerate(_AUX_ROLES):
            roles[base + offset] = role
        gates += _remap(circ.gates, mapping)
        dissipative += 1
    circ = CircuitIR(1 + 4 * dissipative, roles, tuple(gates)).lowered()
    report = gate_counts(circ)
    report["channel_invocations"] = invocations
    return circ, report


def _qasm_with_header(circ: CircuitIR, p: TrotterPlan) -> str:
    head = [
        "// register layout: q[0] = system;",
        "// dissipative invocation j occupies q[4j+1]=ancilla, q[4j+2]=environment,",
        "// q[4j+3]=fork1, q[4j+4]=fork2 -- fresh registers, never reused.",
        f"// factor schedule: {p.n_steps} blocks of {len(p.block)} factors, tau = {p.tau:.17g}",
    ]
    return "\n".join(head) + "\n" + emit_qasm(circ)


def _write(path: str | None, text: str) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _mat_json(m: np.ndarray) -> dict[str, list]:
    m = np.asarray(m)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_decompose(cfg: ProblemConfig, args: argparse.Namespace) -> int:
    dec = decompose(cfg.gspec)
    residual = float(np.abs(dec.reconstruct_gks() - cfg.gspec.gks_matrix).max())
    payload = {
        "terms": [
            {
                "k": t.k,
                "lambda": t.weight,
                "theta": t.theta,
                "psi": t.psi,
                "C": t.rotation.tolist(),
                "U": _mat_json(t.lift),
            }
            for t in dec.terms
        ],
        "reconstruction_residual": residual,
    }
    _write(args.report, _json_text(payload))
    return 0


def cmd_compile(cfg: ProblemConfig, args: argparse.Namespace) -> int:
    dec = decompose(cfg.gspec)
    p = plan(dec, cfg.gspec.time, cfg.epsilon)
    circ, report = compile_circuit(dec, p)
    if args.qasm:
        _write(args.qasm, _qasm_with_header(circ, p))
    payload: dict[str, Any] = dict(report)
    payload.update(
        {
            "n_steps": p.n_steps,
            "tau": p.tau,
            "lambda_cap": p.lambda_cap,
            "qubit_count": circ.qubit_count,
        }
    )
    _write(args.report, _json_text(payload))
    return 0


def cmd_simulate(cfg: ProblemConfig, args: argparse.Namespace) -> int:
    samples = args.samples if args.samples is not None else cfg.samples
    dec = decompose(cfg.gspec)
    p = plan(dec, cfg.gspec.time, cfg.epsilon)
    traj = run_trajectory(cfg.gspec, p, cfg.rho0, samples=samples)
    if args.trajectory:
        _write(args.trajectory, traj.to_csv())
    payload = {
        "final_time": float(traj.times[-1]),
        "final_bloch": [float(x) for x in traj.bloch[-1]],
        "max_oracle_distance": float(traj.oracle_distance.max()),
        "n_steps": p.n_steps,
        "lambda_cap": p.lambda_cap,
        "theoretical_bound": error_bound(cfg.gspec.time, p.lambda_cap, p.n_steps),
    }
    _write(args.report, _json_text(payload))
    return 0


def _env_trace(u: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """tr_env[u (|0><0| (x) rho) u^dag] with the environment as the first factor."""
    zero = np.zeros((2, 2), dtype=np.complex128)
    zero[0, 0] = 1.0
    full = u @ np.kron(zero, rho) @ u.conj().T
    return full.reshape(2, 2, 2, 2).trace(axis1=0, axis2=2)


def _verify_checks(cfg: ProblemConfig, args: argparse.Namespace) -> dict[str, Any]:
    checks: list[dict[str, Any]] = []

    def check(name: str, passed: bool, detail: float) -> None:
        checks.append({"name": name, "passed": bool(passed), "detail": float(detail)})

    dec = decompose(cfg.gspec)
    residual = float(np.abs(dec.reconstruct_gks() - cfg.gspec.gks_matrix).max())
    check("decomposition_rebuild", residual < 1e-9, residual)
    worst_theta = max((abs(t.theta) for t in dec.terms), default=0.0)
    check("theta_range", worst_theta <= np.pi / 4 + 1e-12, worst_theta)

    # channel identities per term over a small deterministic time grid
    conv_worst = stine_worst = step_worst = 0.0
    for term in dec.terms:
        for s in (0.1, 0.5, 1.5):
            pars = canonical_params(term.theta, s)
            pair = extreme_pair(pars)
            tau1, tau2 = pair.choi_pair()
            mix = 0.5 * (tau1.matrix + tau2.matrix)
            conv_worst = max(
                conv_worst, float(np.abs(mix - canonical_choi(pars).matrix).max())
            )
            for u, ks in ((pair.u1, pair.kraus1), (pair.u2, pair.kraus2)):
                for rho in _PROBES:
                    stine_worst = max(
                        stine_worst,
                        float(np.abs(_env_trace(u, rho) - ks.apply(rho)).max()),
                    )
    check("quasi_extreme_convexity", conv_worst < 1e-10, conv_worst)
    check("stinespring_kraus_consistency", stine_worst < 1e-10, stine_worst)

    # circuit execution at the plan's own durations vs the closed-form channel
    p = plan(dec, cfg.gspec.time, cfg.epsilon)
    for factor in {(f.k, f.duration) for f in p.block}:
        k, duration = factor
        if k == 0 or duration < _DURATION_EPS:
            continue
        term = next(t for t in dec.terms if t.k == k)
        transfer = canonical_transfer(canonical_params(term.theta, duration))
        u = term.lift
        for rho in _PROBES:
            expected = u.conj().T @ transfer.apply(u @ rho @ u.conj().T) @ u
            got = run_step(DensityMatrix(rho), StepFactor(k, duration), dec)
            step_worst = max(step_worst, float(np.abs(got.matrix - expected).max()))
    check("forking_step_fidelity", step_worst < 1e-9, step_worst)

    # product-formula convergence sweep on this generator
    t_sweep = cfg.gspec.time if cfg.gspec.time > 0 else 1.0
    exact = transfer_from_generator(
        generator_matrix(cfg.gspec.hamiltonian, cfg.gspec.gks_matrix), t_sweep
    ).matrix
    base = plan(dec, t_sweep, 1.0)
    ns = [4, 8, 16, 32, 64]
    errors = []
    bound_ok = True
    for n in ns:
        scale = base.n_steps / n
        p_n = TrotterPlan(
            n_steps=n,
            tau=t_sweep / n,
            epsilon_target=base.epsilon_target,
            lambda_cap=base.lambda_cap,
            block=tuple(StepFactor(f.k, f.duration * scale) for f in base.block),
        )
        err = one_one_norm(exact - reference_product(dec, p_n).matrix)
        errors.append(err)
        if err > error_bound(t_sweep, base.lambda_cap, n) + 1e-12:
            bound_ok = False
    check("trotter_bound_compliance", bound_ok, max(errors))
    if len(base.block) > 1 and errors[0] > 1e-11:
        slope = -float(np.polyfit(np.log(ns), np.log(errors), 1)[0])
        check("trotter_slope", 1.7 <= slope <= 2.3, slope)
    else:
        check("trotter_slope", True, 2.0)  # single factor: splitting is exact

    # end to end against the integrator
    samples = args.samples if args.samples is not None else cfg.samples
    traj = run_trajectory(cfg.gspec, p, cfg.rho0, samples=samples)
    measured = float(traj.oracle_distance[-1])
    bound = error_bound(cfg.gspec.time, p.lambda_cap, p.n_steps)
    slack = cfg.tolerances.get("circuit", 1e-7)
    check("end_to_end_error", measured <= bound + slack, measured)

    _, gate_report = compile_circuit(dec, p)
    return {
        "n_steps": p.n_steps,
        "lambda_cap": p.lambda_cap,
        "theoretical_bound": bound,
        "measured_error": measured,
        "checks": checks,
        "gate_counts": gate_report,
        "passed": all(c["passed"] for c in checks),
    }


def cmd_verify(cfg: ProblemConfig, args: argparse.Namespace) -> int:
    report = _verify_checks(cfg, args)
    _write(args.report, _json_text(report))
    return 0 if report["passed"] else 1


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

_COMMANDS = {
    "decompose": cmd_decompose,
    "compile": cmd_compile,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lindfork",
        description="Decompose, compile, simulate, and verify single-qubit "
        "Markovian evolutions as forking quantum circuits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("config", help="problem JSON path")
        sp.add_argument("--qasm", help="write OpenQASM here (compile)")
        sp.add_argument("--trajectory", help="write trajectory CSV here (simulate)")
        sp.add_argument("--report", help="write the JSON report here (default stdout)")
        sp.add_argument("--samples", type=int, default=None, help="trajectory sample count")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return _COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"validation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except LindforkError as exc:  # internal contract violations
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
