#!/usr/bin/env python3
"""Smoke test for the qsym_py extension module.

Builds are produced by cargo; this script locates the cdylib under
target/{release,debug}, copies it next to a temp directory under the
importable name, imports it, and exercises the main surface.

Usage:
    cargo build -p qsym-py --release
    python3 python/smoke_test.py
"""

import cmath
import json
import math
import shutil
import sys
import tempfile
from pathlib import Path


def locate_and_import():
    root = Path(__file__).resolve().parent.parent
    candidates = [
        root / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libqsym_py.so", "qsym_py.so", "libqsym_py.dylib")
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit(
            "qsym_py cdylib not found; run `cargo build -p qsym-py` "
            "(or --release) first"
        )
    stage = Path(tempfile.mkdtemp(prefix="qsym-py-"))
    shutil.copy2(built, stage / "qsym_py.so")
    sys.path.insert(0, str(stage))
    import qsym_py

    return qsym_py


def approx(a, b, tol=1e-9):
    return abs(a - b) <= tol


def main():
    q = locate_and_import()
    checks = 0

    # symbolic engine
    assert q.simplify("sin(t)^2 + cos(t)^2") == "1"
    assert q.simplify("2*(x + x)") == "4*x"
    d = q.differentiate("sin(2*t)", "t")
    v = q.evaluate(d, {"t": 0.3})
    assert approx(v, 2 * math.cos(0.6)), (d, v)
    euler = q.evaluate("exp(i*pi)")
    assert approx(euler, -1, 1e-12)
    checks += 4

    # circuit loading, unitary, execution
    bell = json.dumps(
        {
            "num_qubits": 2,
            "gates": [
                {"name": "h", "targets": [0]},
                {"name": "cnot", "targets": [0, 1]},
            ],
        }
    )
    c = q.Circuit.from_json(bell)
    assert c.num_qubits == 2 and c.num_gates == 2
    u = c.unitary()
    h = 1 / math.sqrt(2)
    assert approx(u[0][0], h) and approx(u[3][0], h)
    result = c.run(shots=2000, seed=7)
    counts = result["counts"]
    assert set(counts) == {"00", "11"}, counts
    assert sum(counts.values()) == 2000
    amps = result["amplitudes"]
    assert approx(abs(amps[0]) ** 2, 0.5, 1e-12)
    checks += 5

    # parametrized circuit: expectation and gradients
    ry = json.dumps(
        {
            "num_qubits": 1,
            "gates": [{"name": "ry", "targets": [0], "params": ["theta"]}],
        }
    )
    pc = q.Circuit.from_json(ry)
    assert pc.free_symbols() == ["theta"]
    for theta in (0.0, 0.7, 2.2):
        assert approx(pc.expectation("Z0", {"theta": theta}), math.cos(theta), 1e-12)
    names, grad = pc.gradient_of("Z0", {"theta": math.pi / 2})
    assert names == ["theta"] and approx(grad[0], -1.0, 1e-9)
    _, sym_grad = pc.symbolic_gradient("Z0")
    at_half_pi = q.evaluate(sym_grad[0], {"theta": math.pi / 2})
    assert approx(at_half_pi, -1.0, 1e-9), sym_grad
    checks += 3

    # random objects
    ket = q.haar_ket(4, seed=42)
    assert approx(sum(abs(a) ** 2 for a in ket), 1.0, 1e-12)
    assert ket == q.haar_ket(4, seed=42)
    un = q.haar_unitary(3, seed=1)
    for r in range(3):
        for cidx in range(3):
            dot = sum(un[k][r].conjugate() * un[k][cidx] for k in range(3))
            assert approx(dot, 1.0 if r == cidx else 0.0, 1e-10)
    checks += 3

    # channels: Kraus <-> superoperator round trip preserves action shape
    kraus = q.random_channel_kraus(2, 3, seed=5)
    completeness = [[sum(k[i][r].conjugate() * k[i][cidx] for k in kraus for i in range(2))
                     for cidx in range(2)] for r in range(2)]
    assert approx(completeness[0][0], 1.0, 1e-9)
    assert approx(completeness[1][1], 1.0, 1e-9)
    assert approx(completeness[0][1], 0.0, 1e-9)
    sup = q.kraus_to_super(kraus)
    back = q.super_to_kraus(sup, 2, 2)
    assert len(back) >= 1
    checks += 2

    # equivalence checking
    hzh = json.dumps(
        {
            "num_qubits": 1,
            "gates": [
                {"name": "h", "targets": [0]},
                {"name": "z", "targets": [0]},
                {"name": "h", "targets": [0]},
            ],
        }
    )
    x = json.dumps({"num_qubits": 1, "gates": [{"name": "x", "targets": [0]}]})
    z = json.dumps({"num_qubits": 1, "gates": [{"name": "z", "targets": [0]}]})
    assert q.equivalence(hzh, x) == "equivalent"
    assert q.equivalence(x, z) == "distinct"
    checks += 2

    # states: fidelity and partial trace
    bell_amps = [h, 0, 0, h]
    rho = [[a * b.conjugate() for b in bell_amps] for a in bell_amps]
    reduced = q.partial_trace(rho, [2, 2], [0])
    assert approx(reduced[0][0], 0.5, 1e-12) and approx(reduced[1][1], 0.5, 1e-12)
    assert approx(q.state_fidelity(bell_amps, bell_amps), 1.0, 1e-12)
    assert q.state_fidelity([1, 0], [0, 1]) < 1e-12
    checks += 3

    print(f"smoke test passed ({checks} check groups)")


if __name__ == "__main__":
    main()
