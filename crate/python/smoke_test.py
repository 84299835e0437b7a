"""Smoke test for the qsense extension module.

Build first:

    cargo build --release -p qsense-py
    cp target/release/libqsense.so python/qsense.so

then run ``python3 python/smoke_test.py`` from the repository root.
"""

import math
import os
import sys
import tempfile

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import qsense


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b} (tol {tol})"


def main():
    p = qsense.RotationParams(math.pi / 2, 1.0, 0.3)
    assert len(p.pulse_sequence()) == 4
    assert p.pulse_defect() < 1e-9
    u = p.unitary()
    close(abs(u[0][0]) ** 2 + abs(u[1][0]) ** 2, 1.0, 1e-12)

    close(qsense.Protocol.agnostic().fi(p), 1.0, 1e-6)
    d = qsense.Protocol.hindsight().distribution(p, qsense.NoiseSpec(0.94))
    close(sum(d.values()), 1.0, 1e-12)

    sq = qsense.Protocol.single_qubit(0.0, [0.0, 1.0, 0.0])
    close(sq.fi(qsense.RotationParams(0.0, math.pi / 2, 0.0)), 1.0, 1e-6)

    close(qsense.finite_fidelity_fi(0.94, math.pi / 2), 0.84779, 1e-4)
    close(qsense.schur_alpha_bound(qsense.state_qfim("rho_star", 0.7, 1.1, 2.0)), 1.5, 1e-6)
    assert qsense.schur_alpha_bound(qsense.state_qfim("zero", 0.7, 1.1, 2.0)) is None
    close(qsense.sphere_average_qfi(0.4, 1.3, 0.9), 2.0 / 3.0, 1e-6)

    counts = qsense.sample_shots({"+1": 0.25, "-1": 0.75}, 4000, 11)
    assert counts == qsense.sample_shots({"+1": 0.25, "-1": 0.75}, 4000, 11)
    assert sum(counts.values()) == 4000

    c = qsense.ConfusionMatrix.default_two_qubit()
    truth = [0.1, 0.4, 0.3, 0.2]
    back = c.unfold(c.apply(truth), max_iters=100000)
    assert max(abs(x - y) for x, y in zip(back, truth)) < 1e-6

    tomo = qsense.tomography_two_qubit(qsense.depolarized_singlet_paulis(0.94))
    close(tomo["singlet_fidelity"], 0.94, 1e-3)

    mc = qsense.monte_carlo_mle(qsense.Protocol.agnostic(), 1.0, 0.5, math.pi / 2, 2000, 400, 3)
    assert 0.8 < mc["n_var"] < 1.2, mc["n_var"]

    with tempfile.TemporaryDirectory() as tmp:
        path = qsense.run_figure("fig3", out=os.path.join(tmp, "fig3.csv"), shots=0)
        with open(path) as fh:
            header = fh.readline().strip().split(",")
        assert header[-1] == "p0_theory", header

    print(f"qsense {qsense.__version__}: python smoke test passed")


if __name__ == "__main__":
    main()
