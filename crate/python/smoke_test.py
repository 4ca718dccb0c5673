#!/usr/bin/env python3
"""Build the evolearn extension module and exercise it end to end.

Usage: python3 python/smoke_test.py [--release]
"""

import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def build_module(release: bool) -> Path:
    cmd = ["cargo", "build", "-p", "evolearn-py"]
    profile = "debug"
    if release:
        cmd.append("--release")
        profile = "release"
    subprocess.run(cmd, check=True, cwd=REPO)
    lib = REPO / "target" / profile / "libevolearn.so"
    if not lib.exists():  # macOS fallback
        lib = REPO / "target" / profile / "libevolearn.dylib"
    if not lib.exists():
        sys.exit(f"built library not found under target/{profile}")
    stage = Path(tempfile.mkdtemp(prefix="evolearn-py-"))
    shutil.copy2(lib, stage / "evolearn.so")
    return stage


def main() -> None:
    release = "--release" in sys.argv[1:]
    sys.path.insert(0, str(build_module(release)))
    import evolearn

    # circuits: the exact-parity genotype scores 1.0, constants score 0.5
    perfect = evolearn.perfect_parity_genes()
    assert evolearn.parity_fitness(perfect) == 1.0
    assert evolearn.parity_truth_table(perfect) == 0x69969669
    netlist = evolearn.parity_netlist(perfect)
    assert "out" in netlist and "NOR" in netlist
    print("ok: parity circuit evaluation")

    # weight decoding endpoints and symmetry
    assert evolearn.decode_weight(0) == -8.0
    assert evolearn.decode_weight(255) == 8.0
    mid = [evolearn.decode_weight(g) + evolearn.decode_weight(255 - g) for g in range(256)]
    assert all(abs(v) < 1e-12 for v in mid)
    print("ok: weight decoding")

    # double pole: zero-weight controller balances from the exact
    # equilibrium episode and drifts out in the rest
    zero_weights = [127] * 161  # decode close to 0 but not exact
    f = evolearn.dpole_fitness(zero_weights, protocol="fixed")
    assert 0.0 <= f <= 1.0
    steps = evolearn.dpole_episode_steps(zero_weights)
    assert len(steps) == 8 and all(0 <= s <= 1000 for s in steps)
    assert evolearn.dpole_fitness(zero_weights) == f, "fixed protocol is deterministic"
    print("ok: double-pole evaluation")

    # a short learning run on parity: reproducible, monotone, in range
    kwargs = dict(
        mut_rate=0.05, pop_size=5, max_steps=20_000, learn_iters=2, seed=42
    )
    r1 = evolearn.run("parity", "ssshc", **kwargs)
    r2 = evolearn.run("parity", "ssshc", **kwargs)
    assert r1.final_fitness == r2.final_fitness
    assert r1.curve == r2.curve
    assert 0.0 <= r1.final_fitness <= 1.0
    assert r1.total_steps >= 20_000
    assert all(b >= a for (_, a), (_, b) in zip(r1.curve, r1.curve[1:]))
    assert r1.steps_to(1.0) <= r1.total_steps
    assert evolearn.parity_fitness(r1.best_genes) == r1.final_fitness
    print(f"ok: ssshc parity run (fitness {r1.final_fitness:.3f})")

    # the hill climber and plain selection also run
    for algo in ("sss", "hc"):
        r = evolearn.run("parity", algo, mut_rate=0.05, pop_size=3, max_steps=5_000)
        assert 0.0 <= r.final_fitness <= 1.0
    r = evolearn.run(
        "dpole-random", "sss", mut_rate=0.05, pop_size=2, max_steps=2_000, seed=7
    )
    assert 0.0 <= r.final_fitness <= 1.0
    print("ok: all algorithms dispatch")

    # statistics
    u, p = evolearn.mann_whitney_u([1, 2, 3], [4, 5, 6])
    assert (u, p) == (0.0, 0.1)
    assert evolearn.bonferroni([0.02], 3) == [0.06]
    rho, p = evolearn.spearman([1, 2, 3, 4], [2, 1, 4, 3])
    assert abs(rho - 0.6) < 1e-12 and abs(p - 0.4) < 1e-9
    lo, hi = evolearn.bootstrap_mean_ci([7.0] * 10)
    assert (lo, hi) == (7.0, 7.0)
    assert evolearn.noisy(0.5, 0.0) == 0.5
    assert abs(evolearn.noisy(0.5, 0.1, seed=1) - 0.5) <= 0.1
    print("ok: statistics")

    # error paths surface as ValueError
    for bad in (
        lambda: evolearn.run("sudoku", "sss", mut_rate=0.1, pop_size=1, max_steps=10),
        lambda: evolearn.parity_fitness([1, 2, 3]),
        lambda: evolearn.decode_weight(300),
        lambda: evolearn.mann_whitney_u([], [1.0]),
        lambda: evolearn.dpole_fitness(zero_weights, protocol="sideways"),
    ):
        try:
            bad()
        except ValueError:
            pass
        else:
            sys.exit("expected ValueError")
    print("ok: error handling")

    print("smoke test passed")


if __name__ == "__main__":
    main()
