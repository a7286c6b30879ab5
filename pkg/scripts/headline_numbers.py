"""Print the key operating points next to their reference values, with Monte Carlo cross-checks."""

import argparse

from muxdesigner import (
    Architecture,
    ArchitectureSpec,
    MPhotonTarget,
    PairSourceSpec,
    RngSeed,
    max_tolerable_switch_loss,
    mc_mux,
    mux_metrics,
    mux_trigger_prob,
    optimal_source_count,
)

LOGTREE = Architecture.LOGTREE


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=10**6)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print("array points (log tree, 2x2 switch transmission 0.98, number-resolving herald)")
    for p_pair, n, q_ref, multi_ref in [(0.1, 64, 0.8744, 0.0017), (0.25, 16, 0.8965, 0.0083)]:
        src = PairSourceSpec.from_p_pair(p_pair, 0.99, 0.99)
        spec = ArchitectureSpec(LOGTREE, n, eta_switch=0.98)
        m = mux_metrics(src, "nrd", spec)
        mc = mc_mux(src, "nrd", spec, args.trials, RngSeed(args.seed, n))
        print(f"  p_pair={p_pair} N={n}: q_exact={m.q_exact:.4f} (reference {q_ref}), "
              f"p_multi={m.p_multi_mux:.4f} (reference {multi_ref}), "
              f"Monte Carlo q={mc.q:.4f} +/- {mc.stderr['q']:.4f}")

    print(f"17 lossless sources at p_trig=0.25: {mux_trigger_prob(0.25, 17):.5f}")

    print("optimal array size (lower bound, p_single=1)")
    for p_trig, loss_db in [(0.01, 0.05), (0.1, 0.07), (0.25, 0.1)]:
        sol = optimal_source_count(LOGTREE, loss_db, p_trig)
        print(f"  p_trig={p_trig} at {loss_db} dB: N={sol.n_opt}, q*={sol.q_at_opt:.4f}")

    print("M-photon loss budget (100 Hz from 100 MHz, p_pair=0.1)")
    for eta in (0.9, 0.99):
        src = PairSourceSpec.from_p_pair(0.1, eta, eta)
        for m in (10, 14, 20):
            sol = max_tolerable_switch_loss(LOGTREE, MPhotonTarget(m), src, "nrd")
            print(f"  eta={eta} M={m}: {sol.loss_db:.3f} dB, N={sol.n_opt}, p_multi^M={sol.p_multi_m:.4f}")


if __name__ == "__main__":
    main()
