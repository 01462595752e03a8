"""Cross-check the analytics against the Monte Carlo estimator.

The simulator drops a tagged device at the origin of a Poisson field of
stations and same-preamble contenders, draws one fading block per trial,
and scores three outcomes: transmission success, collision (a same-cell
contender also got the shared preamble through) and random-access
success (the first and not the second).

The analytic collision term assumes contenders succeed independently of
the tagged device.  In reality same-cell contenders compete for the same
receive power, so at thresholds above one they almost never succeed in
the same repetition the tagged device used; the analytic value is
therefore slightly conservative, which the comparison below makes
visible under heavy traffic.
"""

import time

from nbrach import (
    ChannelConfig,
    SimSettings,
    joint_symbol_success,
    rach_success_detail,
    simulate_summary,
)


def main() -> None:
    print("transmission-level agreement (no collision term), n_t = 1:")
    cfg = ChannelConfig(lambda_b=1.0, lambda_d=1000.0)
    t0 = time.perf_counter()
    s = simulate_summary(cfg, 1, settings=SimSettings(replications=20_000, seed=1))
    analytic = joint_symbol_success(4, cfg)
    print(f"  analytic {analytic:.5f}  simulated {s.transmission.p_hat:.5f} "
          f"+- {s.transmission.ci_halfwidth:.5f} "
          f"({time.perf_counter() - t0:.1f} s for 20k trials)")

    print("\nrandom-access level under rising traffic, n_t = 2:")
    print("  a_a     analytic   simulated (95% CI)      collision rate")
    for a_a in (0.001, 0.005, 0.015):
        c = ChannelConfig(lambda_b=1.0, lambda_d=1000.0, a_a=a_a)
        d = rach_success_detail(2, c)
        s = simulate_summary(c, 2, settings=SimSettings(replications=4000, seed=3))
        print(f"  {a_a:.3f}   {d.value:.4f}     {s.rach.p_hat:.4f} "
              f"+- {s.rach.ci_halfwidth:.4f}        {s.collision_rate:.4f}")
    print("the analytic value sits at or just below the simulated one as")
    print("traffic grows: its independent-collision term charges for")
    print("same-repetition double successes the geometry forbids.")


if __name__ == "__main__":
    main()
