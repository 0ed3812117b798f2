"""
Score expansion for a maximum likelihood estimate
=================================================

Expand the score around the true parameter to first order:
score(theta_hat) = score(theta0) + (theta_hat - theta0) * l''(theta_star).
The selector finds theta_star on every replicate.
"""

import math

from stochtaylor.stats_apps import bernoulli, exponential_rate, mle_monte_carlo

for model, n in ((bernoulli(0.3), 200), (exponential_rate(2.0), 100)):
    mc = mle_monte_carlo(model, n, 500, seed=1)
    s = mc.summary
    print(f"{model.name}: n={n}, reps={s['reps']}, flagged={s['flagged']}")
    print(f"  identity holds on {s['identity_pass']} replicates, max rel residual {s['max_relative_residual']:.1e}")
    print(f"  theta_star between theta_hat and theta0: {s['between_fraction']:.3f}")
    print(f"  sqrt(n)(theta_hat - theta0): sd {s['sqrt_n_dev_sd']:.4f} vs 1/sqrt(I) {s['asymptotic_sd']:.4f}, "
          f"KS {s['ks_distance']:.4f} (1% cut {1.63 / math.sqrt(s['reps']):.4f})")

# One replicate in detail.
rec = mle_monte_carlo(bernoulli(0.3), 200, 1, seed=7).records[0]
print(f"theta0={rec.theta0} theta_hat={rec.theta_hat:.4f} theta_star={rec.theta_star:.6f} residual={rec.residual:.1e}")
