"""Re-reading a single 'significant' trial result.

A trial reports b = 0.5 with standard error 0.25, so z = 2 and the result
just clears the 5% threshold.  With the population prior we ask what the
effect probably is, how far the naive interval can be trusted, and how much
the raw estimate is likely to overstate the truth.
"""

import rctshrink as rs

prior = rs.cochrane_prior()
b, s = 0.5, 0.25
z = b / s

est = rs.shrink_estimate(prior, b, s)
lo, hi = rs.credible_interval(prior, b, s, level=0.95)
print(f"raw estimate      {b:.3f}   naive 95% interval ({b - 1.96 * s:.3f}, {b + 1.96 * s:.3f})")
print(f"shrunken estimate {est:.3f}   calibrated 95% interval ({lo:.3f}, {hi:.3f})")
print(f"probability the naive interval covers the truth: {rs.conditional_coverage(prior, z):.3f}")

raw = rs.ratio_quartiles_given_z(prior, z, "raw")
shr = rs.ratio_quartiles_given_z(prior, z, "shrunk")
print("quartiles of |estimate| / |true effect|:")
print("  raw      " + "  ".join(f"{q:.3f}" for q in raw))
print("  shrunken " + "  ".join(f"{q:.3f}" for q in shr))

# The posterior is a mixture of normals; its components show where the
# shrinkage comes from.
post = rs.posterior_snr(prior, z)
for w, m, sd in zip(post.weights, post.means, post.sds):
    print(f"  weight {w:.3f}  mean {m:.3f}  sd {sd:.3f}")
