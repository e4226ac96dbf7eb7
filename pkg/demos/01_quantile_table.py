"""How much power do typical trials have?

Starting from the published four-component prior for the signal-to-noise
ratio of Cochrane trials, print the quantiles of |SNR| together with the
power and the exaggeration ratio at each of them.
"""

import rctshrink as rs

prior = rs.cochrane_prior()
print("SNR prior:", prior)

table = rs.summary_table(prior)
header, rows = table.rows()
print()
print("".join(f"{h:>14}" for h in header))
for row in rows:
    print(f"{row[0]:>14}" + "".join(f"{v:14.3f}" for v in row[1:]))

print()
print(f"average power over the population: {table.mean_power:.3f}")
print(f"share of trials with power below 80%: {table.frac_power_below_080:.3f}")

# The usual design target of 80% power corresponds to |SNR| = 2.80.
print(f"|SNR| needed for 80% power: {rs.power_inverse(0.80):.3f}")
