"""
Optimized rate versus transmittance
===================================

For every channel the signal amplitude is tuned to maximize the rate.  Small
alphabets win at high loss, larger ones once the channel is good.  Reverse
reconciliation does better throughout and keeps improving with more letters.
"""

# %%
from pskqkd import optimize_amplitude

etas = [0.3, 0.5, 0.7, 0.9]

print("direct reconciliation with postselection")
print("eta    " + "".join("   N=%-2d G        a0   " % n for n in (2, 3, 4, 5)))
for eta in etas:
    row = []
    for n in (2, 3, 4, 5):
        pt = optimize_amplitude(eta, n)
        row.append("%11.4e %6.3f" % (pt.rate, pt.optimal_amplitude))
    print("%.2f  " % eta + "  ".join(row))

# %%
# Two nearly equal maxima in amplitude are reported instead of silently
# picking one; five letters at eta = 0.6 is such a case.
pt = optimize_amplitude(0.6, 5)
a2, g2 = pt.secondary_maximum
print("N=5, eta=0.6: a0=%.3f (G=%.6f), runner-up a=%.3f (G=%.6f)" % (pt.optimal_amplitude, pt.rate, a2, g2))

# %%
print("reverse reconciliation, eta = 0.5")
for n in (2, 4, 8):
    pt = optimize_amplitude(0.5, n, mode="reverse", a_range=(0.05, 3.0))
    print("N=%d  G=%.5f  a0=%.3f  (%.2f photons)" % (n, pt.rate, pt.optimal_amplitude, pt.optimal_amplitude ** 2))
