"""
When does one more letter pay off
=================================

Bisection on G(N) - G(N+1), re-optimizing the amplitude at every probe.
Each pair takes a little under a minute on one core.
"""

# %%
from pskqkd import find_crossing, locate_bracket

scan = [round(0.30 + 0.05 * i, 2) for i in range(14)]
cache = {}  # optimized rates shared between pairs

for n in (2, 3, 4):
    lo, hi = locate_bracket(n, n + 1, "direct", scan, cache=cache)
    rec = find_crossing(n, n + 1, "direct", (lo, hi), cache=cache)
    print("N=%d vs N=%d: eta* = %.4f  in [%.4f, %.4f], residual %.1e"
          % (n, n + 1, rec.eta_star, *rec.bracket, rec.residual))
