"""
Sampling the protocol
=====================

A million simulated pulses: encode, attenuate, heterodyne, decode, and
optionally drop outcomes inside the postselection boundary.
"""

# %%
import numpy as np

from pskqkd import (
    ProtocolParams,
    SimulationConfig,
    iab_total,
    keyrate_direct,
    simulate,
)

p = ProtocolParams(4, 1.0, 0.8)
rep = simulate(SimulationConfig(p, 10**6, seed=7, postselection="direct-psa"))

print("confusion matrix (rows: sent, columns: decoded)")
print(rep.confusion)
print("symbol error rate %.4f" % rep.symbol_error_rate)

# %%
# The mean of the pointwise information is an unbiased estimate of I_AB.
# Hard-decoding to a letter throws information away, so the plug-in value
# from the confusion matrix sits well below it.
quad = iab_total(p)
z = (rep.sampled_iab - quad) / rep.sampled_iab_stderr
print("I_AB quadrature %.5f, sampled %.5f (z = %+.2f), plug-in I(k;l) %.5f"
      % (quad, rep.sampled_iab, z, rep.empirical_iab))

# %%
frac = keyrate_direct(p).accepted_fraction
print("accepted fraction %.5f, quadrature %.5f (z = %+.2f)"
      % (rep.accepted_fraction, frac, (rep.accepted_fraction - frac) / rep.accepted_fraction_stderr))
print("accepted rows:", np.round(rep.accepted_confusion.sum(1) / rep.confusion.sum(1), 4))
