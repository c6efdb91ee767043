"""
Where Bob keeps his outcomes
============================
"""

# %%
# For each channel we trace r*(theta): the radius beyond which I_AB beats
# I_AE along one direction of phase space.  The rejected disc around the
# origin shrinks as the channel improves.  Near the decision borders
# between two letters Bob never gets ahead when losses are high, so those
# rays show no threshold at all.
import numpy as np

from pskqkd import ProtocolParams, psa_boundary

letters, amplitude = 5, 1.4
theta = np.linspace(0.0, 2 * np.pi / letters, 9)[:-1] + np.pi / (8 * letters)

print("theta/deg " + " ".join("%6.1f" % t for t in np.degrees(theta)))
for eta in np.round(np.arange(0.95, 0.399, -0.05), 2):
    b = psa_boundary(ProtocolParams(letters, amplitude, eta), angles=theta)
    cells = ["   inf" if np.isinf(r) else "%6.3f" % r for r in b.radii]
    print("eta=%.2f  " % eta + " ".join(cells))

# %%
# The whole star follows by rotating one sector, e.g. for plotting.
full_theta, full_r = psa_boundary(ProtocolParams(letters, amplitude, 0.8)).full_star()
print(full_theta.shape, np.nanmax(np.where(np.isinf(full_r), np.nan, full_r)))
