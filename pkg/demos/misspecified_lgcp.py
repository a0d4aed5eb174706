"""
Fitting the wrong model
=======================

When a log-Gaussian Cox process is fitted with the Thomas family the Whittle
estimate targets the best-fitting parameter, the Thomas spectrum closest to
the truth over the chosen frequency domain. Widening the domain moves that
target; the reduced fit ties alpha to the estimated intensity instead.
"""
import numpy as np

from pointspectra import DomainSpec, LGCPExp, Taper, Window, best_fit_oracle, fit, fit_reduced_tcp, simulate

truth = LGCPExp(-0.5, 2.0, 1.0)  # mu, s2, phi
window = Window.cube(20, 2)
print(f"true intensity {truth.intensity:.3f}")

for label, dom in (("D(2pi)", DomainSpec(np.pi / 10, 2 * np.pi)), ("D(5pi)", DomainSpec(np.pi / 10, 5 * np.pi))):
    best = best_fit_oracle(truth, "thomas", dom, window)
    print(f"{label}: best fit {np.round(best.theta, 3)}  implied intensity {best.implied_intensity:.2f}")

# %%
# Estimates from a single realisation on a larger window.
pattern = simulate(truth, Window.cube(40, 2), seed=3)
dom = DomainSpec(np.pi / 10, 2 * np.pi)
full = fit(pattern, "thomas", dom, Taper.smooth())
red = fit_reduced_tcp(pattern, dom, Taper.smooth())
print("full Thomas fit   ", np.round(full.theta, 3))
print("reduced Thomas fit", np.round(red.theta, 3), f"(alpha = {red.full_theta[1]:.2f})")
