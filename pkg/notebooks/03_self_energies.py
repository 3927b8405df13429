# ---
# jupyter:
#   jupytext:
#     formats: ipynb,py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
#       format_version: '1.3'
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Self-energies without sampling
#
# The optical term is rank one, so the pumped propagator has a closed form.
# Averaging over disorder at second order adds two diagonal self-energies:
# a plain scattering term and an optical correction that only acts on
# backward modes.  Their ratio gives the normalized diffusion.

# %%
import matplotlib.pyplot as plt
import numpy as np

from chiral_phonons import OptoParams, PhononDamping, centered_grid, rank_one, resum_GM, sigma_D, sigma_P
from chiral_phonons.diagrammatics import born_diffusion_ratio, coupling_for_power, diffusion_ratio
from chiral_phonons.model import matrix_D, matrix_M

gamma = 1e-3
grid = centered_grid(1.0, 1e-4, 1.0, 20 * gamma)
damping = PhononDamping(gamma)
opto = OptoParams(-1.0, 100 * gamma, 0.05, 1.0, phonon_width=gamma / 2)
print("modes:", grid.size, " rho*gamma:", grid.density_of_states * gamma)

# %% [markdown]
# Resummation against a direct inverse.

# %%
data = rank_one(grid, opto, damping, 1.0, "lorentzian")
D = matrix_D(grid, damping, 1.0)
direct = np.linalg.inv(D - matrix_M(grid, opto, 1.0, "lorentzian"))
print("max deviation:", np.abs(resum_GM(D, data.lam, data.projector) - direct).max() / np.abs(direct).max())
print("g at resonance, units of i/gamma:", data.g * gamma / 1j)

# %% [markdown]
# Plain scattering self-energy: finite sum vs `2 pi i rho U^2`.

# %%
U = 1e-5
print(sigma_D(grid, damping, U, 1.0), sigma_D(grid, damping, U, 1.0, method="approx"))

# %% [markdown]
# Normalized diffusion of the CCW center mode: closed form, finite-grid
# second-order sums, and the assembled Lorentzian self-energies.

# %%
ccw = grid.index_of(-1.0)
x = np.geomspace(1e-3, 1e3, 40)
born, closed = [], []
for xv in x:
    o = opto.with_coupling(float(coupling_for_power(xv, 1.0, gamma, opto.kappa)))
    born.append(born_diffusion_ratio(grid, o, damping, 1.0, ccw, "lorentzian"))
    sp = sigma_P(grid, o, damping, U, 1.0, ccw, "lorentzian", "lorentzian")
    closed.append(1 + sp.imag / sigma_D(grid, damping, U, 1.0, "approx").imag)

fig, ax = plt.subplots()
ax.semilogx(x, diffusion_ratio(x, grid.density_of_states, gamma), label="closed form")
ax.semilogx(x, closed, "--", label="Lorentzian self-energies")
ax.semilogx(x, born, ":", label="finite-grid sums")
ax.set_xlabel("x")
ax.set_ylabel("D / D0")
ax.legend()
