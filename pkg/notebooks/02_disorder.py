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
# # Disorder matrices
#
# Each realization is a Hermitian matrix whose entries depend only on the
# momentum transfer `q - q'`.  Realization `i` of seed `s` is drawn from its
# own generator, so any single matrix can be regenerated on its own.

# %%
import numpy as np

from chiral_phonons import DisorderConfig, DisorderSampler, build_mode_grid, covariance_check

grid = build_mode_grid(10, 1e-3, 1.0, 1.0 - 5e-3)
sampler = DisorderSampler(grid, DisorderConfig(strength=0.3, seed=7))
E = sampler.matrix(0)
print("Hermitian:", np.allclose(E, E.conj().T), " zero diagonal:", not np.diag(E).any())
print("independent Fourier components:", sampler.n_components)

# %% [markdown]
# Pair correlations: `<E_12 E_34>` is `U^2` when `q1 + q3 = q2 + q4` and zero
# otherwise.  The check reports a z-score per sampled quadruple.

# %%
samples = [sampler.matrix(i) for i in range(5000)]
report = covariance_check(samples, 0.3, grid, n_quadruples=40)
print(f"max |z| = {report.max_z:.2f}")
for entry in report.entries[:6]:
    print(entry.indices, f"expected {entry.expected:.3f}", f"observed {entry.mean.real:+.4f}{entry.mean.imag:+.4f}j")

# %% [markdown]
# Matrices can be dumped for debugging.

# %%
from pathlib import Path
from tempfile import mkdtemp

from chiral_phonons.disorder import write_matrix_csv

path = write_matrix_csv(sampler.sample(0), Path(mkdtemp()) / "E.csv")
print(path.read_text().splitlines()[:3])
