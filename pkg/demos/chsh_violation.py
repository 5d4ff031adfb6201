"""CHSH value of the singlet: exact, then from finite samples."""
import numpy as np

from twophoton import chsh, linear_basis, make_singlet
from twophoton.measure import sample_counts

state = make_singlet()
a0, a1, b0, b1 = (linear_basis(t) for t in (np.pi / 4, 0, np.pi / 8, 3 * np.pi / 8))
print(f"exact S = {chsh(state, a0, a1, b0, b1):+.6f}   (2*sqrt2 = {2 * np.sqrt(2):.6f})")

n = 50_000
s = 0.0
for k, (a, b, sign) in enumerate([(a0, b0, 1), (a0, b1, 1), (a1, b0, 1), (a1, b1, -1)]):
    f = sample_counts(state, a, b, n, seed=k) / n
    s += sign * (f[0, 0] + f[1, 1] - f[0, 1] - f[1, 0])
print(f"sampled S = {s:+.4f}  from {n} shots per setting")
