"""Local operations on A never change B's statistics."""
import numpy as np

from twophoton import linear_basis, make_singlet, random_local_unitary, verify_no_signaling

rng = np.random.default_rng(3)
state = make_singlet()
ops = [random_local_unitary(int(s), "A") for s in rng.integers(0, 2**31, 5)]
bases = [linear_basis(t) for t in np.linspace(0, np.pi, 7, endpoint=False)]

report = verify_no_signaling(state, ops, bases, 1e-9)
print(f"{len(ops)} random unitaries on A, {len(bases)} analyzers on B")
print("passed:", report.passed, " max deviation:", f"{report.max_deviation:.2e}")
