"""Long random local histories scramble the table; the recovered analyzers unscramble it."""
import numpy as np

from twophoton import (
    CANONICAL, apply_history, joint_distribution, make_singlet,
    random_local_unitary, recover_correlation_bases,
)

np.set_printoptions(precision=4, suppress=True)
rng = np.random.default_rng(5)
ha = [random_local_unitary(int(s), "A") for s in rng.integers(0, 2**31, 12)]
hb = [random_local_unitary(int(s), "B") for s in rng.integers(0, 2**31, 7)]
evolved = apply_history(make_singlet(), ha + hb)

print("V/H table after the history:\n", joint_distribution(evolved, CANONICAL, CANONICAL).p)
a, b = recover_correlation_bases(ha, hb)
print("table in the recovered bases:\n", joint_distribution(evolved, a, b).p)
