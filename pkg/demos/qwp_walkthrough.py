"""Quarter-wave plate on one photon of a singlet.

Rewrites the singlet in the circular basis, rotates photon A with a QWP,
and prints the joint tables for three analyzer pairs.  Same-basis pairs
become uniform; the mixed circular/linear pair stays perfectly correlated.
"""
import numpy as np

from twophoton import (
    CANONICAL, apply_local, change_basis, circular_basis, entanglement_report,
    joint_distribution, make_singlet, paper_qwp,
)

np.set_printoptions(precision=4, suppress=True)

singlet = make_singlet()
print("singlet, V/H amplitudes:", singlet.amps)
print("singlet, R/L amplitudes:", change_basis(singlet, circular_basis(), circular_basis()).amps)

qwp = paper_qwp("A")
print("\nQWP on A:\n", qwp.matrix)
rotated = apply_local(singlet, qwp)

for name, a, b in [("R/L x R/L", circular_basis(), circular_basis()),
                   ("V/H x V/H", CANONICAL, CANONICAL),
                   ("R/L x V/H", circular_basis(), CANONICAL)]:
    jd = joint_distribution(rotated, a, b)
    print(f"\n{name}  rows {a.labels}, cols {b.labels}  E = {jd.correlation:+.3f}")
    print(jd.p)

print("\nconcurrence before/after:",
      entanglement_report(singlet).concurrence, entanglement_report(rotated).concurrence)
