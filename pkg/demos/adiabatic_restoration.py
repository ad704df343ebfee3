"""
Slow recombination restores coherence.

The same charge and separation are recombined over longer and longer
times. The number of radiated entangling photons falls like ``1/T_A**2``
(``1/T_A**4`` for a mass), and Alice's decoherence goes with it.
"""

import numpy as np

from whichpath import FieldKind, Scenario, decoherence_report, fit_powerlaw

T_A = np.logspace(0, 3, 10)


def scan(kind):
    base = Scenario(field_kind=kind, q_A=1.0, m_A=1.0, d=1.0, D=1e4)
    print(f"\n{kind.value}")
    print(f"{'T_A':>10} {'photons':>12} {'D_Alice':>12}")
    n = []
    for t in T_A:
        r = decoherence_report(base.replace(T_A=t, T_B=t))
        n.append(r.n_entangling)
        print(f"{t:10.3g} {r.n_entangling:12.4e} {r.d_alice:12.4e}")
    fit = fit_powerlaw(T_A, n)
    print(f"fitted N ~ T_A^{fit.exponent:.3f}  (r^2 = {fit.r_squared:.6f})")


if __name__ == "__main__":
    for kind in FieldKind:
        scan(kind)
