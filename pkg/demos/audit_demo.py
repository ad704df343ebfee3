"""
Bob cannot learn more than the radiation carries.

For random Bob measurements (passive interferometers plus displacements
acting on the field and a probe register) we compare Bob's decoherence
with Alice's. A beam splitter scan then shows when the two coincide: only
once the probe has removed the branch difference from the field entirely.
"""

import math

from whichpath import CoherentLabel, beamsplitter, random_audit, run_audit

if __name__ == "__main__":
    summary = random_audit(trials=2000, seed=1, max_modes=16, n_field=None, n_probe=None)
    print(f"{summary.trials} random measurements on up to {summary.max_modes} modes")
    print(f"  smallest D_Alice - D_Bob   {summary.worst_margin:.3e}")
    print(f"  worst identity residual    {summary.worst_identity_residual:.3e}")
    print(f"  violations                 {summary.violations}")

    a1, a2 = CoherentLabel([1.5 + 0.5j]), CoherentLabel([-0.5j])
    print("\nbeam splitter between the field mode and a vacuum probe")
    print(f"{'angle/pi':>9} {'D_Alice':>9} {'D_Bob':>9} {'margin':>10}")
    for k in range(7):
        theta = k * math.pi / 12
        r = run_audit(a1, a2, beamsplitter(theta), CoherentLabel.vacuum(1))
        d_alice, d_bob = 1 - abs(r.overlap_sigma1), 1 - abs(r.overlap_bob)
        print(f"{theta / math.pi:9.3f} {d_alice:9.4f} {d_bob:9.4f} {r.inequality_margin:10.2e}")
    print("the margin closes only at a full swap (angle pi/2)")
