"""
Cavity loss: success probability and fidelity
=============================================

Photon leakage is modelled by the no-jump generator H - i kappa (n_L + n_R).
Its norm decay is the probability that no photon escaped. The state left
after a successful run is almost perfect (conditional fidelity), but the
unconditional fidelity also pays for the runs that failed.

At small kappa P_B falls roughly like exp(-2 kappa T_photon), where T_photon
is the time a photon spends in the cavity. For the qubit, a large kappa
freezes atom A in ``ga``. Strong damping of the photon suppresses the Raman
transfer (a Zeno effect). That branch never decays, so P_B turns up again
near kappa = 0.15.
"""
import numpy as np
from scipy.integrate import trapezoid

from bimodal_cqed import ProtocolConfig, SweepSpec, make_params, run_protocol
from bimodal_cqed.io import sweep_plot_script, write_sweep_csv
from bimodal_cqed.propagator import PHOTON, populations
from bimodal_cqed.sweep import sweep

kappa = 2.6 / 750  # 2 pi x 2.6 MHz against g = 2 pi x 750 MHz
for variant in ("qubit", "qutrit"):
    r = run_protocol(ProtocolConfig(variant=variant, params=make_params(variant, kappa=kappa)))
    ideal = run_protocol(ProtocolConfig(variant=variant))
    # photon dwell time from the decay-free run
    dwell = sum(trapezoid(populations(tr, [PHOTON])[0], tr.times) for tr in ideal.trajectories)
    print(
        f"{variant}: P = {r.success_probability:.5f} (estimate {np.exp(-2 * kappa * dwell):.5f}), "
        f"F conditional = {r.fidelity_conditional:.5f}, F unconditional = {r.fidelity_unconditional:.5f}"
    )

rows = sweep(SweepSpec("kappa", 0.0, 0.2, 21), workers=4)
print("\n kappa     P_A      F_A      P_B      F_B")
for row in rows:
    print(f"{row.value:6.3f} {row.p_a:8.5f} {row.f_a:8.5f} {row.p_b:8.5f} {row.f_b:8.5f}")

write_sweep_csv(rows, "kappa", "sweep_kappa.csv")
with open("sweep_kappa.gp", "w") as fh:
    fh.write(sweep_plot_script("sweep_kappa.csv", "sweep_kappa.gp", "kappa"))
