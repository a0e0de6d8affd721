"""
Effective couplings at realistic parameters
===========================================

With (g, kappa, gamma) / 2 pi = (750, 2.6, 3.5) MHz the system is deep in the
strongly cooperative regime. The Raman coupling Omega g / Delta must still
beat both the cavity loss and the drive-induced atomic decay
Omega^2 gamma / Delta^2.
"""
from bimodal_cqed import effective_params, params_from_mhz
from bimodal_cqed.oracle import drive_ratio

for variant in ("qubit", "qutrit"):
    p = params_from_mhz(750.0, 2.6, 3.5, omega_a=drive_ratio(variant), omega_b=1.0, delta=10.0)
    print(f"{variant}: kappa = {p.kappa:.6f} g, gamma = {p.gamma:.6f} g")
    for stage in ("A", "B"):
        print(f"  stage {stage}")
        for line in effective_params(p, stage).lines():
            print("    " + line)
