#!/usr/bin/env python3
"""Derive default electrolyzer curve coefficients for the bundled scenario.

Evaluates the temperature/pressure dependent alkaline-cell correlations
(polarization curve and Faraday efficiency) at the configured operating
point, checks the resulting efficiency curve, and writes the "physics"
block into data/default_scenario.json.

Checks performed before writing:
  * efficiency peak lies between 15 % and 45 % of nameplate load
  * full-load efficiency is below the peak efficiency
  * hydrogen production is concave in power on [P_min, C_e]
"""
import argparse
import json
import math
import pathlib

import numpy as np

# Polarization curve correlation (i in A/m^2, T in degC, p in bar).
R1, R2 = 4.45153e-5, 6.88874e-9       # ohm m^2, ohm m^2 / degC
D1, D2 = -3.12996e-6, 4.47137e-7      # ohm m^2, ohm m^2 / bar
S_COEF = 0.33824                      # V
T1, T2, T3 = -0.01539, 2.00181, 15.24178  # m^2/A, m^2 degC/A, m^2 degC^2/A
# Faraday efficiency correlation.
F11, F12 = 478645.74, -2953.15        # A^2/m^4, A^2/m^4/degC
F21, F22 = 1.03960, -0.00104          # -, 1/degC

MOLAR_MASS_H2 = 2.01588e-3            # kg/mol
FARADAY = 96485.33212                 # C/mol


def reversible_voltage(temp_c):
    tk = temp_c + 273.15
    return 1.5184 - 1.5421e-3 * tk + 9.523e-5 * tk * math.log(tk) + 9.84e-8 * tk * tk


def coefficients(temp_c, pressure_bar):
    return {
        "u_rev_v": reversible_voltage(temp_c),
        "k1_v_m2_a": R1 + D1 + R2 * temp_c + D2 * pressure_bar,
        "k2_v": S_COEF,
        "k3_m2_a": T1 + T2 / temp_c + T3 / temp_c ** 2,
        "faraday_f1_a2_m4": F11 + F12 * temp_c,
        "faraday_f2": F21 + F22 * temp_c,
        "log_base": "10",
        "molar_mass_h2_kg_mol": MOLAR_MASS_H2,
        "faraday_constant_c_mol": FARADAY,
    }


def curves(c, capacity_mw, i_max, n=100001):
    def volt(i):
        return c["u_rev_v"] + c["k1_v_m2_a"] * i + c["k2_v"] * np.log10(c["k3_m2_a"] * i + 1.0)

    area = capacity_mw * 1e6 / (volt(i_max) * i_max)
    i = np.linspace(i_max / n, i_max, n)
    power = volt(i) * i * area / 1e6
    eta_f = i * i / (c["faraday_f1_a2_m4"] + i * i) * c["faraday_f2"]
    rate = 3600.0 * eta_f * c["molar_mass_h2_kg_mol"] * i * area / (2.0 * c["faraday_constant_c_mol"])
    return power, rate


def main():
    root = pathlib.Path(__file__).resolve().parents[1]
    ap = argparse.ArgumentParser()
    ap.add_argument("--scenario", default=str(root / "data" / "default_scenario.json"))
    ap.add_argument("--dry-run", action="store_true")
    args = ap.parse_args()

    path = pathlib.Path(args.scenario)
    cfg = json.loads(path.read_text())
    c = coefficients(cfg["temperature_c"], cfg["pressure_bar"])
    power, rate = curves(c, cfg["electrolyzer_capacity_mw"], cfg["max_current_density_a_m2"])
    eta = rate / power
    k = int(np.argmax(eta))
    load = power[k] / cfg["electrolyzer_capacity_mw"]
    print(f"peak efficiency {eta[k]:.4f} kg/MWh at {power[k]:.4f} MW ({100 * load:.1f} % load)")
    print(f"full-load efficiency {eta[-1]:.4f} kg/MWh, full-load rate {rate[-1]:.3f} kg/h")
    if not 0.15 < load < 0.45:
        raise SystemExit("efficiency peak outside 15-45 % load band")
    if not eta[-1] < eta[k]:
        raise SystemExit("full-load efficiency not below peak")
    window = power >= cfg["minimum_load_mw"]
    second = np.gradient(np.gradient(rate[window], power[window]), power[window])
    if second[2:-2].max() > 0:
        raise SystemExit("production curve not concave above minimum load")

    cfg["physics"] = c
    if args.dry_run:
        print(json.dumps(c, indent=2))
    else:
        path.write_text(json.dumps(cfg, indent=2) + "\n")
        print(f"wrote physics block to {path}")


if __name__ == "__main__":
    main()
