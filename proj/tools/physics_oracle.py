#!/usr/bin/env python3
"""Standalone high-precision evaluation of the electrolyzer curves.

Reads the physics block of a scenario file and prints reference values that
the C++ unit tests freeze as expected constants. Uses mpmath at 40 digits so
the printed doubles are correctly rounded.
"""
import json
import pathlib
import sys

import mpmath as mp

mp.mp.dps = 40


def load(path):
    cfg = json.loads(pathlib.Path(path).read_text())
    ph = {k: mp.mpf(repr(v)) for k, v in cfg["physics"].items() if k != "log_base"}
    return cfg, ph


def main():
    root = pathlib.Path(__file__).resolve().parents[1]
    path = sys.argv[1] if len(sys.argv) > 1 else root / "data" / "default_scenario.json"
    cfg, ph = load(path)
    cap = mp.mpf(repr(cfg["electrolyzer_capacity_mw"]))
    i_max = mp.mpf(repr(cfg["max_current_density_a_m2"]))
    p_sb = mp.mpf(repr(cfg["standby_load_mw"]))
    p_min = mp.mpf(repr(cfg["minimum_load_mw"]))
    lam_h = mp.mpf(repr(cfg["hydrogen_price_eur_kg"]))

    def volt(i):
        return ph["u_rev_v"] + ph["k1_v_m2_a"] * i + ph["k2_v"] * mp.log10(ph["k3_m2_a"] * i + 1)

    area = cap * mp.mpf(10) ** 6 / (volt(i_max) * i_max)

    def power(i):
        return volt(i) * i * area / mp.mpf(10) ** 6

    def faraday(i):
        return i * i / (ph["faraday_f1_a2_m4"] + i * i) * ph["faraday_f2"]

    def rate(i):
        return 3600 * faraday(i) * ph["molar_mass_h2_kg_mol"] * i * area / (2 * ph["faraday_constant_c_mol"])

    def current(p):
        return mp.findroot(lambda i: power(i) - p, (mp.mpf(0), i_max), solver="anderson")

    def eta_p(p):
        i = current(p)
        return rate(i) / p

    out = {}
    out["area_m2"] = area
    out["voltage_2500"] = volt(2500)
    out["power_2500_mw"] = power(2500)
    out["faraday_5000"] = faraday(i_max)
    out["rate_2500_kg_h"] = rate(2500)
    out["full_load_rate_kg_h"] = rate(i_max)
    out["full_load_eff_kg_mwh"] = rate(i_max) / cap
    out["rate_at_pmin_kg_h"] = rate(current(p_min))
    out["current_at_pmin"] = current(p_min)

    # efficiency peak: maximize eta over power via the current parametrization
    i_peak = mp.findroot(lambda i: mp.diff(lambda x: rate(x) / power(x), i), mp.mpf(1300))
    out["peak_current"] = i_peak
    out["peak_power_mw"] = power(i_peak)
    out["peak_eff_kg_mwh"] = rate(i_peak) / power(i_peak)

    # price-range bounds
    eta_max = out["peak_eff_kg_mwh"]
    p_peak = out["peak_power_mw"]
    out["upper_bound_eur_mwh"] = lam_h * eta_max * p_peak / (p_peak - p_sb)
    deta = mp.diff(eta_p, cap)  # exact derivative at full load
    out["eta_prime_full_load"] = deta
    out["lower_bound_exact_eur_mwh"] = lam_h * (out["full_load_eff_kg_mwh"] + cap * deta)
    h = cap * mp.mpf("0.001")
    deta_bwd = (eta_p(cap) - eta_p(cap - h)) / h
    out["lower_bound_backward_eur_mwh"] = lam_h * (out["full_load_eff_kg_mwh"] + cap * deta_bwd)
    # exact standby-vs-operate threshold: max over p of lam_h h(p)/(p - P_sb)
    g = lambda i: rate(i) / (power(i) - p_sb)
    i_star = mp.findroot(lambda i: mp.diff(g, i), i_peak)
    out["standby_threshold_eur_mwh"] = lam_h * g(i_star)
    out["standby_threshold_power_mw"] = power(i_star)

    for k, v in out.items():
        print(f"{k:32s} {mp.nstr(v, 17)}")


if __name__ == "__main__":
    main()
