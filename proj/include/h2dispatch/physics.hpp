#pragma once

// Alkaline electrolyzer operating curves at a fixed temperature and pressure.
//
// All curves are functions of the current density i [A/m^2]:
//   cell voltage   U(i) = U_rev + K1 i + K2 log(K3 i + 1)
//   power          P(i) = U(i) i A                       [MW]
//   Faraday eff.   eta_F(i) = i^2 / (f1 + i^2) * f2
//   hydrogen rate  h(i) = 3600 eta_F(i) M_H2 i A / (2 F)  [kg/h]
//   efficiency     eta(i) = h(i) / P(i)                  [kg/MWh]

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <Eigen/Core>

#include "h2dispatch/errors.hpp"

namespace h2dispatch {

enum class LogBase : std::uint8_t { kTen, kNatural };

template <typename Scalar>
struct BasicElectrolyzerPhysics {
  Scalar u_rev = Scalar(0);            // V
  Scalar k1 = Scalar(0);               // V m^2 / A
  Scalar k2 = Scalar(0);               // V
  Scalar k3 = Scalar(0);               // m^2 / A
  Scalar cell_area_total = Scalar(0);  // m^2
  Scalar i_max = Scalar(0);            // A / m^2
  Scalar faraday_f1 = Scalar(0);       // A^2 / m^4
  Scalar faraday_f2 = Scalar(0);       // dimensionless, <= 1
  Scalar temperature = Scalar(90);     // degC, metadata
  Scalar pressure = Scalar(30);        // bar, metadata
  Scalar m_h2 = Scalar(2.01588e-3);    // kg / mol
  Scalar f_const = Scalar(96485.33212);  // C / mol
  LogBase log_base = LogBase::kTen;
};

using ElectrolyzerPhysics = BasicElectrolyzerPhysics<double>;

template <typename Scalar>
struct BasicOperatingPoint {
  Scalar current_density = Scalar(0);  // A / m^2
  Scalar power = Scalar(0);            // MW
  Scalar hydrogen_rate = Scalar(0);    // kg / h
  Scalar efficiency = Scalar(0);       // kg / MWh
};

using OperatingPoint = BasicOperatingPoint<double>;

/// Curve sampling resolution used by the peak search and dense-grid checks.
inline constexpr int kCurveSamples = 10000;

namespace detail {

template <typename Scalar>
void check_current(const BasicElectrolyzerPhysics<Scalar>& phys, Scalar i, const char* op) {
  if (!(i >= Scalar(0) && i <= phys.i_max)) {
    throw DomainError(std::string(op) + ": current density " + std::to_string(double(i)) +
                      " A/m^2 outside [0, " + std::to_string(double(phys.i_max)) + "]");
  }
}

template <typename Scalar>
Scalar voltage_unchecked(const BasicElectrolyzerPhysics<Scalar>& phys, Scalar i) {
  using std::log;
  using std::log10;
  const Scalar arg = phys.k3 * i + Scalar(1);
  const Scalar lg = phys.log_base == LogBase::kTen ? log10(arg) : log(arg);
  return phys.u_rev + phys.k1 * i + phys.k2 * lg;
}

template <typename Scalar>
Scalar power_unchecked(const BasicElectrolyzerPhysics<Scalar>& phys, Scalar i) {
  return voltage_unchecked(phys, i) * i * phys.cell_area_total * Scalar(1e-6);
}

template <typename Scalar>
Scalar faraday_unchecked(const BasicElectrolyzerPhysics<Scalar>& phys, Scalar i) {
  const Scalar i2 = i * i;
  return i2 / (phys.faraday_f1 + i2) * phys.faraday_f2;
}

template <typename Scalar>
Scalar rate_unchecked(const BasicElectrolyzerPhysics<Scalar>& phys, Scalar i) {
  return Scalar(3600) * faraday_unchecked(phys, i) * phys.m_h2 * i * phys.cell_area_total /
         (Scalar(2) * phys.f_const);
}

}  // namespace detail

/// Throws DomainError unless all coefficients are positive and eta_F stays in [0, 1].
template <typename Scalar>
void validate(const BasicElectrolyzerPhysics<Scalar>& phys) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw DomainError(std::string("invalid electrolyzer physics: ") + what);
  };
  require(phys.u_rev > Scalar(0), "u_rev must be > 0");
  require(phys.k1 > Scalar(0), "k1 must be > 0");
  require(phys.k2 > Scalar(0), "k2 must be > 0");
  require(phys.k3 > Scalar(0), "k3 must be > 0");
  require(phys.cell_area_total > Scalar(0), "cell_area_total must be > 0");
  require(phys.i_max > Scalar(0), "i_max must be > 0");
  require(phys.faraday_f1 >= Scalar(0), "faraday_f1 must be >= 0");
  require(phys.faraday_f2 > Scalar(0) && phys.faraday_f2 <= Scalar(1),
          "faraday_f2 must be in (0, 1]");
  require(phys.m_h2 > Scalar(0) && phys.f_const > Scalar(0), "physical constants must be > 0");
}

template <typename Scalar>
Scalar cell_voltage(const BasicElectrolyzerPhysics<Scalar>& phys, Scalar i) {
  detail::check_current(phys, i, "cell_voltage");
  return detail::voltage_unchecked(phys, i);
}

/// Electrical power in MW.
template <typename Scalar>
Scalar electrical_power(const BasicElectrolyzerPhysics<Scalar>& phys, Scalar i) {
  detail::check_current(phys, i, "electrical_power");
  return detail::power_unchecked(phys, i);
}

template <typename Scalar>
Scalar faraday_efficiency(const BasicElectrolyzerPhysics<Scalar>& phys, Scalar i) {
  detail::check_current(phys, i, "faraday_efficiency");
  return detail::faraday_unchecked(phys, i);
}

/// Hydrogen production rate in kg/h.
template <typename Scalar>
Scalar hydrogen_rate(const BasicElectrolyzerPhysics<Scalar>& phys, Scalar i) {
  detail::check_current(phys, i, "hydrogen_rate");
  return detail::rate_unchecked(phys, i);
}

/// Hydrogen rate with unit Faraday efficiency (the ideal Faraday-law output).
template <typename Scalar>
Scalar faraday_limit_rate(const BasicElectrolyzerPhysics<Scalar>& phys, Scalar i) {
  detail::check_current(phys, i, "faraday_limit_rate");
  return Scalar(3600) * phys.m_h2 * i * phys.cell_area_total / (Scalar(2) * phys.f_const);
}

/// Nameplate power at i_max.
template <typename Scalar>
Scalar max_power(const BasicElectrolyzerPhysics<Scalar>& phys) {
  return detail::power_unchecked(phys, phys.i_max);
}

/// Returns a copy whose cell area makes electrical_power(i_max) equal `capacity_mw`.
template <typename Scalar>
BasicElectrolyzerPhysics<Scalar> calibrate_area(BasicElectrolyzerPhysics<Scalar> phys,
                                                Scalar capacity_mw) {
  if (!(capacity_mw > Scalar(0))) throw DomainError("calibrate_area: capacity must be > 0");
  phys.cell_area_total = Scalar(1);
  const Scalar per_area = detail::power_unchecked(phys, phys.i_max);
  phys.cell_area_total = capacity_mw / per_area;
  return phys;
}

/// Inverts P(i) = p by bisection on [0, i_max] to 1e-10 A/m^2.
template <typename Scalar>
Scalar current_at_power(const BasicElectrolyzerPhysics<Scalar>& phys, Scalar p) {
  const Scalar p_max = max_power(phys);
  const Scalar slack = p_max * Scalar(1e-12);
  if (!(p >= Scalar(0) && p <= p_max + slack)) {
    throw DomainError("current_at_power: power " + std::to_string(double(p)) +
                      " MW outside [0, " + std::to_string(double(p_max)) + "]");
  }
  if (p >= p_max) return phys.i_max;
  if (p == Scalar(0)) return Scalar(0);
  Scalar lo = Scalar(0);
  Scalar hi = phys.i_max;
  for (int iter = 0; iter < 200; ++iter) {
    const Scalar mid = (lo + hi) / Scalar(2);
    if (detail::power_unchecked(phys, mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= Scalar(1e-10)) return (lo + hi) / Scalar(2);
  }
  throw NumericError("current_at_power: bisection did not converge");
}

/// Hydrogen rate [kg/h] as a function of power [MW].
template <typename Scalar>
Scalar hydrogen_at_power(const BasicElectrolyzerPhysics<Scalar>& phys, Scalar p) {
  return detail::rate_unchecked(phys, current_at_power(phys, p));
}

/// Efficiency [kg/MWh] at power p in (0, C_e].
template <typename Scalar>
Scalar efficiency_at_power(const BasicElectrolyzerPhysics<Scalar>& phys, Scalar p) {
  if (!(p > Scalar(0))) throw DomainError("efficiency_at_power: power must be > 0");
  return hydrogen_at_power(phys, p) / p;
}

template <typename Scalar>
BasicOperatingPoint<Scalar> operating_point(const BasicElectrolyzerPhysics<Scalar>& phys,
                                            Scalar i) {
  BasicOperatingPoint<Scalar> op;
  op.current_density = i;
  op.power = electrical_power(phys, i);
  op.hydrogen_rate = hydrogen_rate(phys, i);
  op.efficiency = op.power > Scalar(0) ? op.hydrogen_rate / op.power : Scalar(0);
  return op;
}

/// Efficiency maximum over [p_min, C_e]: dense sampling in current density, then
/// golden-section refinement inside the bracketing samples.
template <typename Scalar>
BasicOperatingPoint<Scalar> find_peak_efficiency(const BasicElectrolyzerPhysics<Scalar>& phys,
                                                 Scalar p_min) {
  const Scalar i_lo = p_min > Scalar(0) ? current_at_power(phys, p_min) : phys.i_max * Scalar(1e-6);
  const Scalar i_hi = phys.i_max;
  auto eta = [&](Scalar i) {
    return detail::rate_unchecked(phys, i) / detail::power_unchecked(phys, i);
  };

  const Eigen::Index n = kCurveSamples;
  Eigen::Index best = 0;
  Scalar best_eta = -std::numeric_limits<Scalar>::infinity();
  const Scalar step = (i_hi - i_lo) / Scalar(n - 1);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Scalar e = eta(i_lo + step * Scalar(k));
    if (e > best_eta) {
      best_eta = e;
      best = k;
    }
  }

  Scalar a = i_lo + step * Scalar(best > 0 ? best - 1 : 0);
  Scalar b = i_lo + step * Scalar(best < n - 1 ? best + 1 : n - 1);
  const Scalar inv_phi = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
  Scalar c = b - inv_phi * (b - a);
  Scalar d = a + inv_phi * (b - a);
  Scalar fc = eta(c);
  Scalar fd = eta(d);
  for (int iter = 0; iter < 200 && b - a > Scalar(1e-9); ++iter) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eta(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eta(d);
    }
  }
  Scalar i_star = (a + b) / Scalar(2);
  // Boundary maxima stay on the boundary.
  if (eta(i_lo) >= eta(i_star)) i_star = i_lo;
  if (eta(i_hi) > eta(i_star)) i_star = i_hi;
  return operating_point(phys, i_star);
}

}  // namespace h2dispatch
