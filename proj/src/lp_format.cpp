#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "h2dispatch/errors.hpp"
#include "h2dispatch/milp.hpp"

namespace h2dispatch {
namespace {

constexpr int kTermsPerLine = 8;

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_terms(std::ostream& out, const MilpInstance& inst, const std::vector<Term>& terms) {
  int on_line = 0;
  bool first = true;
  for (const auto& t : terms) {
    if (on_line == kTermsPerLine) {
      out << "\n   ";
      on_line = 0;
    }
    const double c = t.coef;
    if (first) {
      out << (c < 0 ? " - " : " ");
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    out << number(std::abs(c)) << ' ' << inst.variable(t.var).name;
    first = false;
    ++on_line;
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void write_lp(std::ostream& out, const MilpInstance& inst, const std::string& problem_name) {
  if (!problem_name.empty()) out << "\\ Problem: " << problem_name << '\n';
  out << "Maximize\n obj:";
  std::vector<Term> obj;
  for (int j = 0; j < inst.num_variables(); ++j) {
    if (inst.variable(j).objective != 0.0) obj.push_back({j, inst.variable(j).objective});
  }
  if (obj.empty() && inst.num_variables() > 0) obj.push_back({0, 0.0});
  write_terms(out, inst, obj);
  out << "\nSubject To\n";
  for (int i = 0; i < inst.num_rows(); ++i) {
    const auto& r = inst.row(i);
    out << ' ' << r.name << ':';
    if (inst.row_terms()[i].empty()) {
      out << " 0 " << inst.variable(0).name;
    } else {
      write_terms(out, inst, inst.row_terms()[i]);
    }
    const char* sense = r.sense == RowSense::kLe ? "<=" : r.sense == RowSense::kGe ? ">=" : "=";
    out << ' ' << sense << ' ' << number(r.rhs) << '\n';
  }
  out << "Bounds\n";
  for (const auto& v : inst.variables()) {
    if (v.lower == v.upper) {
      out << ' ' << v.name << " = " << number(v.lower) << '\n';
      continue;
    }
    const std::string lo = std::isfinite(v.lower) ? number(v.lower) : "-inf";
    const std::string up = std::isfinite(v.upper) ? number(v.upper) : "+inf";
    out << ' ' << lo << " <= " << v.name << " <= " << up << '\n';
  }
  bool any_binary = false;
  for (const auto& v : inst.variables()) {
    if (v.kind != VarKind::kBinary) continue;
    if (!any_binary) out << "Binaries\n";
    any_binary = true;
    out << ' ' << v.name << '\n';
  }
  out << "End\n";
}

Eigen::VectorXd read_solution(std::istream& in, const MilpInstance& inst, const std::string& source) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(inst.num_variables());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    for (char& ch : line) {
      if (ch == '=') ch = ' ';
    }
    std::istringstream fields(line);
    std::string name;
    std::string value;
    std::string extra;
    fields >> name >> value;
    if (value.empty() || (fields >> extra)) {
      throw ParseError(source, lineno, "expected 'name = value'");
    }
    const auto j = inst.find(name);
    if (!j) throw ParseError(source, lineno, "unknown variable '" + name + "'");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || !std::isfinite(v)) {
      throw ParseError(source, lineno, "bad value '" + value + "' for " + name);
    }
    x(*j) = v;
  }
  return x;
}

MilpSolution verify_external_solution(const MilpInstance& inst, const Eigen::VectorXd& x, double tol) {
  const FeasibilityReport rep = check_feasibility(inst, x);
  if (!rep.feasible(tol)) {
    throw IntegrityError(rep.worst, "external solution violates '" + rep.worst + "' by " +
                                        number(rep.max_violation));
  }
  MilpSolution sol;
  sol.status = MilpStatus::kOptimal;
  sol.values = x;
  sol.objective = inst.objective_value(x);
  sol.bound = sol.objective;
  sol.feasibility_tol = tol;
  return sol;
}

}  // namespace h2dispatch
