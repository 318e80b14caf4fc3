#pragma once

#include "gspr/reduction.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace gspr {

// Flat key/value tree with stable (sorted) key order; rendering is
// byte-stable across runs.
class Report {
 public:
  void set(const std::string& key, const std::string& value) { kv_[key] = value; }
  void set(const std::string& key, Verdict v) { kv_[key] = to_string(v); }
  void set(const std::string& key, std::size_t v) { kv_[key] = std::to_string(v); }
  void set(const std::string& key, double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    kv_[key] = os.str();
  }

  const std::map<std::string, std::string>& entries() const { return kv_; }

  std::string render() const {
    std::string out;
    for (const auto& [k, v] : kv_) out += k + " = " + v + "\n";
    return out;
  }

  void write(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write report to " + path);
    os << render();
  }

 private:
  std::map<std::string, std::string> kv_;
};

inline std::string bivector_to_string(const PoissonBivector& pi) {
  if (pi.upper().empty()) return "0";
  std::string out;
  for (const auto& [k, p] : pi.upper()) {
    if (!out.empty()) out += "; ";
    out += "pi[" + std::to_string(k.first + 1) + "][" + std::to_string(k.second + 1) +
           "] = " + p.str();
  }
  return out;
}

inline void fill_report(Report& rep, const std::string& prefix, const ReductionReport& r) {
  rep.set(prefix + ".theorem", std::string(to_string(r.theorem)));
  for (const auto& c : r.conditions) {
    rep.set(prefix + ".conditions." + c.id, c.verdict);
    if (!c.witness.empty()) rep.set(prefix + ".conditions." + c.id + ".witness", c.witness);
    if (!c.frame.empty()) rep.set(prefix + ".conditions." + c.id + ".frame", c.frame);
  }
  rep.set(prefix + ".overall", r.overall());
  if (!r.error.empty()) rep.set(prefix + ".error", r.error);
  if (r.reduced) {
    const auto& qc = r.reduced->context();
    std::string names;
    for (const auto& n : qc->names()) names += (names.empty() ? "" : " ") + n;
    rep.set(prefix + ".reduced.coordinates", names);
    for (std::size_t i = 0; i < qc->size(); ++i)
      for (std::size_t j = i + 1; j < qc->size(); ++j) {
        Polynomial p = r.reduced->component(i, j);
        if (!p.is_zero())
          rep.set(prefix + ".reduced.pi[" + std::to_string(i + 1) + "][" +
                      std::to_string(j + 1) + "]",
                  p.str());
      }
  }
  if (r.defect) {
    rep.set(prefix + ".jacobi.defect", r.defect->str());
    rep.set(prefix + ".jacobi.status", r.defect->is_zero() ? "PASS" : "FAIL");
  }
  for (const auto& [name, lift] : r.lift_table) rep.set(prefix + ".lifts." + name, lift.str());
}

}  // namespace gspr
