#pragma once

#include "gspr/problemfile.hpp"
#include "gspr/report.hpp"

#include <string>

namespace gspr {

// Exit-status contract shared by the CLI and the fixtures runner.
enum ExitStatus : int {
  EXIT_PASS = 0,
  EXIT_FAIL = 1,
  EXIT_UNKNOWN = 2,
  EXIT_USAGE = 64,
  EXIT_DATA = 65,
};

struct RunResult {
  Report report;
  int status = EXIT_PASS;
  std::string summary;
};

namespace engdetail {

inline int status_of(Verdict v) {
  switch (v) {
    case Verdict::PASS: return EXIT_PASS;
    case Verdict::FAIL: return EXIT_FAIL;
    default: return EXIT_UNKNOWN;
  }
}

inline int worst(int a, int b) {
  if (a == EXIT_FAIL || b == EXIT_FAIL) return EXIT_FAIL;
  if (a == EXIT_UNKNOWN || b == EXIT_UNKNOWN) return EXIT_UNKNOWN;
  return std::max(a, b);
}

}  // namespace engdetail

// `check`: audit every applicable hypothesis set of the problem.
inline RunResult run_check(const ProblemFile& pf) {
  RunResult out;
  if (!pf.C) {
    out.report.set("check.note", "no submanifold given: nothing to check");
    out.summary = "trivial PASS";
    return out;
  }
  auto probe = bracket_matrix_rank_probe(*pf.C, pf.options);
  out.report.set("presymplectic.verdict", probe.presymplectic);
  out.report.set("presymplectic.degree0_rank_generic", probe.degree0.generic);
  out.report.set("presymplectic.degree0_rank_constant", probe.degree0.constant);
  out.report.set("presymplectic.gamma_in_ideal", probe.gamma_in_ideal);
  if (!probe.gamma_witness.empty())
    out.report.set("presymplectic.gamma_witness", probe.gamma_witness);
  out.status = engdetail::worst(out.status, engdetail::status_of(probe.presymplectic));
  out.summary = "presymplectic " + std::string(to_string(probe.presymplectic));

  if (pf.pi) {
    auto co = check_coisotropic(*pf.C, *pf.pi, pf.options);
    fill_report(out.report, "coisotropic", co);
    auto mr = check_marsden_ratiu(*pf.C, *pf.pi, pf.options);
    fill_report(out.report, "marsden_ratiu", mr);
    auto de = check_descent(*pf.C, *pf.pi, pf.options);
    fill_report(out.report, "descent", de);

    if (pf.stage) {
      auto a1 = check_stages_A1(*pf.C, *pf.stage, *pf.pi, pf.options);
      fill_report(out.report, "A1", a1);
      auto a2 = check_stages_A2(*pf.C, *pf.stage, *pf.pi, pf.options);
      fill_report(out.report, "A2", a2);
      out.status = engdetail::worst(out.status, engdetail::status_of(a1.overall()));
      out.status = engdetail::worst(out.status, engdetail::status_of(a2.overall()));
      out.summary = "A1 " + std::string(to_string(a1.overall())) + ", A2 " +
                    std::string(to_string(a2.overall()));
    }
  }
  return out;
}

// `reduce`: descent audit; emit the reduced bivector and its Jacobi defect
// whenever the descent conditions hold.
inline RunResult run_reduce(const ProblemFile& pf) {
  RunResult out;
  if (!pf.C || !pf.pi) {
    out.status = EXIT_DATA;
    out.summary = "reduce needs [submanifold] and [bivector]";
    return out;
  }
  auto de = check_descent(*pf.C, *pf.pi, pf.options);
  fill_report(out.report, "descent", de);

  if (pf.stage) {
    auto a2 = check_stages_A2(*pf.C, *pf.stage, *pf.pi, pf.options);
    fill_report(out.report, "A2", a2);
  }

  // route agreement with the direct read-off route when it applies
  auto onc = reduce_bivector_onC(pf.pi->to_graded(), *pf.C, pf.options);
  if (onc.reduced) {
    fill_report(out.report, "onC", onc);
    if (de.reduced)
      out.report.set("route_agreement",
                     *onc.reduced == *de.reduced ? "PASS" : "FAIL");
  }

  if (!de.reduced) {
    // distinguish an UNKNOWN descent audit from a failing one
    Verdict v = Verdict::PASS;
    for (const auto& cond : de.conditions)
      if (cond.id == "condi1" || cond.id == "condi2") {
        if (cond.verdict == Verdict::FAIL) v = Verdict::FAIL;
        if (cond.verdict == Verdict::UNKNOWN && v != Verdict::FAIL) v = Verdict::UNKNOWN;
      }
    out.status = v == Verdict::UNKNOWN ? EXIT_UNKNOWN : EXIT_FAIL;
    out.summary = de.error.empty() ? "S does not descend" : de.error;
    if (v == Verdict::UNKNOWN) out.summary = "descent is UNKNOWN at the current degree bound";
    return out;
  }
  bool jacobi_ok = de.defect && de.defect->is_zero();
  out.status = jacobi_ok ? EXIT_PASS : EXIT_FAIL;
  out.summary = "reduced bivector: " + bivector_to_string(*de.reduced) +
                "; Jacobi " + (jacobi_ok ? "PASS" : "FAIL");
  if (!jacobi_ok && de.defect) out.summary += "; defect = " + de.defect->str();
  return out;
}

// `dgla-check`: structure-constant audits plus the action audit.
inline RunResult run_dgla_check(const ProblemFile& pf) {
  RunResult out;
  if (!pf.dgla) {
    out.status = EXIT_DATA;
    out.summary = "dgla-check needs a [dgla] section";
    return out;
  }
  auto rs = audit_dgla(*pf.dgla);
  for (const auto& r : rs) {
    out.report.set("dgla." + r.id, r.verdict);
    if (!r.witness.empty()) out.report.set("dgla." + r.id + ".witness", r.witness);
    out.status = engdetail::worst(out.status, engdetail::status_of(r.verdict));
  }
  if (all_pass(rs)) {
    auto cm = dgla_to_crossed_module(*pf.dgla);
    auto crs = audit_crossed_module(cm);
    for (const auto& r : crs) {
      out.report.set("crossed_module." + r.id, r.verdict);
      out.status = engdetail::worst(out.status, engdetail::status_of(r.verdict));
    }
    DGLASpec back = crossed_module_to_dgla(cm);
    bool roundtrip = back.bracket_gg == pf.dgla->bracket_gg &&
                     back.bracket_gh == pf.dgla->bracket_gh && back.delta == pf.dgla->delta;
    out.report.set("crossed_module.round_trip", roundtrip ? "PASS" : "FAIL");
    if (!roundtrip) out.status = EXIT_FAIL;
  }
  if (pf.action && pf.pi) {
    auto ars = audit_action(*pf.action, *pf.dgla);
    for (const auto& r : ars) {
      out.report.set("action." + r.id, r.verdict);
      if (!r.witness.empty()) out.report.set("action." + r.id + ".witness", r.witness);
      out.status = engdetail::worst(out.status, engdetail::status_of(r.verdict));
    }
    if (!pf.action->J0.empty()) {
      auto d = compute_D_and_invariance(*pf.action, pf.options);
      out.report.set("action.D.submersion", d.submersion);
      out.report.set("action.D.invariance", d.invariance);
      out.report.set("action.D.rank", d.D.size());
      if (!d.witness.empty()) out.report.set("action.D.witness", d.witness);
      out.status = engdetail::worst(out.status, engdetail::status_of(d.submersion));
      out.status = engdetail::worst(out.status, engdetail::status_of(d.invariance));
    }
  }
  out.summary = out.status == EXIT_PASS ? "all audits PASS" : "audit failures recorded";
  return out;
}

// `act-verify`: the numeric Lie 2-group law on the pair groupoid.
inline RunResult run_act_verify(const ProblemFile& pf) {
  RunResult out;
  if (!pf.action || !pf.pi || !pf.dgla) {
    out.status = EXIT_DATA;
    out.summary = "act-verify needs [dgla], [action] and [bivector]";
    return out;
  }
  // vector-group realization from the infinitesimal data; the CLI path
  // supports trivial phi (abelian action on h)
  for (std::size_t i = 0; i < pf.dgla->dim_g; ++i)
    for (std::size_t j = 0; j < pf.dgla->dim_h; ++j)
      if (!vec_zero(pf.dgla->bracket_gh[i][j])) {
        out.status = EXIT_DATA;
        out.summary = "act-verify supports vector groups with trivial phi only";
        return out;
      }
  if (pf.groups &&
      (pf.groups->dim_h != pf.dgla->dim_h || pf.groups->dim_g != pf.dgla->dim_g)) {
    out.status = EXIT_DATA;
    out.summary = "[groups] dimensions disagree with the [dgla] section";
    return out;
  }
  bool partial_id = pf.groups && pf.groups->partial_identity &&
                    pf.dgla->dim_h == pf.dgla->dim_g;
  CrossedModuleGroups cm;
  cm.H = GroupRealization::vector_group(pf.dgla->dim_h);
  cm.G = GroupRealization::vector_group(pf.dgla->dim_g);
  if (partial_id) {
    cm.partial = [](const Vec& h) { return h; };
  } else {
    ConstMat delta = pf.dgla->delta;
    cm.partial = [delta, dg = pf.dgla->dim_g](const Vec& h) {
      Vec g(dg, 0.0);
      for (std::size_t j = 0; j < h.size(); ++j)
        for (std::size_t k = 0; k < dg; ++k) g[k] += to_double(delta[j][k]) * h[j];
      return g;
    };
  }
  cm.phi = [](const Vec&, const Vec& h) { return h; };

  LiftedAction act{*pf.action};
  auto rep = verify_kxky(act, cm, pf.kxky_samples, pf.options.seed, pf.tolerance);
  out.report.set("kxky.seed", static_cast<std::size_t>(rep.seed));
  out.report.set("kxky.samples", rep.samples);
  out.report.set("kxky.max_deviation", rep.max_deviation);
  out.report.set("kxky.flow_calibration_deviation", rep.flow_calibration_deviation);
  out.report.set("kxky.moment_deviation", rep.moment_deviation);
  out.report.set("kxky.misclassified", rep.misclassified);
  bool ok = rep.misclassified == 0 && rep.max_deviation <= pf.tolerance &&
            rep.flow_calibration_deviation <= 1e-9;
  out.status = ok ? EXIT_PASS : EXIT_FAIL;
  out.summary = "max deviation " + std::to_string(rep.max_deviation) + ", misclassified " +
                std::to_string(rep.misclassified);
  return out;
}

// `mw-quotient`: global or level-set quotient of the pair groupoid.
inline RunResult run_mw_quotient(const ProblemFile& pf, bool level_set) {
  RunResult out;
  if (!pf.action || !pf.pi) {
    out.status = EXIT_DATA;
    out.summary = "mw-quotient needs [action] and [bivector]";
    return out;
  }
  auto rep = mw_quotient_pair(*pf.action, level_set, pf.options);
  fill_report(out.report, level_set ? "mw" : "global", rep.reduction);
  out.report.set("quotient.charted", rep.charted ? "yes" : "no");
  out.report.set("quotient.multiplicative", rep.multiplicative);
  if (!rep.witness.empty()) out.report.set("quotient.witness", rep.witness);
  if (!rep.reduction.reduced) {
    out.status = EXIT_FAIL;
    out.summary = rep.reduction.error.empty() ? "quotient not computed" : rep.reduction.error;
    return out;
  }
  out.status = engdetail::status_of(rep.reduction.overall());
  if (!rep.charted && rep.multiplicative == Verdict::FAIL) out.status = EXIT_FAIL;
  out.summary = "reduced bivector: " + bivector_to_string(*rep.reduction.reduced);
  return out;
}

inline RunResult run_command(const std::string& command, const ProblemFile& pf,
                             bool level_set = false) {
  if (command == "check") return run_check(pf);
  if (command == "reduce") return run_reduce(pf);
  if (command == "dgla-check") return run_dgla_check(pf);
  if (command == "act-verify") return run_act_verify(pf);
  if (command == "mw-quotient") return run_mw_quotient(pf, level_set);
  RunResult out;
  out.status = EXIT_USAGE;
  out.summary = "unknown command " + command;
  return out;
}

}  // namespace gspr
