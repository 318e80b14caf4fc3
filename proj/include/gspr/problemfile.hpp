#pragma once

#include "gspr/dgla.hpp"
#include "gspr/groupoid.hpp"
#include "gspr/parse.hpp"
#include "gspr/reduction.hpp"

#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace gspr {

struct problem_error : std::runtime_error {
  problem_error(const std::string& msg, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_number(line) {}
  std::size_t line_number;
};

// One self-describing text format for all commands.  Sections:
//   [variables]  even = x1 x2 ...
//   [bivector]   pi[i][j] = <poly>   or   S = <degree-2 expression>
//   [submanifold]  solve <var> = <poly> | solve th<k> = <degree-1 expr>
//                  quotient = <names>
//   [distribution.E]  gen = <degree-1 expr>       (attached to C)
//   [stage.A]    solve <var> = <poly>
//   [distribution.D]  gen = <degree-1 expr>
//   [dgla]       dim_h / dim_g / gg[i][j][k] / gh[i][j][k] / delta[w][v]
//   [action]     J0[i] = <poly>   J1[i] = <degree-1 expr>
//   [options]    samples / seed / degree_bound / tolerance
// Vector-group realizations declared in the [groups] section; `partial` is
// either the identity or the linear map read off the dgla delta matrix.
struct GroupsSection {
  std::size_t dim_h = 0;
  std::size_t dim_g = 0;
  bool partial_identity = true;
};

struct ProblemFile {
  ContextPtr ctx;
  std::optional<PoissonBivector> pi;
  std::optional<SubmanifoldSpec> C;
  std::vector<GradedFunction> E_gens;
  std::optional<StageSpec> stage;
  std::optional<DGLASpec> dgla;
  std::optional<ActionData> action;
  std::optional<GroupsSection> groups;
  ProbeOptions options;
  double tolerance = 1e-8;
  std::size_t kxky_samples = 100;
};

namespace pfdetail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

// "name[1][2][3]" -> ("name", {1,2,3})
inline std::pair<std::string, std::vector<std::size_t>> parse_indexed(const std::string& key,
                                                                      std::size_t line) {
  std::size_t b = key.find('[');
  if (b == std::string::npos) return {key, {}};
  std::string name = key.substr(0, b);
  std::vector<std::size_t> idx;
  std::size_t pos = b;
  while (pos < key.size()) {
    if (key[pos] != '[') throw problem_error("malformed index in '" + key + "'", line);
    std::size_t e = key.find(']', pos);
    if (e == std::string::npos) throw problem_error("missing ']' in '" + key + "'", line);
    std::string num = key.substr(pos + 1, e - pos - 1);
    if (num.empty()) throw problem_error("empty index in '" + key + "'", line);
    idx.push_back(std::stoul(num));
    pos = e + 1;
  }
  return {name, idx};
}

}  // namespace pfdetail

inline ProblemFile parse_problem_file(const std::string& text) {
  using pfdetail::parse_indexed;
  using pfdetail::split_ws;
  using pfdetail::trim;

  ProblemFile pf;
  std::istringstream is(text);
  std::string raw;
  std::string section;
  std::size_t line_no = 0;

  // collected raw statements, processed in two passes so that [variables]
  // need not come first
  struct Stmt {
    std::string section, key, value;
    std::size_t line;
  };
  std::vector<Stmt> stmts;

  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = trim(raw);
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw problem_error("malformed section header", line_no);
      section = line.substr(1, line.size() - 2);
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw problem_error("expected 'key = value'", line_no);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw problem_error("statement outside any section", line_no);
    stmts.push_back({section, key, value, line_no});
  }

  // pass 1: variables and options
  for (const auto& s : stmts) {
    if (s.section == "variables" && s.key == "even") {
      pf.ctx = make_context(split_ws(s.value));
    } else if (s.section == "options") {
      if (s.key == "samples")
        pf.options.samples = std::stoul(s.value);
      else if (s.key == "seed")
        pf.options.seed = static_cast<unsigned>(std::stoul(s.value));
      else if (s.key == "degree_bound")
        pf.options.degree_bound = std::stoi(s.value);
      else if (s.key == "tolerance")
        pf.tolerance = std::stod(s.value);
      else if (s.key == "kxky_samples")
        pf.kxky_samples = std::stoul(s.value);
      else
        throw problem_error("unknown option '" + s.key + "'", s.line);
    }
  }
  bool needs_ctx = false;
  for (const auto& s : stmts)
    if (s.section != "variables" && s.section != "options") needs_ctx = true;
  if (needs_ctx && !pf.ctx) throw problem_error("missing [variables] section", 1);

  auto parse_poly_at = [&](const std::string& v, std::size_t line) {
    try {
      return parse_polynomial(v, pf.ctx);
    } catch (const parse_error& e) {
      throw problem_error(e.what(), line);
    }
  };
  auto parse_graded_at = [&](const std::string& v, std::size_t line) {
    try {
      return parse_graded(v, pf.ctx);
    } catch (const parse_error& e) {
      throw problem_error(e.what(), line);
    }
  };

  // pass 2: everything else, in file order
  std::optional<GradedFunction> s_expr;
  std::vector<GradedFunction> d_gens;
  for (const auto& s : stmts) {
    if (s.section == "variables" || s.section == "options") continue;
    if (s.section == "bivector") {
      auto [name, idx] = parse_indexed(s.key, s.line);
      if (name == "pi") {
        if (idx.size() != 2) throw problem_error("pi needs two indices", s.line);
        if (!pf.pi) pf.pi = PoissonBivector(pf.ctx);
        if (idx[0] < 1 || idx[1] < 1 || idx[0] > pf.ctx->size() || idx[1] > pf.ctx->size())
          throw problem_error("bivector index out of range", s.line);
        pf.pi->set(idx[0] - 1, idx[1] - 1, parse_poly_at(s.value, s.line));
      } else if (name == "S") {
        s_expr = parse_graded_at(s.value, s.line);
      } else {
        throw problem_error("unknown bivector key '" + s.key + "'", s.line);
      }
    } else if (s.section == "submanifold") {
      if (!pf.C) pf.C = SubmanifoldSpec(pf.ctx);
      if (s.key.rfind("solve ", 0) == 0) {
        std::string lhs = trim(s.key.substr(6));
        try {
          if (lhs.rfind("th", 0) == 0 && lhs.size() > 2 &&
              std::isdigit(static_cast<unsigned char>(lhs[2]))) {
            std::size_t idx = std::stoul(lhs.substr(2));
            if (idx == 0 || idx > pf.ctx->size())
              throw problem_error("odd coordinate out of range", s.line);
            pf.C->solve_theta(idx - 1, parse_graded_at(s.value, s.line));
          } else {
            int vi = pf.ctx->index_of(lhs);
            if (vi < 0) throw problem_error("unknown variable '" + lhs + "'", s.line);
            pf.C->solve_even(static_cast<std::size_t>(vi), parse_poly_at(s.value, s.line));
          }
        } catch (const std::invalid_argument& e) {
          throw problem_error(e.what(), s.line);
        }
      } else if (s.key == "quotient") {
        std::vector<std::size_t> q;
        for (const auto& name : split_ws(s.value)) {
          int vi = pf.ctx->index_of(name);
          if (vi < 0) throw problem_error("unknown quotient coordinate '" + name + "'", s.line);
          q.push_back(static_cast<std::size_t>(vi));
        }
        pf.C->set_quotient_coords(q);
      } else {
        throw problem_error("unknown submanifold key '" + s.key + "'", s.line);
      }
    } else if (s.section == "distribution.E") {
      if (s.key != "gen") throw problem_error("expected 'gen = ...'", s.line);
      pf.E_gens.push_back(parse_graded_at(s.value, s.line));
    } else if (s.section == "stage.A") {
      if (!pf.stage) pf.stage = StageSpec{SubmanifoldSpec(pf.ctx), {}};
      if (s.key.rfind("solve ", 0) == 0) {
        std::string lhs = trim(s.key.substr(6));
        int vi = pf.ctx->index_of(lhs);
        if (vi < 0) throw problem_error("unknown variable '" + lhs + "'", s.line);
        pf.stage->A.solve_even(static_cast<std::size_t>(vi), parse_poly_at(s.value, s.line));
      } else {
        throw problem_error("unknown stage key '" + s.key + "'", s.line);
      }
    } else if (s.section == "distribution.D") {
      if (!pf.stage) pf.stage = StageSpec{SubmanifoldSpec(pf.ctx), {}};
      if (s.key != "gen") throw problem_error("expected 'gen = ...'", s.line);
      d_gens.push_back(parse_graded_at(s.value, s.line));
    } else if (s.section == "dgla") {
      if (!pf.dgla) pf.dgla = DGLASpec::make(0, 0);
      auto [name, idx] = parse_indexed(s.key, s.line);
      auto val = [&]() { return parse_poly_at(s.value, s.line).constant_value(); };
      if (name == "dim_h") {
        std::size_t dh = std::stoul(s.value);
        *pf.dgla = DGLASpec::make(dh, pf.dgla->dim_g);
      } else if (name == "dim_g") {
        std::size_t dg = std::stoul(s.value);
        *pf.dgla = DGLASpec::make(pf.dgla->dim_h, dg);
      } else if (name == "gg") {
        if (idx.size() != 3) throw problem_error("gg needs three indices", s.line);
        pf.dgla->bracket_gg.at(idx[0] - 1).at(idx[1] - 1).at(idx[2] - 1) = val();
        pf.dgla->bracket_gg.at(idx[1] - 1).at(idx[0] - 1).at(idx[2] - 1) = -val();
      } else if (name == "gh") {
        if (idx.size() != 3) throw problem_error("gh needs three indices", s.line);
        pf.dgla->bracket_gh.at(idx[0] - 1).at(idx[1] - 1).at(idx[2] - 1) = val();
      } else if (name == "delta") {
        if (idx.size() != 2) throw problem_error("delta needs two indices", s.line);
        pf.dgla->delta.at(idx[0] - 1).at(idx[1] - 1) = val();
      } else {
        throw problem_error("unknown dgla key '" + s.key + "'", s.line);
      }
    } else if (s.section == "groups") {
      if (!pf.groups) pf.groups = GroupsSection{};
      auto words = split_ws(s.value);
      if (s.key == "H" || s.key == "G") {
        if (words.size() != 2 || words[0] != "vector")
          throw problem_error("group realizations must be 'vector <dim>'", s.line);
        (s.key == "H" ? pf.groups->dim_h : pf.groups->dim_g) = std::stoul(words[1]);
      } else if (s.key == "partial") {
        if (s.value == "identity")
          pf.groups->partial_identity = true;
        else if (s.value == "delta")
          pf.groups->partial_identity = false;
        else
          throw problem_error("partial must be 'identity' or 'delta'", s.line);
      } else if (s.key == "phi") {
        if (s.value != "trivial")
          throw problem_error("only the trivial action phi is supported here", s.line);
      } else {
        throw problem_error("unknown groups key '" + s.key + "'", s.line);
      }
    } else if (s.section == "pairgroupoid") {
      if (s.key == "samples")
        pf.kxky_samples = std::stoul(s.value);
      else if (s.key == "seed")
        pf.options.seed = static_cast<unsigned>(std::stoul(s.value));
      else if (s.key == "tolerance")
        pf.tolerance = std::stod(s.value);
      else
        throw problem_error("unknown pairgroupoid key '" + s.key + "'", s.line);
    } else if (s.section == "action") {
      if (!pf.action) pf.action = ActionData{{}, {}, PoissonBivector(pf.ctx)};
      auto [name, idx] = parse_indexed(s.key, s.line);
      if (name == "J0") {
        if (idx.size() != 1) throw problem_error("J0 needs one index", s.line);
        if (pf.action->J0.size() < idx[0]) pf.action->J0.resize(idx[0], Polynomial::zero(pf.ctx));
        pf.action->J0[idx[0] - 1] = parse_poly_at(s.value, s.line);
      } else if (name == "J1") {
        if (idx.size() != 1) throw problem_error("J1 needs one index", s.line);
        if (pf.action->J1.size() < idx[0])
          pf.action->J1.resize(idx[0], GradedFunction::zero(pf.ctx));
        GradedFunction g = parse_graded_at(s.value, s.line);
        if (!g.is_zero() && !g.is_homogeneous(1))
          throw problem_error("J1 entries must be degree-1 expressions", s.line);
        pf.action->J1[idx[0] - 1] = g;
      } else {
        throw problem_error("unknown action key '" + s.key + "'", s.line);
      }
    } else {
      throw problem_error("unknown section [" + s.section + "]", s.line);
    }
  }

  if (s_expr) {
    if (pf.pi) throw problem_error("give either pi components or S, not both", 1);
    try {
      pf.pi = PoissonBivector::from_graded(*s_expr);
    } catch (const degree_error& e) {
      throw problem_error(e.what(), 1);
    }
  }
  if (!pf.E_gens.empty()) {
    if (!pf.C) pf.C = SubmanifoldSpec(pf.ctx);
    try {
      attach_distribution(*pf.C, pf.E_gens);
    } catch (const std::invalid_argument& e) {
      throw problem_error(std::string("distribution.E: ") + e.what(), 1);
    }
  }
  if (pf.stage) pf.stage->D_gens = d_gens;
  if (pf.action && pf.pi) pf.action->pi = *pf.pi;
  return pf;
}

}  // namespace gspr
