// Command-line front end: declarative problem files in, condition audits and
// reduced structures out.

#include "gspr/engine.hpp"
#include "gspr/fixtures.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

struct CommonOpts {
  std::string file;
  std::string report_path;
  int degree_bound = -2;  // -2: keep the file's value
  long samples = -1;
  long seed = -1;
  bool level = false;
};

int run_one(const std::string& command, const CommonOpts& opts) {
  gspr::ProblemFile pf;
  try {
    pf = gspr::parse_problem_file(read_file(opts.file));
  } catch (const std::exception& e) {
    std::cerr << "error: " << opts.file << ": " << e.what() << "\n";
    return gspr::EXIT_DATA;
  }
  if (opts.degree_bound != -2) pf.options.degree_bound = opts.degree_bound;
  if (opts.samples >= 0) {
    pf.options.samples = static_cast<std::size_t>(opts.samples);
    pf.kxky_samples = static_cast<std::size_t>(opts.samples);
  }
  if (opts.seed >= 0) pf.options.seed = static_cast<unsigned>(opts.seed);

  gspr::RunResult res;
  try {
    res = gspr::run_command(command, pf, opts.level);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gspr::EXIT_DATA;
  }
  std::cout << command << ": " << res.summary << "\n";
  if (!opts.report_path.empty()) {
    res.report.write(opts.report_path);
  } else {
    std::cout << "---\n" << res.report.render();
  }
  return res.status;
}

int run_examples(const std::string& dump_dir, const std::string& report_dir) {
  using gspr::fixtures;
  if (!dump_dir.empty()) {
    std::filesystem::create_directories(dump_dir);
    for (const auto& f : fixtures()) {
      std::ofstream os(dump_dir + "/" + std::string(f.name) + ".prob");
      os << f.text;
    }
    std::cout << "wrote " << fixtures().size() << " fixtures to " << dump_dir << "\n";
    return 0;
  }
  int bad = 0;
  for (const auto& f : fixtures()) {
    gspr::RunResult res;
    int status = gspr::EXIT_DATA;
    try {
      auto pf = gspr::parse_problem_file(f.text);
      res = gspr::run_command(f.command, pf, f.level_set);
      status = res.status;
    } catch (const std::exception& e) {
      res.summary = e.what();
    }
    bool ok = status == f.expected_status;
    if (!ok) ++bad;
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << f.name << " (" << f.command
              << (f.level_set ? " --level" : "") << "): " << res.summary;
    if (!ok) std::cout << "  [status " << status << ", expected " << f.expected_status << "]";
    std::cout << "\n";
    if (!report_dir.empty()) {
      std::filesystem::create_directories(report_dir);
      res.report.write(report_dir + "/" + std::string(f.name) + ".report");
    }
  }
  std::cout << (bad == 0 ? "all fixtures behaved as expected\n"
                         : std::to_string(bad) + " fixtures deviated\n");
  return bad == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graded-symplectic Poisson reduction engine"};
  app.require_subcommand(1);

  CommonOpts opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("file", opts.file, "problem file")->required();
    sub->add_option("--report", opts.report_path, "write the machine report to this path");
    sub->add_option("--degree-bound", opts.degree_bound, "lift solver degree bound");
    sub->add_option("--samples", opts.samples, "sample count for probes and numeric checks");
    sub->add_option("--seed", opts.seed, "seed for sampling");
  };

  auto* check = app.add_subcommand("check", "audit reduction hypotheses");
  add_common(check);
  auto* reduce = app.add_subcommand("reduce", "compute the reduced bivector");
  add_common(reduce);
  auto* dgla = app.add_subcommand("dgla-check", "audit DGLA / crossed-module / action data");
  add_common(dgla);
  auto* act = app.add_subcommand("act-verify", "verify the Lie 2-group action numerically");
  add_common(act);
  auto* mw = app.add_subcommand("mw-quotient", "quotients of the pair groupoid");
  add_common(mw);
  mw->add_flag("--level", opts.level, "reduce the zero level set of the lifted moment map");

  std::string dump_dir, report_dir;
  auto* examples = app.add_subcommand("examples", "run the bundled fixtures end-to-end");
  examples->add_option("--dump", dump_dir, "write the fixture files to a directory and exit");
  examples->add_option("--report-dir", report_dir, "write one machine report per fixture");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : gspr::EXIT_USAGE;
  }

  if (examples->parsed()) return run_examples(dump_dir, report_dir);
  for (const auto* sub : {check, reduce, dgla, act, mw})
    if (sub->parsed()) return run_one(sub->get_name(), opts);
  return gspr::EXIT_USAGE;
}
