// cmix: batch runner for degree, identity and mixing scenarios.
//
//   cmix run <config.json> [--seed S] [--out DIR] [--threads T] [--strict]
//   cmix compare <a.json> <b.json> [--rel R] [--abs A]
//   cmix emit-examples [--out DIR]
//
// Exit status: 0 pass (or warn), 1 failing task or non-empty diff, 2 usage,
// parse or I/O error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "cmix/errors.hpp"
#include "cmix/runner.hpp"

namespace {

using nlohmann::json;
namespace rn = cmix::runner;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cmix::ParseError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw cmix::ParseError(path + ": " + e.what());
  }
}

int do_run(const std::string& config_path, const rn::RunOptions& opts) {
  const rn::Config cfg = rn::load_config(config_path);
  const rn::RunResult res = rn::run(cfg, opts);
  for (const auto& sc : res.report["scenarios"]) {
    std::cout << sc["status"].get<std::string>() << "  " << sc["name"].get<std::string>() << "\n";
  }
  for (const std::string& f : res.failures) std::cerr << f << "\n";
  std::cout << "report: " << (std::filesystem::path(opts.out_dir) / "report.json").string()
            << "  status: " << rn::to_string(res.status) << (opts.strict ? " (strict)" : "") << "\n";
  return rn::exit_code(res.status, opts.strict);
}

int do_compare(const std::string& a, const std::string& b, const rn::CompareOptions& opts) {
  const auto diff = rn::compare(read_json(a), read_json(b), opts);
  for (const auto& d : diff) {
    std::cout << d.path << ": " << d.a.dump() << " -> " << d.b.dump() << "\n";
  }
  std::cout << diff.size() << " difference" << (diff.size() == 1 ? "" : "s") << "\n";
  return diff.empty() ? 0 : 1;
}

int do_emit(const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, cfg] : rn::example_configs()) {
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream out(path);
    if (!out) throw cmix::Error("cannot write " + path.string());
    out << rn::dump(cfg);
    std::cout << path.string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cmix: commutator degree and mixing scenario runner"};
  app.set_version_flag("--version", std::string(CMIX_VERSION));
  app.require_subcommand(1);

  rn::RunOptions run_opts;
  std::string config_path;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "Run every scenario of a config");
  run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  auto* seed_opt = run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--out", run_opts.out_dir, "Output directory")->capture_default_str();
  run->add_option("--threads", run_opts.threads, "Scenarios run in parallel")
      ->check(CLI::Range(1u, 256u))
      ->capture_default_str();
  run->add_flag("--strict", run_opts.strict, "Treat warn as fail");

  std::string report_a, report_b;
  rn::CompareOptions cmp_opts;
  auto* cmp = app.add_subcommand("compare", "Field-wise diff of two reports");
  cmp->add_option("a", report_a, "First report")->required()->check(CLI::ExistingFile);
  cmp->add_option("b", report_b, "Second report")->required()->check(CLI::ExistingFile);
  cmp->add_option("--rel", cmp_opts.rel_tol, "Relative numeric tolerance")->capture_default_str();
  cmp->add_option("--abs", cmp_opts.abs_tol, "Absolute numeric tolerance")->capture_default_str();

  std::string emit_dir = "examples_out";
  auto* emit = app.add_subcommand("emit-examples", "Write the shipped example configs");
  emit->add_option("--out", emit_dir, "Target directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      if (*seed_opt) run_opts.seed = seed;
      return do_run(config_path, run_opts);
    }
    if (*cmp) return do_compare(report_a, report_b, cmp_opts);
    if (*emit) return do_emit(emit_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
