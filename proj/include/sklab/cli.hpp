#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sklab/bounds.hpp"
#include "sklab/config.hpp"
#include "sklab/experiments.hpp"
#include "sklab/verify.hpp"

namespace sklab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfigError = 2;

enum class Subcommand { Run, Verify, WTable, BoundTable };

struct CliInvocation {
  Subcommand subcommand = Subcommand::Run;
  std::filesystem::path config_path;
  std::filesystem::path out_dir;
  std::vector<std::string> overrides;
  bool fast = false;
};

namespace detail {

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ValidationError("config", "cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::vector<double> default_w_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 20; ++i) g.push_back(i / 20.0);
  g.insert(g.end() - 1, 0.99);
  return g;
}

inline void write_outputs(const CliInvocation& inv, const ExperimentConfig& c,
                          const std::vector<ResultRow>& rows) {
  std::filesystem::create_directories(inv.out_dir);
  write_file_atomic(inv.out_dir / "results.csv", to_csv(rows));
  write_file_atomic(inv.out_dir / "manifest.txt", manifest_text(to_config_text(c), c.seed));
}

inline int execute(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  if (inv.subcommand == Subcommand::Verify) {
    bool ok = true;
    for (const CheckResult& r : run_verify_suite(inv.fast)) {
      out << (r.passed ? "PASS " : "FAIL ") << r.name;
      if (!r.passed) out << " (" << r.detail << ")";
      out << "\n";
      ok = ok && r.passed;
    }
    return ok ? kExitOk : kExitFailure;
  }

  ExperimentConfig config;
  std::optional<DisorderSpec> spec;
  try {
    config = parse_config(read_text(inv.config_path), inv.overrides);
    if (inv.subcommand == Subcommand::BoundTable) {
      config.study = StudyKind::BoundRatios;
      validate(config);
    }
    spec = build_spec(config.disorder);
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const ValidationError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::domain_error& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const DegenerateError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  if (inv.subcommand == Subcommand::WTable) {
    const std::vector<double> grid = config.t_grid.empty() ? default_w_grid() : config.t_grid;
    std::string csv = "t,w,wprime\n";
    for (double t : grid) {
      csv += format_double(t) + "," + format_double(w_of_t(*spec, t)) + ",";
      if (t < 1.0) csv += format_double(wprime_of_t(*spec, t));
      csv += "\n";
    }
    std::filesystem::create_directories(inv.out_dir);
    write_file_atomic(inv.out_dir / "wtable.csv", csv);
    write_file_atomic(inv.out_dir / "manifest.txt", manifest_text(to_config_text(config), config.seed));
    out << "wrote " << (inv.out_dir / "wtable.csv").string() << " (" << grid.size() << " rows)\n";
    return kExitOk;
  }

  const std::vector<ResultRow> rows = run_study(config, *spec);
  write_outputs(inv, config, rows);

  if (inv.subcommand == Subcommand::BoundTable) {
    std::string csv = "N,measured_var,rhs_thm1,rhs_thm2,ratio_thm1,ratio_thm2\n";
    for (const ResultRow& r : rows) {
      const auto& x = r.extra;
      csv += std::to_string(r.n) + "," + format_double(r.estimate) + "," +
             format_double(x.at("rhs_thm1").get<double>()) + ",";
      if (x.contains("rhs_thm2")) csv += format_double(x.at("rhs_thm2").get<double>());
      csv += "," + format_double(x.at("ratio_thm1").get<double>()) + ",";
      if (x.contains("ratio_thm2")) csv += format_double(x.at("ratio_thm2").get<double>());
      csv += "\n";
    }
    write_file_atomic(inv.out_dir / "boundtable.csv", csv);
  }
  out << study_name(config.study) << ": " << rows.size() << " rows -> "
      << (inv.out_dir / "results.csv").string() << "\n";
  return kExitOk;
}

}  // namespace detail

/// Full command-line entry point; returns the process exit code.
inline int run_cli(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"SK disorder-universality experiments"};
  app.require_subcommand(1);
  CliInvocation inv;

  auto* run = app.add_subcommand("run", "run the study described by a config file");
  run->add_option("config", inv.config_path, "config file")->required();
  run->add_option("--out", inv.out_dir, "output directory")->required();
  run->add_option("--set", inv.overrides, "override key=value (repeatable)");

  auto* verify = app.add_subcommand("verify", "run the built-in invariant suite");
  verify->add_flag("--fast", inv.fast, "smaller replica counts");

  auto* wtable = app.add_subcommand("wtable", "tabulate w(t) and w'(t)");
  wtable->add_option("config", inv.config_path, "config file")->required();
  wtable->add_option("--out", inv.out_dir, "output directory")->required();
  wtable->add_option("--set", inv.overrides, "override key=value (repeatable)");

  auto* boundtable = app.add_subcommand("boundtable", "measured variance against both bounds");
  boundtable->add_option("config", inv.config_path, "config file")->required();
  boundtable->add_option("--out", inv.out_dir, "output directory")->required();
  boundtable->add_option("--set", inv.overrides, "override key=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }
  if (run->parsed()) inv.subcommand = Subcommand::Run;
  if (verify->parsed()) inv.subcommand = Subcommand::Verify;
  if (wtable->parsed()) inv.subcommand = Subcommand::WTable;
  if (boundtable->parsed()) inv.subcommand = Subcommand::BoundTable;

  try {
    return detail::execute(inv, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace sklab
