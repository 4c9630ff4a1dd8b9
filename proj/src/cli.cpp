#include "symdyn/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "symdyn/asymptotics.hpp"
#include "symdyn/errors.hpp"
#include "symdyn/model_file.hpp"
#include "symdyn/oracle.hpp"
#include "symdyn/subsystem.hpp"

namespace symdyn::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string model_path;
  std::string example;
  double ep = 0.2;
  double eq = 0.3;
  std::vector<std::string> delta;
  std::size_t nmax = 40;
  double tol = 1e-10;
  std::string out_path;
  std::string format;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--model", o.model_path, "Model description (JSON), or an emitted analysis");
  cmd->add_option("--example", o.example, "Built-in example instead of --model")
      ->check(CLI::IsMember({"paper4"}));
  cmd->add_option("--ep", o.ep, "paper4: value of e^p on C[1]");
  cmd->add_option("--eq", o.eq, "paper4: value of e^q on C[2]");
  cmd->add_option("--delta", o.delta, "Override the sub-alphabet, e.g. --delta 1,3")
      ->delimiter(',');
  cmd->add_option("--tol", o.tol, "Numerical tolerance");
  cmd->add_option("--out", o.out_path, "Write output to this path instead of stdout");
}

io::ModelFile load(const Options& o) {
  if (!o.model_path.empty() && !o.example.empty())
    throw io::ParseError("--model and --example are mutually exclusive");
  io::ModelFile file;
  if (!o.model_path.empty()) {
    file = io::load_model(o.model_path);
  } else if (o.example == "paper4") {
    file = io::paper4_model(o.ep, o.eq);
  } else {
    throw io::ParseError("one of --model PATH or --example paper4 is required");
  }
  if (!o.delta.empty()) file.delta = o.delta;
  return file;
}

void write_to(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io::ParseError("cannot write " + path);
  f << text;
}

fs::path companion_path(const fs::path& out) {
  fs::path p = out;
  p.replace_extension(".json");
  if (p == out) p = fs::path(out.string() + ".summary.json");
  return p;
}

struct Computed {
  io::ModelFile file;
  io::Problem problem;
  SubsystemAnalysis analysis;
  GibbsMeasure measure;
  AsymptoticsReport report;
};

Computed compute(const Options& o) {
  io::ModelFile file = load(o);
  io::Problem problem = io::build_problem(file);
  SubsystemAnalysis analysis = analyze(problem.effective, problem.delta, o.tol);
  GibbsMeasure measure = equilibrium(problem.effective);
  AsymptoticsReport rep =
      report(analysis, measure, std::max<std::size_t>(o.nmax, analysis.period), o.tol);
  return Computed{std::move(file), std::move(problem), std::move(analysis), std::move(measure),
                  std::move(rep)};
}

int cmd_analyze(const Options& o, std::ostream& out) {
  if (!o.format.empty() && o.format != "json")
    throw io::ParseError("analyze only emits json");
  const Computed c = compute(o);
  const std::string text =
      io::analysis_json(c.file, c.problem, c.analysis, c.measure, c.report).dump(2) + "\n";
  if (o.out_path.empty())
    out << text;
  else
    write_to(o.out_path, text);
  return kOk;
}

int cmd_sequence(const Options& o, std::ostream& out) {
  const std::string format = o.format.empty() ? "csv" : o.format;
  const Computed c = compute(o);
  const std::string csv = io::sequence_csv(c.report);
  const std::string json =
      io::analysis_json(c.file, c.problem, c.analysis, c.measure, c.report).dump(2) + "\n";
  if (o.out_path.empty()) {
    out << (format == "csv" ? csv : json);
  } else if (format == "csv") {
    write_to(o.out_path, csv);
    write_to(companion_path(o.out_path).string(), json);
  } else {
    write_to(o.out_path, json);
  }
  return kOk;
}

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  const char* relation = "<=";
};

Check bounded(std::string name, double value, double threshold) {
  return Check{std::move(name), value, threshold, value <= threshold};
}

int report_checks(const std::vector<Check>& checks, std::ostream& out) {
  std::size_t passed = 0;
  const Check* worst = nullptr;
  for (const Check& c : checks) {
    out << (c.pass ? "PASS  " : "FAIL  ") << c.name << "  (" << io::format_number(c.value)
        << " " << c.relation << " " << io::format_number(c.threshold) << ")\n";
    if (c.pass) {
      ++passed;
    } else if (!worst || c.value / std::max(c.threshold, 1e-300) >
                             worst->value / std::max(worst->threshold, 1e-300)) {
      worst = &c;
    }
  }
  out << passed << "/" << checks.size() << " checks passed\n";
  if (worst) out << "worst residual: " << worst->name << " = " << io::format_number(worst->value) << "\n";
  return passed == checks.size() ? kOk : kVerificationFailed;
}

std::size_t mismatches(const std::vector<double>& values, const std::vector<bool>& support) {
  std::size_t bad = 0;
  for (std::size_t u = 0; u < values.size(); ++u)
    if ((values[u] > 0.0) != support[u] || values[u] < 0.0) ++bad;
  return bad;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  if (!(o.tol > 0.0)) {
    err << "error: --tol must be positive (for example --tol 1e-9)\n";
    return kParseError;
  }
  const double tol = o.tol;
  io::ModelFile file = load(o);
  io::Problem problem = io::build_problem(file);
  std::vector<Check> checks;

  const TransferMatrix base = build_transfer(problem.effective);
  checks.push_back(bounded("potential is normalized (max |L1 - 1|)", normalization_defect(base),
                           std::max(tol, config::kNormalizedTol)));
  if (!checks.back().pass) return report_checks(checks, out);

  const SubsystemAnalysis a = analyze(problem.effective, problem.delta, tol);
  const GibbsMeasure mu = equilibrium(problem.effective);
  const BlockEquivalenceReport blocks = verify_block_equivalence(a, tol);
  const std::size_t m = a.period;

  auto max_of = [](const std::vector<double>& v) {
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
  };
  checks.push_back(bounded("L_Delta h_j = d_j h_{j+1}", max_of(blocks.eigen_residual), tol));
  checks.push_back(bounded("prod d_j = exp(m P_Delta) (relative)", blocks.product_residual, tol));
  checks.push_back(
      bounded("L_Delta^m h_Delta = exp(m P_Delta) h_Delta (relative)", blocks.h_delta_residual, tol));
  double alpha0 = 0.0, d_min = a.d.empty() ? 0.0 : a.d[0];
  for (std::size_t j = 0; j < m; ++j) {
    alpha0 = std::max(alpha0, std::abs(a.alpha[j][0] - 1.0));
    d_min = std::min(d_min, a.d[j]);
  }
  checks.push_back(bounded("alpha_j(0) = 1", alpha0, 0.0));
  checks.push_back(Check{"d_j > 0 (min d_j)", d_min, 0.0, d_min > 0.0, ">"});
  std::size_t support_bad = 0;
  for (std::size_t j = 0; j < m; ++j) support_bad += mismatches(a.h[j], a.z_state_masks[j]);
  support_bad += mismatches(a.h_delta, a.z_state_union);
  checks.push_back(bounded("supp h_j = Z_Delta_j (mismatched states)",
                           static_cast<double>(support_bad), 0.0));
  checks.push_back(bounded("block-recoded h_j agrees with direct route", max_of(blocks.h_deviation), tol));
  checks.push_back(bounded("h_j = w_j on Omega_j", max_of(blocks.w_deviation), tol));

  double duality = 0.0;
  for (std::size_t u = 0; u < base.state_count(); ++u) {
    Vector psi(base.state_count(), 0.0);
    psi[u] = 1.0;
    duality = std::max(duality,
                       std::abs(integrate(mu, apply_transfer(base, psi)) - integrate(mu, psi)));
  }
  checks.push_back(bounded("duality int L psi = int psi", duality, tol));
  const double variational = std::abs(pressure(mu.perron_data()) -
                                      (oracle::conditional_entropy(mu) +
                                       integrate_potential(mu, problem.effective)));
  checks.push_back(bounded("variational identity P = h + int phi", variational, tol));

  // Enumerate as far as the budget allows, up to n = 12.
  std::size_t n_oracle = 0;
  double oracle_dev = 0.0;
  for (std::size_t n = 1; n <= 12; ++n) {
    double brute = 0.0;
    try {
      brute = oracle::brute_mu_delta_n(problem.model, mu, a.delta, n);
    } catch (const InvalidArgument&) {
      break;
    }
    const double direct = mu_delta_n(a, mu, n);
    oracle_dev = std::max(oracle_dev, std::abs(direct - brute) / std::max(brute, 1e-300));
    n_oracle = n;
  }
  checks.push_back(bounded("mu(Delta_n) matches enumeration for n <= " + std::to_string(n_oracle) +
                               " (relative)",
                           oracle_dev, std::max(tol, 1e-12)));

  const std::size_t n_gap = std::max<std::size_t>(o.nmax, 200);
  const Vector ones(base.state_count(), 1.0);
  checks.push_back(bounded("theorem gap at n = " + std::to_string(n_gap),
                           theorem_gap(a, ones, n_gap), tol));

  return report_checks(checks, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Restricted transfer operators and escape asymptotics on subshifts of finite type",
               "symdyn"};
  app.require_subcommand(1);
  Options o;
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Emit the Delta-subsystem analysis as JSON");
  CLI::App* sequence_cmd =
      app.add_subcommand("sequence", "Emit mu(Delta_n) and its scaled residue-class limits");
  CLI::App* verify_cmd = app.add_subcommand("verify", "Run the invariant checks");
  for (CLI::App* cmd : {analyze_cmd, sequence_cmd, verify_cmd}) add_common(cmd, o);
  for (CLI::App* cmd : {analyze_cmd, sequence_cmd}) {
    cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  }
  sequence_cmd->add_option("--nmax", o.nmax, "Largest n in the sequence");
  verify_cmd->add_option("--nmax", o.nmax, "Lower bound on the n used for the theorem gap");
  analyze_cmd->add_option("--nmax", o.nmax, "Unused except for the reported range");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  }

  try {
    if (*analyze_cmd) return cmd_analyze(o, out);
    if (*sequence_cmd) return cmd_sequence(o, out);
    return cmd_verify(o, out, err);
  } catch (const io::ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << "\n";
    return kParseError;
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << "\n";
    return kPreconditionFailed;
  } catch (const ConvergenceError& e) {
    err << "no convergence: " << e.what() << "\n";
    return kPreconditionFailed;
  }
}

}  // namespace symdyn::cli
