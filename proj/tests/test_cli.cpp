#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include <json.hpp>

#include "symdyn/cli.hpp"
#include "symdyn/model_file.hpp"

using namespace symdyn;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Scratch directory removed at scope exit.
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("symdyn_cli_" + std::to_string(std::rand()) + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return (path / name).string();
  }
};

std::vector<std::string> column(const std::string& csv, std::size_t index) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> out;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string field;
    for (std::size_t i = 0; i <= index; ++i) std::getline(fields, field, ',');
    out.push_back(field);
  }
  return out;
}

}  // namespace

TEST_CASE("analyze the built-in example") {
  const Run r = run({"analyze", "--example", "paper4", "--ep", "0.2", "--eq", "0.3"});
  REQUIRE(r.code == cli::kOk);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc.at("m") == 2);
  CHECK(doc.at("d")[0].get<double>() == Approx(0.2).epsilon(1e-12));
  CHECK(doc.at("d")[1].get<double>() == Approx(0.3).epsilon(1e-12));
  CHECK(doc.at("pressure").get<double>() == Approx(0.0).epsilon(1e-12));
}

TEST_CASE("precondition failures exit 3") {
  const Run full = run({"analyze", "--example", "paper4", "--delta", "1,2,3"});
  CHECK(full.code == cli::kPreconditionFailed);
  CHECK(full.err.find("precondition") != std::string::npos);
  CHECK(run({"analyze", "--example", "paper4", "--ep", "0.6", "--eq", "0.5"}).code ==
        cli::kPreconditionFailed);

  TempDir dir;
  io::ModelFile f = io::paper4_model(0.2, 0.3);
  f.entries[0].value += 0.1;
  const std::string path = dir.write("bad.json", io::to_json(f).dump());
  CHECK(run({"analyze", "--model", path}).code == cli::kPreconditionFailed);
}

TEST_CASE("parse errors exit 2") {
  TempDir dir;
  CHECK(run({"analyze"}).code == cli::kParseError);
  CHECK(run({}).code == cli::kParseError);
  CHECK(run({"frobnicate"}).code == cli::kParseError);
  CHECK(run({"analyze", "--example", "paper5"}).code == cli::kParseError);
  CHECK(run({"analyze", "--model", (dir.path / "missing.json").string()}).code == cli::kParseError);
  CHECK(run({"analyze", "--model", dir.write("junk.json", "{oops")}).code == cli::kParseError);
  CHECK(run({"analyze", "--example", "paper4", "--delta", "1,9"}).code == cli::kParseError);
  CHECK(run({"sequence", "--example", "paper4", "--format", "xml"}).code == cli::kParseError);
  CHECK(run({"analyze", "--example", "paper4", "--model", "x.json"}).code == cli::kParseError);
  CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("normalize flag yields zero pressure") {
  TempDir dir;
  io::ModelFile f = io::paper4_model(0.2, 0.3);
  for (std::size_t i = 0; i < f.entries.size(); ++i) f.entries[i].value = 0.3 * double(i) - 1.0;
  f.normalize = true;
  const Run r = run({"analyze", "--model", dir.write("m.json", io::to_json(f).dump())});
  REQUIRE(r.code == cli::kOk);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(std::abs(doc.at("pressure").get<double>()) <= 1e-10);
  CHECK(doc.at("m") == 2);
}

TEST_CASE("sequence output") {
  const Run r = run({"sequence", "--example", "paper4", "--nmax", "40"});
  REQUIRE(r.code == cli::kOk);
  const auto predicted = column(r.out, 4);
  REQUIRE(predicted.size() == 41);
  for (std::size_t n = 0; n <= 40; ++n) {
    const double v = std::stod(predicted[n]);
    CHECK(v == Approx(n % 2 == 0 ? 1.6025641 : 1.6225253).epsilon(1e-7));
  }
  const Run js = run({"sequence", "--example", "paper4", "--format", "json"});
  CHECK(nlohmann::json::parse(js.out).at("converges_overall") == false);

  const Run sym = run({"sequence", "--example", "paper4", "--ep", "0.25", "--eq", "0.25",
                       "--format", "json"});
  CHECK(nlohmann::json::parse(sym.out).at("converges_overall") == true);

  const Run ap = run({"sequence", "--example", "paper4", "--delta", "1,3", "--nmax", "30"});
  REQUIRE(ap.code == cli::kOk);
  const auto single = column(ap.out, 4);
  for (const auto& v : single) CHECK(v == single[0]);
  const auto err = column(ap.out, 5);
  CHECK(std::stod(err[0]) > 0.0);
  for (std::size_t n = 1; n < err.size(); ++n) CHECK(std::stod(err[n]) <= std::stod(err[n - 1]) + 1e-15);
}

TEST_CASE("sequence --out writes the companion summary") {
  TempDir dir;
  const fs::path csv = dir.path / "seq.csv";
  REQUIRE(run({"sequence", "--example", "paper4", "--out", csv.string()}).code == cli::kOk);
  CHECK(slurp(csv).rfind("n,mu_delta_n,scaled,residue,predicted,abs_error\n", 0) == 0);
  const auto summary = nlohmann::json::parse(slurp(dir.path / "seq.json"));
  CHECK(summary.at("limits").size() == 2);
  CHECK(summary.at("spread").get<double>() == Approx(0.0199612).epsilon(1e-6));

  const fs::path js = dir.path / "seq_out.json";
  REQUIRE(run({"sequence", "--example", "paper4", "--out", js.string()}).code == cli::kOk);
  CHECK(fs::exists(dir.path / "seq_out.json.summary.json"));
}

TEST_CASE("re-ingested analysis reproduces the CSV byte for byte") {
  TempDir dir;
  for (const std::vector<std::string>& source :
       {std::vector<std::string>{"--example", "paper4"},
        std::vector<std::string>{"--example", "paper4", "--ep", "0.11", "--eq", "0.37"},
        std::vector<std::string>{"--example", "paper4", "--delta", "1,3"}}) {
    const fs::path analysis = dir.path / "analysis.json";
    std::vector<std::string> a{"analyze"};
    a.insert(a.end(), source.begin(), source.end());
    a.insert(a.end(), {"--out", analysis.string()});
    REQUIRE(run(a).code == cli::kOk);

    std::vector<std::string> direct{"sequence", "--nmax", "60"};
    direct.insert(direct.end(), source.begin(), source.end());
    const Run first = run(direct);
    const Run second = run({"sequence", "--nmax", "60", "--model", analysis.string()});
    REQUIRE(first.code == cli::kOk);
    CHECK(first.out == second.out);
  }
}

TEST_CASE("verify") {
  const Run ok = run({"verify", "--example", "paper4"});
  CHECK(ok.code == cli::kOk);
  CHECK(ok.out.find("FAIL") == std::string::npos);
  CHECK(ok.out.find("checks passed") != std::string::npos);
  CHECK(run({"verify", "--example", "paper4", "--delta", "1,3"}).code == cli::kOk);

  TempDir dir;
  io::ModelFile f = io::paper4_model(0.2, 0.3);
  f.entries[2].value += 0.1;
  const Run bad = run({"verify", "--model", dir.write("bad.json", io::to_json(f).dump())});
  CHECK(bad.code == cli::kVerificationFailed);
  CHECK(bad.out.find("FAIL") != std::string::npos);
  CHECK(bad.out.find("worst residual") != std::string::npos);

  const Run zero = run({"verify", "--example", "paper4", "--tol", "0"});
  CHECK(zero.code == cli::kParseError);
  CHECK(zero.err.find("positive") != std::string::npos);
}

#ifdef SYMDYN_CLI_PATH
TEST_CASE("installed binary reports the same exit codes") {
  const std::string bin = SYMDYN_CLI_PATH;
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status(bin + " verify --example paper4") == 0);
  CHECK(status(bin + " analyze") == 2);
  CHECK(status(bin + " analyze --example paper4 --delta 1,2,3") == 3);
  CHECK(status(bin + " verify --example paper4 --tol 0") == 2);
}
#endif
