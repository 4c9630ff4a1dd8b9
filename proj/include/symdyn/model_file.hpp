#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "symdyn/asymptotics.hpp"
#include "symdyn/sft.hpp"
#include "symdyn/subsystem.hpp"
#include "symdyn/transfer.hpp"

namespace symdyn::io {

/// Unreadable or malformed model description.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PotentialEntry {
  std::vector<std::string> word;
  double value = 0.0;
};

/// Declarative model description:
///
///   { "alphabet": ["1","2","3"],
///     "matrix":   [[0,1,1],[1,0,1],[1,1,1]],
///     "potential": { "order": 2,
///                    "entries": [ {"word": ["1","2"], "value": -1.6}, ... ] },
///     "normalize": false,
///     "delta": ["1","2"] }
struct ModelFile {
  std::vector<std::string> alphabet;
  std::vector<std::vector<int>> matrix;
  std::size_t order = 2;
  std::vector<PotentialEntry> entries;
  bool normalize = false;
  std::vector<std::string> delta;
};

/// Accepts a model description or an emitted analysis document (which
/// embeds its model under "model"). Throws ParseError.
ModelFile parse_model(const nlohmann::json& doc);
ModelFile parse_model_text(std::string_view text);
ModelFile load_model(const std::filesystem::path& path);

nlohmann::json to_json(const ModelFile& file);

/// Three-symbol example with Delta = {1,2}: the potential equals log ep on
/// C[1], log eq on C[2], and on C[3] the values forced by normalization.
/// Throws PreconditionError unless ep > 0, eq > 0 and ep + eq < 1.
ModelFile paper4_model(double ep, double eq);

/// Model, potential and Delta resolved from a ModelFile.
struct Problem {
  SftModel model;
  CylindricalPotential potential;  ///< as given in the file
  CylindricalPotential effective;  ///< normalized when the file asks for it
  std::vector<Symbol> delta;
};

/// Throws ParseError on unknown labels, duplicate entries or an invalid
/// matrix or potential table.
Problem build_problem(const ModelFile& file);

/// Labels to symbol indices; throws ParseError on unknown labels.
std::vector<Symbol> resolve_labels(const SftModel& model, const std::vector<std::string>& labels);

/// 17 significant digits.
std::string format_number(double value);

inline constexpr std::string_view kCsvHeader = "n,mu_delta_n,scaled,residue,predicted,abs_error";

std::string sequence_csv(const AsymptoticsReport& report);

/// Analysis document. `report` supplies the residue limits and convergence
/// fields and, when it carries a sequence, the n range.
nlohmann::json analysis_json(const ModelFile& file, const Problem& problem,
                             const SubsystemAnalysis& analysis, const GibbsMeasure& measure,
                             const AsymptoticsReport& report);

}  // namespace symdyn::io
