#include "symdyn/model_file.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "symdyn/errors.hpp"

namespace symdyn::io {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key))
    throw ParseError(std::string("missing field \"") + key + "\"");
  return obj.at(key);
}

std::vector<std::string> string_list(const json& value, const char* what) {
  if (!value.is_array()) throw ParseError(std::string(what) + " must be an array of strings");
  std::vector<std::string> out;
  for (const json& item : value) {
    if (!item.is_string()) throw ParseError(std::string(what) + " must contain strings only");
    out.push_back(item.get<std::string>());
  }
  return out;
}

json words_to_json(const SftModel& model, const std::vector<Word>& words) {
  json out = json::array();
  for (const Word& w : words) out.push_back(model.format_word(w));
  return out;
}

json labels_to_json(const SftModel& model, const std::vector<Symbol>& symbols) {
  json out = json::array();
  for (Symbol s : symbols) out.push_back(model.label(s));
  return out;
}

}  // namespace

ModelFile parse_model(const json& doc_in) {
  const json& doc = doc_in.is_object() && doc_in.contains("model") ? doc_in.at("model") : doc_in;
  if (!doc.is_object()) throw ParseError("model description must be a JSON object");
  try {
    ModelFile file;
    file.alphabet = string_list(require(doc, "alphabet"), "alphabet");
    const json& matrix = require(doc, "matrix");
    if (!matrix.is_array()) throw ParseError("matrix must be an array of rows");
    for (const json& row : matrix) {
      if (!row.is_array()) throw ParseError("matrix rows must be arrays");
      std::vector<int> r;
      for (const json& e : row) {
        if (!e.is_number_integer()) throw ParseError("matrix entries must be 0 or 1");
        r.push_back(e.get<int>());
      }
      file.matrix.push_back(std::move(r));
    }
    const json& potential = require(doc, "potential");
    const json& order = require(potential, "order");
    if (!order.is_number_unsigned()) throw ParseError("potential order must be a positive integer");
    file.order = order.get<std::size_t>();
    const json& entries = require(potential, "entries");
    if (!entries.is_array()) throw ParseError("potential entries must be an array");
    for (const json& e : entries) {
      PotentialEntry entry;
      entry.word = string_list(require(e, "word"), "entry word");
      const json& value = require(e, "value");
      if (!value.is_number()) throw ParseError("entry value must be a number");
      entry.value = value.get<double>();
      file.entries.push_back(std::move(entry));
    }
    if (doc.contains("normalize")) {
      if (!doc.at("normalize").is_boolean()) throw ParseError("normalize must be a boolean");
      file.normalize = doc.at("normalize").get<bool>();
    }
    file.delta = string_list(require(doc, "delta"), "delta");
    return file;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model description: ") + e.what());
  }
}

ModelFile parse_model_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  return parse_model(doc);
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_model_text(buffer.str());
}

json to_json(const ModelFile& file) {
  json entries = json::array();
  for (const PotentialEntry& e : file.entries)
    entries.push_back(json{{"word", e.word}, {"value", e.value}});
  return json{{"alphabet", file.alphabet},
              {"matrix", file.matrix},
              {"potential", json{{"order", file.order}, {"entries", entries}}},
              {"normalize", file.normalize},
              {"delta", file.delta}};
}

ModelFile paper4_model(double ep, double eq) {
  if (!(ep > 0.0) || !(eq > 0.0) || !(ep + eq < 1.0))
    throw PreconditionError("paper4 example needs e^p > 0, e^q > 0 and e^p + e^q < 1");
  ModelFile file;
  file.alphabet = {"1", "2", "3"};
  file.matrix = {{0, 1, 1}, {1, 0, 1}, {1, 1, 1}};
  file.order = 2;
  const double p = std::log(ep);
  const double q = std::log(eq);
  file.entries = {
      {{"1", "2"}, p},
      {{"1", "3"}, p},
      {{"2", "1"}, q},
      {{"2", "3"}, q},
      {{"3", "1"}, std::log(1.0 - eq)},
      {{"3", "2"}, std::log(1.0 - ep)},
      {{"3", "3"}, std::log(1.0 - ep - eq)},
  };
  file.normalize = false;
  file.delta = {"1", "2"};
  return file;
}

std::vector<Symbol> resolve_labels(const SftModel& model, const std::vector<std::string>& labels) {
  std::vector<Symbol> out;
  out.reserve(labels.size());
  for (const std::string& l : labels) {
    const auto idx = model.index_of(l);
    if (!idx) throw ParseError("unknown symbol label \"" + l + "\"");
    out.push_back(*idx);
  }
  return out;
}

Problem build_problem(const ModelFile& file) {
  try {
    SftModel model(file.alphabet, file.matrix);
    std::map<Word, double> table;
    for (const PotentialEntry& e : file.entries) {
      Word w = resolve_labels(model, e.word);
      if (w.size() != file.order)
        throw ParseError("potential entry " + model.format_word(w) + " has length " +
                         std::to_string(w.size()) + ", expected " + std::to_string(file.order));
      if (!table.emplace(w, e.value).second)
        throw ParseError("duplicate potential entry for word " + model.format_word(w));
    }
    CylindricalPotential potential(model, file.order, table);
    std::vector<Symbol> delta = resolve_labels(model, file.delta);
    CylindricalPotential effective = file.normalize ? normalize(potential) : potential;
    return Problem{std::move(model), std::move(potential), std::move(effective), std::move(delta)};
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string sequence_csv(const AsymptoticsReport& report) {
  std::string out(kCsvHeader);
  out += '\n';
  for (std::size_t n = 0; n <= report.n_max; ++n) {
    const std::size_t k = report.residue(n);
    out += std::to_string(n);
    out += ',' + format_number(report.mu_seq[n]);
    out += ',' + format_number(report.scaled_seq[n]);
    out += ',' + std::to_string(k);
    out += ',' + format_number(report.predicted[k]);
    out += ',' + format_number(report.abs_error[n]);
    out += '\n';
  }
  return out;
}

json analysis_json(const ModelFile& file, const Problem& problem,
                   const SubsystemAnalysis& analysis, const GibbsMeasure& measure,
                   const AsymptoticsReport& report) {
  const SftModel& model = problem.model;
  const TransferMatrix& t = analysis.transfer;
  json classes = json::array();
  for (const auto& c : analysis.classes) classes.push_back(labels_to_json(model, c));
  json z_classes = json::array();
  for (const auto& mask : analysis.z.per_class) {
    std::vector<Symbol> members;
    for (Symbol s = 0; s < mask.size(); ++s)
      if (mask[s]) members.push_back(s);
    z_classes.push_back(labels_to_json(model, members));
  }
  std::vector<Symbol> z_all;
  for (Symbol s = 0; s < analysis.z.all.size(); ++s)
    if (analysis.z.all[s]) z_all.push_back(s);
  json nu = json::array();
  for (const auto& c : analysis.nu) nu.push_back(c.base_marginal);
  std::vector<double> integral_h;
  for (const auto& h : analysis.h) integral_h.push_back(integrate(measure, h));

  return json{
      {"model", to_json(file)},
      {"states", words_to_json(model, t.states)},
      {"delta", labels_to_json(model, analysis.delta)},
      {"m", analysis.period},
      {"classes", classes},
      {"pressure", pressure(measure.perron_data())},
      {"P_Delta", analysis.p_delta},
      {"lambda_Delta", analysis.delta_perron.lambda},
      {"stationary", measure.state_measures()},
      {"h", analysis.h},
      {"h_delta", analysis.h_delta},
      {"d", analysis.d},
      {"alpha", analysis.alpha},
      {"nu", nu},
      {"z_support", z_classes},
      {"z_union", labels_to_json(model, z_all)},
      {"integral_h", integral_h},
      {"integral_h_delta", integrate(measure, analysis.h_delta)},
      {"limits", report.predicted},
      {"spread", report.spread},
      {"converges_overall", report.converges_overall},
      {"verdict", std::string(to_string(report.verdict))},
      {"nmax", report.n_max},
  };
}

}  // namespace symdyn::io
