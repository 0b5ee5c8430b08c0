#include "ddikit/dataset/record.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "ddikit/chem/smiles.hpp"
#include "ddikit/common/jsonl.hpp"

namespace ddikit::dataset {

std::string label_to_string(Label label) {
  return label == Label::Positive ? "positive" : "negative";
}

Label label_from_string(const std::string& text) {
  if (text == "positive") return Label::Positive;
  if (text == "negative") return Label::Negative;
  throw std::invalid_argument("unknown label: '" + text + "'");
}

std::string source_to_string(Source source) {
  switch (source) {
    case Source::DdInter: return "ddinter";
    case Source::DrugBank: return "drugbank";
    case Source::Synthetic: return "synthetic";
  }
  return "synthetic";
}

Source source_from_string(const std::string& text) {
  if (text == "ddinter") return Source::DdInter;
  if (text == "drugbank") return Source::DrugBank;
  if (text == "synthetic") return Source::Synthetic;
  throw std::invalid_argument("unknown source: '" + text + "'");
}

namespace {

using jsonl::json;

std::string require_string(const json& obj, const char* key) {
  if (!obj.contains(key)) throw std::invalid_argument(std::string("missing field '") + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_string()) throw std::invalid_argument(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::string optional_string(const json& obj, const char* key) {
  if (!obj.contains(key)) return {};
  const auto& v = obj.at(key);
  if (!v.is_string()) throw std::invalid_argument(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::string> optional_string_list(const json& obj, const char* key) {
  if (!obj.contains(key)) return {};
  const auto& v = obj.at(key);
  if (!v.is_array()) throw std::invalid_argument(std::string("field '") + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& item : v) {
    if (!item.is_string()) throw std::invalid_argument(std::string("field '") + key + "' must be an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

DdiRecord parse_record(const json& obj) {
  if (!obj.is_object()) throw std::invalid_argument("record must be a JSON object");
  DdiRecord r;
  r.record_id = require_string(obj, "record_id");
  r.drug1_id = require_string(obj, "drug1_id");
  r.drug2_id = require_string(obj, "drug2_id");
  r.smiles1 = require_string(obj, "smiles1");
  r.smiles2 = require_string(obj, "smiles2");
  r.drug1_names = optional_string_list(obj, "drug1_names");
  r.drug2_names = optional_string_list(obj, "drug2_names");
  r.drug1_def = optional_string(obj, "drug1_def");
  r.drug2_def = optional_string(obj, "drug2_def");
  r.label = label_from_string(require_string(obj, "label"));
  r.explanation = optional_string(obj, "explanation");
  const std::string source = optional_string(obj, "source");
  r.source = source.empty() ? Source::Synthetic : source_from_string(source);
  r.category = optional_string(obj, "category");

  if (r.record_id.empty()) throw std::invalid_argument("record_id must be non-empty");
  if (r.drug1_id.empty() || r.drug2_id.empty()) throw std::invalid_argument("drug ids must be non-empty");
  if (r.drug1_id == r.drug2_id) {
    throw std::invalid_argument("drug1_id equals drug2_id ('" + r.drug1_id + "')");
  }
  if (r.label == Label::Positive && r.explanation.empty()) {
    throw std::invalid_argument("positive record has empty explanation");
  }
  return r;
}

}  // namespace

IngestResult ingest_records(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw DatasetError(DatasetErrorKind::FileNotFound, "dataset file not found: " + path);
  }

  IngestResult result;
  std::set<std::string> seen_ids;
  std::map<std::string, std::string> smiles_of_drug;

  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError(DatasetErrorKind::FileNotFound, "cannot open dataset file: " + path);
  std::string line;
  std::size_t line_no = 0;
  auto reject = [&](std::size_t ln, const std::string& msg) {
    result.report.issues.push_back({ln, msg});
    ++result.report.n_excluded;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool blank = true;
    for (char c : line) {
      if (c != ' ' && c != '\t') { blank = false; break; }
    }
    if (blank) continue;

    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded()) {
      reject(line_no, "malformed JSON");
      continue;
    }
    if (jsonl::is_header(obj)) continue;

    DdiRecord r;
    try {
      r = parse_record(obj);
    } catch (const std::invalid_argument& e) {
      reject(line_no, e.what());
      continue;
    }

    if (!seen_ids.insert(r.record_id).second) {
      reject(line_no, "duplicate record_id '" + r.record_id + "'");
      continue;
    }

    bool smiles_ok = true;
    for (const auto& [drug_id, smiles] :
         {std::pair{r.drug1_id, r.smiles1}, std::pair{r.drug2_id, r.smiles2}}) {
      try {
        chem::parse_molecule(smiles);
      } catch (const chem::SmilesError& e) {
        reject(line_no, "unparseable SMILES for drug '" + drug_id + "': " + e.what());
        smiles_ok = false;
        break;
      }
      auto [it, inserted] = smiles_of_drug.emplace(drug_id, smiles);
      if (!inserted && it->second != smiles) {
        reject(line_no, "drug '" + drug_id + "' has conflicting SMILES ('" + it->second +
                            "' vs '" + smiles + "')");
        smiles_ok = false;
        break;
      }
    }
    if (!smiles_ok) {
      seen_ids.erase(r.record_id);
      continue;
    }

    result.records.push_back(std::move(r));
    ++result.report.n_valid;
  }

  if (result.records.empty() && !result.report.issues.empty()) {
    const auto& first = result.report.issues.front();
    throw DatasetError(DatasetErrorKind::SchemaError,
                       path + ": no valid records; first issue at line " +
                           std::to_string(first.line) + ": " + first.message);
  }
  return result;
}

std::vector<DrugInfo> collect_drugs(const std::vector<DdiRecord>& records) {
  std::map<std::string, DrugInfo> by_id;
  auto absorb = [&](const std::string& id, const std::string& smiles,
                    const std::vector<std::string>& names, const std::string& def) {
    auto [it, inserted] = by_id.emplace(id, DrugInfo{id, smiles, {}, {}});
    for (const auto& name : names) {
      auto& list = it->second.names;
      if (std::find(list.begin(), list.end(), name) == list.end()) list.push_back(name);
    }
    if (it->second.def.empty() && !def.empty()) it->second.def = def;
  };
  for (const auto& r : records) {
    absorb(r.drug1_id, r.smiles1, r.drug1_names, r.drug1_def);
    absorb(r.drug2_id, r.smiles2, r.drug2_names, r.drug2_def);
  }
  std::vector<DrugInfo> out;
  out.reserve(by_id.size());
  for (auto& [id, info] : by_id) out.push_back(std::move(info));
  return out;
}

}  // namespace ddikit::dataset
