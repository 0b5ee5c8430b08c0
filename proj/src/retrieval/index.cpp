#include "ddikit/retrieval/index.hpp"

#include <utility>

#include "ddikit/chem/smiles.hpp"
#include "ddikit/common/jsonl.hpp"
#include "ddikit/dataset/preprocess.hpp"
#include "ddikit/fp/keys.hpp"
#include "ddikit/version.hpp"

namespace ddikit::retrieval {

TrainingIndex build_index(const std::vector<dataset::DdiRecord>& records, int k) {
  TrainingIndex index;
  index.build_config.k = k;
  index.build_config.fingerprint_version = kFingerprintVersion;

  std::vector<std::string> unparseable;
  for (const auto& r : records) {
    for (const auto& [drug_id, smiles] :
         {std::pair{r.drug1_id, r.smiles1}, std::pair{r.drug2_id, r.smiles2}}) {
      auto it = index.drugs.find(drug_id);
      if (it != index.drugs.end()) {
        if (it->second.smiles != smiles) {
          throw IndexError(IndexErrorKind::DuplicateConflict,
                           "drug '" + drug_id + "' appears with conflicting SMILES ('" +
                               it->second.smiles + "' vs '" + smiles + "')",
                           {drug_id});
        }
        continue;
      }
      chem::Molecule mol;
      try {
        mol = chem::parse_molecule(smiles);
      } catch (const chem::SmilesError&) {
        if (unparseable.empty() || unparseable.back() != r.record_id) {
          unparseable.push_back(r.record_id);
        }
        continue;
      }
      DrugEntry entry;
      entry.smiles = smiles;
      entry.fingerprint = fp::compute_keys(mol);
      index.drugs.emplace(drug_id, std::move(entry));
    }
    // First non-empty description wins.
    for (const auto& [drug_id, def] :
         {std::pair{r.drug1_id, r.drug1_def}, std::pair{r.drug2_id, r.drug2_def}}) {
      auto it = index.drugs.find(drug_id);
      if (it != index.drugs.end() && it->second.description.empty() && !def.empty()) {
        it->second.description = def;
      }
    }
  }
  if (!unparseable.empty()) {
    std::string msg = "unparseable SMILES in records:";
    for (const auto& id : unparseable) msg += " " + id;
    throw IndexError(IndexErrorKind::UnparseableSmiles, msg, unparseable);
  }

  for (const auto& r : records) {
    PairKey key = dataset::pair_key_of(r);
    std::string masked =
        dataset::mask_drug_names(r.explanation, r.drug1_names, r.drug2_names);
    // Store with DRUG1 meaning the canonical-first member.
    if (key.first != r.drug1_id) masked = dataset::swap_drug_placeholders(masked);
    PairValue value{r.label, std::move(masked)};
    auto it = index.pairs.find(key);
    if (it != index.pairs.end()) {
      if (it->second.label != value.label || it->second.explanation != value.explanation) {
        throw IndexError(IndexErrorKind::DuplicateConflict,
                         "pair (" + key.first + ", " + key.second +
                             ") appears with conflicting label or explanation",
                         {r.record_id});
      }
      continue;
    }
    index.pairs.emplace(std::move(key), std::move(value));
  }
  return index;
}

void save_index(const TrainingIndex& index, const std::string& path,
                const std::string& config_hash, std::uint64_t seed) {
  jsonl::Writer w(path);
  jsonl::json extra;
  extra["fingerprint_version"] = index.build_config.fingerprint_version;
  extra["k"] = index.build_config.k;
  extra["config_hash"] = config_hash;
  extra["seed"] = seed;
  w.write(jsonl::header_record("index", extra));
  for (const auto& [id, entry] : index.drugs) {
    jsonl::json row;
    row["type"] = "drug";
    row["id"] = id;
    row["smiles"] = entry.smiles;
    row["fp"] = entry.fingerprint.to_hex();
    row["description"] = entry.description;
    w.write(row);
  }
  for (const auto& [key, value] : index.pairs) {
    jsonl::json row;
    row["type"] = "pair";
    row["a"] = key.first;
    row["b"] = key.second;
    row["label"] = dataset::label_to_string(value.label);
    row["explanation"] = value.explanation;
    w.write(row);
  }
  w.close();
}

TrainingIndex load_index(const std::string& path) {
  TrainingIndex index;
  bool saw_header = false;
  try {
    jsonl::for_each(path, [&](std::size_t line_no, const jsonl::json& row) {
      try {
        if (jsonl::is_header(row)) {
          const auto& h = row.at("_header");
          const std::string version = h.at("fingerprint_version").get<std::string>();
          if (version != kFingerprintVersion) {
            throw IndexError(IndexErrorKind::VersionMismatch,
                             path + ": index fingerprint version '" + version +
                                 "' does not match this build ('" + kFingerprintVersion +
                                 "')");
          }
          index.build_config.fingerprint_version = version;
          index.build_config.k = h.at("k").get<int>();
          saw_header = true;
          return;
        }
        const std::string type = row.at("type").get<std::string>();
        if (type == "drug") {
          DrugEntry entry;
          entry.smiles = row.at("smiles").get<std::string>();
          entry.fingerprint = fp::Fingerprint::from_hex(row.at("fp").get<std::string>());
          entry.description = row.at("description").get<std::string>();
          index.drugs.emplace(row.at("id").get<std::string>(), std::move(entry));
        } else if (type == "pair") {
          PairValue value;
          value.label = dataset::label_from_string(row.at("label").get<std::string>());
          value.explanation = row.at("explanation").get<std::string>();
          index.pairs.emplace(
              dataset::make_pair_key(row.at("a").get<std::string>(),
                                     row.at("b").get<std::string>()),
              std::move(value));
        } else {
          throw std::invalid_argument("unknown row type '" + type + "'");
        }
      } catch (const IndexError&) {
        throw;
      } catch (const std::exception& e) {
        throw IndexError(IndexErrorKind::Io, path + ":" + std::to_string(line_no) +
                                                 ": bad index row: " + e.what());
      }
    });
  } catch (const jsonl::IoError& e) {
    throw IndexError(IndexErrorKind::Io, e.what());
  }
  if (!saw_header) {
    throw IndexError(IndexErrorKind::Io, path + ": missing index header record");
  }
  return index;
}

}  // namespace ddikit::retrieval
