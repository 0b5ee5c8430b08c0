#include "ddikit/pipeline/run.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <thread>

#include "ddikit/bilinear/model.hpp"
#include "ddikit/chem/smiles.hpp"
#include "ddikit/common/jsonl.hpp"
#include "ddikit/common/rng.hpp"
#include "ddikit/dataset/preprocess.hpp"
#include "ddikit/dataset/split.hpp"
#include "ddikit/eval/report.hpp"
#include "ddikit/fp/keys.hpp"
#include "ddikit/prompting/prompt.hpp"
#include "ddikit/retrieval/engine.hpp"
#include "ddikit/version.hpp"

namespace fs = std::filesystem;

namespace ddikit::pipeline {

namespace {

using jsonl::json;

void write_json_doc(const std::string& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RunError("cannot open for writing: " + path);
  out << doc.dump(2) << '\n';
  out.close();
  if (out.fail()) throw RunError("write failed: " + path);
}

struct PredRow {
  std::string record_id;
  std::string subset;
  dataset::Label gold = dataset::Label::Negative;
  eval::PredLabel pred = eval::PredLabel::Unparseable;
  std::string explanation;
  json provenance = json::object();
  std::vector<std::string> warnings;
};

json pred_row_to_json(const PredRow& row) {
  json j;
  j["record_id"] = row.record_id;
  j["subset"] = row.subset;
  j["label"] = eval::pred_label_to_string(row.pred);
  j["explanation"] = row.explanation;
  j["gold_label"] = dataset::label_to_string(row.gold);
  j["provenance"] = row.provenance;
  j["warnings"] = row.warnings;
  return j;
}

std::vector<PredRow> predict_rv(const RunConfig& config,
                                const retrieval::TrainingIndex& index,
                                const std::vector<dataset::DdiRecord>& golds,
                                const std::string& subset) {
  std::vector<std::pair<std::string, std::string>> queries;
  queries.reserve(golds.size());
  for (const auto& r : golds) queries.emplace_back(r.smiles1, r.smiles2);
  std::vector<retrieval::PredictionResponse> responses =
      retrieval::predict_batch(index, queries, config.k, config.threads);

  std::vector<PredRow> rows;
  rows.reserve(golds.size());
  for (std::size_t i = 0; i < golds.size(); ++i) {
    const auto& response = responses[i];
    PredRow row;
    row.record_id = golds[i].record_id;
    row.subset = subset;
    row.gold = golds[i].label;
    row.pred = response.label == dataset::Label::Positive ? eval::PredLabel::Positive
                                                          : eval::PredLabel::Negative;
    row.explanation = response.explanation;
    row.provenance["pair"] = {response.provenance.pair.first,
                              response.provenance.pair.second};
    row.provenance["pair_score"] = response.provenance.pair_score;
    row.provenance["sim1"] = response.provenance.sim1;
    row.provenance["sim2"] = response.provenance.sim2;
    row.provenance["fallback"] = response.provenance.fallback;
    row.warnings = response.warnings;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<PredRow> predict_ic(const RunConfig& config,
                                const retrieval::TrainingIndex& index,
                                const std::vector<dataset::DdiRecord>& golds,
                                const std::string& subset,
                                prompting::CompletionBackend& backend,
                                std::mutex& send_mutex) {
  std::vector<PredRow> rows;
  rows.reserve(golds.size());
  for (const auto& r : golds) {
    prompting::DemonstrationSet demos = prompting::select_demonstrations(
        index, r.smiles1, r.smiles2, config.demos, config.k);
    const std::string prompt = prompting::build_prompt(r.smiles1, r.smiles2, demos.demos);
    std::string completion;
    {
      // Backends are not required to be thread-safe; folds may run in parallel.
      std::lock_guard<std::mutex> lock(send_mutex);
      completion = backend.send(prompt);
    }
    auto [label, explanation] = prompting::parse_completion(completion);
    PredRow row;
    row.record_id = r.record_id;
    row.subset = subset;
    row.gold = r.label;
    row.pred = label;
    row.explanation = explanation;
    row.provenance["prompt_hash"] = prompting::ReplayBackend::prompt_hash(prompt);
    row.provenance["n_demos"] = demos.demos.size();
    row.warnings = demos.warnings;
    rows.push_back(std::move(row));
  }
  return rows;
}

// Fingerprint-derived feature bags, cached per drug id; test drugs may be
// absent from the index (inductive), so bags are computed from the records.
class BagCache {
 public:
  BagCache(int d, std::uint64_t seed) : table_(bilinear::make_embedding_table(d, seed)) {}

  const bilinear::FeatureBag& bag(const std::string& drug_id, const std::string& smiles) {
    auto it = bags_.find(drug_id);
    if (it != bags_.end()) return it->second;
    const fp::Fingerprint fingerprint = fp::compute_keys(chem::parse_molecule(smiles));
    return bags_.emplace(drug_id, bilinear::featurize(fingerprint, table_)).first->second;
  }

 private:
  std::vector<std::vector<double>> table_;
  std::map<std::string, bilinear::FeatureBag> bags_;
};

bilinear::TrainBatch make_batch(const std::vector<dataset::DdiRecord>& records,
                                BagCache& cache) {
  bilinear::TrainBatch batch;
  batch.reserve(records.size());
  for (const auto& r : records) {
    bilinear::Example ex;
    ex.a = cache.bag(r.drug1_id, r.smiles1);
    ex.b = cache.bag(r.drug2_id, r.smiles2);
    ex.label = r.label == dataset::Label::Positive ? 1 : 0;
    batch.push_back(std::move(ex));
  }
  return batch;
}

std::vector<PredRow> predict_bilinear(const RunConfig& config,
                                      const bilinear::InteractionMatrix& matrix,
                                      BagCache& cache,
                                      const std::vector<dataset::DdiRecord>& golds,
                                      const std::string& subset) {
  std::vector<PredRow> rows;
  rows.reserve(golds.size());
  for (const auto& r : golds) {
    const auto& a = cache.bag(r.drug1_id, r.smiles1);
    const auto& b = cache.bag(r.drug2_id, r.smiles2);
    const double p = bilinear::score(matrix, a, b);
    PredRow row;
    row.record_id = r.record_id;
    row.subset = subset;
    row.gold = r.label;
    row.pred = p >= config.bilinear.threshold ? eval::PredLabel::Positive
                                              : eval::PredLabel::Negative;
    row.provenance["score"] = p;
    rows.push_back(std::move(row));
  }
  return rows;
}

eval::FoldScores evaluate_subset(int fold, const std::string& subset,
                                 const std::vector<dataset::DdiRecord>& golds,
                                 const std::vector<PredRow>& rows, bool with_generation,
                                 const std::optional<eval::TemplateTable>& table) {
  eval::FoldScores scores;
  scores.fold = fold;
  scores.subset = subset;

  std::vector<eval::PredLabel> preds;
  std::vector<dataset::Label> gold_labels;
  preds.reserve(rows.size());
  gold_labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    preds.push_back(rows[i].pred);
    gold_labels.push_back(golds[i].label);
  }
  scores.binary = eval::classification_report(preds, gold_labels);

  if (with_generation) {
    std::vector<std::string> hyps, refs;
    hyps.reserve(rows.size());
    refs.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      hyps.push_back(rows[i].explanation);
      refs.push_back(golds[i].explanation);
    }
    eval::GenerationScores gen;
    gen.bleu = eval::bleu(hyps, refs);
    gen.rouge1 = eval::rouge_n_corpus(hyps, refs, 1).f1;
    gen.rouge2 = eval::rouge_n_corpus(hyps, refs, 2).f1;
    gen.rougeL = eval::rouge_l_corpus(hyps, refs).f1;
    scores.generation = gen;
  }

  if (table) {
    const bool all_categorized =
        std::all_of(golds.begin(), golds.end(),
                    [](const dataset::DdiRecord& r) { return !r.category.empty(); });
    if (all_categorized) {
      std::vector<std::string> pred_categories, gold_categories;
      pred_categories.reserve(rows.size());
      gold_categories.reserve(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        // An unparseable generation has no usable explanation; an empty
        // prediction string counts as wrong in the report.
        pred_categories.push_back(
            rows[i].pred == eval::PredLabel::Unparseable
                ? std::string()
                : eval::map_explanation_to_type(rows[i].explanation, *table));
        gold_categories.push_back(golds[i].category);
      }
      scores.multiclass = eval::classification_report(pred_categories, gold_categories);
    }
  }
  return scores;
}

}  // namespace

void run_pipeline(const RunConfig& config) {
  validate(config);
  if (config.method == "ic" && config.backend.kind == "null") {
    throw ConfigError(
        "method=ic cannot run with the 'null' completion backend; set backend.kind to "
        "'replay' or 'http'");
  }
  const std::string hash = config_hash(config);
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw RunError("cannot create output directory '" + config.out_dir + "'");

  json header_extra;
  header_extra["config_hash"] = hash;
  header_extra["seed"] = config.seed;

  dataset::IngestResult ingest = dataset::ingest_records(config.dataset_path);
  {
    json doc;
    doc["_header"] = jsonl::header_record("ingest_report", header_extra)["_header"];
    doc["n_valid"] = ingest.report.n_valid;
    doc["n_excluded"] = ingest.report.n_excluded;
    json issues = json::array();
    for (const auto& issue : ingest.report.issues) {
      json j;
      j["line"] = issue.line;
      j["message"] = issue.message;
      issues.push_back(j);
    }
    doc["issues"] = issues;
    write_json_doc(config.out_dir + "/ingest_report.json", doc);
  }

  std::vector<dataset::DdiRecord> records = std::move(ingest.records);
  dataset::mask_all(records);

  const dataset::Setting setting = dataset::setting_from_string(config.setting);
  std::vector<dataset::SplitAssignment> assignments =
      setting == dataset::Setting::Transductive
          ? dataset::split_transductive(records, config.seed, config.folds)
          : dataset::split_inductive(records, config.seed, config.folds);

  std::unique_ptr<prompting::CompletionBackend> backend;
  if (config.method == "ic") {
    prompting::HttpBackendConfig http;
    http.endpoint = config.backend.endpoint;
    http.model = config.backend.model;
    http.temperature = config.backend.temperature;
    http.timeout_ms = config.backend.timeout_ms;
    http.max_retries = config.backend.max_retries;
    http.api_key_env = config.backend.api_key_env;
    backend = prompting::make_backend(config.backend.kind, config.backend.replay_path, http);
  }

  std::vector<std::vector<eval::FoldScores>> per_fold(assignments.size());
  std::mutex send_mutex;

  auto run_fold = [&](std::size_t fold_idx) {
    const auto& assignment = assignments[fold_idx];
    const std::string fold_tag = "fold " + std::to_string(assignment.fold);
    const std::string fold_dir =
        config.out_dir + "/fold" + std::to_string(assignment.fold);
    std::error_code fold_ec;
    fs::create_directories(fold_dir, fold_ec);
    if (fold_ec) throw RunError("cannot create fold directory '" + fold_dir + "'");

    dataset::save_split({assignment}, fold_dir + "/split.jsonl", hash, config.seed);
    if (setting == dataset::Setting::Inductive) {
      dataset::save_drug_partition({assignment}, fold_dir + "/drugs.jsonl", hash,
                                   config.seed);
    }

    const std::vector<dataset::DdiRecord> train =
        dataset::records_with_role(records, assignment, dataset::Role::Train);
    const std::vector<dataset::DdiRecord> val =
        dataset::records_with_role(records, assignment, dataset::Role::Val);
    if (train.empty()) throw RunError(fold_tag + ": empty training split");

    retrieval::TrainingIndex index;
    try {
      index = retrieval::build_index(train, config.k);
    } catch (const retrieval::IndexError& e) {
      throw RunError(fold_tag + ": " + e.what());
    }
    retrieval::save_index(index, fold_dir + "/index.jsonl", hash, config.seed);

    std::optional<eval::TemplateTable> table;
    if (config.method != "bilinear") {
      const bool train_categorized =
          std::all_of(train.begin(), train.end(),
                      [](const dataset::DdiRecord& r) { return !r.category.empty(); });
      if (train_categorized) table = eval::build_template_table(train);
    }

    std::optional<BagCache> bags;
    bilinear::InteractionMatrix matrix;
    if (config.method == "bilinear") {
      if (val.empty()) {
        throw RunError(fold_tag + ": empty validation split (needed for early stopping)");
      }
      bags.emplace(config.bilinear.d, config.seed);
      bilinear::TrainConfig tc;
      tc.d = config.bilinear.d;
      tc.lr = config.bilinear.lr;
      tc.epochs = config.bilinear.epochs;
      tc.batch_size = config.bilinear.batch_size;
      tc.seed = config.seed;
      tc.patience = config.bilinear.patience;
      tc.gen_loss = config.bilinear.gen_loss;
      bilinear::TrainResult trained;
      try {
        trained = bilinear::train(make_batch(train, *bags), make_batch(val, *bags), tc);
      } catch (const bilinear::BilinearError& e) {
        throw RunError(fold_tag + ": " + e.what());
      }
      matrix = std::move(trained.matrix);
      bilinear::save_checkpoint(fold_dir + "/model.txt", matrix, config.seed);
      bilinear::save_log(fold_dir + "/train_log.jsonl", trained.log, hash, config.seed);
    }

    std::vector<std::pair<std::string, dataset::Role>> subsets;
    if (setting == dataset::Setting::Transductive) {
      subsets = {{"test", dataset::Role::Test}};
    } else {
      subsets = {{"test_s1", dataset::Role::TestS1}, {"test_s2", dataset::Role::TestS2}};
    }

    jsonl::Writer pred_writer(fold_dir + "/predictions.jsonl");
    json fold_extra = header_extra;
    fold_extra["fold"] = assignment.fold;
    pred_writer.write(jsonl::header_record("predictions", fold_extra));

    eval::EvalReport fold_report;
    for (const auto& [subset_name, role] : subsets) {
      const std::vector<dataset::DdiRecord> golds =
          dataset::records_with_role(records, assignment, role);
      if (golds.empty()) continue;  // nothing to score in this subset/fold

      std::vector<PredRow> rows;
      if (config.method == "rv") {
        rows = predict_rv(config, index, golds, subset_name);
      } else if (config.method == "bilinear") {
        rows = predict_bilinear(config, matrix, *bags, golds, subset_name);
      } else {
        rows = predict_ic(config, index, golds, subset_name, *backend, send_mutex);
      }
      for (const auto& row : rows) pred_writer.write(pred_row_to_json(row));

      eval::FoldScores scores = evaluate_subset(assignment.fold, subset_name, golds, rows,
                                                config.method != "bilinear", table);
      fold_report.folds.push_back(scores);
    }
    pred_writer.close();

    json eval_doc;
    eval_doc["_header"] = jsonl::header_record("eval", fold_extra)["_header"];
    eval_doc["report"] = eval::report_to_json(fold_report);
    write_json_doc(fold_dir + "/eval.json", eval_doc);
    per_fold[fold_idx] = std::move(fold_report.folds);
  };

  if (config.parallel_folds && assignments.size() > 1) {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(assignments.size());
    workers.reserve(assignments.size());
    for (std::size_t i = 0; i < assignments.size(); ++i) {
      workers.emplace_back([&, i] {
        try {
          run_fold(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  } else {
    for (std::size_t i = 0; i < assignments.size(); ++i) run_fold(i);
  }

  eval::EvalReport global;
  for (const auto& fold_scores : per_fold) {
    global.folds.insert(global.folds.end(), fold_scores.begin(), fold_scores.end());
  }
  // Group by subset for the report, fold order within each subset.
  std::stable_sort(global.folds.begin(), global.folds.end(),
                   [](const eval::FoldScores& a, const eval::FoldScores& b) {
                     if (a.subset != b.subset) return a.subset < b.subset;
                     return a.fold < b.fold;
                   });
  json summary_doc;
  summary_doc["_header"] = jsonl::header_record("summary", header_extra)["_header"];
  summary_doc["report"] = eval::report_to_json(global);
  write_json_doc(config.out_dir + "/summary.json", summary_doc);

  std::ofstream table_out(config.out_dir + "/summary.txt", std::ios::binary);
  if (!table_out) throw RunError("cannot open for writing: " + config.out_dir + "/summary.txt");
  table_out << "# tool " << kToolVersion << "  config " << hash << "  seed " << config.seed
            << "\n"
            << eval::render_table(global);
  table_out.close();
  if (table_out.fail()) throw RunError("write failed: " + config.out_dir + "/summary.txt");
}

// ---------------------------------------------------------------------------
// Synthetic fixture generation.

namespace {

const std::vector<std::string>& main_fragments() {
  static const std::vector<std::string> v = {
      "C",  "CC", "CO",     "CN",     "CS",     "C(C)",     "C(O)",     "C(N)",
      "C(=O)", "C(=O)O", "C(=O)N", "C(F)", "C(Cl)", "c1ccccc1", "c1ccncc1",
      "C1CCCCC1", "C1CCCC1", "C1CCNCC1", "C1CCOC1"};
  return v;
}

const std::vector<std::string>& tail_fragments() {
  static const std::vector<std::string> v = {"O", "N", "Cl", "F", "Br", "C#N", "C"};
  return v;
}

struct Mechanism {
  const char* category;
  const char* pattern;  // {1}/{2} take the two drug names
};

const std::vector<Mechanism>& mechanisms() {
  static const std::vector<Mechanism> v = {
      {"decreased_metabolism",
       "The metabolism of {2} can be decreased when combined with {1}."},
      {"increased_serum_concentration",
       "The serum concentration of {2} can be increased when it is combined with {1}."},
      {"qt_prolongation",
       "The risk of QT prolongation is increased when {1} is combined with {2}."},
      {"hypotension", "{1} may increase the hypotensive activities of {2}."},
      {"bleeding", "The risk of bleeding is increased when {1} is combined with {2}."},
      {"cns_depression",
       "The risk or severity of CNS depression can be increased when {1} is combined "
       "with {2}."},
  };
  return v;
}

std::string instantiate(const std::string& pattern, const std::string& name1,
                        const std::string& name2) {
  std::string out;
  for (std::size_t i = 0; i < pattern.size();) {
    if (pattern.compare(i, 3, "{1}") == 0) {
      out += name1;
      i += 3;
    } else if (pattern.compare(i, 3, "{2}") == 0) {
      out += name2;
      i += 3;
    } else {
      out += pattern[i];
      ++i;
    }
  }
  return out;
}

std::string make_name(Rng& rng, std::set<std::string>& used) {
  static const std::vector<std::string> syllables = {
      "al", "be", "cor", "dex", "fa", "gli", "lo", "mi", "nor",
      "pra", "quo", "ri", "sa", "te", "vu", "xa", "zo"};
  static const std::vector<std::string> suffixes = {
      "mab", "nib", "pril", "olol", "statin", "micin", "azole", "idine", "afil", "oxetine"};
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::string name = syllables[static_cast<std::size_t>(rng.below(syllables.size()))];
    name += syllables[static_cast<std::size_t>(rng.below(syllables.size()))];
    if (rng.below(2) == 0) {
      name += syllables[static_cast<std::size_t>(rng.below(syllables.size()))];
    }
    name += suffixes[static_cast<std::size_t>(rng.below(suffixes.size()))];
    name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    if (used.insert(name).second) return name;
  }
  // Astronomically unlikely with the vocabulary above; make uniqueness sure.
  std::string name = "Drugine" + std::to_string(used.size());
  used.insert(name);
  return name;
}

std::string make_def(Rng& rng, const std::string& name) {
  static const std::vector<std::string> adjectives = {
      "synthetic", "long-acting", "short-acting", "broad-spectrum", "selective",
      "non-selective", "potent", "first-generation", "second-generation"};
  static const std::vector<std::string> classes = {
      "enzyme inhibitor", "receptor antagonist", "beta blocker", "diuretic",
      "antibiotic", "antihistamine", "anticoagulant", "analgesic", "bronchodilator",
      "antidepressant"};
  static const std::vector<std::string> conditions = {
      "hypertension", "bacterial infections", "chronic pain", "seasonal allergies",
      "type 2 diabetes", "cardiac arrhythmias", "major depressive disorder", "asthma",
      "edema", "insomnia"};
  return name + " is a " +
         adjectives[static_cast<std::size_t>(rng.below(adjectives.size()))] + " " +
         classes[static_cast<std::size_t>(rng.below(classes.size()))] + " used to treat " +
         conditions[static_cast<std::size_t>(rng.below(conditions.size()))] + ".";
}

json record_to_json(const dataset::DdiRecord& r) {
  json j;
  j["record_id"] = r.record_id;
  j["drug1_id"] = r.drug1_id;
  j["drug2_id"] = r.drug2_id;
  j["smiles1"] = r.smiles1;
  j["smiles2"] = r.smiles2;
  j["drug1_names"] = r.drug1_names;
  j["drug2_names"] = r.drug2_names;
  j["drug1_def"] = r.drug1_def;
  j["drug2_def"] = r.drug2_def;
  j["label"] = dataset::label_to_string(r.label);
  j["explanation"] = r.explanation;
  j["source"] = dataset::source_to_string(r.source);
  j["category"] = r.category;
  return j;
}

}  // namespace

FixtureInfo generate_fixture(int n_drugs, int n_positives, std::uint64_t seed,
                             const std::string& out_path) {
  if (n_drugs < 4) throw std::invalid_argument("generate_fixture: need at least 4 drugs");
  if (n_positives < 1) throw std::invalid_argument("generate_fixture: need >= 1 positives");
  const std::size_t max_pairs =
      static_cast<std::size_t>(n_drugs) * (static_cast<std::size_t>(n_drugs) - 1) / 2;
  if (static_cast<std::size_t>(n_positives) * 2 > max_pairs) {
    throw std::invalid_argument(
        "generate_fixture: n_positives too large for a balanced dataset over n_drugs");
  }

  Rng rng(seed);
  const auto& frags = main_fragments();
  const auto& tails = tail_fragments();
  auto random_fragments = [&](int count) {
    std::string s;
    for (int i = 0; i < count; ++i) {
      s += frags[static_cast<std::size_t>(rng.below(frags.size()))];
    }
    return s;
  };

  const int n_clusters = std::max(4, n_drugs / 20);
  std::vector<std::string> bases;
  bases.reserve(static_cast<std::size_t>(n_clusters));
  for (int c = 0; c < n_clusters; ++c) {
    bases.push_back(random_fragments(3 + static_cast<int>(rng.below(3))));
  }

  FixtureInfo info;
  std::vector<dataset::DrugInfo> drugs;
  std::set<std::string> used_smiles;
  std::set<std::string> used_names;
  char idbuf[16];
  for (int i = 0; i < n_drugs; ++i) {
    const int cluster = i % n_clusters;
    std::string smiles;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      smiles = bases[static_cast<std::size_t>(cluster)];
      smiles += random_fragments(static_cast<int>(rng.below(3)));
      if (rng.below(2) == 0) {
        smiles += tails[static_cast<std::size_t>(rng.below(tails.size()))];
      }
      if (used_smiles.insert(smiles).second) break;
    }
    chem::parse_molecule(smiles);  // throws if the generator ever emits garbage

    std::snprintf(idbuf, sizeof(idbuf), "D%04d", i + 1);
    dataset::DrugInfo drug;
    drug.id = idbuf;
    drug.smiles = smiles;
    drug.names.push_back(make_name(rng, used_names));
    if (rng.below(2) == 0) drug.names.push_back(make_name(rng, used_names));
    drug.def = make_def(rng, drug.names.front());
    info.drug_ids.push_back(drug.id);
    info.cluster_of[drug.id] = cluster;
    drugs.push_back(std::move(drug));
  }

  // Positive pairs: mostly intra-cluster so retrieval has signal; the
  // mechanism (explanation template + category) is cluster-correlated.
  std::vector<dataset::DdiRecord> positives;
  std::set<dataset::PairKey> keys;
  const auto& mechs = mechanisms();
  std::size_t attempts = 0;
  const std::size_t max_attempts = static_cast<std::size_t>(n_positives) * 200 + 10000;
  while (positives.size() < static_cast<std::size_t>(n_positives)) {
    if (++attempts > max_attempts) {
      throw RunError("generate_fixture: could not place the requested positive pairs");
    }
    std::size_t i = 0, j = 0;
    if (rng.below(10) < 7) {
      // Intra-cluster attempt: two random members of one cluster.
      const int cluster = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_clusters)));
      std::vector<std::size_t> members;
      for (std::size_t d = 0; d < drugs.size(); ++d) {
        if (info.cluster_of.at(drugs[d].id) == cluster) members.push_back(d);
      }
      if (members.size() < 2) continue;
      i = members[static_cast<std::size_t>(rng.below(members.size()))];
      j = members[static_cast<std::size_t>(rng.below(members.size()))];
    } else {
      i = static_cast<std::size_t>(rng.below(drugs.size()));
      j = static_cast<std::size_t>(rng.below(drugs.size()));
    }
    if (i == j) continue;
    const dataset::PairKey key = dataset::make_pair_key(drugs[i].id, drugs[j].id);
    if (!keys.insert(key).second) continue;

    const int c1 = info.cluster_of.at(drugs[i].id);
    const int c2 = info.cluster_of.at(drugs[j].id);
    const Mechanism& mech =
        mechs[static_cast<std::size_t>(std::min(c1, c2)) % mechs.size()];

    dataset::DdiRecord r;
    std::snprintf(idbuf, sizeof(idbuf), "R%06zu", positives.size() + 1);
    r.record_id = idbuf;
    r.drug1_id = drugs[i].id;
    r.drug2_id = drugs[j].id;
    r.smiles1 = drugs[i].smiles;
    r.smiles2 = drugs[j].smiles;
    r.drug1_names = drugs[i].names;
    r.drug2_names = drugs[j].names;
    r.drug1_def = drugs[i].def;
    r.drug2_def = drugs[j].def;
    r.label = dataset::Label::Positive;
    r.explanation =
        instantiate(mech.pattern, drugs[i].names.front(), drugs[j].names.front());
    r.source = dataset::Source::Synthetic;
    r.category = mech.category;
    positives.push_back(std::move(r));
  }

  std::vector<dataset::DdiRecord> negatives =
      dataset::sample_negatives(positives, drugs, seed + 1);
  for (auto& r : negatives) r.category = "none";
  info.n_positive = positives.size();
  info.n_negative = negatives.size();

  jsonl::Writer w(out_path);
  json extra;
  extra["seed"] = seed;
  extra["n_drugs"] = n_drugs;
  extra["n_positives"] = n_positives;
  w.write(jsonl::header_record("dataset", extra));
  for (const auto& r : positives) w.write(record_to_json(r));
  for (const auto& r : negatives) w.write(record_to_json(r));
  w.close();
  return info;
}

}  // namespace ddikit::pipeline
