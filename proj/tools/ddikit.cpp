// ddikit — drug–drug interaction prediction with retrieved natural-language
// explanations. Subcommands cover the full experiment pipeline (run) and its
// individual stages (ingest, fixture, split, index, predict, train-bilinear,
// prompt, evaluate).
//
// Exit codes: 0 success, 1 configuration/usage error, 2 data error,
// 3 runtime failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ddikit/bilinear/model.hpp"
#include "ddikit/chem/element.hpp"
#include "ddikit/chem/smiles.hpp"
#include "ddikit/common/jsonl.hpp"
#include "ddikit/dataset/preprocess.hpp"
#include "ddikit/dataset/split.hpp"
#include "ddikit/eval/report.hpp"
#include "ddikit/fp/keys.hpp"
#include "ddikit/pipeline/config.hpp"
#include "ddikit/pipeline/run.hpp"
#include "ddikit/prompting/prompt.hpp"
#include "ddikit/retrieval/engine.hpp"
#include "ddikit/version.hpp"

namespace {

using namespace ddikit;
using jsonl::json;

std::string trim_copy(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  std::size_t e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

// --config file, repeatable --set key=value, and convenience flags that all
// funnel into the same key/value machinery. Later phases win: file, then
// --set, then named flags.
struct ConfigCli {
  std::string config_file;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;
};

void add_config_options(CLI::App* cmd, ConfigCli& cc) {
  cmd->add_option("--config", cc.config_file,
                  "Config file: 'key = value' lines, '#' comments");
  cmd->add_option("--set", cc.sets, "Override any config key (repeatable)")
      ->type_name("KEY=VALUE");
  auto bind = [cmd, &cc](const std::string& flag, const std::string& key,
                         const std::string& help) {
    cmd->add_option(flag, help)->type_name("VALUE")->each(
        [&cc, key](const std::string& v) { cc.flags[key] = v; });
  };
  bind("--dataset", "dataset", "Dataset JSONL path");
  bind("--setting", "setting", "Split setting: transductive | inductive");
  bind("--folds", "folds", "Number of cross-validation folds");
  bind("--seed", "seed", "Random seed");
  bind("--k", "k", "Top-K similar drugs per query drug");
  bind("--method", "method", "Prediction method: rv | bilinear | ic");
  bind("--demos", "demos", "Demonstrations per in-context prompt");
  bind("--threads", "threads", "Batch-prediction worker threads");
  bind("--out", "out_dir", "Output directory");
  bind("--backend", "backend.kind", "Completion backend: null | replay | http");
  bind("--replay", "backend.replay_path", "Replay fixture JSONL for backend.kind=replay");
  cmd->add_flag("--parallel-folds", "Run folds concurrently (outputs unchanged)")
      ->each([&cc](const std::string&) { cc.flags["parallel_folds"] = "true"; });
}

pipeline::RunConfig build_config(const ConfigCli& cc) {
  pipeline::RunConfig config;
  if (!cc.config_file.empty()) {
    pipeline::apply_config(config, pipeline::read_config_file(cc.config_file));
  }
  std::map<std::string, std::string> sets;
  for (const auto& s : cc.sets) {
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) {
      throw pipeline::ConfigError("--set expects KEY=VALUE, got '" + s + "'");
    }
    sets[trim_copy(s.substr(0, eq))] = trim_copy(s.substr(eq + 1));
  }
  if (!sets.empty()) pipeline::apply_config(config, sets);
  if (!cc.flags.empty()) pipeline::apply_config(config, cc.flags);
  return config;
}

json response_to_json(const retrieval::PredictionResponse& response) {
  json j;
  j["label"] = dataset::label_to_string(response.label);
  j["explanation"] = response.explanation;
  j["provenance"]["pair"] = {response.provenance.pair.first,
                             response.provenance.pair.second};
  j["provenance"]["pair_score"] = response.provenance.pair_score;
  j["provenance"]["sim1"] = response.provenance.sim1;
  j["provenance"]["sim2"] = response.provenance.sim2;
  j["provenance"]["fallback"] = response.provenance.fallback;
  j["warnings"] = response.warnings;
  return j;
}

std::vector<dataset::DdiRecord> load_masked_records(const std::string& path,
                                                    bool quiet = false) {
  dataset::IngestResult ingest = dataset::ingest_records(path);
  if (!quiet && ingest.report.n_excluded > 0) {
    std::cerr << "warning: excluded " << ingest.report.n_excluded
              << " invalid record(s); first issue: line "
              << ingest.report.issues.front().line << ": "
              << ingest.report.issues.front().message << "\n";
  }
  dataset::mask_all(ingest.records);
  return std::move(ingest.records);
}

// Feature bags for bilinear training outside the pipeline runner.
bilinear::TrainBatch make_examples(const std::vector<dataset::DdiRecord>& records,
                                   const std::vector<std::vector<double>>& table) {
  std::map<std::string, bilinear::FeatureBag> bags;
  auto bag_of = [&](const std::string& id, const std::string& smiles)
      -> const bilinear::FeatureBag& {
    auto it = bags.find(id);
    if (it != bags.end()) return it->second;
    const fp::Fingerprint fingerprint = fp::compute_keys(chem::parse_molecule(smiles));
    return bags.emplace(id, bilinear::featurize(fingerprint, table)).first->second;
  };
  bilinear::TrainBatch batch;
  batch.reserve(records.size());
  for (const auto& r : records) {
    bilinear::Example ex;
    ex.a = bag_of(r.drug1_id, r.smiles1);
    ex.b = bag_of(r.drug2_id, r.smiles2);
    ex.label = r.label == dataset::Label::Positive ? 1 : 0;
    batch.push_back(std::move(ex));
  }
  return batch;
}

const dataset::SplitAssignment& assignment_for_fold(
    const std::vector<dataset::SplitAssignment>& assignments, int fold) {
  for (const auto& a : assignments) {
    if (a.fold == fold) return a;
  }
  throw pipeline::ConfigError("fold " + std::to_string(fold) +
                              " not present in the split (have " +
                              std::to_string(assignments.size()) + " fold(s))");
}

int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const pipeline::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const dataset::DatasetError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const retrieval::IndexError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const jsonl::IoError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const eval::EvalError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const bilinear::BilinearError& e) {
    std::cerr << (e.kind == bilinear::BilinearErrorKind::Io ? "data error: "
                                                            : "runtime error: ")
              << e.what() << "\n";
    return e.kind == bilinear::BilinearErrorKind::Io ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 3;
  }
}

// --- structural-key table rendering ------------------------------------------
// The markdown reference in docs/structural_keys.md is the output of
// `ddikit keys`; the table in src/fp/keys.cpp is the single source of truth.

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

// Element sets render as symbols; long consecutive runs collapse to a range.
std::string element_set(const std::vector<int>& zs) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < zs.size()) {
    std::size_t j = i;
    while (j + 1 < zs.size() && zs[j + 1] == zs[j] + 1) ++j;
    if (j - i >= 2) {
      parts.push_back(std::string(chem::element_symbol(zs[i])) + ".." +
                      std::string(chem::element_symbol(zs[j])));
    } else {
      for (std::size_t k = i; k <= j; ++k) {
        parts.push_back(std::string(chem::element_symbol(zs[k])));
      }
    }
    i = j + 1;
  }
  return join(parts, ",");
}

std::string atom_token(const fp::AtomConstraint& a) {
  std::string base;
  if (a.elements.empty()) {
    base = "A";
  } else if (a.negate && a.elements == std::vector<int>{1, 6}) {
    base = "Q";
  } else if (a.negate) {
    base = "!{" + element_set(a.elements) + "}";
  } else if (a.elements == std::vector<int>{9, 17, 35, 53}) {
    base = "X";
  } else if (a.elements.size() == 1) {
    base = std::string(chem::element_symbol(a.elements[0]));
  } else {
    base = "{" + element_set(a.elements) + "}";
  }
  std::vector<std::string> quals;
  if (a.aromatic == 1) quals.push_back("arom");
  if (a.aromatic == 0) quals.push_back("aliph");
  if (a.in_ring == 1) quals.push_back("ring");
  if (a.in_ring == 0) quals.push_back("chain");
  if (a.ring_size > 0) quals.push_back("ring" + std::to_string(a.ring_size));
  if (a.charged == 1) quals.push_back("charged");
  if (a.charged == 0) quals.push_back("uncharged");
  if (a.charge != fp::kChargeAny) quals.push_back("charge " + std::to_string(a.charge));
  if (a.min_degree > 0) quals.push_back("deg>=" + std::to_string(a.min_degree));
  if (!a.h_counts.empty()) {
    std::vector<std::string> hs;
    for (int h : a.h_counts) hs.push_back(std::to_string(h));
    quals.push_back("H" + join(hs, "|"));
  } else if (a.min_h > 0) {
    quals.push_back("H>=" + std::to_string(a.min_h));
  }
  if (!quals.empty()) base += "{" + join(quals, ",") + "}";
  return base;
}

std::string bond_token(const fp::BondConstraint& bc) {
  std::string t;
  switch (bc.expr) {
    case fp::BondExpr::Any: t = "~"; break;
    case fp::BondExpr::Single: t = "-"; break;
    case fp::BondExpr::Double: t = "="; break;
    case fp::BondExpr::Triple: t = "#"; break;
    case fp::BondExpr::Aromatic: t = ":"; break;
    case fp::BondExpr::NotAromatic: t = "!:"; break;
    case fp::BondExpr::SingleOrAromatic: t = "-:"; break;
  }
  if (bc.in_ring == 1) t += "@";
  if (bc.in_ring == 0) t += "!@";
  return t;
}

// Renders a fragment as a linear chain (atom0 bond atom1 ...) or, when every
// bond touches one center, in branch notation (first(~center)(~branch)~last).
// Every pattern in the key table is one of the two shapes.
std::string pattern_text(const fp::FragmentPattern& p) {
  const int n = static_cast<int>(p.atoms.size());
  if (n == 1) return atom_token(p.atoms[0]);

  std::vector<const fp::BondConstraint*> chain(static_cast<std::size_t>(n), nullptr);
  bool is_chain = static_cast<int>(p.bonds.size()) == n - 1;
  for (const auto& bond : p.bonds) {
    if (!is_chain) break;
    if (bond.a + 1 == bond.b && chain[static_cast<std::size_t>(bond.a)] == nullptr) {
      chain[static_cast<std::size_t>(bond.a)] = &bond;
    } else {
      is_chain = false;
    }
  }
  if (is_chain) {
    std::string out = atom_token(p.atoms[0]);
    for (int i = 0; i + 1 < n; ++i) {
      out += bond_token(*chain[static_cast<std::size_t>(i)]) +
             atom_token(p.atoms[static_cast<std::size_t>(i + 1)]);
    }
    return out;
  }

  for (int center = 0; center < n; ++center) {
    std::vector<std::pair<int, const fp::BondConstraint*>> arms;
    bool is_star = static_cast<int>(p.bonds.size()) == n - 1;
    for (const auto& bond : p.bonds) {
      if (bond.a == center) {
        arms.emplace_back(bond.b, &bond);
      } else if (bond.b == center) {
        arms.emplace_back(bond.a, &bond);
      } else {
        is_star = false;
        break;
      }
    }
    if (!is_star || static_cast<int>(arms.size()) != n - 1) continue;
    std::sort(arms.begin(), arms.end());
    std::string out;
    std::size_t next = 0;
    if (arms.front().first < center) {
      out = atom_token(p.atoms[static_cast<std::size_t>(arms[0].first)]) +
            bond_token(*arms[0].second);
      next = 1;
    }
    out += atom_token(p.atoms[static_cast<std::size_t>(center)]);
    for (std::size_t i = next; i < arms.size(); ++i) {
      const std::string arm = bond_token(*arms[i].second) +
                              atom_token(p.atoms[static_cast<std::size_t>(arms[i].first)]);
      out += i + 1 < arms.size() ? "(" + arm + ")" : arm;
    }
    return out;
  }

  // No table entry reaches this; kept so new shapes still render something.
  std::vector<std::string> atoms, bonds;
  for (const auto& a : p.atoms) atoms.push_back(atom_token(a));
  for (const auto& bond : p.bonds) {
    bonds.push_back(std::to_string(bond.a) + bond_token(bond) + std::to_string(bond.b));
  }
  return "atoms [" + join(atoms, " ") + "] bonds [" + join(bonds, " ") + "]";
}

std::string key_condition(const fp::KeyDef& def) {
  switch (def.kind) {
    case fp::KeyKind::Unimplemented:
      return "never set (see notes above)";
    case fp::KeyKind::Patterns: {
      std::vector<std::string> pats;
      for (const auto& p : def.patterns) pats.push_back("`" + pattern_text(p) + "`");
      std::string out = join(pats, " or ");
      if (def.mode == fp::CountMode::AnchorAtoms) {
        out += def.min_count > 1
                   ? " anchored at >= " + std::to_string(def.min_count) +
                         " distinct first atoms"
                   : " matched (anchor-counted)";
      } else if (def.min_count > 1) {
        out += " matched at >= " + std::to_string(def.min_count) + " distinct atom sets";
      } else {
        out += " matched";
      }
      return out;
    }
    case fp::KeyKind::RingCycle: {
      std::string size = def.cycle_min == def.cycle_max
                             ? "size " + std::to_string(def.cycle_min)
                             : "size " + std::to_string(def.cycle_min) + ".." +
                                   std::to_string(def.cycle_max);
      std::string out = def.min_count > 1
                            ? ">= " + std::to_string(def.min_count) + " simple rings of " + size
                            : "a simple ring of " + size;
      if (def.cycle_hetero) out += " containing a non-carbon atom";
      return out;
    }
    case fp::KeyKind::ComponentCount:
      return ">= " + std::to_string(def.min_count) + " connected components";
    case fp::KeyKind::AromaticRings:
      return ">= " + std::to_string(def.min_count) + " all-aromatic basis rings";
  }
  return "";
}

std::string render_key_doc() {
  std::string doc;
  doc +=
      "# Structural key reference\n"
      "\n"
      "Generated by `ddikit keys --out docs/structural_keys.md`; the table in\n"
      "`src/fp/keys.cpp` is the source of truth. Do not edit by hand.\n"
      "\n"
      "Drug fingerprints are 166-bit structural-key vectors: bit *i* (0-based) is\n"
      "key *i + 1* in the table below. Keys are evaluated on the parsed,\n"
      "ring-perceived molecule; similarity between two fingerprints is the\n"
      "Tanimoto coefficient (two all-zero fingerprints count as identical, 1.0).\n"
      "Serialized form is 42 lowercase hex digits, highest bit first.\n"
      "\n"
      "## Notation\n"
      "\n"
      "Atom tokens:\n"
      "\n"
      "- `A` — any heavy atom (never hydrogen)\n"
      "- `Q` — any heteroatom: not carbon, not hydrogen\n"
      "- `X` — halogen (F, Cl, Br, I)\n"
      "- `N`, `O`, `S`, ... — that element; `{Fe,Co,Ni}` — one of the listed\n"
      "  elements; `Sc..Lr` — a consecutive atomic-number range; `!{...}` — any\n"
      "  element outside the listed set\n"
      "- `{...}` qualifiers: `arom`/`aliph` (aromaticity), `ring`/`chain`\n"
      "  (perceived-ring membership), `charged` (nonzero formal charge), `H2`\n"
      "  (exact total hydrogen count; `H3|4` = 3 or 4), `H>=1` (lower bound)\n"
      "\n"
      "Bond tokens: `~` any, `-` single (non-aromatic), `=` double, `#` triple,\n"
      "`:` aromatic, `!:` any but aromatic, `-:` single or aromatic; a trailing\n"
      "`@` restricts the bond to a perceived ring, `!@` to a chain (non-ring)\n"
      "bond. Branches are parenthesized, e.g. `O~N(~C)~C` is an N bonded to O\n"
      "and two C.\n"
      "\n"
      "## Match semantics\n"
      "\n"
      "- A fragment match is an injective mapping of pattern atoms onto molecule\n"
      "  atoms that satisfies every atom and bond constraint. Matches are\n"
      "  deduplicated by matched atom-index *set*, so a symmetric fragment found\n"
      "  in two orientations counts once.\n"
      "- Keys written \"x2\"/\"x3\"/... require that many distinct matches;\n"
      "  anchor-counted keys count distinct molecule atoms taken by the first\n"
      "  pattern atom instead of distinct atom sets.\n"
      "- Hydrogen counts are total (implicit + explicit) hydrogens.\n"
      "- Ring-membership flags (`ring`, `@`) come from a deterministic minimum\n"
      "  cycle basis. Ring-size keys instead count *simple* cycles of the stated\n"
      "  size, so fused systems fire every applicable size (key 101 stops at\n"
      "  14-membered cycles). \"Aromatic rings\" are basis rings whose bonds are\n"
      "  all aromatic.\n"
      "- The component-count key fires on disconnected structures (salts,\n"
      "  mixtures written with `.`).\n"
      "\n"
      "## Unimplemented keys\n"
      "\n";
  for (int key : fp::unimplemented_keys()) {
    const auto& def = fp::key_table()[static_cast<std::size_t>(key - 1)];
    doc += "- Key " + std::to_string(key) + " — " + def.name + "\n";
  }
  doc +=
      "\n"
      "These keys need molecule features the parser does not model (isotope\n"
      "labels), so their bits are always 0. Every other key is live.\n"
      "\n"
      "## Key table\n"
      "\n"
      "| Key | Mnemonic | Fires when |\n"
      "|----:|----------|------------|\n";
  for (const auto& def : fp::key_table()) {
    doc += "| " + std::to_string(def.key) + " | " + def.name + " | " +
           key_condition(def) + " |\n";
  }
  return doc;
}

void print_or_write(const json& doc, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << doc.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw jsonl::IoError("cannot open for writing: " + out_path);
  out << doc.dump(2) << '\n';
  out.close();
  if (out.fail()) throw jsonl::IoError("write failed: " + out_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ddikit: drug-drug interaction prediction with retrieved natural-language "
      "explanations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("ddikit ") + kToolVersion);

  std::function<void()> action;

  // --- ingest ---------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("ingest", "Validate a dataset file and report issues");
    auto dataset_path = std::make_shared<std::string>();
    auto report_path = std::make_shared<std::string>();
    cmd->add_option("--dataset", *dataset_path, "Dataset JSONL path")->required();
    cmd->add_option("--report", *report_path, "Write the ingest report JSON here");
    cmd->callback([&action, dataset_path, report_path] {
      action = [dataset_path, report_path] {
        dataset::IngestResult ingest = dataset::ingest_records(*dataset_path);
        for (const auto& issue : ingest.report.issues) {
          std::cerr << "line " << issue.line << ": " << issue.message << "\n";
        }
        std::cout << "valid records: " << ingest.report.n_valid
                  << "\nexcluded records: " << ingest.report.n_excluded << "\n";
        if (!report_path->empty()) {
          json doc;
          doc["_header"] = jsonl::header_record("ingest_report")["_header"];
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
          print_or_write(doc, *report_path);
        }
      };
    });
  }

  // --- fixture --------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("fixture", "Generate a synthetic dataset");
    auto n_drugs = std::make_shared<int>(200);
    auto n_positives = std::make_shared<int>(500);
    auto seed = std::make_shared<std::uint64_t>(42);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--drugs", *n_drugs, "Number of drugs")->capture_default_str();
    cmd->add_option("--positives", *n_positives, "Number of positive pairs")
        ->capture_default_str();
    cmd->add_option("--seed", *seed, "Random seed")->capture_default_str();
    cmd->add_option("--out", *out, "Output dataset JSONL path")->required();
    cmd->callback([&action, n_drugs, n_positives, seed, out] {
      action = [n_drugs, n_positives, seed, out] {
        pipeline::FixtureInfo info =
            pipeline::generate_fixture(*n_drugs, *n_positives, *seed, *out);
        std::cout << "drugs: " << info.drug_ids.size()
                  << "\npositives: " << info.n_positive
                  << "\nnegatives: " << info.n_negative << "\nwritten: " << *out << "\n";
      };
    });
  }

  // --- split ----------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("split", "Assign records to cross-validation folds");
    auto cc = std::make_shared<ConfigCli>();
    add_config_options(cmd, *cc);
    auto out_split = std::make_shared<std::string>();
    auto out_drugs = std::make_shared<std::string>();
    cmd->add_option("--out-split", *out_split, "Split assignment JSONL path")->required();
    cmd->add_option("--out-drugs", *out_drugs,
                    "Drug partition JSONL path (inductive only)");
    cmd->callback([&action, cc, out_split, out_drugs] {
      action = [cc, out_split, out_drugs] {
        pipeline::RunConfig config = build_config(*cc);
        if (config.dataset_path.empty()) {
          throw pipeline::ConfigError("dataset is required (--dataset or config file)");
        }
        std::vector<dataset::DdiRecord> records =
            load_masked_records(config.dataset_path);
        const dataset::Setting setting = dataset::setting_from_string(config.setting);
        std::vector<dataset::SplitAssignment> assignments =
            setting == dataset::Setting::Transductive
                ? dataset::split_transductive(records, config.seed, config.folds)
                : dataset::split_inductive(records, config.seed, config.folds);
        dataset::save_split(assignments, *out_split, pipeline::config_hash(config),
                            config.seed);
        std::cout << "folds: " << assignments.size() << "\nwritten: " << *out_split
                  << "\n";
        if (setting == dataset::Setting::Inductive && !out_drugs->empty()) {
          dataset::save_drug_partition(assignments, *out_drugs,
                                       pipeline::config_hash(config), config.seed);
          std::cout << "written: " << *out_drugs << "\n";
        }
      };
    });
  }

  // --- index ----------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand(
        "index", "Build a retrieval index (fingerprints + labeled pairs)");
    auto cc = std::make_shared<ConfigCli>();
    add_config_options(cmd, *cc);
    auto split_path = std::make_shared<std::string>();
    auto fold = std::make_shared<int>(0);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--split", *split_path,
                    "Split JSONL; only that fold's train records are indexed");
    cmd->add_option("--fold", *fold, "Fold to take train records from")
        ->capture_default_str();
    cmd->add_option("--out-index", *out, "Output index JSONL path")->required();
    cmd->callback([&action, cc, split_path, fold, out] {
      action = [cc, split_path, fold, out] {
        pipeline::RunConfig config = build_config(*cc);
        if (config.dataset_path.empty()) {
          throw pipeline::ConfigError("dataset is required (--dataset or config file)");
        }
        std::vector<dataset::DdiRecord> records =
            load_masked_records(config.dataset_path);
        if (!split_path->empty()) {
          const auto assignments = dataset::load_split(*split_path);
          records = dataset::records_with_role(
              records, assignment_for_fold(assignments, *fold), dataset::Role::Train);
        }
        retrieval::TrainingIndex index = retrieval::build_index(records, config.k);
        retrieval::save_index(index, *out, pipeline::config_hash(config), config.seed);
        std::cout << "drugs: " << index.drugs.size() << "\npairs: " << index.pairs.size()
                  << "\nwritten: " << *out << "\n";
      };
    });
  }

  // --- keys -------------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand(
        "keys", "Describe the 166-bit structural-key table as markdown");
    auto out = std::make_shared<std::string>();
    cmd->add_option("--out", *out, "Write the reference here (default stdout)");
    cmd->callback([&action, out] {
      action = [out] {
        const std::string doc = render_key_doc();
        if (out->empty()) {
          std::cout << doc;
          return;
        }
        std::ofstream file(*out, std::ios::binary);
        if (!file) throw jsonl::IoError("cannot open for writing: " + *out);
        file << doc;
        file.close();
        if (file.fail()) throw jsonl::IoError("write failed: " + *out);
        std::cout << "written: " << *out << "\n";
      };
    });
  }

  // --- predict ----------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand(
        "predict", "Predict interaction + explanation for drug pairs via retrieval");
    auto index_path = std::make_shared<std::string>();
    auto smiles1 = std::make_shared<std::string>();
    auto smiles2 = std::make_shared<std::string>();
    auto pairs_path = std::make_shared<std::string>();
    auto k = std::make_shared<int>(50);
    auto threads = std::make_shared<int>(1);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--index", *index_path, "Index JSONL path")->required();
    cmd->add_option("--smiles1", *smiles1, "First query drug SMILES");
    cmd->add_option("--smiles2", *smiles2, "Second query drug SMILES");
    cmd->add_option("--pairs", *pairs_path,
                    "Batch mode: JSONL of {smiles1, smiles2} records");
    cmd->add_option("--k", *k, "Top-K similar drugs per query drug")
        ->capture_default_str();
    cmd->add_option("--threads", *threads, "Worker threads in batch mode")
        ->capture_default_str();
    cmd->add_option("--out", *out, "Batch mode output JSONL (default stdout)");
    cmd->callback([&action, index_path, smiles1, smiles2, pairs_path, k, threads, out] {
      action = [index_path, smiles1, smiles2, pairs_path, k, threads, out] {
        const bool single = !smiles1->empty() || !smiles2->empty();
        if (single == !pairs_path->empty()) {
          throw pipeline::ConfigError(
              "provide exactly one of --smiles1/--smiles2 or --pairs");
        }
        if (single && (smiles1->empty() || smiles2->empty())) {
          throw pipeline::ConfigError("--smiles1 and --smiles2 are both required");
        }
        retrieval::TrainingIndex index = retrieval::load_index(*index_path);
        if (single) {
          const retrieval::PredictionResponse response =
              retrieval::predict(index, *smiles1, *smiles2, *k);
          for (const auto& w : response.warnings) std::cerr << "warning: " << w << "\n";
          std::cout << response_to_json(response).dump(2) << "\n";
          return;
        }
        std::vector<std::pair<std::string, std::string>> queries;
        jsonl::for_each(*pairs_path, [&](std::size_t line, const json& record) {
          if (jsonl::is_header(record)) return;
          if (!record.contains("smiles1") || !record.contains("smiles2") ||
              !record["smiles1"].is_string() || !record["smiles2"].is_string()) {
            throw jsonl::IoError(*pairs_path + ":" + std::to_string(line) +
                                 ": expected string fields smiles1, smiles2");
          }
          queries.emplace_back(record["smiles1"].get<std::string>(),
                               record["smiles2"].get<std::string>());
        });
        const auto responses = retrieval::predict_batch(index, queries, *k, *threads);
        std::optional<jsonl::Writer> writer;
        if (!out->empty()) {
          writer.emplace(*out);
          writer->write(jsonl::header_record("predictions"));
        }
        for (std::size_t i = 0; i < responses.size(); ++i) {
          json j = response_to_json(responses[i]);
          j["smiles1"] = queries[i].first;
          j["smiles2"] = queries[i].second;
          if (writer) {
            writer->write(j);
          } else {
            std::cout << j.dump() << "\n";
          }
        }
        if (writer) {
          writer->close();
          std::cout << "written: " << *out << " (" << responses.size() << " rows)\n";
        }
      };
    });
  }

  // --- train-bilinear ---------------------------------------------------------
  {
    auto* cmd = app.add_subcommand(
        "train-bilinear", "Train the bilinear pairwise classifier on one fold");
    auto cc = std::make_shared<ConfigCli>();
    add_config_options(cmd, *cc);
    auto split_path = std::make_shared<std::string>();
    auto fold = std::make_shared<int>(0);
    cmd->add_option("--split", *split_path, "Split JSONL (default: compute from config)");
    cmd->add_option("--fold", *fold, "Fold to train on")->capture_default_str();
    cmd->callback([&action, cc, split_path, fold] {
      action = [cc, split_path, fold] {
        pipeline::RunConfig config = build_config(*cc);
        if (config.dataset_path.empty()) {
          throw pipeline::ConfigError("dataset is required (--dataset or config file)");
        }
        pipeline::validate(config);
        std::vector<dataset::DdiRecord> records =
            load_masked_records(config.dataset_path);
        std::vector<dataset::SplitAssignment> assignments;
        if (!split_path->empty()) {
          assignments = dataset::load_split(*split_path);
        } else {
          const dataset::Setting setting = dataset::setting_from_string(config.setting);
          assignments = setting == dataset::Setting::Transductive
                            ? dataset::split_transductive(records, config.seed,
                                                          config.folds)
                            : dataset::split_inductive(records, config.seed,
                                                       config.folds);
        }
        const auto& assignment = assignment_for_fold(assignments, *fold);
        const auto train_records =
            dataset::records_with_role(records, assignment, dataset::Role::Train);
        const auto val_records =
            dataset::records_with_role(records, assignment, dataset::Role::Val);
        if (train_records.empty() || val_records.empty()) {
          throw pipeline::ConfigError("fold " + std::to_string(*fold) +
                                      " has an empty train or val split");
        }
        const auto table =
            bilinear::make_embedding_table(config.bilinear.d, config.seed);
        bilinear::TrainConfig tc;
        tc.d = config.bilinear.d;
        tc.lr = config.bilinear.lr;
        tc.epochs = config.bilinear.epochs;
        tc.batch_size = config.bilinear.batch_size;
        tc.seed = config.seed;
        tc.patience = config.bilinear.patience;
        tc.gen_loss = config.bilinear.gen_loss;
        const bilinear::TrainResult result = bilinear::train(
            make_examples(train_records, table), make_examples(val_records, table), tc);
        std::error_code ec;
        std::filesystem::create_directories(config.out_dir, ec);
        if (ec) {
          throw pipeline::RunError("cannot create output directory '" + config.out_dir +
                                   "'");
        }
        bilinear::save_checkpoint(config.out_dir + "/model.txt", result.matrix,
                                  config.seed);
        bilinear::save_log(config.out_dir + "/train_log.jsonl", result.log,
                           pipeline::config_hash(config), config.seed);
        const auto& best = result.log.at(static_cast<std::size_t>(result.best_epoch - 1));
        std::cout << "epochs run: " << result.log.size()
                  << "\nbest epoch: " << result.best_epoch
                  << "\nval loss: " << best.val_loss << "\nval accuracy: " << best.val_acc
                  << "\nwritten: " << config.out_dir << "/model.txt\n";
      };
    });
  }

  // --- prompt ---------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand(
        "prompt", "Build an in-context prompt with retrieved demonstrations");
    auto index_path = std::make_shared<std::string>();
    auto smiles1 = std::make_shared<std::string>();
    auto smiles2 = std::make_shared<std::string>();
    auto demos = std::make_shared<int>(5);
    auto k = std::make_shared<int>(50);
    cmd->add_option("--index", *index_path, "Index JSONL path")->required();
    cmd->add_option("--smiles1", *smiles1, "First query drug SMILES")->required();
    cmd->add_option("--smiles2", *smiles2, "Second query drug SMILES")->required();
    cmd->add_option("--demos", *demos, "Number of demonstrations")
        ->capture_default_str();
    cmd->add_option("--k", *k, "Top-K similar drugs per query drug")
        ->capture_default_str();
    cmd->callback([&action, index_path, smiles1, smiles2, demos, k] {
      action = [index_path, smiles1, smiles2, demos, k] {
        retrieval::TrainingIndex index = retrieval::load_index(*index_path);
        prompting::DemonstrationSet set =
            prompting::select_demonstrations(index, *smiles1, *smiles2, *demos, *k);
        for (const auto& w : set.warnings) std::cerr << "warning: " << w << "\n";
        std::cout << prompting::build_prompt(*smiles1, *smiles2, set.demos) << "\n";
      };
    });
  }

  // --- evaluate ---------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand(
        "evaluate", "Score a predictions file against its dataset");
    auto dataset_path = std::make_shared<std::string>();
    auto predictions_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--dataset", *dataset_path, "Dataset JSONL path")->required();
    cmd->add_option("--predictions", *predictions_path, "Predictions JSONL path")
        ->required();
    cmd->add_option("--out", *out, "Write the report JSON here (default stdout)");
    cmd->callback([&action, dataset_path, predictions_path, out] {
      action = [dataset_path, predictions_path, out] {
        const std::vector<dataset::DdiRecord> records =
            load_masked_records(*dataset_path);
        std::map<std::string, const dataset::DdiRecord*> by_id;
        for (const auto& r : records) by_id[r.record_id] = &r;

        struct Row {
          const dataset::DdiRecord* gold;
          eval::PredLabel pred;
          std::string explanation;
        };
        std::map<std::string, std::vector<Row>> by_subset;  // insertion irrelevant
        int fold = 0;
        jsonl::for_each(*predictions_path, [&](std::size_t line, const json& record) {
          if (jsonl::is_header(record)) {
            const auto& h = record["_header"];
            if (h.contains("fold") && h["fold"].is_number_integer()) {
              fold = h["fold"].get<int>();
            }
            return;
          }
          auto str = [&](const char* key) -> std::string {
            if (!record.contains(key) || !record[key].is_string()) {
              throw jsonl::IoError(*predictions_path + ":" + std::to_string(line) +
                                   ": expected string field '" + key + "'");
            }
            return record[key].get<std::string>();
          };
          const std::string record_id = str("record_id");
          auto it = by_id.find(record_id);
          if (it == by_id.end()) {
            throw jsonl::IoError(*predictions_path + ":" + std::to_string(line) +
                                 ": record_id '" + record_id +
                                 "' not found in the dataset");
          }
          Row row;
          row.gold = it->second;
          const std::string label = str("label");
          row.pred = label == "positive"   ? eval::PredLabel::Positive
                     : label == "negative" ? eval::PredLabel::Negative
                                           : eval::PredLabel::Unparseable;
          row.explanation = str("explanation");
          const std::string subset =
              record.contains("subset") && record["subset"].is_string()
                  ? record["subset"].get<std::string>()
                  : "test";
          by_subset[subset].push_back(std::move(row));
        });
        if (by_subset.empty()) {
          throw jsonl::IoError(*predictions_path + ": no prediction rows");
        }

        // Explanation-type templates come from categorized positive records.
        std::vector<dataset::DdiRecord> categorized;
        for (const auto& r : records) {
          if (!r.category.empty() && !r.explanation.empty()) categorized.push_back(r);
        }
        std::optional<eval::TemplateTable> table;
        if (!categorized.empty()) table = eval::build_template_table(categorized);

        eval::EvalReport report;
        for (const auto& [subset, rows] : by_subset) {
          eval::FoldScores scores;
          scores.fold = fold;
          scores.subset = subset;
          std::vector<eval::PredLabel> preds;
          std::vector<dataset::Label> golds;
          for (const auto& row : rows) {
            preds.push_back(row.pred);
            golds.push_back(row.gold->label);
          }
          scores.binary = eval::classification_report(preds, golds);
          const bool any_explanation =
              std::any_of(rows.begin(), rows.end(),
                          [](const Row& r) { return !r.explanation.empty(); });
          if (any_explanation) {
            std::vector<std::string> hyps, refs;
            for (const auto& row : rows) {
              hyps.push_back(row.explanation);
              refs.push_back(row.gold->explanation);
            }
            eval::GenerationScores gen;
            gen.bleu = eval::bleu(hyps, refs);
            gen.rouge1 = eval::rouge_n_corpus(hyps, refs, 1).f1;
            gen.rouge2 = eval::rouge_n_corpus(hyps, refs, 2).f1;
            gen.rougeL = eval::rouge_l_corpus(hyps, refs).f1;
            scores.generation = gen;
            const bool all_categorized =
                table && std::all_of(rows.begin(), rows.end(), [](const Row& r) {
                  return !r.gold->category.empty();
                });
            if (all_categorized) {
              std::vector<std::string> pred_cats, gold_cats;
              for (const auto& row : rows) {
                pred_cats.push_back(
                    row.pred == eval::PredLabel::Unparseable
                        ? std::string()
                        : eval::map_explanation_to_type(row.explanation, *table));
                gold_cats.push_back(row.gold->category);
              }
              scores.multiclass = eval::classification_report(pred_cats, gold_cats);
            }
          }
          report.folds.push_back(std::move(scores));
        }

        json doc;
        doc["_header"] = jsonl::header_record("eval")["_header"];
        doc["report"] = eval::report_to_json(report);
        print_or_write(doc, *out);
        std::cerr << eval::render_table(report);
      };
    });
  }

  // --- run --------------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand(
        "run", "Full pipeline: ingest, split, index, predict/train, evaluate, report");
    auto cc = std::make_shared<ConfigCli>();
    add_config_options(cmd, *cc);
    cmd->callback([&action, cc] {
      action = [cc] {
        pipeline::RunConfig config = build_config(*cc);
        pipeline::run_pipeline(config);
        std::ifstream summary(config.out_dir + "/summary.txt");
        std::cout << summary.rdbuf();
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  return run_guarded(action);
}
