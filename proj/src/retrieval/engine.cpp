#include "ddikit/retrieval/engine.hpp"

#include <algorithm>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_map>

#include "ddikit/chem/smiles.hpp"
#include "ddikit/dataset/preprocess.hpp"
#include "ddikit/fp/keys.hpp"

namespace ddikit::retrieval {

std::vector<Neighbor> top_k_similar(const TrainingIndex& index,
                                    const fp::Fingerprint& query, int k) {
  if (k < 1) throw std::invalid_argument("top_k_similar: k must be >= 1");
  std::vector<Neighbor> all;
  all.reserve(index.drugs.size());
  for (const auto& [id, entry] : index.drugs) {
    all.push_back({id, fp::tanimoto(query, entry.fingerprint)});
  }
  std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.drug_id < b.drug_id;
  });
  if (all.size() > static_cast<std::size_t>(k)) all.resize(static_cast<std::size_t>(k));
  return all;
}

std::vector<std::pair<PairKey, double>> rank_candidate_pairs(
    const std::vector<Neighbor>& nbrs1, const std::vector<Neighbor>& nbrs2,
    const TrainingIndex& index) {
  // The same canonical pair can form in both orientations; keep the better
  // product.
  std::map<PairKey, double> best;
  for (const auto& n1 : nbrs1) {
    for (const auto& n2 : nbrs2) {
      if (n1.drug_id == n2.drug_id) continue;
      PairKey key = dataset::make_pair_key(n1.drug_id, n2.drug_id);
      if (index.pairs.find(key) == index.pairs.end()) continue;
      const double score = n1.similarity * n2.similarity;
      auto [it, inserted] = best.emplace(key, score);
      if (!inserted && score > it->second) it->second = score;
    }
  }
  std::vector<std::pair<PairKey, double>> ranked(best.begin(), best.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return ranked;
}

namespace {

fp::Fingerprint fingerprint_or_throw(const std::string& smiles, const char* which) {
  try {
    return fp::compute_keys(chem::parse_molecule(smiles));
  } catch (const chem::SmilesError& e) {
    throw IndexError(IndexErrorKind::UnparseableSmiles,
                     std::string("query ") + which + ": " + e.what(), {which});
  }
}

std::vector<std::string> drugs_with_smiles(const TrainingIndex& index,
                                           const std::string& smiles) {
  std::vector<std::string> ids;
  for (const auto& [id, entry] : index.drugs) {
    if (entry.smiles == smiles) ids.push_back(id);
  }
  return ids;
}

}  // namespace

CandidateSearch search_candidates(const TrainingIndex& index, const std::string& smiles1,
                                  const std::string& smiles2, int k) {
  if (k < 1) throw std::invalid_argument("search_candidates: k must be >= 1");
  const fp::Fingerprint fp1 = fingerprint_or_throw(smiles1, "smiles1");
  const fp::Fingerprint fp2 = fingerprint_or_throw(smiles2, "smiles2");

  CandidateSearch search;

  // The query's own pair must not answer itself. Query drugs are recognized
  // by exact SMILES-string identity with indexed drugs.
  search.own1 = drugs_with_smiles(index, smiles1);
  search.own2 = drugs_with_smiles(index, smiles2);
  std::set<PairKey> excluded;
  for (const auto& d1 : search.own1) {
    for (const auto& d2 : search.own2) {
      if (d1 == d2) continue;
      PairKey key = dataset::make_pair_key(d1, d2);
      if (index.pairs.find(key) != index.pairs.end()) excluded.insert(key);
    }
  }

  const std::size_t n_drugs = index.drugs.size();
  std::size_t k_cur = static_cast<std::size_t>(k);
  bool warned_exclusion = false;
  while (true) {
    const int k_eff = static_cast<int>(std::min<std::size_t>(
        std::max<std::size_t>(k_cur, 1), std::max<std::size_t>(n_drugs, 1)));
    search.nbrs1 = top_k_similar(index, fp1, k_eff);
    search.nbrs2 = top_k_similar(index, fp2, k_eff);
    search.ranked = rank_candidate_pairs(search.nbrs1, search.nbrs2, index);
    if (!excluded.empty()) {
      auto hit = std::remove_if(search.ranked.begin(), search.ranked.end(),
                                [&](const auto& cand) {
                                  return excluded.find(cand.first) != excluded.end();
                                });
      if (hit != search.ranked.end() && !warned_exclusion) {
        search.warnings.push_back(
            "query pair is present in the training index (split-protocol violation); "
            "excluded from candidates");
        warned_exclusion = true;
      }
      search.ranked.erase(hit, search.ranked.end());
    }

    if (!search.ranked.empty() || k_cur >= n_drugs) return search;
    const std::size_t k_next = std::min(n_drugs, k_cur * 2);
    search.warnings.push_back("no indexed candidate pair within k=" +
                              std::to_string(k_cur) + "; widening to k=" +
                              std::to_string(k_next));
    k_cur = k_next;
  }
}

OrientedPair orient_pair(const std::pair<PairKey, double>& candidate,
                         const std::vector<Neighbor>& nbrs1,
                         const std::vector<Neighbor>& nbrs2) {
  std::unordered_map<std::string, double> sims1, sims2;
  for (const auto& n : nbrs1) sims1[n.drug_id] = n.similarity;
  for (const auto& n : nbrs2) sims2[n.drug_id] = n.similarity;
  auto orientation_score = [&](const std::string& via1, const std::string& via2) {
    auto it1 = sims1.find(via1);
    auto it2 = sims2.find(via2);
    if (it1 == sims1.end() || it2 == sims2.end()) return -1.0;
    return it1->second * it2->second;
  };
  const PairKey& key = candidate.first;
  OrientedPair out;
  out.key = key;
  out.score = candidate.second;
  // DRUG1 maps to the member reached through query drug 1's neighbor list;
  // ties keep the canonical order (first member as DRUG1).
  const double forward = orientation_score(key.first, key.second);
  const double swapped = orientation_score(key.second, key.first);
  if (forward >= swapped) {
    out.swapped = false;
    out.sim1 = forward >= 0 ? sims1.at(key.first) : 0.0;
    out.sim2 = forward >= 0 ? sims2.at(key.second) : 0.0;
  } else {
    out.swapped = true;
    out.sim1 = sims1.at(key.second);
    out.sim2 = sims2.at(key.first);
  }
  return out;
}

PredictionResponse predict(const TrainingIndex& index, const std::string& smiles1,
                           const std::string& smiles2, int k) {
  CandidateSearch search = search_candidates(index, smiles1, smiles2, k);
  PredictionResponse response;
  response.warnings = search.warnings;

  if (!search.ranked.empty()) {
    const OrientedPair top = orient_pair(search.ranked.front(), search.nbrs1, search.nbrs2);
    const PairValue& value = index.pairs.at(top.key);
    response.label = value.label;
    response.explanation = top.swapped
                               ? dataset::swap_drug_placeholders(value.explanation)
                               : value.explanation;
    response.provenance.pair = top.key;
    response.provenance.pair_score = top.score;
    response.provenance.sim1 = top.sim1;
    response.provenance.sim2 = top.sim2;
    response.provenance.fallback = false;
    return response;
  }

  // Fallback: no training pair matched anywhere in the drug list.
  auto description_for = [&](const std::vector<std::string>& ids, const char* placeholder) {
    for (const auto& id : ids) {
      const auto& description = index.drugs.at(id).description;
      if (!description.empty()) return description;
    }
    return std::string(placeholder);
  };
  response.label = dataset::Label::Negative;
  response.explanation = dataset::negative_explanation(
      description_for(search.own1, "DRUG1"), description_for(search.own2, "DRUG2"));
  response.provenance = Provenance{};
  response.provenance.fallback = true;
  response.warnings.push_back(
      "retrieval fallback: no training pair matched; returning templated negative");
  return response;
}

std::vector<PredictionResponse> predict_batch(
    const TrainingIndex& index,
    const std::vector<std::pair<std::string, std::string>>& queries, int k,
    int n_threads) {
  std::vector<PredictionResponse> out(queries.size());
  if (n_threads <= 1 || queries.size() < 2) {
    for (std::size_t i = 0; i < queries.size(); ++i) {
      out[i] = predict(index, queries[i].first, queries[i].second, k);
    }
    return out;
  }
  const int workers = std::min<int>(n_threads, static_cast<int>(queries.size()));
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = static_cast<std::size_t>(w); i < queries.size();
           i += static_cast<std::size_t>(workers)) {
        try {
          out[i] = predict(index, queries[i].first, queries[i].second, k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace ddikit::retrieval
