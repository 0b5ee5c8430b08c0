#pragma once

// Similarity-retrieval prediction: fingerprint both query drugs, take the
// top-k Tanimoto neighbors of each from the index's drug table, form the k^2
// cross pairs scored by the product of the two neighbor similarities, keep
// only pairs present in the index's pair table, re-rank, and answer with the
// top pair's label and explanation.
//
// When no candidate pair survives the filter, k is doubled repeatedly up to
// the full drug list; if the candidate set is still empty, the response is a
// templated negative with the fallback flag set.

#include <cstdint>
#include <string>
#include <vector>

#include "ddikit/retrieval/index.hpp"

namespace ddikit::retrieval {

struct Neighbor {
  std::string drug_id;
  double similarity = 0.0;  // Tanimoto, in [0,1]
};

struct Provenance {
  PairKey pair;            // empty ids on the fallback path
  double pair_score = 0.0; // product of the two member similarities
  double sim1 = 0.0;       // similarity of query drug 1 to its matched member
  double sim2 = 0.0;       // similarity of query drug 2 to its matched member
  bool fallback = false;   // true iff no training pair matched
};

struct PredictionResponse {
  dataset::Label label = dataset::Label::Negative;
  std::string explanation;  // DRUG1/DRUG2 remapped to the query orientation
  Provenance provenance;
  std::vector<std::string> warnings;
};

// Exact flat scan over the drug table. Descending similarity, ties broken by
// ascending drug id; fewer than k drugs yields a shorter list.
std::vector<Neighbor> top_k_similar(const TrainingIndex& index,
                                    const fp::Fingerprint& query, int k);

// Cross pairs of the two neighbor lists, scored sim1*sim2, canonicalized,
// deduplicated keeping the higher-scoring orientation, filtered to pairs in
// index.pairs, same-drug pairs excluded, sorted by score descending with
// ties by ascending canonical key.
std::vector<std::pair<PairKey, double>> rank_candidate_pairs(
    const std::vector<Neighbor>& nbrs1, const std::vector<Neighbor>& nbrs2,
    const TrainingIndex& index);

// Building block shared by predict and demonstration selection: runs the
// neighbor search and candidate ranking, widening k (doubling, capped at the
// drug-table size) only while the filtered candidate list is empty. `ranked`
// is the first non-empty ranking, or empty when even the full drug list
// yields no candidate. The query's own pair key (recognized by exact SMILES
// identity with indexed drugs) is excluded with a warning. Throws
// IndexError(UnparseableSmiles) when a query SMILES fails to parse.
struct CandidateSearch {
  std::vector<std::pair<PairKey, double>> ranked;
  std::vector<Neighbor> nbrs1, nbrs2;  // neighbor lists at the final k
  std::vector<std::string> own1, own2; // indexed drugs whose SMILES equal the query's
  std::vector<std::string> warnings;
};
CandidateSearch search_candidates(const TrainingIndex& index, const std::string& smiles1,
                                  const std::string& smiles2, int k);

// Resolves a ranked candidate's orientation: DRUG1 maps to the member
// reached through query drug 1's neighbor list, ties keeping the canonical
// order. `swapped` is true when DRUG1 maps to the canonical-second member.
struct OrientedPair {
  PairKey key;
  double score = 0.0;
  double sim1 = 0.0;
  double sim2 = 0.0;
  bool swapped = false;
};
OrientedPair orient_pair(const std::pair<PairKey, double>& candidate,
                         const std::vector<Neighbor>& nbrs1,
                         const std::vector<Neighbor>& nbrs2);

// Full pipeline for one query pair of SMILES strings. Throws
// IndexError(UnparseableSmiles) when a query SMILES fails to parse. If the
// query's own pair key is present in the index (a split-protocol violation),
// it is excluded from the candidates and a warning is recorded.
PredictionResponse predict(const TrainingIndex& index, const std::string& smiles1,
                           const std::string& smiles2, int k = 50);

// Batch prediction; output order matches input order. n_threads <= 1 runs
// sequentially.
std::vector<PredictionResponse> predict_batch(
    const TrainingIndex& index,
    const std::vector<std::pair<std::string, std::string>>& queries, int k = 50,
    int n_threads = 1);

}  // namespace ddikit::retrieval
