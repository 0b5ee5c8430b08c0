#pragma once

// Cross-validation splits.
//
// Transductive: one seeded shuffle of the records; the test window is a
// rotating 20% tile (5-way tiling), the next 10% (cyclically) is validation,
// the remaining 70% is training. The five test tiles are pairwise disjoint
// and cover the dataset.
//
// Inductive: per fold, drugs are shuffled and partitioned into buckets
// M1/M2/M3 at 0.75/0.05/0.2. Records are assigned by membership of their two
// drugs: (M1,M1) train; (M1,M2) or (M2,M2) val; (M3,M3) test_s1 (both drugs
// unseen); (M1,M3) test_s2 (one drug unseen); (M2,M3) discarded.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ddikit/dataset/record.hpp"

namespace ddikit::dataset {

enum class Setting { Transductive, Inductive };

enum class Role { Train, Val, Test, TestS1, TestS2, Discarded };

enum class Bucket { M1, M2, M3 };

std::string setting_to_string(Setting s);
Setting setting_from_string(const std::string& text);  // throws std::invalid_argument
std::string role_to_string(Role r);
Role role_from_string(const std::string& text);  // throws std::invalid_argument
std::string bucket_to_string(Bucket b);
Bucket bucket_from_string(const std::string& text);  // throws std::invalid_argument

struct SplitAssignment {
  int fold = 0;
  Setting setting = Setting::Transductive;
  std::map<std::string, Role> roles;             // record_id -> role
  std::map<std::string, Bucket> drug_partition;  // drug_id -> bucket (inductive only)
};

// Builds `folds` transductive assignments (folds must be in [1,5]; the test
// tiles come from a fixed 5-way tiling, so more than 5 disjoint folds do not
// exist at the 20% ratio).
std::vector<SplitAssignment> split_transductive(const std::vector<DdiRecord>& records,
                                                std::uint64_t seed, int folds = 5);

// Builds `folds` (>= 1) inductive assignments.
std::vector<SplitAssignment> split_inductive(const std::vector<DdiRecord>& records,
                                             std::uint64_t seed, int folds = 5);

// File I/O. The split file holds {record_id, fold, setting, role} lines; the
// drug partition file holds {drug_id, fold, bucket} lines. Both start with a
// header record.
void save_split(const std::vector<SplitAssignment>& assignments, const std::string& path,
                const std::string& config_hash, std::uint64_t seed);
void save_drug_partition(const std::vector<SplitAssignment>& assignments,
                         const std::string& path, const std::string& config_hash,
                         std::uint64_t seed);
std::vector<SplitAssignment> load_split(const std::string& path);

// Convenience: records of one role within one assignment, in input order.
std::vector<DdiRecord> records_with_role(const std::vector<DdiRecord>& records,
                                         const SplitAssignment& assignment, Role role);

}  // namespace ddikit::dataset
