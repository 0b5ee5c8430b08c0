#include "ddikit/dataset/split.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include "ddikit/common/jsonl.hpp"
#include "ddikit/common/rng.hpp"

namespace ddikit::dataset {

std::string setting_to_string(Setting s) {
  return s == Setting::Transductive ? "transductive" : "inductive";
}

Setting setting_from_string(const std::string& text) {
  if (text == "transductive") return Setting::Transductive;
  if (text == "inductive") return Setting::Inductive;
  throw std::invalid_argument("unknown setting: '" + text + "'");
}

std::string role_to_string(Role r) {
  switch (r) {
    case Role::Train: return "train";
    case Role::Val: return "val";
    case Role::Test: return "test";
    case Role::TestS1: return "test_s1";
    case Role::TestS2: return "test_s2";
    case Role::Discarded: return "discarded";
  }
  return "discarded";
}

Role role_from_string(const std::string& text) {
  if (text == "train") return Role::Train;
  if (text == "val") return Role::Val;
  if (text == "test") return Role::Test;
  if (text == "test_s1") return Role::TestS1;
  if (text == "test_s2") return Role::TestS2;
  if (text == "discarded") return Role::Discarded;
  throw std::invalid_argument("unknown role: '" + text + "'");
}

std::string bucket_to_string(Bucket b) {
  switch (b) {
    case Bucket::M1: return "M1";
    case Bucket::M2: return "M2";
    case Bucket::M3: return "M3";
  }
  return "M3";
}

Bucket bucket_from_string(const std::string& text) {
  if (text == "M1") return Bucket::M1;
  if (text == "M2") return Bucket::M2;
  if (text == "M3") return Bucket::M3;
  throw std::invalid_argument("unknown bucket: '" + text + "'");
}

std::vector<SplitAssignment> split_transductive(const std::vector<DdiRecord>& records,
                                                std::uint64_t seed, int folds) {
  if (records.empty()) throw std::invalid_argument("split_transductive: empty dataset");
  if (folds < 1 || folds > 5) {
    throw std::invalid_argument("split_transductive: folds must be in [1,5]");
  }
  const std::size_t n = records.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  const std::size_t n_val = n / 10;
  std::vector<SplitAssignment> out;
  for (int fold = 0; fold < folds; ++fold) {
    SplitAssignment a;
    a.fold = fold;
    a.setting = Setting::Transductive;
    const std::size_t lo = static_cast<std::size_t>(fold) * n / 5;
    const std::size_t hi = static_cast<std::size_t>(fold + 1) * n / 5;
    // Walk the shuffled order cyclically starting at the test tile: test
    // first, then validation, then training.
    for (std::size_t step = 0; step < n; ++step) {
      const std::size_t pos = (lo + step) % n;
      const std::size_t rec = order[pos];
      Role role;
      if (step < hi - lo) {
        role = Role::Test;
      } else if (step < hi - lo + n_val) {
        role = Role::Val;
      } else {
        role = Role::Train;
      }
      a.roles[records[rec].record_id] = role;
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<SplitAssignment> split_inductive(const std::vector<DdiRecord>& records,
                                             std::uint64_t seed, int folds) {
  if (records.empty()) throw std::invalid_argument("split_inductive: empty dataset");
  if (folds < 1) throw std::invalid_argument("split_inductive: folds must be >= 1");

  std::set<std::string> drug_set;
  for (const auto& r : records) {
    drug_set.insert(r.drug1_id);
    drug_set.insert(r.drug2_id);
  }
  std::vector<std::string> drugs(drug_set.begin(), drug_set.end());
  const std::size_t n_drugs = drugs.size();

  Rng rng(seed);
  std::vector<SplitAssignment> out;
  for (int fold = 0; fold < folds; ++fold) {
    SplitAssignment a;
    a.fold = fold;
    a.setting = Setting::Inductive;

    std::vector<std::string> shuffled = drugs;
    rng.shuffle(shuffled);
    const std::size_t m1_end = n_drugs * 75 / 100;
    const std::size_t m2_end = n_drugs * 80 / 100;
    for (std::size_t i = 0; i < n_drugs; ++i) {
      Bucket b = i < m1_end ? Bucket::M1 : (i < m2_end ? Bucket::M2 : Bucket::M3);
      a.drug_partition[shuffled[i]] = b;
    }

    for (const auto& r : records) {
      const Bucket b1 = a.drug_partition.at(r.drug1_id);
      const Bucket b2 = a.drug_partition.at(r.drug2_id);
      const Bucket lo = std::min(b1, b2);
      const Bucket hi = std::max(b1, b2);
      Role role;
      if (lo == Bucket::M1 && hi == Bucket::M1) {
        role = Role::Train;
      } else if (hi == Bucket::M2) {  // (M1,M2) or (M2,M2)
        role = Role::Val;
      } else if (lo == Bucket::M3) {  // (M3,M3)
        role = Role::TestS1;
      } else if (lo == Bucket::M1) {  // (M1,M3)
        role = Role::TestS2;
      } else {                        // (M2,M3): no defined set
        role = Role::Discarded;
      }
      a.roles[r.record_id] = role;
    }
    out.push_back(std::move(a));
  }
  return out;
}

void save_split(const std::vector<SplitAssignment>& assignments, const std::string& path,
                const std::string& config_hash, std::uint64_t seed) {
  jsonl::Writer w(path);
  jsonl::json extra;
  extra["config_hash"] = config_hash;
  extra["seed"] = seed;
  w.write(jsonl::header_record("split", extra));
  for (const auto& a : assignments) {
    for (const auto& [record_id, role] : a.roles) {
      jsonl::json row;
      row["record_id"] = record_id;
      row["fold"] = a.fold;
      row["setting"] = setting_to_string(a.setting);
      row["role"] = role_to_string(role);
      w.write(row);
    }
  }
  w.close();
}

void save_drug_partition(const std::vector<SplitAssignment>& assignments,
                         const std::string& path, const std::string& config_hash,
                         std::uint64_t seed) {
  jsonl::Writer w(path);
  jsonl::json extra;
  extra["config_hash"] = config_hash;
  extra["seed"] = seed;
  w.write(jsonl::header_record("drug_partition", extra));
  for (const auto& a : assignments) {
    for (const auto& [drug_id, bucket] : a.drug_partition) {
      jsonl::json row;
      row["drug_id"] = drug_id;
      row["fold"] = a.fold;
      row["bucket"] = bucket_to_string(bucket);
      w.write(row);
    }
  }
  w.close();
}

std::vector<SplitAssignment> load_split(const std::string& path) {
  std::map<int, SplitAssignment> by_fold;
  jsonl::for_each(path, [&](std::size_t line_no, const jsonl::json& row) {
    if (jsonl::is_header(row)) return;
    try {
      const int fold = row.at("fold").get<int>();
      auto& a = by_fold[fold];
      a.fold = fold;
      a.setting = setting_from_string(row.at("setting").get<std::string>());
      a.roles[row.at("record_id").get<std::string>()] =
          role_from_string(row.at("role").get<std::string>());
    } catch (const std::exception& e) {
      throw jsonl::IoError(path + ":" + std::to_string(line_no) + ": bad split row: " +
                           e.what());
    }
  });
  std::vector<SplitAssignment> out;
  for (auto& [fold, a] : by_fold) out.push_back(std::move(a));
  return out;
}

std::vector<DdiRecord> records_with_role(const std::vector<DdiRecord>& records,
                                         const SplitAssignment& assignment, Role role) {
  std::vector<DdiRecord> out;
  for (const auto& r : records) {
    auto it = assignment.roles.find(r.record_id);
    if (it != assignment.roles.end() && it->second == role) out.push_back(r);
  }
  return out;
}

}  // namespace ddikit::dataset
