#include "ddikit/dataset/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>
#include <string_view>

#include "ddikit/common/rng.hpp"

namespace ddikit::dataset {

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0; }

char lower(unsigned char c) { return static_cast<char>(std::tolower(c)); }

// Case-insensitive comparison of text[pos, pos+name.size()) against name.
bool matches_at(const std::string& text, std::size_t pos, const std::string& name) {
  if (pos + name.size() > text.size()) return false;
  for (std::size_t i = 0; i < name.size(); ++i) {
    if (lower(static_cast<unsigned char>(text[pos + i])) !=
        lower(static_cast<unsigned char>(name[i]))) {
      return false;
    }
  }
  // Whole-word: the char before and after must not be word characters.
  if (pos > 0 && is_word_char(static_cast<unsigned char>(text[pos - 1]))) return false;
  std::size_t end = pos + name.size();
  if (end < text.size() && is_word_char(static_cast<unsigned char>(text[end]))) return false;
  return true;
}

std::string trim(const std::string& s) {
  std::size_t begin = 0, end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

}  // namespace

std::string mask_drug_names(const std::string& explanation,
                            const std::vector<std::string>& names1,
                            const std::vector<std::string>& names2) {
  struct Candidate {
    std::string name;
    const char* target;
  };
  std::vector<Candidate> candidates;
  for (const auto& n : names1) {
    if (!trim(n).empty()) candidates.push_back({trim(n), "DRUG1"});
  }
  for (const auto& n : names2) {
    if (!trim(n).empty()) candidates.push_back({trim(n), "DRUG2"});
  }
  // Longer names first so "Vitamin A" wins over "Vitamin"; name then target
  // for a deterministic order among equal lengths.
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.name.size() != b.name.size()) return a.name.size() > b.name.size();
    if (a.name != b.name) return a.name < b.name;
    return std::string_view(a.target) < std::string_view(b.target);
  });
  if (candidates.empty()) return explanation;

  std::string out;
  out.reserve(explanation.size());
  std::size_t pos = 0;
  while (pos < explanation.size()) {
    const Candidate* hit = nullptr;
    for (const auto& c : candidates) {
      if (matches_at(explanation, pos, c.name)) {
        hit = &c;
        break;
      }
    }
    if (hit != nullptr) {
      out += hit->target;
      pos += hit->name.size();
    } else {
      out += explanation[pos];
      ++pos;
    }
  }
  return out;
}

std::string swap_drug_placeholders(const std::string& masked) {
  std::string out;
  out.reserve(masked.size());
  std::size_t pos = 0;
  while (pos < masked.size()) {
    if (masked.compare(pos, 5, "DRUG1") == 0) {
      out += "DRUG2";
      pos += 5;
    } else if (masked.compare(pos, 5, "DRUG2") == 0) {
      out += "DRUG1";
      pos += 5;
    } else {
      out += masked[pos];
      ++pos;
    }
  }
  return out;
}

std::string negative_explanation(const std::string& def1, const std::string& def2) {
  const std::string a = trim(def1);
  const std::string b = trim(def2);
  if (a.empty() || b.empty()) {
    throw DatasetError(DatasetErrorKind::EmptyDefinition,
                       "negative_explanation requires non-empty drug definitions");
  }
  auto dotted = [](const std::string& s) {
    return s.back() == '.' ? s : s + ".";
  };
  return dotted(a) + " " + dotted(b) +
         " There were no known direct interactions reported between them.";
}

std::string build_target_sequence(Label label, const std::string& explanation) {
  return "<s> " + label_to_string(label) + " Explanation: " + explanation + " </s>";
}

void mask_all(std::vector<DdiRecord>& records) {
  for (auto& r : records) {
    r.explanation = mask_drug_names(r.explanation, r.drug1_names, r.drug2_names);
  }
}

std::vector<DdiRecord> sample_negatives(const std::vector<DdiRecord>& positives,
                                        const std::vector<DrugInfo>& pool,
                                        std::uint64_t seed,
                                        std::size_t count) {
  if (count == 0) count = positives.size();
  const std::size_t n = pool.size();
  std::set<PairKey> taken;
  for (const auto& r : positives) taken.insert(pair_key_of(r));

  const std::size_t total_pairs = n * (n - 1) / 2;
  // Positive keys over drugs outside the pool do not consume pool pairs, so
  // count only keys whose both members are pool drugs.
  std::set<std::string> pool_ids;
  for (const auto& d : pool) pool_ids.insert(d.id);
  std::size_t blocked = 0;
  for (const auto& key : taken) {
    if (pool_ids.count(key.first) != 0 && pool_ids.count(key.second) != 0) ++blocked;
  }
  if (total_pairs < blocked || total_pairs - blocked < count) {
    throw DatasetError(DatasetErrorKind::PoolExhausted,
                       "negative sampling needs " + std::to_string(count) +
                           " pairs but only " + std::to_string(total_pairs - blocked) +
                           " are eligible");
  }
  const std::size_t eligible = total_pairs - blocked;

  Rng rng(seed);
  std::vector<std::pair<std::size_t, std::size_t>> chosen;
  chosen.reserve(count);

  if (eligible <= 2 * count || total_pairs <= 200000) {
    // Dense regime: enumerate eligible pairs and take a shuffled prefix.
    std::vector<std::pair<std::size_t, std::size_t>> all;
    all.reserve(eligible);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (taken.count(make_pair_key(pool[i].id, pool[j].id)) == 0) all.emplace_back(i, j);
      }
    }
    rng.shuffle(all);
    chosen.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count));
  } else {
    // Sparse regime: rejection sampling stays uniform and fast.
    while (chosen.size() < count) {
      std::size_t i = static_cast<std::size_t>(rng.below(n));
      std::size_t j = static_cast<std::size_t>(rng.below(n));
      if (i == j) continue;
      if (i > j) std::swap(i, j);
      PairKey key = make_pair_key(pool[i].id, pool[j].id);
      if (!taken.insert(key).second) continue;
      chosen.emplace_back(i, j);
    }
  }

  std::vector<DdiRecord> negatives;
  negatives.reserve(count);
  for (std::size_t idx = 0; idx < chosen.size(); ++idx) {
    const DrugInfo* d1 = &pool[chosen[idx].first];
    const DrugInfo* d2 = &pool[chosen[idx].second];
    if (d2->id < d1->id) std::swap(d1, d2);
    DdiRecord r;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "N%06zu", idx + 1);
    r.record_id = buf;
    r.drug1_id = d1->id;
    r.drug2_id = d2->id;
    r.smiles1 = d1->smiles;
    r.smiles2 = d2->smiles;
    r.drug1_names = d1->names;
    r.drug2_names = d2->names;
    r.drug1_def = d1->def;
    r.drug2_def = d2->def;
    r.label = Label::Negative;
    r.explanation = negative_explanation(d1->def, d2->def);
    r.source = Source::Synthetic;
    negatives.push_back(std::move(r));
  }
  return negatives;
}

}  // namespace ddikit::dataset
