#pragma once

// Explanation preprocessing: drug-name masking, the negative-explanation
// template, the generation target format, and balanced negative sampling.

#include <cstdint>
#include <string>
#include <vector>

#include "ddikit/dataset/record.hpp"

namespace ddikit::dataset {

// Replaces case-insensitive whole-word occurrences of any name in names1
// with "DRUG1" and any name in names2 with "DRUG2". Matching is literal
// (multi-word names allowed), leftmost with longer names tried first so a
// name that contains another is not shadowed. Idempotent.
std::string mask_drug_names(const std::string& explanation,
                            const std::vector<std::string>& names1,
                            const std::vector<std::string>& names2);

// Swaps DRUG1 and DRUG2 placeholders in a masked explanation.
std::string swap_drug_placeholders(const std::string& masked);

// "<def1>. <def2>. There were no known direct interactions reported between
// them." A definition already ending in '.' is not double-dotted. Throws
// DatasetError(EmptyDefinition) when a definition is empty after trimming.
std::string negative_explanation(const std::string& def1, const std::string& def2);

// "<s> {label} Explanation: {explanation} </s>"
std::string build_target_sequence(Label label, const std::string& explanation);

// Applies mask_drug_names to every record's explanation in place.
void mask_all(std::vector<DdiRecord>& records);

// Samples `count` (default: positives.size()) negative records over the
// drug pool, avoiding the positive pair keys and each other. Explanations
// are filled via negative_explanation; ids are "N000001", ... Deterministic
// under seed. Throws DatasetError(PoolExhausted) when fewer than `count`
// eligible pairs exist.
std::vector<DdiRecord> sample_negatives(const std::vector<DdiRecord>& positives,
                                        const std::vector<DrugInfo>& pool,
                                        std::uint64_t seed,
                                        std::size_t count = 0);

}  // namespace ddikit::dataset
