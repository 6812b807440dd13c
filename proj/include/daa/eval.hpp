#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "daa/corpus.hpp"

namespace daa {

struct ClassScore {
  std::string label;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct F1Report {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<ClassScore> per_class;
};

using LabelMap = std::map<std::string, std::string>;  // document id -> label

// Micro-averaged scores over `classes`. Predictions outside the class set only
// add false negatives. Throws Error listing gold ids without a prediction.
F1Report micro_f1(const LabelMap& predictions, const LabelMap& gold,
                  std::span<const std::string> classes);

struct FrequencyTable {
  std::vector<std::string> groups;  // ascending; a single "all" row without a key
  std::vector<std::string> labels;
  std::vector<std::vector<std::int64_t>> counts;  // groups x labels

  std::int64_t at(const std::string& group, const std::string& label) const;
  std::int64_t total() const;
};

// Documents of `corpus` that have a prediction, counted by (group, label).
// Labels follow `label_order`; unseen extra labels are appended sorted.
FrequencyTable topic_frequency(const LabelMap& predictions, const Corpus& corpus,
                               std::span<const std::string> label_order,
                               const std::optional<std::string>& group_key);

}  // namespace daa
