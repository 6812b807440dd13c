#include "daa/eval.hpp"

#include <algorithm>
#include <set>

#include "daa/error.hpp"

namespace daa {

namespace {

double ratio(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

}  // namespace

F1Report micro_f1(const LabelMap& predictions, const LabelMap& gold, std::span<const std::string> classes) {
  std::vector<std::string> missing;
  for (const auto& [id, label] : gold) {
    if (!predictions.contains(id)) missing.push_back(id);
  }
  if (!missing.empty()) {
    std::string msg = "no prediction for gold ids:";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += " " + missing[i];
    if (missing.size() > 20) msg += " ... (" + std::to_string(missing.size()) + " total)";
    throw Error(msg);
  }

  F1Report report;
  std::map<std::string, std::size_t> index;
  for (const auto& c : classes) {
    if (index.emplace(c, report.per_class.size()).second) report.per_class.push_back({.label = c});
  }
  for (const auto& [id, truth] : gold) {
    const auto gold_it = index.find(truth);
    if (gold_it == index.end()) throw Error("gold label '" + truth + "' of " + id + " is not a class");
    const std::string& pred = predictions.at(id);
    if (pred == truth) {
      ++report.per_class[gold_it->second].tp;
      continue;
    }
    ++report.per_class[gold_it->second].fn;
    if (auto pred_it = index.find(pred); pred_it != index.end()) ++report.per_class[pred_it->second].fp;
  }

  std::int64_t tp = 0, fp = 0, fn = 0;
  for (auto& c : report.per_class) {
    c.precision = ratio(c.tp, c.tp + c.fp);
    c.recall = ratio(c.tp, c.tp + c.fn);
    c.f1 = harmonic(c.precision, c.recall);
    tp += c.tp;
    fp += c.fp;
    fn += c.fn;
  }
  report.precision = ratio(tp, tp + fp);
  report.recall = ratio(tp, tp + fn);
  report.f1 = harmonic(report.precision, report.recall);
  return report;
}

std::int64_t FrequencyTable::at(const std::string& group, const std::string& label) const {
  const auto g = std::find(groups.begin(), groups.end(), group);
  const auto l = std::find(labels.begin(), labels.end(), label);
  if (g == groups.end() || l == labels.end()) return 0;
  return counts[static_cast<std::size_t>(g - groups.begin())][static_cast<std::size_t>(l - labels.begin())];
}

std::int64_t FrequencyTable::total() const {
  std::int64_t sum = 0;
  for (const auto& row : counts) {
    for (auto c : row) sum += c;
  }
  return sum;
}

FrequencyTable topic_frequency(const LabelMap& predictions, const Corpus& corpus,
                               std::span<const std::string> label_order,
                               const std::optional<std::string>& group_key) {
  std::vector<std::string> missing;
  std::set<std::string> groups;
  std::set<std::string> extra_labels;
  const std::set<std::string> known(label_order.begin(), label_order.end());
  for (const auto& doc : corpus.documents) {
    const auto pred = predictions.find(doc.id);
    if (pred == predictions.end()) continue;
    if (!known.contains(pred->second)) extra_labels.insert(pred->second);
    if (!group_key) continue;
    const auto meta = doc.metadata.find(*group_key);
    if (meta == doc.metadata.end()) {
      missing.push_back(doc.id);
    } else {
      groups.insert(meta->second);
    }
  }
  if (!missing.empty()) {
    std::string msg = "metadata key '" + *group_key + "' missing for ids:";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += " " + missing[i];
    if (missing.size() > 20) msg += " ... (" + std::to_string(missing.size()) + " total)";
    throw Error(msg);
  }

  FrequencyTable table;
  table.labels.assign(label_order.begin(), label_order.end());
  table.labels.insert(table.labels.end(), extra_labels.begin(), extra_labels.end());
  if (group_key) {
    table.groups.assign(groups.begin(), groups.end());
  } else {
    table.groups = {"all"};
  }
  table.counts.assign(table.groups.size(), std::vector<std::int64_t>(table.labels.size(), 0));
  std::map<std::string, std::size_t> label_index, group_index;
  for (std::size_t i = 0; i < table.labels.size(); ++i) label_index.emplace(table.labels[i], i);
  for (std::size_t i = 0; i < table.groups.size(); ++i) group_index.emplace(table.groups[i], i);
  for (const auto& doc : corpus.documents) {
    const auto pred = predictions.find(doc.id);
    if (pred == predictions.end()) continue;
    const std::size_t g = group_key ? group_index.at(doc.metadata.at(*group_key)) : 0;
    ++table.counts[g][label_index.at(pred->second)];
  }
  return table;
}

}  // namespace daa
