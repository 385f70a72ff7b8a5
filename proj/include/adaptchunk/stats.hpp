#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "adaptchunk/document.hpp"
#include "adaptchunk/metrics.hpp"
#include "adaptchunk/selector.hpp"

namespace adaptchunk {

// Population mean and standard deviation.
struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

Moments moments(const std::vector<double>& values);

// Chunk sizes in tokens over a whole corpus run plus chunking wall time.
struct SizeStats {
  std::string method;
  double mean = 0.0;
  std::size_t max = 0;
  std::size_t min = 0;
  double stddev = 0.0;
  std::size_t chunks = 0;
  double seconds = 0.0;
};

SizeStats size_stats(std::string method, const std::vector<Chunking>& chunkings, double seconds);

// Per-metric moments over the documents where the metric applies, and the
// average of those per-metric means.
struct MetricAggregate {
  std::string method;
  std::size_t documents = 0;
  std::array<Moments, 5> metrics;  // in kMetricNames order
  std::optional<double> mean;
};

MetricAggregate aggregate_reports(std::string method, const std::vector<MetricReport>& reports);

nlohmann::ordered_json to_json(const SizeStats& s);
SizeStats size_stats_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const MetricAggregate& a);
MetricAggregate metric_aggregate_from_json(const nlohmann::json& j);

// Aligned plain-text tables.
std::string format_size_table(const std::vector<SizeStats>& rows);
// Values as "98.0 ± 2.9" in percent, mean column with two decimals.
std::string format_metric_table(const std::vector<MetricAggregate>& rows);
std::string format_selection_table(const std::vector<SelectionRow>& rows);

}  // namespace adaptchunk
