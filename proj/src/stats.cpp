#include "adaptchunk/stats.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "adaptchunk/error.hpp"
#include "adaptchunk/unicode.hpp"

namespace adaptchunk {

using nlohmann::json;

Moments moments(const std::vector<double>& values) {
  Moments m;
  m.n = values.size();
  if (m.n == 0) return m;
  double sum = 0;
  for (double v : values) sum += v;
  m.mean = sum / static_cast<double>(m.n);
  double sq = 0;
  for (double v : values) sq += (v - m.mean) * (v - m.mean);
  m.stddev = std::sqrt(sq / static_cast<double>(m.n));
  return m;
}

SizeStats size_stats(std::string method, const std::vector<Chunking>& chunkings, double seconds) {
  SizeStats s;
  s.method = std::move(method);
  s.seconds = seconds;
  std::vector<double> sizes;
  for (const auto& c : chunkings) {
    for (const auto& ch : c.chunks) sizes.push_back(static_cast<double>(ch.token_count));
  }
  s.chunks = sizes.size();
  if (sizes.empty()) return s;
  const auto m = moments(sizes);
  s.mean = m.mean;
  s.stddev = m.stddev;
  s.min = static_cast<std::size_t>(*std::min_element(sizes.begin(), sizes.end()));
  s.max = static_cast<std::size_t>(*std::max_element(sizes.begin(), sizes.end()));
  return s;
}

MetricAggregate aggregate_reports(std::string method, const std::vector<MetricReport>& reports) {
  MetricAggregate a;
  a.method = std::move(method);
  a.documents = reports.size();
  double sum = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    std::vector<double> values;
    for (const auto& r : reports) {
      if (auto v = metric_value(r, kMetricNames[i])) values.push_back(*v);
    }
    a.metrics[i] = moments(values);
    if (!values.empty()) {
      sum += a.metrics[i].mean;
      ++n;
    }
  }
  if (n) a.mean = sum / static_cast<double>(n);
  return a;
}

nlohmann::ordered_json to_json(const SizeStats& s) {
  return {{"method", s.method}, {"mean", s.mean},     {"max", s.max},   {"min", s.min},
          {"std", s.stddev},    {"chunks", s.chunks}, {"time_s", s.seconds}};
}

SizeStats size_stats_from_json(const json& j) {
  try {
    return {j.at("method").get<std::string>(), j.at("mean").get<double>(), j.at("max").get<std::size_t>(),
            j.at("min").get<std::size_t>(),    j.at("std").get<double>(),  j.at("chunks").get<std::size_t>(),
            j.at("time_s").get<double>()};
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed chunk statistics: ") + e.what());
  }
}

nlohmann::ordered_json to_json(const MetricAggregate& a) {
  nlohmann::ordered_json j = {{"method", a.method}, {"documents", a.documents}};
  for (std::size_t i = 0; i < 5; ++i) {
    const auto& m = a.metrics[i];
    j[kMetricNames[i]] = m.n ? nlohmann::ordered_json{{"mean", m.mean}, {"std", m.stddev}, {"n", m.n}}
                             : nlohmann::ordered_json(nullptr);
  }
  j["mean"] = a.mean ? nlohmann::ordered_json(*a.mean) : nlohmann::ordered_json(nullptr);
  return j;
}

MetricAggregate metric_aggregate_from_json(const json& j) {
  try {
    MetricAggregate a;
    a.method = j.at("method").get<std::string>();
    a.documents = j.at("documents").get<std::size_t>();
    for (std::size_t i = 0; i < 5; ++i) {
      const auto& m = j.at(kMetricNames[i]);
      if (!m.is_null()) a.metrics[i] = {m.at("n").get<std::size_t>(), m.at("mean").get<double>(), m.at("std").get<double>()};
    }
    if (!j.at("mean").is_null()) a.mean = j.at("mean").get<double>();
    return a;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed metric aggregate: ") + e.what());
  }
}

namespace {

// Left-aligned first column, right-aligned others; widths in characters.
std::string render(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size(), 0);
  auto fit = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], utf8_length(r[i]));
  };
  fit(header);
  for (const auto& r : rows) fit(r);

  auto line = [&](const std::vector<std::string>& r) {
    std::string out;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const std::string pad(width[i] - utf8_length(r[i]), ' ');
      if (i == 0) {
        out += r[i] + pad;
      } else {
        out += "  " + pad + r[i];
      }
    }
    return out + "\n";
  };
  std::size_t total = 0;
  for (auto w : width) total += w;
  total += 2 * (width.size() - 1);
  const std::string rule(total, '-');

  std::string out = line(header) + rule + "\n";
  for (const auto& r : rows) out += line(r);
  return out;
}

std::string percent_cell(const Moments& m) {
  if (m.n == 0) return "n/a";
  return fmt::format("{:.1f} ± {:.1f}", 100.0 * m.mean, 100.0 * m.stddev);
}

}  // namespace

std::string format_size_table(const std::vector<SizeStats>& rows) {
  std::vector<std::vector<std::string>> cells;
  for (const auto& s : rows) {
    cells.push_back({s.method, fmt::format("{:.0f}", s.mean), std::to_string(s.max), std::to_string(s.min),
                     fmt::format("{:.0f}", s.stddev), std::to_string(s.chunks), fmt::format("{:.2f}", s.seconds)});
  }
  return render({"method", "mean", "max", "min", "std", "#chunks", "time [s]"}, cells);
}

std::string format_metric_table(const std::vector<MetricAggregate>& rows) {
  std::vector<std::vector<std::string>> cells;
  for (const auto& a : rows) {
    std::vector<std::string> r{a.method};
    for (const auto& m : a.metrics) r.push_back(percent_cell(m));
    r.push_back(a.mean ? fmt::format("{:.2f}", 100.0 * *a.mean) : "n/a");
    cells.push_back(std::move(r));
  }
  return render({"method", "RC", "ICC", "DCC", "BI", "SC", "mean"}, cells);
}

std::string format_selection_table(const std::vector<SelectionRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) cells.push_back({r.method, std::to_string(r.percent)});
  return render({"selected method", "% selection"}, cells);
}

}  // namespace adaptchunk
