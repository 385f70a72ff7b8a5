#include <algorithm>
#include <sstream>

#include <fmt/format.h>

#include "adaptchunk/cli.hpp"
#include "adaptchunk/error.hpp"
#include "io.hpp"

namespace adaptchunk::cli {

using nlohmann::json;

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::vector<std::string> jsonl_lines(const fs::path& path) {
  std::vector<std::string> out;
  std::istringstream in(read_file(path));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

}  // namespace

std::string histogram_svg(const std::string& title, const std::vector<double>& values, std::size_t bins) {
  if (bins == 0) throw ConfigError("histogram needs at least one bin");
  std::vector<std::size_t> counts(bins, 0);
  for (double v : values) {
    const double clamped = std::clamp(v, 0.0, 1.0);
    counts[std::min(bins - 1, static_cast<std::size_t>(clamped * static_cast<double>(bins)))]++;
  }
  const std::size_t peak = std::max<std::size_t>(1, *std::max_element(counts.begin(), counts.end()));

  constexpr double kWidth = 400, kHeight = 240, kLeft = 40, kRight = 10, kTop = 30, kBottom = 30;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const double bar_w = plot_w / static_cast<double>(bins);

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{3} (n={4})</text>\n",
      kWidth, kHeight, kWidth / 2, xml_escape(title), values.size());
  for (std::size_t b = 0; b < bins; ++b) {
    const double h = plot_h * static_cast<double>(counts[b]) / static_cast<double>(peak);
    svg += fmt::format(
        "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"#4878a8\"><title>{}</title></rect>\n",
        kLeft + bar_w * static_cast<double>(b) + 1, kTop + plot_h - h, bar_w - 2, h, counts[b]);
  }
  svg += fmt::format(
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n"
      "<line x1=\"{0}\" y1=\"{3}\" x2=\"{0}\" y2=\"{1}\" stroke=\"black\"/>\n"
      "<text x=\"{0}\" y=\"{4}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">0</text>\n"
      "<text x=\"{2}\" y=\"{4}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">1</text>\n"
      "<text x=\"{5}\" y=\"{6}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{7}</text>\n"
      "</svg>\n",
      kLeft, kTop + plot_h, kLeft + plot_w, kTop, kHeight - 10, kLeft - 4, kTop + 4, peak);
  return svg;
}

int cmd_report(const fs::path& results_dir) {
  if (!fs::is_directory(results_dir)) throw InputError("results directory " + results_dir.string() + " does not exist");
  const fs::path out_dir = results_dir / "report";

  std::vector<SizeStats> sizes;
  if (const fs::path chunks = results_dir / "chunks"; fs::is_directory(chunks)) {
    std::vector<fs::path> dirs;
    for (const auto& d : fs::directory_iterator(chunks)) {
      if (d.is_directory() && fs::exists(d.path() / "stats.json")) dirs.push_back(d.path());
    }
    std::sort(dirs.begin(), dirs.end());
    for (const auto& d : dirs) sizes.push_back(size_stats_from_json(json::parse(read_file(d / "stats.json"))));
  }

  std::vector<MetricAggregate> metrics;
  if (const fs::path scores = results_dir / "scores"; fs::is_directory(scores)) {
    std::vector<fs::path> files;
    for (const auto& f : fs::directory_iterator(scores)) {
      const std::string name = f.path().filename().string();
      if (f.is_regular_file() && name.ends_with(".jsonl")) files.push_back(f.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const std::string label = f.stem().string();
      std::vector<MetricReport> reports;
      for (const auto& line : jsonl_lines(f)) reports.push_back(metric_report_from_json(json::parse(line)));
      metrics.push_back(aggregate_reports(label, reports));
      for (const char* name : kMetricNames) {
        std::vector<double> values;
        for (const auto& r : reports) {
          if (auto v = metric_value(r, name)) values.push_back(*v);
        }
        write_file(out_dir / (label + "." + name + ".svg"), histogram_svg(label + " " + name, values));
      }
    }
  }

  std::vector<std::string> selected;
  if (const fs::path sel = results_dir / "selection" / "selection.jsonl"; fs::exists(sel)) {
    for (const auto& line : jsonl_lines(sel)) selected.push_back(json::parse(line).at("selected").get<std::string>());
  }

  const std::string tables = "Chunk sizes (tokens)\n\n" + format_size_table(sizes) + "\nIntrinsic metrics (%)\n\n" +
                             format_metric_table(metrics) + "\nAdaptive selection\n\n" +
                             format_selection_table(selection_stats(selected));
  write_file(out_dir / "tables.txt", tables);
  return kOk;
}

}  // namespace adaptchunk::cli
