#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace percolab {

struct Metric {
  double value = 0.0;
  std::optional<double> ci_lo;
  std::optional<double> ci_hi;
};

struct ResultRecord {
  std::string experiment;
  std::string config_hash;
  std::string timestamp;
  std::map<std::string, Metric> metrics;
  std::vector<std::string> artifacts;

  void put(const std::string& name, double value) { metrics[name] = Metric{value, {}, {}}; }
  void put(const std::string& name, double value, double lo, double hi) {
    metrics[name] = Metric{value, lo, hi};
  }
};

std::string record_to_json(const ResultRecord& rec);
ResultRecord record_from_json(const std::string& text);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Minimal line plot: polylines with axis ticks, no external renderer.
struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
};
std::string svg_line_plot(const std::string& title, const std::vector<SvgSeries>& series);

}  // namespace percolab
