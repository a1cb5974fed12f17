#include "percolab/record.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "percolab/errors.hpp"

namespace percolab {

std::string record_to_json(const ResultRecord& rec) {
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& [name, m] : rec.metrics) {
    nlohmann::json jm{{"value", m.value}};
    if (m.ci_lo) jm["ci_lo"] = *m.ci_lo;
    if (m.ci_hi) jm["ci_hi"] = *m.ci_hi;
    metrics[name] = jm;
  }
  nlohmann::json j{{"experiment", rec.experiment},
                   {"config_hash", rec.config_hash},
                   {"timestamp", rec.timestamp},
                   {"metrics", metrics},
                   {"artifacts", rec.artifacts}};
  return j.dump(2);
}

ResultRecord record_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ResultRecord rec;
  rec.experiment = j.at("experiment").get<std::string>();
  rec.config_hash = j.at("config_hash").get<std::string>();
  rec.timestamp = j.value("timestamp", "");
  for (const auto& [name, jm] : j.at("metrics").items()) {
    Metric m;
    m.value = jm.at("value").get<double>();
    if (jm.contains("ci_lo")) m.ci_lo = jm.at("ci_lo").get<double>();
    if (jm.contains("ci_hi")) m.ci_hi = jm.at("ci_hi").get<double>();
    rec.metrics[name] = m;
  }
  for (const auto& a : j.at("artifacts")) rec.artifacts.push_back(a.get<std::string>());
  return rec;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw NoResults("cannot write " + path);
  f << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw NoResults("cannot read " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::string svg_line_plot(const std::string& title, const std::vector<SvgSeries>& series) {
  const double W = 640.0, H = 420.0, ml = 60.0, mr = 20.0, mt = 30.0, mb = 45.0;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!(xmin < xmax)) xmax = xmin + 1.0;
  if (!(ymin < ymax)) ymax = ymin + 1.0;
  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  char buf[256];
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" "
        "viewBox=\"0 0 640 420\">\n";
  os << "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
  os << "<text x=\"320\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
     << "</text>\n";
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                ml, H - mb, W - mr, H - mb);
  os << buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                ml, mt, ml, H - mb);
  os << buf;
  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 4.0;
    const double fy = ymin + (ymax - ymin) * i / 4.0;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" font-size=\"10\">%.4g"
                  "</text>\n",
                  px(fx), H - mb + 15.0, fx);
    os << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" font-size=\"10\">%.4g"
                  "</text>\n",
                  ml - 5.0, py(fy) + 3.0, fy);
    os << buf;
  }
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    os << "<polyline fill=\"none\" stroke=\"" << colors[si % 5] << "\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(s.x[i]), py(s.y[i]));
      os << buf;
    }
    os << "\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" fill=\"%s\">%s</text>\n",
                  W - mr - 120.0, mt + 16.0 * (si + 1), colors[si % 5], s.label.c_str());
    os << buf;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace percolab
