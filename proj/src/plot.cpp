#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "grail/errors.hpp"
#include "grail/experiment.hpp"

namespace grail {

std::vector<Curve> aggregate_curves(const MetricsTable& table) {
  std::vector<std::string> order;
  std::map<std::string, std::map<int, std::vector<double>>> samples;
  for (const MetricsRow& r : table) {
    if (r.goal_id != -1 || !r.eval_performance) continue;
    if (!samples.count(r.agent)) order.push_back(r.agent);
    samples[r.agent][r.epoch].push_back(*r.eval_performance);
  }
  std::vector<Curve> curves;
  for (const std::string& agent : order) {
    Curve c;
    c.agent = agent;
    for (const auto& [epoch, xs] : samples[agent]) {
      double mean = 0.0;
      for (double x : xs) mean += x;
      mean /= static_cast<double>(xs.size());
      double var = 0.0;
      for (double x : xs) var += (x - mean) * (x - mean);
      var /= static_cast<double>(xs.size());
      c.points.push_back({epoch, mean, std::sqrt(var), static_cast<int>(xs.size())});
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

namespace {

constexpr double kWidth = 800;
constexpr double kHeight = 480;
constexpr double kLeft = 60;
constexpr double kRight = 160;
constexpr double kTop = 30;
constexpr double kBottom = 50;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                               "#9467bd", "#ff7f0e", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const MetricsTable& table,
                       const std::vector<int>& switch_epochs) {
  const std::vector<Curve> curves = aggregate_curves(table);
  if (curves.empty()) throw EmptyTable();

  int max_epoch = 1;
  for (const Curve& c : curves) {
    for (const CurvePoint& p : c.points) max_epoch = std::max(max_epoch, p.epoch);
  }
  for (int s : switch_epochs) max_epoch = std::max(max_epoch, s);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double epoch) { return kLeft + plot_w * epoch / max_epoch; };
  auto py = [&](double v) {
    return kTop + plot_h * (1.0 - std::clamp(v, 0.0, 1.0));
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
         "\" height=\"" + num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Axes, grid and ticks.
  svg += "<g class=\"axes\" stroke=\"#888\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = i / 5.0;
    svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(py(v)) + "\" x2=\"" +
           num(kLeft + plot_w) + "\" y2=\"" + num(py(v)) +
           "\" stroke=\"#eee\"/>\n";
    svg += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(py(v) + 4) +
           "\" text-anchor=\"end\" stroke=\"none\">" + num(v).substr(0, 3) +
           "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double e = max_epoch * i / 5.0;
    svg += "<text x=\"" + num(px(e)) + "\" y=\"" + num(kTop + plot_h + 18) +
           "\" text-anchor=\"middle\" stroke=\"none\">" +
           std::to_string(static_cast<int>(std::lround(e))) + "</text>\n";
  }
  svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" +
         num(plot_w) + "\" height=\"" + num(plot_h) + "\" fill=\"none\"/>\n";
  svg += "</g>\n";
  svg += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" +
         num(kHeight - 10) + "\" text-anchor=\"middle\">epoch</text>\n";
  svg += "<text transform=\"translate(16," + num(kTop + plot_h / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">eval performance</text>\n";

  for (int s : switch_epochs) {
    svg += "<line class=\"switch\" data-epoch=\"" + std::to_string(s) +
           "\" x1=\"" + num(px(s)) + "\" y1=\"" + num(kTop) + "\" x2=\"" +
           num(px(s)) + "\" y2=\"" + num(kTop + plot_h) +
           "\" stroke=\"#555\" stroke-dasharray=\"6 4\"/>\n";
  }

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const Curve& c = curves[i];
    const char* color = kColors[i % std::size(kColors)];
    std::string band;
    for (const CurvePoint& p : c.points) {
      band += num(px(p.epoch)) + "," + num(py(p.mean + p.std)) + " ";
    }
    for (auto it = c.points.rbegin(); it != c.points.rend(); ++it) {
      band += num(px(it->epoch)) + "," + num(py(it->mean - it->std)) + " ";
    }
    std::string line;
    for (const CurvePoint& p : c.points) {
      line += num(px(p.epoch)) + "," + num(py(p.mean)) + " ";
    }
    svg += "<g class=\"curve\" data-agent=\"" + escape(c.agent) + "\">\n";
    svg += "<polygon class=\"band\" points=\"" + band + "\" fill=\"" + color +
           "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    svg += "<polyline class=\"mean\" points=\"" + line +
           "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
    const double ly = kTop + 10 + 20.0 * static_cast<double>(i);
    svg += "<line x1=\"" + num(kLeft + plot_w + 15) + "\" y1=\"" + num(ly) +
           "\" x2=\"" + num(kLeft + plot_w + 35) + "\" y2=\"" + num(ly) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text class=\"label\" x=\"" + num(kLeft + plot_w + 40) + "\" y=\"" +
           num(ly + 4) + "\">" + escape(c.agent) + "</text>\n";
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void plot(const MetricsTable& table, const std::string& path,
          const std::vector<int>& switch_epochs) {
  const std::string svg = render_svg(table, switch_epochs);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << svg;
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace grail
