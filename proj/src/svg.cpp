#include "detcal/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace detcal::svg {

namespace {

constexpr double kWidth = 480.0;
constexpr double kHeight = 360.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

class Canvas {
 public:
  Canvas(double x_lo, double x_hi, double y_lo, double y_hi) : x_lo_(x_lo), x_hi_(x_hi), y_lo_(y_lo), y_hi_(y_hi) {
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kWidth) << "\" height=\"" << fmt(kHeight)
         << "\" viewBox=\"0 0 " << fmt(kWidth) << ' ' << fmt(kHeight) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out_ << "<rect x=\"0\" y=\"0\" width=\"" << fmt(kWidth) << "\" height=\"" << fmt(kHeight)
         << "\" fill=\"white\"/>\n";
  }

  double px(double x) const { return kLeft + (x - x_lo_) / (x_hi_ - x_lo_) * kPlotW; }
  double py(double y) const { return kTop + kPlotH - (y - y_lo_) / (y_hi_ - y_lo_) * kPlotH; }

  void rect(double x0, double y0, double x1, double y1, const std::string& style) {
    const double a = px(std::min(x0, x1)), b = px(std::max(x0, x1));
    const double c = py(std::max(y0, y1)), d = py(std::min(y0, y1));
    out_ << "<rect x=\"" << fmt(a) << "\" y=\"" << fmt(c) << "\" width=\"" << fmt(b - a) << "\" height=\""
         << fmt(d - c) << "\" " << style << "/>\n";
  }

  void line(double x0, double y0, double x1, double y1, const std::string& style) {
    out_ << "<line x1=\"" << fmt(px(x0)) << "\" y1=\"" << fmt(py(y0)) << "\" x2=\"" << fmt(px(x1)) << "\" y2=\""
         << fmt(py(y1)) << "\" " << style << "/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& style) {
    out_ << "<polyline points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      out_ << (i ? " " : "") << fmt(px(pts[i].first)) << ',' << fmt(py(pts[i].second));
    }
    out_ << "\" fill=\"none\" " << style << "/>\n";
  }

  void polygon(const std::vector<std::pair<double, double>>& pts, const std::string& style) {
    out_ << "<polygon points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      out_ << (i ? " " : "") << fmt(px(pts[i].first)) << ',' << fmt(py(pts[i].second));
    }
    out_ << "\" " << style << "/>\n";
  }

  void circle(double x, double y, double r, const std::string& style) {
    out_ << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"" << fmt(r) << "\" " << style
         << "/>\n";
  }

  void text_px(double x, double y, const std::string& s, const std::string& anchor = "middle") {
    out_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" text-anchor=\"" << anchor << "\">" << escape(s)
         << "</text>\n";
  }

  void frame(const std::string& title, const std::string& x_label, const std::string& y_label,
             const std::vector<double>& x_ticks, const std::vector<std::string>& x_tick_labels, int y_ticks) {
    out_ << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(kPlotW) << "\" height=\""
         << fmt(kPlotH) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (std::size_t i = 0; i < x_ticks.size(); ++i) {
      const double x = px(x_ticks[i]);
      out_ << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(kTop + kPlotH) << "\" x2=\"" << fmt(x) << "\" y2=\""
           << fmt(kTop + kPlotH + 4) << "\" stroke=\"black\"/>\n";
      text_px(x, kTop + kPlotH + 16, x_tick_labels[i]);
    }
    for (int i = 0; i <= y_ticks; ++i) {
      const double v = y_lo_ + (y_hi_ - y_lo_) * i / y_ticks;
      const double y = py(v);
      out_ << "<line x1=\"" << fmt(kLeft - 4) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(kLeft) << "\" y2=\""
           << fmt(y) << "\" stroke=\"black\"/>\n";
      text_px(kLeft - 6, y + 4, fmt(v), "end");
    }
    text_px(kWidth / 2, 22, title);
    text_px(kLeft + kPlotW / 2, kHeight - 12, x_label);
    out_ << "<text x=\"16\" y=\"" << fmt(kTop + kPlotH / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
         << fmt(kTop + kPlotH / 2) << ")\">" << escape(y_label) << "</text>\n";
  }

  void legend(const std::vector<std::pair<std::string, std::string>>& entries) {
    double y = kTop + 14;
    for (const auto& [label, color] : entries) {
      out_ << "<rect x=\"" << fmt(kLeft + 10) << "\" y=\"" << fmt(y - 9) << "\" width=\"10\" height=\"10\" fill=\""
           << color << "\"/>\n";
      text_px(kLeft + 26, y, label, "start");
      y += 16;
    }
  }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  double x_lo_, x_hi_, y_lo_, y_hi_;
  std::ostringstream out_;
};

std::vector<double> unit_ticks() { return {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}; }

std::vector<std::string> labels(const std::vector<double>& ticks) {
  std::vector<std::string> out;
  for (double t : ticks) out.push_back(fmt(t));
  return out;
}

}  // namespace

std::string reliability_diagram(const ReliabilityProfile& profile, const std::string& title) {
  Canvas c(0.0, 1.0, 0.0, 1.0);
  const auto ticks = unit_ticks();
  c.frame(title, "confidence", "precision", ticks, labels(ticks), 5);
  for (const auto& b : profile.bins) {
    if (b.count == 0) continue;
    c.rect(b.lo, 0.0, b.hi, b.precision, "fill=\"#3b6fb6\" stroke=\"#1d3a63\"");
    c.rect(b.lo, b.precision, b.hi, b.mean_conf, "fill=\"#d9534f\" fill-opacity=\"0.45\" stroke=\"#a02622\"");
  }
  c.line(0.0, 0.0, 1.0, 1.0, "stroke=\"gray\" stroke-dasharray=\"4 3\"");
  c.legend({{"precision", "#3b6fb6"}, {"gap to confidence", "#d9534f"}});
  return c.finish();
}

std::string sweep_plot(std::span<const SweepRow> rows, const std::string& metric, const std::string& title) {
  std::map<std::size_t, std::size_t> position;
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& r : rows) {
    if (r.result.metric_name != metric) continue;
    position.emplace(r.size, 0);
    lo = std::min(lo, r.result.mean - r.result.std);
    hi = std::max(hi, r.result.mean + r.result.std);
  }
  if (position.empty()) {
    lo = 0.0;
    hi = 1.0;
  }
  std::size_t k = 0;
  for (auto& [size, pos] : position) pos = k++;
  const double pad = std::max(0.05 * (hi - lo), 1e-3);
  lo = std::max(0.0, lo - pad);
  hi = hi + pad;
  const double n = static_cast<double>(std::max<std::size_t>(position.size(), 1));
  Canvas c(-0.5, n - 0.5, lo, hi);
  std::vector<double> xt;
  std::vector<std::string> xl;
  for (const auto& [size, pos] : position) {
    xt.push_back(static_cast<double>(pos));
    xl.push_back(std::to_string(size));
  }
  c.frame(title, "ensemble size", metric, xt, xl, 5);

  const std::vector<std::pair<Strategy, std::string>> series{{Strategy::LSE, "#d9534f"}, {Strategy::RSE, "#3b6fb6"}};
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& [strategy, color] = series[s];
    const double shift = (s == 0 ? -0.06 : 0.06);
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows) {
      if (r.result.metric_name != metric || r.strategy != strategy) continue;
      const double x = static_cast<double>(position.at(r.size)) + shift;
      pts.emplace_back(x, r.result.mean);
      const std::string style = "stroke=\"" + color + "\"";
      c.line(x, r.result.mean - r.result.std, x, r.result.mean + r.result.std, style);
      c.line(x - 0.05, r.result.mean - r.result.std, x + 0.05, r.result.mean - r.result.std, style);
      c.line(x - 0.05, r.result.mean + r.result.std, x + 0.05, r.result.mean + r.result.std, style);
    }
    std::sort(pts.begin(), pts.end());
    c.polyline(pts, "stroke=\"" + color + "\" stroke-width=\"1.5\"");
    for (const auto& [x, y] : pts) c.circle(x, y, 3.0, "fill=\"" + color + "\"");
  }
  c.legend({{"LSE", "#d9534f"}, {"RSE", "#3b6fb6"}});
  return c.finish();
}

std::string agreement_plot(const AgreementCurve& curve, const std::string& title) {
  Canvas c(0.0, 1.0, 0.0, 1.0);
  const auto ticks = unit_ticks();
  c.frame(title, "IoU threshold", "mean F1", ticks, labels(ticks), 5);
  std::vector<std::pair<double, double>> band, mean;
  for (const auto& p : curve.points) band.emplace_back(p.iou_threshold, std::min(1.0, p.mean_f1 + p.std_f1));
  for (auto it = curve.points.rbegin(); it != curve.points.rend(); ++it) {
    band.emplace_back(it->iou_threshold, std::max(0.0, it->mean_f1 - it->std_f1));
  }
  for (const auto& p : curve.points) mean.emplace_back(p.iou_threshold, p.mean_f1);
  if (!band.empty()) c.polygon(band, "fill=\"#3b6fb6\" fill-opacity=\"0.2\" stroke=\"none\"");
  c.polyline(mean, "stroke=\"#3b6fb6\" stroke-width=\"1.5\"");
  return c.finish();
}

}  // namespace detcal::svg
