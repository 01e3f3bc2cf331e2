#include "nids/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nids/error.hpp"
#include "nids/serialize.hpp"

namespace nids {
namespace {

// Helvetica advance widths (1/1000 em) for ASCII 32..126, from the standard
// Adobe font metrics. Anything else is measured as a digit.
constexpr std::array<int, 95> kHelvetica = {
    278, 278, 355, 556, 556, 889, 667, 191, 333, 333, 389, 584, 278, 333, 278, 278,  // ' '../
    556, 556, 556, 556, 556, 556, 556, 556, 556, 556, 278, 278, 584, 584, 584, 556,  // 0..?
    1015, 667, 667, 722, 722, 667, 611, 778, 722, 278, 500, 667, 556, 833, 722, 778, // @..O
    667, 778, 722, 667, 611, 722, 667, 944, 667, 667, 611, 278, 278, 278, 469, 556,  // P.._
    333, 556, 556, 500, 556, 556, 278, 556, 556, 222, 222, 500, 222, 833, 556, 556,  // `..o
    556, 556, 333, 500, 278, 556, 500, 722, 500, 500, 500, 334, 260, 334, 584};      // p..~

constexpr std::array<palette::Rgb, 9> kBlues = {{{0xf7, 0xfb, 0xff}, {0xde, 0xeb, 0xf7},
                                                 {0xc6, 0xdb, 0xef}, {0x9e, 0xca, 0xe1},
                                                 {0x6b, 0xae, 0xd6}, {0x42, 0x92, 0xc6},
                                                 {0x21, 0x71, 0xb5}, {0x08, 0x51, 0x9c},
                                                 {0x08, 0x30, 0x6b}}};

constexpr std::array<palette::Rgb, 9> kBlueRed = {{{0x21, 0x66, 0xac}, {0x43, 0x93, 0xc3},
                                                   {0x92, 0xc5, 0xde}, {0xd1, 0xe5, 0xf0},
                                                   {0xf7, 0xf7, 0xf7}, {0xfd, 0xdb, 0xc7},
                                                   {0xf4, 0xa5, 0x82}, {0xd6, 0x60, 0x4d},
                                                   {0xb2, 0x18, 0x2b}}};

palette::Rgb interpolate(const std::array<palette::Rgb, 9>& stops, double t) {
  if (!(t >= 0.0)) t = 0.0;
  t = std::min(t, 1.0);
  const double pos = t * 8.0;
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(pos), 7);
  const double f = pos - double(i);
  const auto mix = [f](std::uint8_t a, std::uint8_t b) {
    return static_cast<std::uint8_t>(std::lround(double(a) + (double(b) - double(a)) * f));
  };
  const auto& a = stops[i];
  const auto& b = stops[i + 1];
  return {mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
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

std::string shortest(double v) {
  Json j = v;
  return j.dump();
}

class Svg {
 public:
  Svg(int width, int height) {
    out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
         << height << "\" viewBox=\"0 0 " << width << ' ' << height
         << "\" font-family=\"Helvetica, Arial, sans-serif\">\n"
         << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
         << "\" fill=\"#ffffff\"/>\n";
  }

  void rect(double x, double y, double w, double h, std::string_view fill,
            std::string_view extra = {}) {
    out_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
         << "\" height=\"" << num(h) << "\" fill=\"" << fill << '"';
    if (!extra.empty()) out_ << ' ' << extra;
    out_ << "/>\n";
  }

  void line(double x1, double y1, double x2, double y2, std::string_view stroke, double width,
            std::string_view extra = {}) {
    out_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2)
         << "\" y2=\"" << num(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width)
         << '"';
    if (!extra.empty()) out_ << ' ' << extra;
    out_ << "/>\n";
  }

  void text(double x, double y, std::string_view content, double size,
            std::string_view anchor = "middle", std::string_view extra = {}) {
    out_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"" << num(size)
         << "\" text-anchor=\"" << anchor << '"';
    if (!extra.empty()) out_ << ' ' << extra;
    out_ << '>' << escape(content) << "</text>\n";
  }

  void raw(std::string_view s) { out_ << s; }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  std::ostringstream out_;
};

void require_kind(const FigureSpec& spec, FigureKind want) {
  if (spec.kind != want) {
    throw InvalidArgument("figure spec kind " + std::string(to_string(spec.kind)) +
                          " does not match renderer " + std::string(to_string(want)));
  }
  if (spec.width <= 0 || spec.height <= 0) throw InvalidArgument("figure dimensions must be positive");
}

// Tick step of the form {1, 2, 5} * 10^k giving about `target` intervals.
double nice_step(double range, int target) {
  const double raw = range / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

std::string tick_label(double v, double step) {
  const int decimals = std::max(0, static_cast<int>(std::ceil(-std::log10(step) - 1e-9)));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string sidecar(FigureKind kind, const std::string& title, Json payload) {
  Json j{{"kind", to_string(kind)}, {"title", title}, {"payload", std::move(payload)}};
  return j.dump(2) + "\n";
}

}  // namespace

std::string_view to_string(FigureKind kind) {
  switch (kind) {
    case FigureKind::ConfusionHeatmap: return "confusion_heatmap";
    case FigureKind::RocPlot: return "roc_plot";
    case FigureKind::ImportanceBars: return "importance_bars";
    case FigureKind::CorrelationHeatmap: return "correlation_heatmap";
  }
  return "unknown";
}

namespace palette {

Rgb sequential(double t) { return interpolate(kBlues, t); }
Rgb diverging(double t) { return interpolate(kBlueRed, t); }

std::string hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

}  // namespace palette

double text_width(std::string_view text, double font_size) {
  double units = 0.0;
  for (unsigned char c : text) {
    units += (c >= 32 && c <= 126) ? kHelvetica[c - 32] : 556;
  }
  return units / 1000.0 * font_size;
}

Figure render_confusion(const ConfusionMatrix& cm, const FigureSpec& spec) {
  require_kind(spec, FigureKind::ConfusionHeatmap);
  const double w = spec.width, h = spec.height;
  const double top = 50, bottom = 60, left = 80, right = 30;
  const double side = std::min(w - left - right, h - top - bottom);
  const double x0 = left + (w - left - right - side) / 2.0;
  const double y0 = top;
  const double cell = side / 2.0;
  std::uint64_t peak = 0;
  for (const auto& row : cm.counts) {
    for (auto v : row) peak = std::max(peak, v);
  }

  Svg svg(spec.width, spec.height);
  svg.text(w / 2.0, 30, spec.title, 16, "middle", "class=\"title\"");
  for (int t = 0; t < 2; ++t) {
    for (int p = 0; p < 2; ++p) {
      const double level = peak == 0 ? 0.0 : double(cm.counts[t][p]) / double(peak);
      const double cx = x0 + p * cell, cy = y0 + t * cell;
      svg.rect(cx, cy, cell, cell, palette::hex(palette::sequential(level)),
               "class=\"cell\" data-true=\"" + std::to_string(t) + "\" data-predicted=\"" +
                   std::to_string(p) + "\"");
      svg.text(cx + cell / 2.0, cy + cell / 2.0 + 7, std::to_string(cm.counts[t][p]), 20, "middle",
               std::string("class=\"annotation\" fill=\"") + (level > 0.5 ? "#ffffff" : "#000000") +
                   "\"");
    }
  }
  for (int i = 0; i < 2; ++i) {
    svg.text(x0 + (i + 0.5) * cell, y0 + side + 20, std::to_string(i), 12, "middle", "class=\"tick\"");
    svg.text(x0 - 10, y0 + (i + 0.5) * cell + 4, std::to_string(i), 12, "end", "class=\"tick\"");
  }
  svg.text(x0 + side / 2.0, y0 + side + 45, "Predicted Labels", 14, "middle", "class=\"axis-label\"");
  const double ly = y0 + side / 2.0;
  svg.text(x0 - 45, ly, "True Labels", 14, "middle",
           "class=\"axis-label\" transform=\"rotate(-90 " + num(x0 - 45) + ' ' + num(ly) + ")\"");

  return {svg.finish(), sidecar(spec.kind, spec.title, Json(cm))};
}

Figure render_roc(const RocCurve& curve, const FigureSpec& spec) {
  require_kind(spec, FigureKind::RocPlot);
  if (curve.fpr.size() != curve.tpr.size() || curve.fpr.empty()) {
    throw InvalidArgument("ROC curve needs matching, nonempty fpr/tpr vectors");
  }
  const double w = spec.width, h = spec.height;
  const double left = 70, right = 30, top = 50, bottom = 60;
  const double pw = w - left - right, ph = h - top - bottom;
  const double y_max = 1.05;
  const auto sx = [&](double v) { return left + v * pw; };
  const auto sy = [&](double v) { return top + (1.0 - v / y_max) * ph; };

  Svg svg(spec.width, spec.height);
  svg.text(w / 2.0, 30, spec.title, 16, "middle", "class=\"title\"");
  svg.rect(left, top, pw, ph, "none", "stroke=\"#000000\" stroke-width=\"1.00\" class=\"frame\"");
  for (int i = 0; i <= 5; ++i) {
    const double v = i * 0.2;
    svg.line(sx(v), top + ph, sx(v), top + ph + 5, "#000000", 1);
    svg.text(sx(v), top + ph + 20, tick_label(v, 0.2), 11, "middle", "class=\"tick\"");
    svg.line(left - 5, sy(v), left, sy(v), "#000000", 1);
    svg.text(left - 8, sy(v) + 4, tick_label(v, 0.2), 11, "end", "class=\"tick\"");
  }
  svg.line(sx(0), sy(0), sx(1), sy(1), "#808080", 2, "stroke-dasharray=\"6 4\" class=\"chance\"");

  std::string points;
  std::string last;
  for (std::size_t i = 0; i < curve.fpr.size(); ++i) {
    std::string p = num(sx(curve.fpr[i])) + ',' + num(sy(curve.tpr[i]));
    if (p == last) continue;
    if (!points.empty()) points += ' ';
    points += p;
    last = std::move(p);
  }
  svg.raw("<polyline class=\"roc-curve\" fill=\"none\" stroke=\"#0000ff\" stroke-width=\"2.00\" points=\"" +
          points + "\"/>\n");

  char legend[64];
  std::snprintf(legend, sizeof legend, "ROC curve (area = %.2f)", curve.auc);
  const double lw = text_width(legend, 12) * 1.1 + 56;
  const double lx = left + pw - lw - 10, ly = top + ph - 40;
  svg.rect(lx, ly, lw, 28, "#ffffff", "stroke=\"#cccccc\" stroke-width=\"1.00\" class=\"legend\"");
  svg.line(lx + 8, ly + 14, lx + 38, ly + 14, "#0000ff", 2);
  svg.text(lx + 44, ly + 18, legend, 12, "start", "class=\"legend-text\"");

  svg.text(left + pw / 2.0, h - 15, "False Positive Rate", 14, "middle", "class=\"axis-label\"");
  const double ay = top + ph / 2.0;
  svg.text(20, ay, "True Positive Rate", 14, "middle",
           "class=\"axis-label\" transform=\"rotate(-90 20.00 " + num(ay) + ")\"");

  return {svg.finish(), sidecar(spec.kind, spec.title, Json(curve))};
}

Figure render_importances(std::span<const std::pair<std::string, double>> top_items,
                          const FigureSpec& spec) {
  require_kind(spec, FigureKind::ImportanceBars);
  if (top_items.empty()) throw InvalidArgument("importance figure needs at least one feature");
  double peak = 0.0, widest = 0.0;
  for (const auto& [name, value] : top_items) {
    if (!(value >= 0.0)) throw InvalidArgument("importances must be nonnegative");
    peak = std::max(peak, value);
    widest = std::max(widest, text_width(name, 12));
  }
  const double w = spec.width, h = spec.height;
  const double left = widest + 25, right = 30, top = 50, bottom = 60;
  const double pw = w - left - right, ph = h - top - bottom;
  const double step = peak > 0.0 ? nice_step(peak, 5) : 0.2;
  const double axis_max = peak > 0.0 ? std::ceil(peak / step - 1e-9) * step : 1.0;
  const double scale = pw / axis_max;
  const double slot = ph / double(top_items.size());

  Svg svg(spec.width, spec.height);
  svg.text(w / 2.0, 30, spec.title, 16, "middle", "class=\"title\"");
  for (int i = 0; i * step <= axis_max + 1e-12; ++i) {
    const double v = i * step;
    svg.line(left + v * scale, top, left + v * scale, top + ph, "#e0e0e0", 1);
    svg.text(left + v * scale, top + ph + 18, tick_label(v, step), 11, "middle", "class=\"tick\"");
  }
  // Largest first, drawn at the top (inverted category axis).
  for (std::size_t i = 0; i < top_items.size(); ++i) {
    const auto& [name, value] = top_items[i];
    const double y = top + i * slot + slot * 0.1;
    svg.rect(left, y, value * scale, slot * 0.8, "#1f77b4",
             "class=\"bar\" data-name=\"" + escape(name) + "\" data-value=\"" + shortest(value) + "\"");
    svg.text(left - 8, y + slot * 0.4 + 4, name, 12, "end", "class=\"tick-label\"");
  }
  svg.line(left, top, left, top + ph, "#000000", 1);
  svg.text(left + pw / 2.0, h - 15, "Relative Importance", 14, "middle", "class=\"axis-label\"");

  Json payload = Json::array();
  for (const auto& [name, value] : top_items) payload.push_back({{"name", name}, {"value", value}});
  return {svg.finish(), sidecar(spec.kind, spec.title, std::move(payload))};
}

Figure render_correlation(const CorrelationMatrix& corr, const FigureSpec& spec) {
  require_kind(spec, FigureKind::CorrelationHeatmap);
  const std::size_t n = corr.size();
  if (n == 0) throw InvalidArgument("correlation figure needs at least one column");
  if (corr.values.size() != n * n) throw InvalidArgument("correlation matrix is not square");

  const double w = spec.width, h = spec.height;
  const double bar_space = 90;
  // Label font shrinks with the cell so dense matrices stay legible.
  double font = 10.0;
  double widest = 0.0;
  for (const auto& name : corr.names) widest = std::max(widest, text_width(name, 1.0));
  double cell = 0.0, left = 0.0, bottom = 0.0;
  for (int pass = 0; pass < 2; ++pass) {
    left = widest * font + 15;
    bottom = widest * font + 15;
    cell = std::min((w - left - bar_space - 20) / double(n), (h - 50 - bottom) / double(n));
    font = std::clamp(cell * 0.8, 3.0, 10.0);
  }
  const double x0 = left, y0 = 50;
  const double side = cell * double(n);

  Svg svg(spec.width, spec.height);
  svg.text(w / 2.0, 30, spec.title, 16, "middle", "class=\"title\"");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto& v = corr.at(i, j);
      const auto color = v ? palette::diverging((*v + 1.0) / 2.0) : palette::kUndefined;
      svg.rect(x0 + j * cell, y0 + i * cell, cell, cell, palette::hex(color),
               "class=\"cell\" data-value=\"" + (v ? shortest(*v) : std::string("null")) + "\"");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& name = corr.names[i];
    svg.text(x0 - 4, y0 + (i + 0.5) * cell + font * 0.35, name, font, "end", "class=\"row-label\"");
    const double lx = x0 + (i + 0.5) * cell + font * 0.35, ly = y0 + side + 4;
    svg.text(lx, ly, name, font, "end",
             "class=\"col-label\" transform=\"rotate(-90 " + num(lx) + ' ' + num(ly) + ")\"");
  }

  // Color bar fixed to [-1, 1].
  const double bx = x0 + side + 25, bw = 18, bh = side;
  constexpr int kSteps = 64;
  for (int s = 0; s < kSteps; ++s) {
    const double t = 1.0 - (s + 0.5) / kSteps;
    svg.rect(bx, y0 + s * bh / kSteps, bw, bh / kSteps + 0.5, palette::hex(palette::diverging(t)),
             "class=\"colorbar\"");
  }
  for (double v : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    const double y = y0 + (1.0 - (v + 1.0) / 2.0) * bh;
    svg.line(bx + bw, y, bx + bw + 4, y, "#000000", 1);
    svg.text(bx + bw + 7, y + 4, tick_label(v, 0.5), 10, "start", "class=\"colorbar-tick\"");
  }

  return {svg.finish(), sidecar(spec.kind, spec.title, Json(corr))};
}

std::filesystem::path sidecar_path(const std::filesystem::path& svg_path) {
  auto p = svg_path;
  p.replace_extension(".json");
  return p;
}

void write_figure(const Figure& figure, const FigureSpec& spec) {
  const auto write = [](const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw Error("failed writing '" + path.string() + "'");
  };
  if (spec.output.has_parent_path()) std::filesystem::create_directories(spec.output.parent_path());
  write(spec.output, figure.svg);
  write(sidecar_path(spec.output), figure.sidecar);
}

}  // namespace nids
