#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nids/metrics.hpp"

namespace nids {

enum class FigureKind { ConfusionHeatmap, RocPlot, ImportanceBars, CorrelationHeatmap };

std::string_view to_string(FigureKind kind);

struct FigureSpec {
  FigureKind kind = FigureKind::ConfusionHeatmap;
  std::string title;
  int width = 800;   // pixels
  int height = 600;
  std::filesystem::path output;  // .svg path; the sidecar replaces the extension with .json
};

/// A rendered SVG document and the JSON payload it was drawn from.
struct Figure {
  std::string svg;
  std::string sidecar;
};

Figure render_confusion(const ConfusionMatrix& cm, const FigureSpec& spec);
Figure render_roc(const RocCurve& curve, const FigureSpec& spec);
Figure render_importances(std::span<const std::pair<std::string, double>> top, const FigureSpec& spec);
Figure render_correlation(const CorrelationMatrix& corr, const FigureSpec& spec);

/// Writes figure.svg to spec.output and figure.sidecar next to it.
void write_figure(const Figure& figure, const FigureSpec& spec);

std::filesystem::path sidecar_path(const std::filesystem::path& svg_path);

namespace palette {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// 9-stop ColorBrewer "Blues", t in [0, 1] from light to dark.
Rgb sequential(double t);
/// 9-stop ColorBrewer "RdBu" reversed, t in [0, 1] from blue (-1) to red (+1).
Rgb diverging(double t);
/// Fill for undefined correlation cells.
inline constexpr Rgb kUndefined{0x9e, 0x9e, 0x9e};

std::string hex(Rgb c);

}  // namespace palette

/// Advance width of `text` in pixels using built-in Helvetica metrics.
double text_width(std::string_view text, double font_size);

}  // namespace nids
