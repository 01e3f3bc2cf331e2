#pragma once

// Fixed figure payloads shared by the renderer tests and the acceptance suite.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nids/report.hpp"

namespace nids::golden {

inline ConfusionMatrix confusion_payload() {
  ConfusionMatrix cm;
  cm.counts = {{{9123, 871}, {402, 24668}}};
  return cm;
}

inline RocCurve roc_payload() {
  RocCurve c;
  c.fpr = {0.0, 0.0, 0.05, 0.1, 0.1, 0.3, 0.6, 1.0};
  c.tpr = {0.0, 0.4, 0.62, 0.8, 0.85, 0.93, 0.98, 1.0};
  c.thresholds = {1.97, 0.97, 0.9, 0.75, 0.6, 0.41, 0.2, 0.01};
  c.auc = 0.9135;
  return c;
}

inline std::vector<std::pair<std::string, double>> importance_payload() {
  return {{"sttl", 0.1843},   {"ct_state_ttl", 0.1192}, {"sbytes", 0.0871}, {"dmean", 0.0655},
          {"smean", 0.0598},  {"dttl", 0.0487},         {"synack", 0.0401}, {"proto=udp", 0.0322},
          {"service=-", 0.0207}, {"dload", 0.0199}};
}

inline CorrelationMatrix correlation_payload() {
  CorrelationMatrix c;
  c.names = {"label", "proto=tcp", "proto=udp", "service=-", "state=INT"};
  const std::optional<double> u;
  c.values = {1.0,   -0.31, 0.42,  0.05,  0.61,   //
              -0.31, 1.0,   -0.88, -0.12, -0.47,  //
              0.42,  -0.88, 1.0,   0.1,   0.55,   //
              0.05,  -0.12, 0.1,   1.0,   0.02,   //
              0.61,  -0.47, 0.55,  0.02,  1.0};
  c.values[3 * 5 + 4] = u;
  c.values[4 * 5 + 3] = u;
  return c;
}

struct Rendered {
  std::string file;
  Figure figure;
};

inline std::vector<Rendered> render_all() {
  return {
      {"confusion", render_confusion(confusion_payload(),
                                     {FigureKind::ConfusionHeatmap, "Random Forest Confusion Matrix", 800, 600, {}})},
      {"roc", render_roc(roc_payload(), {FigureKind::RocPlot, "Receiver Operating Characteristic", 800, 600, {}})},
      {"importances",
       render_importances(importance_payload(), {FigureKind::ImportanceBars, "Feature Importances", 1000, 600, {}})},
      {"correlation",
       render_correlation(correlation_payload(), {FigureKind::CorrelationHeatmap, "Correlation Matrix", 900, 800, {}})},
  };
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Text content of every <text> element carrying the given class.
inline std::vector<std::string> text_nodes(const std::string& svg, const std::string& cls) {
  std::vector<std::string> out;
  const std::regex re("<text[^>]*class=\"" + cls + "\"[^>]*>([^<]*)</text>");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
    out.push_back((*it)[1].str());
  }
  return out;
}

/// Value of `attr` on every element carrying the given class.
inline std::vector<std::string> attribute_values(const std::string& svg, const std::string& cls,
                                                 const std::string& attr) {
  std::vector<std::string> out;
  const std::regex tag("<[a-z]+[^>]*class=\"" + cls + "\"[^>]*>");
  const std::regex value(attr + "=\"([^\"]*)\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), tag); it != std::sregex_iterator(); ++it) {
    std::smatch m;
    const std::string t = it->str();
    if (std::regex_search(t, m, value)) out.push_back(m[1].str());
  }
  return out;
}

}  // namespace nids::golden
