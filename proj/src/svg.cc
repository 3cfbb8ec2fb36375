#include "pisynth/svg.h"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pisynth {
namespace {

const char* FillFor(Label label) {
  switch (label) {
    case Label::kIncluded:
      return "#4c9a5b";
    case Label::kExcluded:
      return "#e3e3e3";
    case Label::kUnknown:
      return "#f0b54a";
  }
  return "#000000";
}

// Fixed-precision formatting keeps the output independent of stream state.
std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string EscapeXml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
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

}  // namespace

std::string RenderSvg(const PartitionTree& tree, const SvgOptions& options) {
  if (tree.dim() != 2) {
    throw std::invalid_argument("SVG rendering needs a two-dimensional tree");
  }
  const BoxList roots = tree.Domain();
  const Rect world = BoundingRect(roots);
  const double span_x = world.hi[0] - world.lo[0];
  const double span_y = world.hi[1] - world.lo[1];
  const double scale = options.width_px / span_x;
  const double width = options.width_px + 2.0 * options.margin_px;
  const double height = span_y * scale + 2.0 * options.margin_px;
  const double m = options.margin_px;
  // State y grows upward, SVG y grows downward.
  auto px = [&](double x) { return m + (x - world.lo[0]) * scale; };
  auto py = [&](double y) { return m + (world.hi[1] - y) * scale; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
      << Num(width) << "\" height=\"" << Num(height) << "\" viewBox=\"0 0 "
      << Num(width) << " " << Num(height) << "\">\n";
  if (!options.title.empty()) {
    svg << "<title>" << EscapeXml(options.title) << "</title>\n";
  }
  svg << "<rect x=\"0\" y=\"0\" width=\"" << Num(width) << "\" height=\""
      << Num(height) << "\" fill=\"#ffffff\"/>\n";
  svg << "<g id=\"leaves\" stroke=\"#555555\" stroke-width=\"0.25\">\n";
  for (int id : tree.Leaves()) {
    const TreeNode& node = tree.node(id);
    const double r = node.target_radius;
    const Vector& c = node.target_center;
    svg << "<rect x=\"" << Num(px(c[0] - r)) << "\" y=\"" << Num(py(c[1] + r))
        << "\" width=\"" << Num(2.0 * r * scale) << "\" height=\""
        << Num(2.0 * r * scale) << "\" fill=\"" << FillFor(node.label)
        << "\"/>\n";
  }
  svg << "</g>\n";
  svg << "<g id=\"domain\" fill=\"none\" stroke=\"#000000\" "
         "stroke-width=\"1\">\n";
  for (const Box& b : roots) {
    svg << "<rect x=\"" << Num(px(b.center[0] - b.radius)) << "\" y=\""
        << Num(py(b.center[1] + b.radius)) << "\" width=\""
        << Num(2.0 * b.radius * scale) << "\" height=\""
        << Num(2.0 * b.radius * scale) << "\"/>\n";
  }
  svg << "</g>\n";
  if (!options.overlay.empty()) {
    svg << "<polyline id=\"overlay\" fill=\"none\" stroke=\"#c0392b\" "
           "stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < options.overlay.size(); ++i) {
      if (i > 0) svg << ' ';
      svg << Num(px(options.overlay[i].x())) << ','
          << Num(py(options.overlay[i].y()));
    }
    svg << "\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<Eigen::Vector2d> LoadPolyline(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open overlay " + path);
  std::vector<Eigen::Vector2d> points;
  std::string line;
  std::size_t line_no = 0;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    double x = 0.0;
    double y = 0.0;
    char comma = 0;
    std::istringstream row(line);
    if (!(row >> x >> comma >> y) || comma != ',') {
      if (first_row && std::isalpha(static_cast<unsigned char>(line[start]))) {
        first_row = false;
        continue;
      }
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected \"x,y\"");
    }
    first_row = false;
    points.emplace_back(x, y);
  }
  return points;
}

}  // namespace pisynth
