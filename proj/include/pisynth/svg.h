#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "pisynth/partition_tree.h"

namespace pisynth {

struct SvgOptions {
  /// Pixel width of the drawing area; the height follows the aspect ratio.
  int width_px{640};
  int margin_px{24};
  std::string title;
  /// Optional reference curve in state coordinates, drawn as a polyline.
  std::vector<Eigen::Vector2d> overlay;
};

/// SVG 1.1 rendering of a planar partition tree: one square per leaf,
/// coloured by label (included, excluded, unknown), with the root boxes
/// outlined. Output depends only on the tree and options, so equal inputs
/// give byte-identical documents. Throws std::invalid_argument unless the
/// tree is two-dimensional.
std::string RenderSvg(const PartitionTree& tree, const SvgOptions& options = {});

/// Reads "x,y" rows; blank lines, '#' comments and a non-numeric header are
/// skipped. Throws std::runtime_error on I/O failure or a malformed row.
std::vector<Eigen::Vector2d> LoadPolyline(const std::string& path);

}  // namespace pisynth
