#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tabcap {

/// Normalized page coordinates, 0..1000 with the origin at the top left.
struct BBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  double mid_x() const { return (x0 + x1) / 2.0; }

  bool operator==(const BBox&) const = default;
};

struct Rgb {
  int r = 0;
  int g = 0;
  int b = 0;

  bool operator==(const Rgb&) const = default;
};

enum class Label {
  Paragraph,
  Table,
  Caption,
  Section,
  Title,
  Abstract,
  Figure,
  List,
  Footer,
  Reference,
  Equation,
  Author,
  Date,
  Other,
};

/// Unknown names map to Label::Other.
Label label_from_string(std::string_view name);
std::string_view to_string(Label label);

struct SemanticToken {
  std::string text;
  BBox bbox;
  Rgb color;
  std::string font;
  Label label = Label::Other;

  bool operator==(const SemanticToken&) const = default;
};

struct PageLayout {
  std::string page_id;
  std::vector<SemanticToken> tokens;  // reading order
};

namespace layout {

/// Two boxes share a line band when their vertical intervals overlap by at
/// least `min_overlap` times the smaller height.
bool share_band(const BBox& a, const BBox& b, double min_overlap);

/// Groups boxes into horizontal bands ordered top to bottom. Each band
/// lists input indices ordered by left edge, ties by input index.
std::vector<std::vector<std::size_t>> bands(std::span<const BBox> boxes, double min_overlap);

/// Vertical gap between two boxes; zero when their vertical extents touch.
int vertical_distance(const BBox& a, const BBox& b);

/// Single-linkage clusters of boxes whose vertical distance to some other
/// member is at most `max_gap`. Clusters are ordered top to bottom and
/// list member indices in ascending order.
std::vector<std::vector<std::size_t>> vertical_clusters(std::span<const BBox> boxes, int max_gap);

/// Smallest box containing every input box.
BBox enclosing(std::span<const BBox> boxes);

}  // namespace layout

/// Reorders tokens top-to-bottom by band and left-to-right inside a band.
/// Stable: tokens with identical boxes keep their input order.
std::vector<SemanticToken> reading_order(std::vector<SemanticToken> tokens, double band_overlap = 0.5);

std::vector<BBox> boxes_of(std::span<const SemanticToken> tokens);

}  // namespace tabcap
