#include "tabcap/page.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace tabcap {

namespace {

constexpr std::array<std::pair<std::string_view, Label>, 14> kLabels = {{
    {"paragraph", Label::Paragraph},
    {"table", Label::Table},
    {"caption", Label::Caption},
    {"section", Label::Section},
    {"title", Label::Title},
    {"abstract", Label::Abstract},
    {"figure", Label::Figure},
    {"list", Label::List},
    {"footer", Label::Footer},
    {"reference", Label::Reference},
    {"equation", Label::Equation},
    {"author", Label::Author},
    {"date", Label::Date},
    {"other", Label::Other},
}};

}  // namespace

Label label_from_string(std::string_view name) {
  for (const auto& [text, label] : kLabels)
    if (text == name) return label;
  return Label::Other;
}

std::string_view to_string(Label label) {
  for (const auto& [text, l] : kLabels)
    if (l == label) return text;
  return "other";
}

namespace layout {

bool share_band(const BBox& a, const BBox& b, double min_overlap) {
  const int overlap = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  if (overlap < 0) return false;
  const int smaller = std::min(a.height(), b.height());
  return overlap >= min_overlap * smaller;
}

std::vector<std::vector<std::size_t>> bands(std::span<const BBox> boxes, double min_overlap) {
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return boxes[a].y0 < boxes[b].y0; });

  std::vector<std::vector<std::size_t>> out;
  for (std::size_t idx : order) {
    bool joined = false;
    if (!out.empty()) {
      auto& band = out.back();
      joined = std::any_of(band.begin(), band.end(), [&](std::size_t member) {
        return share_band(boxes[member], boxes[idx], min_overlap);
      });
      if (joined) band.push_back(idx);
    }
    if (!joined) out.push_back({idx});
  }
  for (auto& band : out) {
    std::sort(band.begin(), band.end(), [&](std::size_t a, std::size_t b) {
      if (boxes[a].x0 != boxes[b].x0) return boxes[a].x0 < boxes[b].x0;
      return a < b;
    });
  }
  return out;
}

int vertical_distance(const BBox& a, const BBox& b) {
  return std::max(0, std::max(a.y0, b.y0) - std::min(a.y1, b.y1));
}

std::vector<std::vector<std::size_t>> vertical_clusters(std::span<const BBox> boxes, int max_gap) {
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return boxes[a].y0 < boxes[b].y0; });

  // Sorted by top edge, the nearest earlier member is the one reaching
  // furthest down, so tracking the running bottom edge is enough.
  std::vector<std::vector<std::size_t>> out;
  int bottom = 0;
  for (std::size_t idx : order) {
    if (out.empty() || boxes[idx].y0 - bottom > max_gap) {
      out.push_back({idx});
      bottom = boxes[idx].y1;
    } else {
      out.back().push_back(idx);
      bottom = std::max(bottom, boxes[idx].y1);
    }
  }
  for (auto& cluster : out) std::sort(cluster.begin(), cluster.end());
  return out;
}

BBox enclosing(std::span<const BBox> boxes) {
  if (boxes.empty()) return {};
  BBox out = boxes.front();
  for (const auto& b : boxes) {
    out.x0 = std::min(out.x0, b.x0);
    out.y0 = std::min(out.y0, b.y0);
    out.x1 = std::max(out.x1, b.x1);
    out.y1 = std::max(out.y1, b.y1);
  }
  return out;
}

}  // namespace layout

std::vector<BBox> boxes_of(std::span<const SemanticToken> tokens) {
  std::vector<BBox> boxes;
  boxes.reserve(tokens.size());
  for (const auto& t : tokens) boxes.push_back(t.bbox);
  return boxes;
}

std::vector<SemanticToken> reading_order(std::vector<SemanticToken> tokens, double band_overlap) {
  const auto boxes = boxes_of(tokens);
  std::vector<SemanticToken> out;
  out.reserve(tokens.size());
  for (const auto& band : layout::bands(boxes, band_overlap))
    for (std::size_t idx : band) out.push_back(std::move(tokens[idx]));
  return out;
}

}  // namespace tabcap
