#include "demotrace/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "demotrace/parallel.hpp"

namespace demotrace {
namespace {

void require_same_shape(const MaskImage& a, const MaskImage& b) {
  if (!a.same_shape(b)) throw Error(ErrorCode::kDimensionMismatch, "mask dimensions differ");
}

template <typename Op>
MaskImage pixelwise(const MaskImage& a, const MaskImage& b, Op op) {
  require_same_shape(a, b);
  MaskImage out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.data()[i] = op(a.data()[i] != 0, b.data()[i] != 0) ? 1 : 0;
  }
  return out;
}

// One separable pass of a clipped-window min (erode) or max (dilate) along
// rows (horizontal) or columns, using running counts so the cost is
// independent of k.
MaskImage window_pass(const MaskImage& m, int k, bool horizontal, bool all_required) {
  const int w = m.width();
  const int h = m.height();
  MaskImage out(w, h);
  const int lines = horizontal ? h : w;
  const int len = horizontal ? w : h;
  parallel_for(0, static_cast<std::size_t>(lines), [&](std::size_t line_idx) {
    const int line = static_cast<int>(line_idx);
    std::vector<int> prefix(static_cast<std::size_t>(len) + 1, 0);
    for (int i = 0; i < len; ++i) {
      const std::uint8_t px = horizontal ? m(i, line) : m(line, i);
      prefix[i + 1] = prefix[i] + (px != 0 ? 1 : 0);
    }
    for (int i = 0; i < len; ++i) {
      const int lo = std::max(0, i - k);
      const int hi = std::min(len - 1, i + k);
      const int count = prefix[hi + 1] - prefix[lo];
      const bool set = all_required ? count == hi - lo + 1 : count > 0;
      (horizontal ? out(i, line) : out(line, i)) = set ? 1 : 0;
    }
  });
  return out;
}

}  // namespace

double bbox_iou(const BBox& a, const BBox& b) {
  const int iu0 = std::max(a.u_min, b.u_min);
  const int iv0 = std::max(a.v_min, b.v_min);
  const int iu1 = std::min(a.u_max, b.u_max);
  const int iv1 = std::min(a.v_max, b.v_max);
  const double inter =
      (iu1 < iu0 || iv1 < iv0) ? 0.0 : static_cast<double>(iu1 - iu0 + 1) * (iv1 - iv0 + 1);
  const double uni = static_cast<double>(a.area()) + static_cast<double>(b.area()) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

BBox expand_bbox(const BBox& b, int margin, int width, int height) {
  return {std::max(0, b.u_min - margin), std::max(0, b.v_min - margin),
          std::min(width - 1, b.u_max + margin), std::min(height - 1, b.v_max + margin)};
}

std::size_t popcount(const MaskImage& m) {
  return static_cast<std::size_t>(
      std::count_if(m.data().begin(), m.data().end(), [](std::uint8_t p) { return p != 0; }));
}

MaskImage flow_magnitude_mask(const FlowField& flow, double tau_f) {
  if (!(tau_f > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tau_f must be positive");
  MaskImage out(flow.width(), flow.height());
  parallel_for(0, static_cast<std::size_t>(flow.height()), [&](std::size_t v) {
    const Flow* in = flow.row(static_cast<int>(v));
    std::uint8_t* o = out.row(static_cast<int>(v));
    for (int u = 0; u < flow.width(); ++u) {
      const double du = in[u].du;
      const double dv = in[u].dv;
      o[u] = std::sqrt(du * du + dv * dv) >= tau_f ? 1 : 0;
    }
  });
  return out;
}

MaskImage mask_subtract(const MaskImage& a, const MaskImage& b) {
  return pixelwise(a, b, [](bool x, bool y) { return x && !y; });
}

MaskImage mask_union(const MaskImage& a, const MaskImage& b) {
  return pixelwise(a, b, [](bool x, bool y) { return x || y; });
}

MaskImage mask_intersect(const MaskImage& a, const MaskImage& b) {
  return pixelwise(a, b, [](bool x, bool y) { return x && y; });
}

MaskImage erode(const MaskImage& m, int k) {
  if (k < 0) throw Error(ErrorCode::kInvalidArgument, "kernel radius must be non-negative");
  if (k == 0) return m;
  return window_pass(window_pass(m, k, true, true), k, false, true);
}

MaskImage dilate(const MaskImage& m, int k) {
  if (k < 0) throw Error(ErrorCode::kInvalidArgument, "kernel radius must be non-negative");
  if (k == 0) return m;
  return window_pass(window_pass(m, k, true, false), k, false, false);
}

MaskImage morphological_open(const MaskImage& m, int k) { return dilate(erode(m, k), k); }

MaskImage ComponentSet::mask(std::size_t i) const {
  const std::int32_t label = components.at(i).label;
  MaskImage out(labels.width(), labels.height());
  for (std::size_t p = 0; p < labels.size(); ++p) out.data()[p] = labels.data()[p] == label ? 1 : 0;
  return out;
}

ComponentSet connected_components(const MaskImage& m) {
  ComponentSet result;
  result.labels = Image<std::int32_t>(m.width(), m.height(), 0);
  std::vector<std::pair<int, int>> stack;
  std::int32_t next_label = 0;
  for (int v = 0; v < m.height(); ++v) {
    for (int u = 0; u < m.width(); ++u) {
      if (m(u, v) == 0 || result.labels(u, v) != 0) continue;
      Component comp;
      comp.label = ++next_label;
      comp.bbox = {u, v, u, v};
      result.labels(u, v) = comp.label;
      stack.assign(1, {u, v});
      while (!stack.empty()) {
        const auto [cu, cv] = stack.back();
        stack.pop_back();
        ++comp.area;
        comp.bbox.u_min = std::min(comp.bbox.u_min, cu);
        comp.bbox.v_min = std::min(comp.bbox.v_min, cv);
        comp.bbox.u_max = std::max(comp.bbox.u_max, cu);
        comp.bbox.v_max = std::max(comp.bbox.v_max, cv);
        for (int dv = -1; dv <= 1; ++dv) {
          for (int du = -1; du <= 1; ++du) {
            const int nu = cu + du;
            const int nv = cv + dv;
            if (!m.contains(nu, nv) || m(nu, nv) == 0 || result.labels(nu, nv) != 0) continue;
            result.labels(nu, nv) = comp.label;
            stack.emplace_back(nu, nv);
          }
        }
      }
      result.components.push_back(comp);
    }
  }
  std::sort(result.components.begin(), result.components.end(), [](const Component& a, const Component& b) {
    if (a.area != b.area) return a.area > b.area;
    if (a.bbox.v_min != b.bbox.v_min) return a.bbox.v_min < b.bbox.v_min;
    if (a.bbox.u_min != b.bbox.u_min) return a.bbox.u_min < b.bbox.u_min;
    return a.label < b.label;
  });
  return result;
}

std::optional<BBox> tight_bbox(const MaskImage& m) {
  std::optional<BBox> box;
  for (int v = 0; v < m.height(); ++v) {
    const std::uint8_t* r = m.row(v);
    for (int u = 0; u < m.width(); ++u) {
      if (r[u] == 0) continue;
      if (!box) {
        box = BBox{u, v, u, v};
      } else {
        box->u_min = std::min(box->u_min, u);
        box->u_max = std::max(box->u_max, u);
        box->v_max = v;
      }
    }
  }
  return box;
}

}  // namespace demotrace
