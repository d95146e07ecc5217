// quadrature.hpp — Composite Gauss-Legendre rules over adaptive panel layouts.
#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace qdcav::quad {

// One 16-point Gauss-Legendre panel mapped onto [a, b].
struct Panel {
  double a{0.0};  // left edge
  double b{0.0};  // right edge
};

// A region that should be tiled with finer panels than the base width.
struct Refinement {
  double center{0.0};      // center of the refined window
  double half_width{0.0};  // window is [center - half_width, center + half_width]
  double width{0.0};       // panel width to use inside the window
};

// Flattened composite rule: integrate f as sum_i weights[i] * f(nodes[i]).
class CompositeRule {
 public:
  CompositeRule() = default;

  // Tiles [lo, hi] with panels of width <= base_width, shrinking panels inside
  // any refinement window to the requested finer width.  Panel edges snap to
  // the window boundaries so no panel straddles a refinement edge.
  CompositeRule(double lo, double hi, double base_width,
                const std::vector<Refinement>& refinements = {});

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return nodes_.size(); }

  double integrate(const std::function<double(double)>& f) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

// Raw 16-point rule on [-1, 1]; exposed for reuse by other builders.
extern const double kGL16Nodes[16];
extern const double kGL16Weights[16];

}  // namespace qdcav::quad
