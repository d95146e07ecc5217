// quadrature.cpp — Composite Gauss-Legendre rule construction and evaluation.
#include "internal/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "internal/errors.hpp"

namespace qdcav::quad {

const double kGL16Nodes[16] = {
    -0.9894009349916499326,   -0.94457502307323257608, -0.86563120238783174388,
    -0.7554044083550030339,   -0.61787624440264374845, -0.45801677765722738634,
    -0.28160355077925891323,  -0.095012509837637440185, 0.095012509837637440185,
    0.28160355077925891323,   0.45801677765722738634,   0.61787624440264374845,
    0.7554044083550030339,    0.86563120238783174388,   0.94457502307323257608,
    0.9894009349916499326};

const double kGL16Weights[16] = {
    0.027152459411754094852, 0.062253523938647892863, 0.09515851168249278481,
    0.12462897125553387205,  0.14959598881657673208,  0.16915651939500253819,
    0.18260341504492358887,  0.18945061045506849629,  0.18945061045506849629,
    0.18260341504492358887,  0.16915651939500253819,  0.14959598881657673208,
    0.12462897125553387205,  0.09515851168249278481,  0.062253523938647892863,
    0.027152459411754094852};

namespace {

// Splits [lo, hi] at refinement-window boundaries, returning sorted edges.
std::vector<double> breakpoints(double lo, double hi,
                                const std::vector<Refinement>& refs) {
  std::vector<double> cuts{lo, hi};
  for (const auto& r : refs) {
    const double a = r.center - r.half_width;
    const double b = r.center + r.half_width;
    if (a > lo && a < hi) cuts.push_back(a);
    if (b > lo && b < hi) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

// Width to use inside [a, b]: the finest refinement covering it, else base.
double width_for(double a, double b, double base,
                 const std::vector<Refinement>& refs) {
  const double mid = 0.5 * (a + b);
  double w = base;
  for (const auto& r : refs) {
    if (mid > r.center - r.half_width && mid < r.center + r.half_width)
      w = std::min(w, r.width);
  }
  return w;
}

}  // namespace

CompositeRule::CompositeRule(double lo, double hi, double base_width,
                             const std::vector<Refinement>& refinements) {
  if (!(hi > lo)) throw err::InvalidConfig("quadrature: empty interval");
  if (!(base_width > 0.0))
    throw err::InvalidConfig("quadrature: non-positive panel width");

  const auto cuts = breakpoints(lo, hi, refinements);
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s];
    const double b = cuts[s + 1];
    const double w = width_for(a, b, base_width, refinements);
    const auto n_panels =
        static_cast<std::size_t>(std::ceil((b - a) / w - 1e-12));
    const double h = (b - a) / static_cast<double>(n_panels);
    for (std::size_t p = 0; p < n_panels; ++p) {
      const double pa = a + h * static_cast<double>(p);
      const double c = pa + 0.5 * h;
      const double r = 0.5 * h;
      for (int k = 0; k < 16; ++k) {
        nodes_.push_back(c + r * kGL16Nodes[k]);
        weights_.push_back(r * kGL16Weights[k]);
      }
    }
  }
}

double CompositeRule::integrate(const std::function<double(double)>& f) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) acc += weights_[i] * f(nodes_[i]);
  return acc;
}

}  // namespace qdcav::quad
