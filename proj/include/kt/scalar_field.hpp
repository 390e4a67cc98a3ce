#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <utility>

#include "kt/expr.hpp"
#include "kt/geometry.hpp"

namespace kt {

// A real-valued function on a domain box, with high-order numerical partial
// derivatives. Evaluation wraps periodic coordinates and rejects points
// outside non-periodic axes (DomainExceeded), which is also how derivative
// stencils detect that they have left the domain.
class ScalarField {
 public:
  using Fn = std::function<double(const Vec&)>;

  ScalarField(Fn fn, Domain domain, double h_scale = kDefaultHScale)
      : fn_(std::move(fn)), domain_(std::move(domain)), h_scale_(h_scale) {}

  // Compile an expression over the domain's coordinates.
  static ScalarField from_expression(std::string_view source, Domain domain,
                                     double h_scale = kDefaultHScale);

  double operator()(const Vec& p) const {
    if (!domain_.contains(p))
      throw DomainExceeded("field evaluated outside its domain box");
    return fn_(domain_.wrap(p));
  }

  // Iterated partial derivative; multi_index lists axis indices, applied
  // right-to-left like the notation d_u d_v f = partial({0,1}). Each level
  // uses the 4th-order five-point stencil plus one Richardson level at step
  // ratio 2. At most 5 derivatives.
  double partial(const Vec& p, std::span<const int> multi_index) const;
  double partial(const Vec& p, std::initializer_list<int> multi_index) const {
    return partial(p, std::span<const int>(multi_index.begin(), multi_index.size()));
  }

  // Differentiation step for one axis: h_scale * axis extent.
  double step(int axis) const { return h_scale_ * domain_.axes[axis].extent(); }

  const Domain& domain() const { return domain_; }
  double h_scale() const { return h_scale_; }

  static constexpr double kDefaultHScale = 1e-3;

 private:
  Fn fn_;
  Domain domain_;
  double h_scale_;
};

}  // namespace kt
