#include "kt/scalar_field.hpp"

#include <array>
#include <string>

#include "kt/numdiff.hpp"

namespace kt {

ScalarField ScalarField::from_expression(std::string_view source, Domain domain,
                                         double h_scale) {
  Expr expr = Expr::parse(source);
  if (expr.arity() > domain.dim())
    throw SchemaError("expression '" + std::string(source) + "' uses coordinate x" +
                      std::to_string(expr.arity()) + " but the domain has only " +
                      std::to_string(domain.dim()) + " axes");
  auto fn = [e = std::move(expr)](const Vec& p) {
    return e.eval(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
  };
  return ScalarField(std::move(fn), std::move(domain), h_scale);
}

double ScalarField::partial(const Vec& p, std::span<const int> multi_index) const {
  if (multi_index.size() > 5)
    throw SchemaError("partial derivatives are supported up to order 5");
  if (multi_index.empty()) return (*this)(p);

  const int axis = multi_index.front();
  if (axis < 0 || axis >= domain_.dim())
    throw SchemaError("derivative axis " + std::to_string(axis) + " out of range");
  const auto rest = multi_index.subspan(1);

  Vec dir = Vec::Zero(domain_.dim());
  dir[axis] = 1.0;
  const double h = step(axis);
  auto along = [&](double s) { return partial(Vec(p + s * dir), rest); };
  return central4_richardson(along, h);
}

}  // namespace kt
