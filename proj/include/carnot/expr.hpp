#ifndef CARNOT_EXPR_HPP
#define CARNOT_EXPR_HPP

#include <string>

#include "carnot/jets.hpp"

namespace carnot {

// Minimal recursive-descent surface-expression parser: +, -, *, /, ^, sqrt,
// parentheses, numeric literals, coordinates x1..xn and the constants pi, e.
// The result evaluates exact order-3 jets through the Jet3 algebra.
ScalarField parse_surface_expression(const std::string& text, int dim);

}  // namespace carnot

#endif
