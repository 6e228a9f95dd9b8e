#pragma once

#include <functional>
#include <string>

namespace rearr {

/// Compiles a one-variable arithmetic expression (variable `r`; operators
/// + - * / ^, parentheses; functions exp, log, log1p, sqrt, abs, sin, cos,
/// tanh, pow, min, max; constants pi, e) into a callable. Throws
/// std::invalid_argument on parse errors.
std::function<double(double)> compile_expression(const std::string& text);

}  // namespace rearr
