#pragma once

#include <memory>
#include <string>

#include "softarm/grid.hpp"
#include "softarm/types.hpp"

namespace softarm::experiment {

/// A profile formula in the arclength variable s.
///
/// Grammar: numbers, `s`, `pi` (or π), + - * / ^, parentheses and the functions
/// exp, sin, cos, sqrt, log. Also accepted: ×, ÷, ·, the minus sign −, superscript powers
/// (s², 10⁻¹) and juxtaposition as multiplication, so "4π(1+s²)" parses as written.
class Expression {
 public:
  /// Throws ConfigError with the offending position.
  static Expression parse(const std::string& text);

  double operator()(double s) const;
  ScalarField sample(const Grid& grid) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace softarm::experiment
