#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace roomreg {

class ExpressionError : public std::invalid_argument {
 public:
  ExpressionError(const std::string& message, std::size_t position)
      : std::invalid_argument(message + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Arithmetic expression in x, y and t.
///
/// Grammar: numbers, the constant pi, variables x y t, binary + - * / ^
/// (^ is right associative), unary minus, parentheses and the functions
/// sin cos exp. Parsing is strict: trailing garbage is an error.
class Expression {
 public:
  Expression();  // constant zero
  static Expression parse(const std::string& text);
  static Expression constant(double value);

  double operator()(double x, double y, double t = 0.0) const;
  double operator()(const Eigen::Vector2d& p) const { return (*this)(p.x(), p.y(), 0.0); }

  const std::string& text() const { return text_; }
  bool operator==(const Expression& other) const { return text_ == other.text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace roomreg
