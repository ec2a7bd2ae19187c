#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "curvinv/sym/expr.hpp"

namespace curvinv::sym {

/// Unnormalized expression tree: the input side of `normalize`.
struct Tree {
  enum class Kind { integer, symbol, sin, cos, add, sub, mul, div, neg, pow };

  Kind kind = Kind::integer;
  mpz_class value;        // integer
  std::string name;       // symbol, or the coordinate of sin/cos
  int exponent = 0;       // pow
  std::vector<Tree> args;

  static Tree integer(const mpz_class& v);
  static Tree symbol(std::string name);
  static Tree sin(std::string coordinate);
  static Tree cos(std::string coordinate);
  static Tree binary(Kind k, Tree lhs, Tree rhs);
  static Tree negate(Tree t);
  static Tree power(Tree base, int exponent);

  friend Tree operator+(Tree a, Tree b) { return binary(Kind::add, std::move(a), std::move(b)); }
  friend Tree operator-(Tree a, Tree b) { return binary(Kind::sub, std::move(a), std::move(b)); }
  friend Tree operator*(Tree a, Tree b) { return binary(Kind::mul, std::move(a), std::move(b)); }
  friend Tree operator/(Tree a, Tree b) { return binary(Kind::div, std::move(a), std::move(b)); }
};

/// Parses infix text: integers, symbols, sin(x), cos(x), + - * / and ^ with
/// an integer exponent. Throws ParseError.
Tree parse_tree(std::string_view text);

/// Canonical expression for a tree. Throws DivisionByZero for division by an
/// expression equal to zero and std::invalid_argument for unknown symbols.
Expr normalize(const Tree& tree, const EnvPtr& env);

/// parse_tree followed by normalize.
Expr parse_expr(std::string_view text, const EnvPtr& env);

}  // namespace curvinv::sym
