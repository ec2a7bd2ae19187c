#include "curvinv/sym/tree.hpp"

#include <cctype>
#include <stdexcept>

#include "curvinv/errors.hpp"

namespace curvinv::sym {

Tree Tree::integer(const mpz_class& v) {
  Tree t;
  t.kind = Kind::integer;
  t.value = v;
  return t;
}

Tree Tree::symbol(std::string name) {
  Tree t;
  t.kind = Kind::symbol;
  t.name = std::move(name);
  return t;
}

Tree Tree::sin(std::string coordinate) {
  Tree t = symbol(std::move(coordinate));
  t.kind = Kind::sin;
  return t;
}

Tree Tree::cos(std::string coordinate) {
  Tree t = symbol(std::move(coordinate));
  t.kind = Kind::cos;
  return t;
}

Tree Tree::binary(Kind k, Tree lhs, Tree rhs) {
  Tree t;
  t.kind = k;
  t.args.push_back(std::move(lhs));
  t.args.push_back(std::move(rhs));
  return t;
}

Tree Tree::negate(Tree a) {
  Tree t;
  t.kind = Kind::neg;
  t.args.push_back(std::move(a));
  return t;
}

Tree Tree::power(Tree base, int exponent) {
  Tree t;
  t.kind = Kind::pow;
  t.exponent = exponent;
  t.args.push_back(std::move(base));
  return t;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Tree parse() {
    Tree t = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at offset " + std::to_string(pos_) + " in '" +
                     std::string(s_) + "'");
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Tree expr() {
    Tree lhs = term();
    while (true) {
      if (eat('+')) {
        lhs = std::move(lhs) + term();
      } else if (eat('-')) {
        lhs = std::move(lhs) - term();
      } else {
        return lhs;
      }
    }
  }

  Tree term() {
    Tree lhs = unary();
    while (true) {
      if (eat('*')) {
        lhs = std::move(lhs) * unary();
      } else if (eat('/')) {
        lhs = std::move(lhs) / unary();
      } else {
        return lhs;
      }
    }
  }

  Tree unary() {
    if (eat('-')) return Tree::negate(unary());
    if (eat('+')) return unary();
    return power();
  }

  Tree power() {
    Tree base = primary();
    if (eat('^')) {
      bool neg = eat('-');
      skip();
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected integer exponent");
      int e = std::stoi(std::string(s_.substr(start, pos_ - start)));
      return Tree::power(std::move(base), neg ? -e : e);
    }
    return base;
  }

  std::string identifier() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) fail("expected identifier");
    return std::string(s_.substr(start, pos_ - start));
  }

  Tree primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Tree t = expr();
      if (!eat(')')) fail("expected ')'");
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return Tree::integer(mpz_class(std::string(s_.substr(start, pos_ - start))));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string id = identifier();
      if ((id == "sin" || id == "cos") && eat('(')) {
        std::string arg = identifier();
        if (!eat(')')) fail("expected ')' after trig argument");
        return id == "sin" ? Tree::sin(std::move(arg)) : Tree::cos(std::move(arg));
      }
      return Tree::symbol(std::move(id));
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::size_t trig_coordinate(const std::string& name, const EnvPtr& env) {
  auto c = env->coordinate_index(name);
  if (!c || !env->is_trig(*c)) {
    throw std::invalid_argument("no trig pair for coordinate: " + name);
  }
  return *c;
}

}  // namespace

Tree parse_tree(std::string_view text) { return Parser(text).parse(); }

Expr normalize(const Tree& t, const EnvPtr& env) {
  using K = Tree::Kind;
  switch (t.kind) {
    case K::integer:
      return Expr::integer(env, t.value);
    case K::symbol:
      return Expr::symbol(env, t.name);
    case K::sin:
      return Expr::sin(env, trig_coordinate(t.name, env));
    case K::cos:
      return Expr::cos(env, trig_coordinate(t.name, env));
    case K::add:
      return normalize(t.args[0], env) + normalize(t.args[1], env);
    case K::sub:
      return normalize(t.args[0], env) - normalize(t.args[1], env);
    case K::mul:
      return normalize(t.args[0], env) * normalize(t.args[1], env);
    case K::div:
      return normalize(t.args[0], env) / normalize(t.args[1], env);
    case K::neg:
      return -normalize(t.args[0], env);
    case K::pow:
      return normalize(t.args[0], env).pow(t.exponent);
  }
  throw std::logic_error("unhandled tree kind");
}

Expr parse_expr(std::string_view text, const EnvPtr& env) {
  return normalize(parse_tree(text), env);
}

}  // namespace curvinv::sym
