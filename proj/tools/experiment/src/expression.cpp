#include "softarm/experiment/expression.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string_view>
#include <vector>

#include "softarm/errors.hpp"

namespace softarm::experiment {

struct Expression::Node {
  enum class Kind { kNumber, kVariable, kAdd, kSub, kMul, kDiv, kPow, kNeg, kCall };
  Kind kind;
  double value = 0.0;
  double (*fn)(double) = nullptr;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;

  double eval(double s) const {
    switch (kind) {
      case Kind::kNumber:
        return value;
      case Kind::kVariable:
        return s;
      case Kind::kAdd:
        return lhs->eval(s) + rhs->eval(s);
      case Kind::kSub:
        return lhs->eval(s) - rhs->eval(s);
      case Kind::kMul:
        return lhs->eval(s) * rhs->eval(s);
      case Kind::kDiv:
        return lhs->eval(s) / rhs->eval(s);
      case Kind::kPow:
        return std::pow(lhs->eval(s), rhs->eval(s));
      case Kind::kNeg:
        return -lhs->eval(s);
      case Kind::kCall:
        return fn(lhs->eval(s));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

NodePtr number(double v) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = Kind::kNumber;
  n->value = v;
  return n;
}

enum class Tok { kNumber, kIdent, kPlus, kMinus, kStar, kSlash, kCaret, kLParen, kRParen, kEnd };

struct Token {
  Tok type;
  double number = 0.0;
  std::string ident;
  std::size_t pos = 0;
};

struct Superscript {
  std::string_view utf8;
  char ascii;
};

constexpr Superscript kSuperscripts[] = {
    {"⁰", '0'}, {"¹", '1'}, {"²", '2'}, {"³", '3'}, {"⁴", '4'},
    {"⁵", '5'}, {"⁶", '6'}, {"⁷", '7'}, {"⁸", '8'}, {"⁹", '9'},
    {"⁻", '-'},
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      const std::size_t start = pos_;
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        char* end = nullptr;
        const double v = std::strtod(text_.c_str() + pos_, &end);
        if (end == text_.c_str() + pos_) fail("malformed number");
        pos_ = static_cast<std::size_t>(end - text_.c_str());
        out.push_back({Tok::kNumber, v, {}, start});
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
          ++pos_;
        }
        out.push_back({Tok::kIdent, 0.0, text_.substr(start, pos_ - start), start});
      } else if (accept("π")) {
        out.push_back({Tok::kIdent, 0.0, "pi", start});
      } else if (accept("−")) {
        out.push_back({Tok::kMinus, 0.0, {}, start});
      } else if (accept("×") || accept("·") || accept("⋅")) {
        out.push_back({Tok::kStar, 0.0, {}, start});
      } else if (accept("÷")) {
        out.push_back({Tok::kSlash, 0.0, {}, start});
      } else if (superscript_ahead()) {
        lex_superscript(out);
      } else {
        ++pos_;
        switch (c) {
          case '+': out.push_back({Tok::kPlus, 0.0, {}, start}); break;
          case '-': out.push_back({Tok::kMinus, 0.0, {}, start}); break;
          case '*': out.push_back({Tok::kStar, 0.0, {}, start}); break;
          case '/': out.push_back({Tok::kSlash, 0.0, {}, start}); break;
          case '^': out.push_back({Tok::kCaret, 0.0, {}, start}); break;
          case '(': out.push_back({Tok::kLParen, 0.0, {}, start}); break;
          case ')': out.push_back({Tok::kRParen, 0.0, {}, start}); break;
          default:
            pos_ = start;
            fail(std::string("unexpected character '") + c + "'");
        }
      }
    }
    out.push_back({Tok::kEnd, 0.0, {}, pos_});
    return out;
  }

 private:
  bool accept(std::string_view seq) {
    if (text_.compare(pos_, seq.size(), seq) != 0) return false;
    pos_ += seq.size();
    return true;
  }

  bool superscript_ahead() const {
    for (const Superscript& sup : kSuperscripts) {
      if (text_.compare(pos_, sup.utf8.size(), sup.utf8) == 0) return true;
    }
    return false;
  }

  // A run of superscript characters becomes "^ (exponent)".
  void lex_superscript(std::vector<Token>& out) {
    const std::size_t start = pos_;
    std::string digits;
    bool matched = true;
    while (matched) {
      matched = false;
      for (const Superscript& sup : kSuperscripts) {
        if (accept(sup.utf8)) {
          digits.push_back(sup.ascii);
          matched = true;
          break;
        }
      }
    }
    const bool negative = digits.front() == '-';
    const std::string magnitude = negative ? digits.substr(1) : digits;
    if (magnitude.empty() || magnitude.find('-') != std::string::npos) {
      pos_ = start;
      fail("malformed superscript exponent");
    }
    out.push_back({Tok::kCaret, 0.0, {}, start});
    if (negative) out.push_back({Tok::kMinus, 0.0, {}, start});
    out.push_back({Tok::kNumber, std::stod(magnitude), {}, start});
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("expression \"" + text_ + "\": " + what + " at offset " +
                      std::to_string(pos_));
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  Parser(const std::string& text, std::vector<Token> tokens)
      : text_(text), tokens_(std::move(tokens)) {}

  NodePtr run() {
    NodePtr root = expr();
    if (peek().type != Tok::kEnd) fail("unexpected trailing input");
    return root;
  }

 private:
  const Token& peek() const { return tokens_[at_]; }
  Token next() { return tokens_[at_++]; }

  NodePtr expr() {
    NodePtr lhs = term();
    while (peek().type == Tok::kPlus || peek().type == Tok::kMinus) {
      const Kind kind = next().type == Tok::kPlus ? Kind::kAdd : Kind::kSub;
      lhs = make(kind, lhs, term());
    }
    return lhs;
  }

  bool starts_primary() const {
    const Tok t = peek().type;
    return t == Tok::kNumber || t == Tok::kIdent || t == Tok::kLParen;
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (peek().type == Tok::kStar || peek().type == Tok::kSlash) {
        const Kind kind = next().type == Tok::kStar ? Kind::kMul : Kind::kDiv;
        lhs = make(kind, lhs, unary());
      } else if (starts_primary()) {
        lhs = make(Kind::kMul, lhs, power());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (peek().type == Tok::kMinus) {
      next();
      return make(Kind::kNeg, unary());
    }
    if (peek().type == Tok::kPlus) {
      next();
      return unary();
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (peek().type == Tok::kCaret) {
      next();
      return make(Kind::kPow, base, unary());
    }
    return base;
  }

  NodePtr primary() {
    const Token t = next();
    switch (t.type) {
      case Tok::kNumber:
        return number(t.number);
      case Tok::kLParen: {
        NodePtr inner = expr();
        if (next().type != Tok::kRParen) fail("missing ')'", t.pos);
        return inner;
      }
      case Tok::kIdent:
        return identifier(t);
      default:
        fail("expected a number, s, pi, a function or '('", t.pos);
    }
  }

  NodePtr identifier(const Token& t) {
    if (t.ident == "s") return make(Kind::kVariable);
    if (t.ident == "pi") return number(std::numbers::pi);
    double (*fn)(double) = nullptr;
    if (t.ident == "exp") fn = [](double x) { return std::exp(x); };
    if (t.ident == "sin") fn = [](double x) { return std::sin(x); };
    if (t.ident == "cos") fn = [](double x) { return std::cos(x); };
    if (t.ident == "sqrt") fn = [](double x) { return std::sqrt(x); };
    if (t.ident == "log") fn = [](double x) { return std::log(x); };
    if (!fn) fail("unknown identifier '" + t.ident + "'", t.pos);
    if (next().type != Tok::kLParen) fail("expected '(' after " + t.ident, t.pos);
    NodePtr arg = expr();
    if (next().type != Tok::kRParen) fail("missing ')'", t.pos);
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::kCall;
    n->fn = fn;
    n->lhs = std::move(arg);
    return n;
  }

  [[noreturn]] void fail(const std::string& what, std::size_t pos) const {
    throw ConfigError("expression \"" + text_ + "\": " + what + " at offset " +
                      std::to_string(pos));
  }
  [[noreturn]] void fail(const std::string& what) const { fail(what, peek().pos); }

  const std::string& text_;
  std::vector<Token> tokens_;
  std::size_t at_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.text_ = text;
  Lexer lexer(e.text_);
  e.root_ = Parser(e.text_, lexer.run()).run();
  return e;
}

double Expression::operator()(double s) const { return root_->eval(s); }

ScalarField Expression::sample(const Grid& grid) const {
  ScalarField out(grid.size());
  for (int i = 0; i < grid.size(); ++i) out(i) = (*this)(grid.s(i));
  return out;
}

}  // namespace softarm::experiment
