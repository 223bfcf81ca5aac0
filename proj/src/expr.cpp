#include "egjms/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "egjms/error.hpp"

namespace egjms {

namespace {

NodePtr make(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

NodePtr binary(NodeKind k, const Expr& a, const Expr& b) {
  ExprNode n;
  n.kind = k;
  n.lhs = a.ptr();
  n.rhs = b.ptr();
  return make(std::move(n));
}

const char* func_name(FuncKind f) {
  switch (f) {
    case FuncKind::Sin: return "sin";
    case FuncKind::Cos: return "cos";
    case FuncKind::Exp: return "exp";
    case FuncKind::Log: return "log";
    case FuncKind::Sqrt: return "sqrt";
    case FuncKind::Tanh: return "tanh";
    case FuncKind::Atan: return "atan";
  }
  return "?";
}

bool func_from_name(std::string_view s, FuncKind* f) {
  static const std::pair<std::string_view, FuncKind> table[] = {
      {"sin", FuncKind::Sin},   {"cos", FuncKind::Cos},   {"exp", FuncKind::Exp},
      {"log", FuncKind::Log},   {"sqrt", FuncKind::Sqrt}, {"tanh", FuncKind::Tanh},
      {"atan", FuncKind::Atan}};
  for (auto& [name, kind] : table)
    if (name == s) {
      *f = kind;
      return true;
    }
  return false;
}

int precedence(NodeKind k) {
  switch (k) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Neg: return 3;
    case NodeKind::Pow: return 4;
    default: return 5;
  }
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void print(const ExprNode& n, std::ostringstream& os) {
  auto child = [&](const ExprNode& c, int min_prec) {
    if (precedence(c.kind) < min_prec || (c.kind == NodeKind::Number && c.number < 0)) {
      os << '(';
      print(c, os);
      os << ')';
    } else {
      print(c, os);
    }
  };
  switch (n.kind) {
    case NodeKind::Number: os << format_number(n.number); break;
    case NodeKind::Pi: os << "pi"; break;
    case NodeKind::VarX: os << 'x' << n.index; break;
    case NodeKind::VarU: os << 'u' << n.index; break;
    case NodeKind::Add:
      child(*n.lhs, 1);
      os << " + ";
      child(*n.rhs, 2);
      break;
    case NodeKind::Sub:
      child(*n.lhs, 1);
      os << " - ";
      child(*n.rhs, 2);
      break;
    case NodeKind::Mul:
      child(*n.lhs, 2);
      os << '*';
      child(*n.rhs, 3);
      break;
    case NodeKind::Div:
      child(*n.lhs, 2);
      os << '/';
      child(*n.rhs, 3);
      break;
    case NodeKind::Neg:
      os << '-';
      child(*n.lhs, 4);
      break;
    case NodeKind::Pow:
      child(*n.lhs, 5);
      os << '^';
      if (n.index < 0)
        os << '(' << n.index << ')';
      else
        os << n.index;
      break;
    case NodeKind::Func:
      os << func_name(n.func) << '(';
      print(*n.lhs, os);
      os << ')';
      break;
  }
}

void max_index(const ExprNode& n, NodeKind k, int* best) {
  if (n.kind == k) *best = std::max(*best, n.index);
  if (n.lhs) max_index(*n.lhs, k, best);
  if (n.rhs) max_index(*n.rhs, k, best);
}

// --- parser ---------------------------------------------------------------

struct Token {
  enum Kind { Number, Ident, Op, LParen, RParen, End } kind;
  std::string text;
  double value = 0.0;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  Token next() {
    skip_space();
    Token t;
    t.line = line_;
    t.column = col_;
    if (pos_ >= s_.size()) {
      t.kind = Token::End;
      return t;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) advance();
      if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
        std::size_t look = pos_ + 1;
        if (look < s_.size() && (s_[look] == '+' || s_[look] == '-')) ++look;
        if (look < s_.size() && std::isdigit(static_cast<unsigned char>(s_[look]))) {
          while (pos_ < look) advance();
          while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) advance();
        }
      }
      t.kind = Token::Number;
      t.text = std::string(s_.substr(start, pos_ - start));
      const char* b = t.text.data();
      const char* e = b + t.text.size();
      auto [ptr, ec] = std::from_chars(b, e, t.value);
      if (ec != std::errc() || ptr != e)
        throw ParseError("malformed number '" + t.text + "'", t.line, t.column);
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) advance();
      t.kind = Token::Ident;
      t.text = std::string(s_.substr(start, pos_ - start));
      return t;
    }
    advance();
    t.text = std::string(1, c);
    switch (c) {
      case '+': case '-': case '*': case '/': case '^': t.kind = Token::Op; return t;
      case '(': t.kind = Token::LParen; return t;
      case ')': t.kind = Token::RParen; return t;
      default: throw ParseError(std::string("unexpected character '") + c + "'", t.line, t.column);
    }
  }

 private:
  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) advance();
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view s) : lex_(s) { tok_ = lex_.next(); }

  Expr parse() {
    Expr e = expr();
    if (tok_.kind != Token::End) fail("unexpected '" + tok_.text + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, tok_.line, tok_.column);
  }
  void shift() { tok_ = lex_.next(); }
  bool is_op(char c) const { return tok_.kind == Token::Op && tok_.text[0] == c; }

  Expr expr() {
    Expr e = term();
    while (is_op('+') || is_op('-')) {
      const bool plus = is_op('+');
      shift();
      Expr r = term();
      e = plus ? e + r : e - r;
    }
    return e;
  }

  Expr term() {
    Expr e = unary();
    while (is_op('*') || is_op('/')) {
      const bool times = is_op('*');
      shift();
      Expr r = unary();
      e = times ? e * r : e / r;
    }
    return e;
  }

  Expr unary() {
    if (is_op('-')) {
      shift();
      return -unary();
    }
    if (is_op('+')) {
      shift();
      return unary();
    }
    return factor();
  }

  Expr factor() {
    Expr base = atom();
    if (!is_op('^')) return base;
    shift();
    return pow(base, integer_exponent());
  }

  int integer_exponent() {
    bool paren = false;
    if (tok_.kind == Token::LParen) {
      paren = true;
      shift();
    }
    int sign = 1;
    if (is_op('-') || is_op('+')) {
      sign = is_op('-') ? -1 : 1;
      shift();
    }
    if (tok_.kind != Token::Number) fail("expected an integer exponent");
    const double v = tok_.value;
    if (v != std::floor(v) || tok_.text.find_first_of(".eE") != std::string::npos || v > 64)
      fail("exponent must be an integer");
    shift();
    if (paren) {
      if (tok_.kind != Token::RParen) fail("expected ')'");
      shift();
    }
    return sign * static_cast<int>(v);
  }

  Expr atom() {
    if (tok_.kind == Token::Number) {
      const double v = tok_.value;
      shift();
      return Expr::constant(v);
    }
    if (tok_.kind == Token::LParen) {
      shift();
      Expr e = expr();
      if (tok_.kind != Token::RParen) fail("expected ')'");
      shift();
      return e;
    }
    if (tok_.kind == Token::Ident) {
      const std::string name = tok_.text;
      FuncKind f;
      if (func_from_name(name, &f)) {
        shift();
        if (tok_.kind != Token::LParen) fail("expected '(' after " + name);
        shift();
        Expr arg = expr();
        if (tok_.kind != Token::RParen) fail("expected ')'");
        shift();
        return Expr::func(f, arg);
      }
      if (name == "pi") {
        shift();
        return Expr::pi();
      }
      if (name.size() == 2 && (name[0] == 'x' || name[0] == 'u') && name[1] >= '1' && name[1] <= '9') {
        const int idx = name[1] - '0';
        shift();
        return name[0] == 'x' ? Expr::x(idx) : Expr::u(idx);
      }
      fail("unknown identifier '" + name + "'");
    }
    if (tok_.kind == Token::End) fail("unexpected end of expression");
    fail("unexpected '" + tok_.text + "'");
  }

  Lexer lex_;
  Token tok_;
};

}  // namespace

Expr Expr::constant(double v) {
  ExprNode n;
  n.kind = NodeKind::Number;
  n.number = v;
  return Expr(make(std::move(n)));
}

Expr Expr::pi() {
  ExprNode n;
  n.kind = NodeKind::Pi;
  return Expr(make(std::move(n)));
}

Expr Expr::x(int i) {
  if (i < 1) throw SpecError("variable index must be positive");
  ExprNode n;
  n.kind = NodeKind::VarX;
  n.index = i;
  return Expr(make(std::move(n)));
}

Expr Expr::u(int j) {
  if (j < 1) throw SpecError("variable index must be positive");
  ExprNode n;
  n.kind = NodeKind::VarU;
  n.index = j;
  return Expr(make(std::move(n)));
}

Expr Expr::func(FuncKind f, const Expr& arg) {
  ExprNode n;
  n.kind = NodeKind::Func;
  n.func = f;
  n.lhs = arg.ptr();
  return Expr(make(std::move(n)));
}

int Expr::max_x_index() const {
  int best = 0;
  max_index(*node_, NodeKind::VarX, &best);
  return best;
}

int Expr::max_u_index() const {
  int best = 0;
  max_index(*node_, NodeKind::VarU, &best);
  return best;
}

std::string Expr::to_string() const {
  std::ostringstream os;
  print(*node_, os);
  return os.str();
}

Expr operator+(const Expr& a, const Expr& b) { return Expr(binary(NodeKind::Add, a, b)); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(binary(NodeKind::Sub, a, b)); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(binary(NodeKind::Mul, a, b)); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(binary(NodeKind::Div, a, b)); }

Expr operator-(const Expr& a) {
  ExprNode n;
  n.kind = NodeKind::Neg;
  n.lhs = a.ptr();
  return Expr(make(std::move(n)));
}

Expr pow(const Expr& a, int exponent) {
  ExprNode n;
  n.kind = NodeKind::Pow;
  n.index = exponent;
  n.lhs = a.ptr();
  return Expr(make(std::move(n)));
}

Expr sin(const Expr& a) { return Expr::func(FuncKind::Sin, a); }
Expr cos(const Expr& a) { return Expr::func(FuncKind::Cos, a); }
Expr exp(const Expr& a) { return Expr::func(FuncKind::Exp, a); }
Expr log(const Expr& a) { return Expr::func(FuncKind::Log, a); }
Expr sqrt(const Expr& a) { return Expr::func(FuncKind::Sqrt, a); }
Expr tanh(const Expr& a) { return Expr::func(FuncKind::Tanh, a); }
Expr atan(const Expr& a) { return Expr::func(FuncKind::Atan, a); }

Expr parse_expression(std::string_view text) { return Parser(text).parse(); }

// --- evaluation -----------------------------------------------------------

JetEvaluator::JetEvaluator(std::vector<Jet> x, std::vector<Jet> u)
    : x_(std::move(x)), u_(std::move(u)) {
  const Jet* first = !x_.empty() ? &x_[0] : (!u_.empty() ? &u_[0] : nullptr);
  if (!first) throw SpecError("evaluator needs at least one bound variable");
  dim_ = first->dim();
  order_ = first->order();
  for (const auto* v : {&x_, &u_})
    for (const auto& j : *v) {
      if (j.dim() != dim_) throw OrderError("bound jets must share a dimension");
      order_ = std::min(order_, j.order());
    }
}

Jet JetEvaluator::operator()(const Expr& e) {
  // Memo keys are node addresses; keep the trees alive so none is reused.
  keep_alive_.push_back(e.ptr());
  return eval(e.node());
}

Jet JetEvaluator::eval(const ExprNode& n) {
  if (auto it = memo_.find(&n); it != memo_.end()) return it->second;
  Jet r;
  switch (n.kind) {
    case NodeKind::Number: r = Jet::constant(n.number, dim_, order_); break;
    case NodeKind::Pi: r = Jet::constant(std::numbers::pi, dim_, order_); break;
    case NodeKind::VarX:
      if (n.index > static_cast<int>(x_.size()))
        throw SpecError("variable x" + std::to_string(n.index) + " is not bound here");
      r = x_[n.index - 1];
      break;
    case NodeKind::VarU:
      if (n.index > static_cast<int>(u_.size()))
        throw SpecError("variable u" + std::to_string(n.index) + " is not bound here");
      r = u_[n.index - 1];
      break;
    case NodeKind::Add: r = eval(*n.lhs) + eval(*n.rhs); break;
    case NodeKind::Sub: r = eval(*n.lhs) - eval(*n.rhs); break;
    case NodeKind::Mul: r = eval(*n.lhs) * eval(*n.rhs); break;
    case NodeKind::Div: r = eval(*n.lhs) / eval(*n.rhs); break;
    case NodeKind::Neg: r = -eval(*n.lhs); break;
    case NodeKind::Pow: r = pow(eval(*n.lhs), n.index); break;
    case NodeKind::Func: {
      const Jet a = eval(*n.lhs);
      switch (n.func) {
        case FuncKind::Sin: r = sin(a); break;
        case FuncKind::Cos: r = cos(a); break;
        case FuncKind::Exp: r = exp(a); break;
        case FuncKind::Log: r = log(a); break;
        case FuncKind::Sqrt: r = sqrt(a); break;
        case FuncKind::Tanh: r = tanh(a); break;
        case FuncKind::Atan: r = atan(a); break;
      }
      break;
    }
  }
  if (r.order() > order_) r = r.truncated(order_);
  memo_.emplace(&n, r);
  return r;
}

Jet evaluate(const Expr& e, std::span<const double> point, int order, int xcount) {
  const int dim = static_cast<int>(point.size());
  if (dim < 1) throw SpecError("evaluation point must have at least one coordinate");
  if (xcount < 0) xcount = dim;
  std::vector<Jet> x, u;
  for (int i = 0; i < dim; ++i) {
    Jet v = Jet::variable(i, point[i], dim, order);
    (i < xcount ? x : u).push_back(std::move(v));
  }
  JetEvaluator ev(std::move(x), std::move(u));
  return ev(e);
}

}  // namespace egjms
