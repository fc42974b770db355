#include "plap/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>

#include "plap/error.hpp"

namespace plap::expr {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

constexpr std::array<std::pair<std::string_view, Function>, 6> kFunctions{{
    {"sin", Function::sin},
    {"cos", Function::cos},
    {"exp", Function::exp},
    {"log", Function::log},
    {"abs", Function::abs},
    {"sqrt", Function::sqrt},
}};

std::optional<Function> lookup_function(std::string_view name) {
  for (const auto& [n, f] : kFunctions)
    if (n == name) return f;
  return std::nullopt;
}

std::string_view function_name(Function f) {
  for (const auto& [n, g] : kFunctions)
    if (g == f) return n;
  return "?";
}

NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), ptr);
}

class Parser {
 public:
  Parser(std::span<const Token> tokens, const SymbolSet& parameters)
      : tokens_(tokens), parameters_(parameters) {
    if (!tokens_.empty()) end_ = tokens_.back().position + tokens_.back().lexeme.size();
  }

  Expr run() {
    if (tokens_.empty()) throw SyntaxError("empty expression", 0);
    NodePtr root = expr();
    if (pos_ < tokens_.size()) unexpected(tokens_[pos_]);
    return Expr(std::move(root));
  }

 private:
  const Token* peek() const { return pos_ < tokens_.size() ? &tokens_[pos_] : nullptr; }

  bool at_op(char c) const {
    const Token* t = peek();
    return t && t->kind == TokenKind::op && t->lexeme[0] == c;
  }

  bool at_paren(char c) const {
    const Token* t = peek();
    return t && t->kind == TokenKind::paren && t->lexeme[0] == c;
  }

  [[noreturn]] void unexpected(const Token& t) const {
    switch (t.kind) {
      case TokenKind::comma:
        throw SyntaxError("calls take a single argument; unexpected ','", t.position);
      case TokenKind::paren:
        throw SyntaxError("unbalanced parenthesis '" + t.lexeme + "'", t.position);
      default:
        throw SyntaxError("unexpected token '" + t.lexeme + "'", t.position);
    }
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (at_op('+') || at_op('-')) {
      BinaryOp op = static_cast<BinaryOp>(tokens_[pos_++].lexeme[0]);
      lhs = make(Node{Binary{op, lhs, term()}});
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (at_op('*') || at_op('/')) {
      BinaryOp op = static_cast<BinaryOp>(tokens_[pos_++].lexeme[0]);
      lhs = make(Node{Binary{op, lhs, unary()}});
    }
    return lhs;
  }

  NodePtr unary() {
    if (at_op('-')) {
      ++pos_;
      return make(Node{Negate{unary()}});
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (at_op('^')) {
      ++pos_;
      return make(Node{Binary{BinaryOp::pow, base, unary()}});
    }
    return base;
  }

  NodePtr primary() {
    const Token* t = peek();
    if (!t) throw SyntaxError("unexpected end of input", end_);
    switch (t->kind) {
      case TokenKind::number: {
        ++pos_;
        double v = 0.0;
        std::from_chars(t->lexeme.data(), t->lexeme.data() + t->lexeme.size(), v);
        return make(Node{Constant{v, {}}});
      }
      case TokenKind::identifier:
        return identifier();
      case TokenKind::paren:
        if (t->lexeme == "(") {
          ++pos_;
          NodePtr inner = expr();
          if (!at_paren(')')) {
            if (const Token* u = peek()) unexpected(*u);
            throw SyntaxError("unbalanced parenthesis: expected ')'", end_);
          }
          ++pos_;
          return inner;
        }
        unexpected(*t);
      default:
        unexpected(*t);
    }
  }

  NodePtr identifier() {
    const Token& t = tokens_[pos_++];
    const bool call = at_paren('(');
    if (call) {
      auto fn = lookup_function(t.lexeme);
      if (!fn) throw SyntaxError("unknown function '" + t.lexeme + "'", t.position);
      ++pos_;
      NodePtr arg = expr();
      if (!at_paren(')')) {
        if (const Token* u = peek()) unexpected(*u);
        throw SyntaxError("unbalanced parenthesis: expected ')'", end_);
      }
      ++pos_;
      return make(Node{Call{*fn, arg}});
    }
    if (lookup_function(t.lexeme))
      throw SyntaxError("function '" + t.lexeme + "' requires '('", t.position);
    if (t.lexeme == "pi") return make(Node{Constant{std::numbers::pi, "pi"}});
    if (parameters_.contains(t.lexeme)) return make(Node{Parameter{t.lexeme, t.position}});
    return make(Node{Variable{t.lexeme, t.position}});
  }

  std::span<const Token> tokens_;
  const SymbolSet& parameters_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
};

template <class Lookup>
double eval_node(const Node& n, const Lookup& lookup);

double check_finite(double v) {
  if (!std::isfinite(v)) throw EvalError("non-finite result");
  return v;
}

double apply(Function f, double x) {
  switch (f) {
    case Function::sin:
      return std::sin(x);
    case Function::cos:
      return std::cos(x);
    case Function::exp:
      return check_finite(std::exp(x));
    case Function::log:
      if (!(x > 0.0)) throw EvalError("log of non-positive argument");
      return std::log(x);
    case Function::abs:
      return std::abs(x);
    case Function::sqrt:
      if (x < 0.0) throw EvalError("sqrt of negative argument");
      return std::sqrt(x);
  }
  return 0.0;
}

double apply(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::add:
      return check_finite(a + b);
    case BinaryOp::sub:
      return check_finite(a - b);
    case BinaryOp::mul:
      return check_finite(a * b);
    case BinaryOp::div:
      if (b == 0.0) throw EvalError("division by zero");
      return check_finite(a / b);
    case BinaryOp::pow: {
      if (a == 0.0 && b < 0.0) throw EvalError("zero raised to a negative power");
      double r = std::pow(a, b);
      if (std::isnan(r)) throw EvalError("negative base with non-integer exponent");
      return check_finite(r);
    }
  }
  return 0.0;
}

template <class Lookup>
double eval_node(const Node& n, const Lookup& lookup) {
  return std::visit(
      [&](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return x.value;
        } else if constexpr (std::is_same_v<T, Variable> || std::is_same_v<T, Parameter>) {
          return lookup(x.name);
        } else if constexpr (std::is_same_v<T, Negate>) {
          return -eval_node(*x.child, lookup);
        } else if constexpr (std::is_same_v<T, Binary>) {
          double a = eval_node(*x.left, lookup);
          double b = eval_node(*x.right, lookup);
          return apply(x.op, a, b);
        } else {
          return apply(x.fn, eval_node(*x.arg, lookup));
        }
      },
      n.v);
}

template <class F>
void walk(const Node& n, const F& f) {
  f(n);
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Negate>) {
          walk(*x.child, f);
        } else if constexpr (std::is_same_v<T, Binary>) {
          walk(*x.left, f);
          walk(*x.right, f);
        } else if constexpr (std::is_same_v<T, Call>) {
          walk(*x.arg, f);
        }
      },
      n.v);
}

NodePtr substitute_node(const NodePtr& n, const Bindings& b) {
  return std::visit(
      [&](const auto& x) -> NodePtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return n;
        } else if constexpr (std::is_same_v<T, Variable> || std::is_same_v<T, Parameter>) {
          auto it = b.find(x.name);
          return it == b.end() ? n : make(Node{Constant{it->second, {}}});
        } else if constexpr (std::is_same_v<T, Negate>) {
          return make(Node{Negate{substitute_node(x.child, b)}});
        } else if constexpr (std::is_same_v<T, Binary>) {
          return make(Node{Binary{x.op, substitute_node(x.left, b), substitute_node(x.right, b)}});
        } else {
          return make(Node{Call{x.fn, substitute_node(x.arg, b)}});
        }
      },
      n->v);
}

void sexpr(const Node& n, std::string& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Constant>) {
          out += x.name.empty() ? format_number(x.value) : x.name;
        } else if constexpr (std::is_same_v<T, Variable>) {
          out += x.name;
        } else if constexpr (std::is_same_v<T, Parameter>) {
          out += '@';
          out += x.name;
        } else if constexpr (std::is_same_v<T, Negate>) {
          out += "(neg ";
          sexpr(*x.child, out);
          out += ')';
        } else if constexpr (std::is_same_v<T, Binary>) {
          out += '(';
          out += static_cast<char>(x.op);
          out += ' ';
          sexpr(*x.left, out);
          out += ' ';
          sexpr(*x.right, out);
          out += ')';
        } else {
          out += '(';
          out += function_name(x.fn);
          out += ' ';
          sexpr(*x.arg, out);
          out += ')';
        }
      },
      n.v);
}

void infix(const Node& n, std::string& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Constant>) {
          if (!x.name.empty()) {
            out += x.name;
          } else if (std::signbit(x.value)) {
            out += "(-" + format_number(-x.value) + ")";
          } else {
            out += format_number(x.value);
          }
        } else if constexpr (std::is_same_v<T, Variable> || std::is_same_v<T, Parameter>) {
          out += x.name;
        } else if constexpr (std::is_same_v<T, Negate>) {
          out += "(-";
          infix(*x.child, out);
          out += ')';
        } else if constexpr (std::is_same_v<T, Binary>) {
          out += '(';
          infix(*x.left, out);
          out += ' ';
          out += static_cast<char>(x.op);
          out += ' ';
          infix(*x.right, out);
          out += ')';
        } else {
          out += function_name(x.fn);
          out += '(';
          infix(*x.arg, out);
          out += ')';
        }
      },
      n.v);
}

}  // namespace

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = src.size();
  while (i < n) {
    const char c = src[i];
    if (is_space(c)) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_digit(c) || (c == '.' && i + 1 < n && is_digit(src[i + 1]))) {
      while (i < n && is_digit(src[i])) ++i;
      if (i < n && src[i] == '.') {
        ++i;
        while (i < n && is_digit(src[i])) ++i;
      }
      if (i < n && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < n && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < n && is_digit(src[j])) {
          while (j < n && is_digit(src[j])) ++j;
          i = j;
        }
      }
      std::string lexeme(src.substr(start, i - start));
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), v);
      if (ec != std::errc{} || ptr != lexeme.data() + lexeme.size() || !std::isfinite(v))
        throw LexError("number out of range '" + lexeme + "'", start);
      out.push_back({TokenKind::number, std::move(lexeme), start});
    } else if (is_ident_start(c)) {
      while (i < n && is_ident_char(src[i])) ++i;
      out.push_back({TokenKind::identifier, std::string(src.substr(start, i - start)), start});
    } else if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^') {
      out.push_back({TokenKind::op, std::string(1, c), start});
      ++i;
    } else if (c == '(' || c == ')') {
      out.push_back({TokenKind::paren, std::string(1, c), start});
      ++i;
    } else if (c == ',') {
      out.push_back({TokenKind::comma, ",", start});
      ++i;
    } else {
      throw LexError(std::string("unexpected character '") + c + "'", start);
    }
  }
  return out;
}

Expr parse(std::span<const Token> tokens, const SymbolSet& parameters) {
  return Parser(tokens, parameters).run();
}

Expr parse(std::string_view source, const SymbolSet& parameters) {
  auto tokens = tokenize(source);
  if (tokens.empty()) throw SyntaxError("empty expression", 0);
  return parse(std::span<const Token>(tokens), parameters);
}

double evaluate(const Expr& e, const Bindings& bindings) {
  if (e.empty()) throw EvalError("empty expression");
  return eval_node(e.root(), [&](const std::string& name) {
    auto it = bindings.find(name);
    if (it == bindings.end()) throw UnboundSymbol(name);
    return it->second;
  });
}

ValidationReport validate(const Expr& e, const SymbolSet& allowed) {
  ValidationReport r;
  if (e.empty()) return r;
  walk(e.root(), [&](const Node& n) {
    const std::string* name = nullptr;
    std::size_t position = 0;
    if (auto* v = std::get_if<Variable>(&n.v)) {
      name = &v->name;
      position = v->position;
    } else if (auto* p = std::get_if<Parameter>(&n.v)) {
      name = &p->name;
      position = p->position;
    }
    if (name && !allowed.contains(*name)) r.offenders.push_back({*name, position});
  });
  r.ok = r.offenders.empty();
  return r;
}

SymbolSet symbols(const Expr& e) {
  SymbolSet s;
  if (e.empty()) return s;
  walk(e.root(), [&](const Node& n) {
    if (auto* v = std::get_if<Variable>(&n.v)) s.insert(v->name);
    if (auto* p = std::get_if<Parameter>(&n.v)) s.insert(p->name);
  });
  return s;
}

Expr substitute(const Expr& e, const Bindings& bindings) {
  if (e.empty()) return e;
  return Expr(substitute_node(std::make_shared<const Node>(e.root()), bindings));
}

std::string to_sexpr(const Expr& e) {
  std::string out;
  if (!e.empty()) sexpr(e.root(), out);
  return out;
}

std::string to_string(const Expr& e) {
  std::string out;
  if (!e.empty()) infix(e.root(), out);
  return out;
}

UnaryFunction::UnaryFunction(const Expr& e, std::string variable, const Bindings& parameters)
    : expr_(substitute(e, parameters)), variable_(std::move(variable)) {}

UnaryFunction UnaryFunction::compile(std::string_view source, std::string variable,
                                     const Bindings& parameters) {
  SymbolSet params;
  for (const auto& [k, v] : parameters) params.insert(k);
  Expr e = parse(source, params);
  SymbolSet allowed = params;
  allowed.insert(variable);
  auto report = validate(e, allowed);
  if (!report.ok) {
    const auto& o = report.offenders.front();
    throw SyntaxError("unknown symbol '" + o.name + "'", o.position);
  }
  return UnaryFunction(e, std::move(variable), parameters);
}

double UnaryFunction::operator()(double x) const {
  if (expr_.empty()) throw EvalError("empty expression");
  return eval_node(expr_.root(), [&](const std::string& name) {
    if (name != variable_) throw UnboundSymbol(name);
    return x;
  });
}

}  // namespace plap::expr
