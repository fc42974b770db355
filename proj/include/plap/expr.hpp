#pragma once

// Arithmetic expression language used to describe p(t), f(x), g(x) and h(t)
// in configuration files.
//
// Grammar (lowest to highest binding):
//
//   expr    := term   { ('+' | '-') term }          left-associative
//   term    := unary  { ('*' | '/') unary }          left-associative
//   unary   := '-' unary | power
//   power   := primary [ '^' unary ]                 right-associative
//   primary := number | identifier | call | '(' expr ')'
//   call    := name '(' expr ')'    name in {sin, cos, exp, log, abs, sqrt}
//
// Unary minus binds looser than '^', so -x^2 == -(x^2) and 2^-1 == 0.5.
// `pi` is a named constant. There is no implicit multiplication.

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace plap::expr {

enum class TokenKind { number, identifier, op, paren, comma };

struct Token {
  TokenKind kind;
  std::string lexeme;
  std::size_t position;  // byte offset into the source

  bool operator==(const Token&) const = default;
};

std::vector<Token> tokenize(std::string_view source);

enum class BinaryOp : char { add = '+', sub = '-', mul = '*', div = '/', pow = '^' };
enum class Function { sin, cos, exp, log, abs, sqrt };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Constant {
  double value;
  std::string name;  // non-empty for named constants (pi)
};
struct Variable {
  std::string name;
  std::size_t position;
};
struct Parameter {
  std::string name;
  std::size_t position;
};
struct Negate {
  NodePtr child;
};
struct Binary {
  BinaryOp op;
  NodePtr left;
  NodePtr right;
};
struct Call {
  Function fn;
  NodePtr arg;
};

struct Node {
  std::variant<Constant, Variable, Parameter, Negate, Binary, Call> v;
};

/// Immutable expression tree. Copies share structure.
class Expr {
 public:
  Expr() = default;
  explicit Expr(NodePtr root) : root_(std::move(root)) {}

  const Node& root() const { return *root_; }
  bool empty() const noexcept { return !root_; }

 private:
  NodePtr root_;
};

using SymbolSet = std::set<std::string, std::less<>>;
using Bindings = std::map<std::string, double, std::less<>>;

/// Identifiers listed in `parameters` become Parameter nodes, all other
/// identifiers (except `pi`) become Variable nodes.
Expr parse(std::span<const Token> tokens, const SymbolSet& parameters = {});
Expr parse(std::string_view source, const SymbolSet& parameters = {});

double evaluate(const Expr& e, const Bindings& bindings);

struct Offender {
  std::string name;
  std::size_t position;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Offender> offenders;  // in source order
};

ValidationReport validate(const Expr& e, const SymbolSet& allowed);

/// Every variable and parameter symbol, sorted.
SymbolSet symbols(const Expr& e);

/// Replaces bound variables and parameters by constants.
Expr substitute(const Expr& e, const Bindings& bindings);

/// S-expression dump of the tree, e.g. "(^ 2 (^ 3 2))".
std::string to_sexpr(const Expr& e);

/// Fully parenthesised infix text; parse(to_string(e)) rebuilds the same tree.
std::string to_string(const Expr& e);

/// Expression of a single real variable with parameters already bound.
class UnaryFunction {
 public:
  UnaryFunction() = default;
  UnaryFunction(const Expr& e, std::string variable, const Bindings& parameters = {});

  /// Parses `source` and checks that only `variable` and parameter names occur.
  static UnaryFunction compile(std::string_view source, std::string variable,
                               const Bindings& parameters = {});

  double operator()(double x) const;

  const Expr& expression() const noexcept { return expr_; }
  const std::string& variable() const noexcept { return variable_; }

 private:
  Expr expr_;
  std::string variable_;
};

}  // namespace plap::expr
