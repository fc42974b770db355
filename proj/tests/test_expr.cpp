#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "plap/error.hpp"
#include "plap/expr.hpp"

using namespace plap;
using namespace plap::expr;

namespace {

const SymbolSet kParams{"sigma", "mu"};

std::string outcome(const std::string& src) {
  try {
    return to_sexpr(parse(src, kParams));
  } catch (const LexError& e) {
    return std::string("LexError: ") + e.what();
  } catch (const SyntaxError& e) {
    return std::string("SyntaxError: ") + e.what();
  }
}

// Random well-formed source text from the grammar.
std::string random_expr(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 7 : 2);
  switch (pick(rng)) {
    case 0: return std::to_string(std::uniform_int_distribution<int>(0, 9)(rng));
    case 1: return "x";
    case 2: return "pi";
    case 3: return random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1);
    case 4: return random_expr(rng, depth - 1) + "*" + random_expr(rng, depth - 1);
    case 5: return "-" + random_expr(rng, depth - 1);
    case 6: return "(" + random_expr(rng, depth - 1) + ")^" + random_expr(rng, depth - 1);
    default: {
      static const char* fns[] = {"sin", "cos", "exp", "log", "abs", "sqrt"};
      return std::string(fns[std::uniform_int_distribution<int>(0, 5)(rng)]) + "(" +
             random_expr(rng, depth - 1) + ")";
    }
  }
}

}  // namespace

TEST_CASE("tokenize splits operators, identifiers and numbers") {
  const auto toks = tokenize("1/x^2");
  REQUIRE(toks.size() == 5);
  CHECK(toks[0] == Token{TokenKind::number, "1", 0});
  CHECK(toks[1] == Token{TokenKind::op, "/", 1});
  CHECK(toks[2] == Token{TokenKind::identifier, "x", 2});
  CHECK(toks[3] == Token{TokenKind::op, "^", 3});
  CHECK(toks[4] == Token{TokenKind::number, "2", 4});
  CHECK(tokenize("").empty());
}

TEST_CASE("tokenize keeps positions increasing and lexemes covering the source") {
  const std::string src = "3 + sin(2*pi*t)";
  const auto toks = tokenize(src);
  CHECK(toks.size() == 10);
  std::string joined;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    CHECK(!toks[i].lexeme.empty());
    if (i) CHECK(toks[i].position > toks[i - 1].position);
    joined += toks[i].lexeme;
  }
  CHECK(joined == "3+sin(2*pi*t)");
  CHECK(toks[6] == Token{TokenKind::identifier, "pi", 10});
}

TEST_CASE("tokenize rejects characters outside the alphabet") {
  try {
    tokenize("x # 1");
    FAIL("no error");
  } catch (const LexError& e) {
    CHECK(e.offset() == 2);
  }
}

TEST_CASE("parser golden suite") {
  std::ifstream in(PLAP_TEST_DATA "/parser_golden.tsv");
  REQUIRE(in);
  std::string line;
  int cases = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    REQUIRE(tab != std::string::npos);
    const std::string src = line.substr(0, tab);
    const std::string expected = line.substr(tab + 1);
    INFO("source: '" << src << "'");
    CHECK(outcome(src) == expected);
    ++cases;
  }
  CHECK(cases == 30);
}

TEST_CASE("evaluation matches hand-computed values") {
  struct Case {
    const char* src;
    Bindings b;
    double expected;
  };
  const Case cases[] = {
      {"2^3^2", {}, 512.0},
      {"-x^2", {{"x", 3.0}}, -9.0},
      {"1 - 2 - 3", {}, -4.0},
      {"8/4/2", {}, 1.0},
      {"2^-1", {}, 0.5},
      {"2^-x^2", {{"x", 1.0}}, 0.5},
      {"sin(2*pi*t)", {{"t", 0.25}}, 1.0},
      {"3 + sin(2*pi*t)", {{"t", 0.0}}, 3.0},
      {"sigma/x^mu", {{"sigma", 2.0}, {"mu", 3.0}, {"x", 2.0}}, 0.25},
      {"1.5e-3*x", {{"x", 2.0}}, 0.003},
      {"abs(-x)", {{"x", 2.5}}, 2.5},
      {"sqrt(x)^2", {{"x", 2.0}}, 2.0},
      {".5+x", {{"x", 0.25}}, 0.75},
      {"x^y^z", {{"x", 2.0}, {"y", 1.0}, {"z", 3.0}}, 2.0},
      {"exp(log(x))", {{"x", 3.0}}, 3.0},
      {"cos(pi)", {}, -1.0},
      {"(2+3)*4 - 2*3+4", {}, 18.0},
  };
  for (const auto& c : cases) {
    INFO(c.src);
    const double v = evaluate(parse(c.src, kParams), c.b);
    CHECK(std::abs(v - c.expected) <= 1e-15 * std::abs(c.expected));
  }
}

TEST_CASE("evaluation errors are raised, not returned as NaN") {
  CHECK_THROWS_AS(evaluate(parse("1/x"), {{"x", 0.0}}), EvalError);
  CHECK_THROWS_AS(evaluate(parse("log(x)"), {{"x", 0.0}}), EvalError);
  CHECK_THROWS_AS(evaluate(parse("log(x)"), {{"x", -1.0}}), EvalError);
  CHECK_THROWS_AS(evaluate(parse("0^-1"), {}), EvalError);
  CHECK_THROWS_AS(evaluate(parse("x + 1"), {}), UnboundSymbol);
}

TEST_CASE("validate reports offenders with offsets") {
  CHECK(validate(parse("1/x"), {"x"}).ok);
  const auto rep = validate(parse("1/u"), {"x"});
  CHECK_FALSE(rep.ok);
  REQUIRE(rep.offenders.size() == 1);
  CHECK(rep.offenders[0].name == "u");
  CHECK(rep.offenders[0].position == 2);
  CHECK(validate(parse("sigma/x^mu", kParams), {"x", "sigma", "mu"}).ok);
}

TEST_CASE("UnaryFunction binds parameters and rejects stray symbols") {
  const auto g = UnaryFunction::compile("sigma/x^mu", "x", {{"sigma", 1.0}, {"mu", 2.0}});
  CHECK(g(2.0) == 0.25);
  CHECK_THROWS(UnaryFunction::compile("1/u", "x"));
}

TEST_CASE("printing and re-parsing keeps evaluation bitwise identical") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> xs(0.1, 3.0);
  for (int k = 0; k < 200; ++k) {
    const Expr e = parse(random_expr(rng, 4));
    const Expr back = parse(to_string(e));
    CHECK(to_sexpr(back) == to_sexpr(e));
    for (int j = 0; j < 100; ++j) {
      const Bindings b{{"x", xs(rng)}};
      double a = 0.0, c = 0.0;
      bool ea = false, ec = false;
      try { a = evaluate(e, b); } catch (const EvalError&) { ea = true; }
      try { c = evaluate(back, b); } catch (const EvalError&) { ec = true; }
      CHECK(ea == ec);
      if (!ea && !(std::isnan(a) && std::isnan(c))) CHECK(std::memcmp(&a, &c, sizeof a) == 0);
    }
  }
}

TEST_CASE("fuzzed well-formed strings parse") {
  std::mt19937 rng(11);
  for (int k = 0; k < 10000; ++k) {
    const std::string src = random_expr(rng, 5);
    INFO(src);
    CHECK_NOTHROW(parse(src));
  }
}

TEST_CASE("evaluation is pure") {
  const Expr e = parse("sigma/x^mu + sin(x)", kParams);
  const Bindings b{{"sigma", 1.3}, {"mu", 1.7}, {"x", 0.4}};
  const double a = evaluate(e, b);
  for (int k = 0; k < 10; ++k) {
    const double c = evaluate(e, b);
    CHECK(std::memcmp(&a, &c, sizeof a) == 0);
  }
}
