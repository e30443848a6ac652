#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "rxl/engine.hpp"
#include "rxl/errors.hpp"
#include "rxl/parser.hpp"
#include "support.hpp"

using namespace rxl;

namespace {

std::vector<std::string> corpus() {
  std::vector<std::string> out;
  for (auto& e : std::filesystem::directory_iterator(test::data_path("corpus"))) out.push_back(e.path().string());
  for (auto& e : std::filesystem::directory_iterator(test::data_path("golden"))) {
    if (e.path().extension() == ".rxl") out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t dump_node_lines(const std::string& dump) {
  std::istringstream in(dump);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    auto p = line.find_first_not_of(' ');
    if (p != std::string::npos && line[p] == '(' && line.compare(p, 8, "(Comment") != 0) ++n;
  }
  return n;
}

template <class E>
E error_of(StrategyKind s, const std::string& src) {
  try {
    Engine e(s);
    e.run(src);
  } catch (const E& ex) {
    return ex;
  }
  ADD_FAILURE() << "no error from: " << src;
  throw std::logic_error("no error");
}

}  // namespace

TEST(Parser, EmptyProgramIsOneNode) { EXPECT_EQ(count_ast_nodes(*parse("")), 1u); }

TEST(Parser, PrintParseRoundTrip) {
  for (auto& f : corpus()) {
    auto first = parse(test::slurp(f));
    auto second = parse(to_source(*first));
    EXPECT_EQ(dump_ast(*first), dump_ast(*second)) << f;
    EXPECT_EQ(to_source(*first), to_source(*second)) << f;
  }
}

TEST(Parser, NodeCountMatchesDump) {
  for (auto& f : corpus()) {
    auto p = parse(test::slurp(f));
    EXPECT_EQ(count_ast_nodes(*p), dump_node_lines(dump_ast(*p))) << f;
  }
}

TEST(Parser, CommentsAreNotCounted) {
  EXPECT_EQ(count_ast_nodes(*parse("// a comment\n1;")), count_ast_nodes(*parse("1;")));
}

TEST(Parser, SyntaxErrorCarriesPosition) {
  try {
    parse("var a = 1;\nvar = 2;");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.pos().line, 2u);
  }
}

TEST(Parser, SignalAndAlwaysForms) {
  auto p = parse("var a = 1; signal b = a + 1; always: a + 1 == b;");
  std::string dump = dump_ast(*p);
  EXPECT_NE(dump.find("SignalDecl"), std::string::npos);
  EXPECT_NE(dump.find("AlwaysStmt"), std::string::npos);
}

TEST(Parser, ReservedNamesNeedMarker) {
  EXPECT_TRUE(is_reserved_name("get_member"));
  EXPECT_TRUE(is_reserved_name("_scope_3"));
  EXPECT_FALSE(is_reserved_name("member"));
  EXPECT_THROW(parse("var get_local = 1;"), SyntaxError);
  EXPECT_NO_THROW(parse("\"use hooks\";\nvar _tmp_a = 1;"));
}

TEST(Interpreter, Truthiness) {
  EXPECT_EQ(test::output_of(StrategyKind::Convention, "print(!nil, !false, !0, !'', !true, ![]);"),
            "true true false false false false\n");
}

TEST(Interpreter, RuntimeErrorKinds) {
  EXPECT_EQ(error_of<RuntimeError>(StrategyKind::Convention, "print(y);").kind(), RuntimeErrorKind::UndefinedVariable);
  EXPECT_EQ(error_of<RuntimeError>(StrategyKind::Convention, "var a = 1; a();").kind(), RuntimeErrorKind::NotCallable);
  EXPECT_EQ(error_of<RuntimeError>(StrategyKind::Convention, "var a = nil; a.b = 1;").kind(),
            RuntimeErrorKind::BadMemberTarget);
  EXPECT_EQ(error_of<RuntimeError>(StrategyKind::Convention, "assert(1 == 2);").kind(),
            RuntimeErrorKind::AssertionFailed);
  EXPECT_EQ(error_of<RuntimeError>(StrategyKind::Convention, "function f() { return f(); } f();").kind(),
            RuntimeErrorKind::StackOverflow);
}

TEST(Interpreter, ClosuresAndClasses) {
  const char* src = R"(
class C {
  constructor(n) { this.n = n; }
  bump() { this.n += 1; return this; }
}
function make() {
  let k = 0;
  return () => { k++; return k; };
}
var f = make();
f();
print(f(), new C(4).bump().bump().n);
)";
  for (auto k : {StrategyKind::Convention, StrategyKind::Interpretation, StrategyKind::Compilation}) {
    EXPECT_EQ(test::output_of(k, src), "2 6\n") << strategy_name(k);
  }
}

TEST(Interpreter, UnitsShareTopLevel) {
  Engine e(StrategyKind::Compilation);
  e.run("var total = 1;");
  e.run("total += 4;");
  e.run("print(total);");
  EXPECT_EQ(e.output(), "5\n");
}
