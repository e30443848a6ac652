#include <gtest/gtest.h>

#include <random>

#include "rxl/constraints.hpp"
#include "rxl/engine.hpp"
#include "rxl/errors.hpp"
#include "rxl/layers.hpp"
#include "rxl/queries.hpp"
#include "rxl/signals.hpp"
#include "rxl/triggers.hpp"
#include "support.hpp"

using namespace rxl;

namespace {

ReactiveErrorKind reactive_error(StrategyKind k, const std::string& src) {
  try {
    Engine e(k);
    e.run(src);
  } catch (const ReactiveError& ex) {
    return ex.kind();
  }
  ADD_FAILURE() << "no reactive error from: " << src;
  return ReactiveErrorKind::MismatchedOutput;
}

}  // namespace

TEST(Triggers, InitialCallWhenAlreadyTrue) {
  const char* src = R"(
var o = {v: 1};
var hits = 0;
trigger(aexpr(() => o.v > 0)).onBecomeTrue(() => hits++);
print(hits);
)";
  EXPECT_EQ(test::output_of(StrategyKind::Compilation, src), "1\n");
}

TEST(Triggers, CountsRisingEdges) {
  const char* src = R"(
var o = {v: false};
var up = 0;
var down = 0;
var t = trigger(aexpr(() => o.v));
t.onBecomeTrue(() => up++);
t.onBecomeFalse(() => down++);
o.v = true;
o.v = false;
o.v = true;
o.v = 'still truthy';
o.v = nil;
print(up, down);
)";
  EXPECT_EQ(test::output_of(StrategyKind::Compilation, src), "2 3\n");
  EXPECT_EQ(test::output_of(StrategyKind::Interpretation, src), "2 3\n");
}

TEST(Triggers, HostApi) {
  Engine e(StrategyKind::Compilation);
  e.run("var o = {v: 0};");
  AExprHandle h = e.create_aexpr(e.run("(() => o.v == 1);"));
  int ups = 0;
  on_become_true(e, h, [&](Engine&) { ++ups; });
  e.run("o.v = 1; o.v = 2; o.v = 1;");
  EXPECT_EQ(ups, 2);
}

TEST(Signals, UpdateDownstreamOnce) {
  Engine e(StrategyKind::Compilation);
  e.run(R"(
var a = 1;
signal b = a * 2;
signal c = a + b;
signal d = b + c;
a = 5;
)");
  EXPECT_EQ(e.global("d").as_number(), 25);
  for (auto& s : e.signals().all()) EXPECT_EQ(s.resolutions, 1u) << symbol_text(s.name);
}

TEST(Signals, DependencyGraph) {
  Engine e(StrategyKind::Compilation);
  e.run("var a = 1; signal b = a; signal c = b + 1; signal d = a + c;");
  auto* d = e.signals().find("d");
  ASSERT_NE(d, nullptr);
  auto deps = e.signals().depends_on(d->id);
  ASSERT_EQ(deps.size(), 1u);
  EXPECT_EQ(symbol_text(e.signals().all()[deps[0]].name), "c");
}

TEST(Signals, SelfReferenceIsCyclic) {
  EXPECT_EQ(reactive_error(StrategyKind::Compilation, "signal a = a ? 1 : 0;"), ReactiveErrorKind::CyclicSignal);
}

TEST(Signals, NeedCompilation) {
  EXPECT_EQ(reactive_error(StrategyKind::Interpretation, "var a = 1; signal b = a;"),
            ReactiveErrorKind::UnsupportedStrategy);
  EXPECT_EQ(reactive_error(StrategyKind::Convention, "var a = 1; signal b = a;"),
            ReactiveErrorKind::UnsupportedStrategy);
}

TEST(Signals, InsideFunctions) {
  const char* src = R"(
function make(start) {
  let base = start;
  signal twice = base * 2;
  return {set: v => { base = v; }, get: () => twice};
}
var m = make(3);
m.set(10);
print(m.get());
)";
  EXPECT_EQ(test::output_of(StrategyKind::Compilation, src), "20\n");
}

TEST(Constraints, LatestDeclaredVariableAbsorbs) {
  Engine e(StrategyKind::Compilation);
  e.run("var a = 1, b = 1, c = 1; always: a + b == c;");
  EXPECT_EQ(e.global("c").as_number(), 2);
  e.run("a = 4;");
  EXPECT_EQ(e.global("c").as_number(), 5);
  e.run("c = 10;");
  EXPECT_EQ(e.global("a").as_number(), 4);
  EXPECT_EQ(e.global("b").as_number(), 6);
}

TEST(Constraints, SolverMatchesExactElimination) {
  std::vector<LinearConstraint> cs = {{{{0, 1}, {1, 1}, {2, -1}}, 0}, {{{1, 1}, {2, 1}}, -5}};
  std::vector<std::optional<double>> pinned = {std::nullopt, std::nullopt, std::nullopt};
  auto x = solve_linear(cs, {1, 1, 1}, {1, 2, 3}, pinned);
  for (auto& c : cs) EXPECT_NEAR(residual(c, x), 0, 1e-12);
  EXPECT_DOUBLE_EQ(x[0], 1);
  EXPECT_DOUBLE_EQ(x[1], 2);
  EXPECT_DOUBLE_EQ(x[2], 3);
}

TEST(Constraints, Errors) {
  EXPECT_EQ(reactive_error(StrategyKind::Compilation, "var a = 1, b = 2; always: a < b;"),
            ReactiveErrorKind::UnsupportedRelation);
  EXPECT_EQ(reactive_error(StrategyKind::Compilation, "var a = 1, b = 2, c = 2; always: a * b == c;"),
            ReactiveErrorKind::NonlinearConstraint);
  EXPECT_EQ(reactive_error(StrategyKind::Compilation, "var a = 'x'; always: a == 1;"),
            ReactiveErrorKind::NonlinearConstraint);
  EXPECT_EQ(reactive_error(StrategyKind::Interpretation, "var a = 1; always: a == 1;"),
            ReactiveErrorKind::UnsupportedStrategy);
  EXPECT_EQ(reactive_error(StrategyKind::Compilation, "var a = 1; always: a == 2; always: a == 3;"),
            ReactiveErrorKind::UnsatisfiableSystem);
}

TEST(Queries, SelectTracksPredicate) {
  EXPECT_EQ(test::output_of(StrategyKind::Compilation, test::slurp(test::data_path("golden/queries.rxl"))),
            test::slurp(test::data_path("golden/queries.out")));
}

TEST(Queries, MapOverEmptyViewIsEmpty) {
  Engine e(StrategyKind::Compilation);
  e.run("class T { constructor(v) { this.v = v; } } var m = select(T, t => t.v > 0).map(t => t.v);");
  EXPECT_EQ(e.display(e.run("m.items();")), "[]");
}

TEST(Queries, AddThenRemoveThroughMap) {
  Engine e(StrategyKind::Compilation);
  e.run(R"(
class T { constructor(v, tag) { this.v = v; this.tag = tag; } }
var tags = select(T, t => t.v > 0).map(t => t.tag);
var a = new T(1, 'x');
var b = new T(1, 'x');
)");
  EXPECT_EQ(e.display(e.run("tags.items();")), "[\"x\"]");
  e.run("a.v = 0;");
  EXPECT_EQ(e.display(e.run("tags.items();")), "[\"x\"]");
  e.run("b.v = 0;");
  EXPECT_EQ(e.display(e.run("tags.items();")), "[]");
  e.run("a.v = 2;");
  EXPECT_EQ(e.display(e.run("tags.items();")), "[\"x\"]");
}

TEST(Queries, UntrackedClass) {
  EXPECT_EQ(reactive_error(StrategyKind::Compilation, "select(5, x => x);"), ReactiveErrorKind::UntrackedClass);
}

TEST(Layers, GoldenActivation) {
  EXPECT_EQ(test::output_of(StrategyKind::Compilation, test::slurp(test::data_path("golden/layers.rxl"))),
            test::slurp(test::data_path("golden/layers.out")));
}

TEST(Layers, ProceedChainsThroughActiveLayers) {
  const char* src = R"(
var o = { f(x) { return 'base ' + x; } };
var l1 = new Layer().refineObject(o, { f(x) { return 'l1(' + proceed(x) + ')'; } });
var l2 = new Layer().refineObject(o, { f(x) { return 'l2(' + proceed(x) + ')'; } });
print(o.f(1));
l1.beGlobal();
print(o.f(2));
l2.beGlobal();
print(o.f(3));
l1.beNotGlobal();
print(o.f(4));
)";
  EXPECT_EQ(test::output_of(StrategyKind::Compilation, src), "base 1\nl1(base 2)\nl2(l1(base 3))\nl2(base 4)\n");
}

TEST(Layers, NoSuchBaseMethod) {
  EXPECT_EQ(reactive_error(StrategyKind::Compilation, "var o = {}; new Layer().refineObject(o, { g() { return 1; } });"),
            ReactiveErrorKind::NoSuchBaseMethod);
  EXPECT_EQ(reactive_error(StrategyKind::Compilation, "proceed(1);"), ReactiveErrorKind::NoSuchBaseMethod);
}

TEST(Layers, TriggerAndImperativeModesAgree) {
  std::mt19937 rng(9);
  for (int round = 0; round < 30; ++round) {
    std::string src = R"(
var o = { f() { return 'base'; } };
var s = {a: false, b: false};
new Layer().refineObject(o, { f() { return 'A>' + proceed(); } }).activeWhile(() => s.a);
new Layer().refineObject(o, { f() { return 'B>' + proceed(); } }).activeWhile(() => s.b && !s.a);
)";
    for (int i = 0; i < 15; ++i) {
      switch (rng() % 3) {
        case 0: src += "s.a = " + std::string(rng() % 2 ? "true" : "false") + ";\n"; break;
        case 1: src += "s.b = " + std::string(rng() % 2 ? "true" : "false") + ";\n"; break;
        default: src += "print(o.f());\n"; break;
      }
    }
    src += "print(o.f());\n";
    Engine trig(StrategyKind::Compilation);
    trig.run(src);
    Engine imp(StrategyKind::Compilation);
    imp.layers().set_mode(LayerSystem::Mode::Imperative);
    imp.run(src);
    EXPECT_EQ(trig.output(), imp.output()) << src;
  }
}
