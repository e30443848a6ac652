#include <gtest/gtest.h>

#include <map>
#include <random>

#include "rxl/engine.hpp"
#include "rxl/errors.hpp"
#include "rxl/strategy.hpp"

using namespace rxl;

namespace {

const StrategyKind kAll[] = {StrategyKind::Convention, StrategyKind::Interpretation, StrategyKind::Compilation};

}  // namespace

TEST(AExpr, CreateReadsCurrentValue) {
  for (auto k : kAll) {
    Engine e(k);
    e.run("var o = {x: 3};");
    Value thunk = e.run("(() => o.x * 2);");
    AExprHandle h = e.create_aexpr(thunk);
    EXPECT_EQ(h.now().as_number(), 6) << strategy_name(k);
    EXPECT_EQ(e.live_count(), 1u);
  }
}

TEST(AExpr, CreateDisposeCyclesLeaveNothing) {
  for (auto k : kAll) {
    Engine e(k);
    e.run("var o = {x: 1};");
    Value thunk = e.run("(() => o.x);");
    for (int i = 0; i < 1000; ++i) {
      AExprHandle h = e.create_aexpr(thunk);
      h.on_change([](Engine&, Value) {});
      h.dispose();
    }
    EXPECT_EQ(e.live_count(), 0u) << strategy_name(k);
    EXPECT_EQ(e.strategy_impl().registry_size(), 0u) << strategy_name(k);
    e.run("o.x = 2;");
  }
}

TEST(AExpr, DisposedHandleErrors) {
  Engine e(StrategyKind::Compilation);
  Value thunk = e.run("(() => 1);");
  AExprHandle h = e.create_aexpr(thunk);
  h.dispose();
  EXPECT_TRUE(h.disposed());
  try {
    h.now();
    FAIL();
  } catch (const ReactiveError& ex) {
    EXPECT_EQ(ex.kind(), ReactiveErrorKind::DisposedHandle);
  }
  EXPECT_NO_THROW(h.dispose());
}

TEST(AExpr, ForeignHandleErrors) {
  Engine a(StrategyKind::Compilation);
  Engine b(StrategyKind::Compilation);
  AExprHandle h = a.create_aexpr(a.run("(() => 1);"));
  std::vector<AExprHandle> list = {h};
  try {
    b.check(list);
    FAIL();
  } catch (const ReactiveError& ex) {
    EXPECT_EQ(ex.kind(), ReactiveErrorKind::ForeignHandle);
  }
}

TEST(AExpr, NotifiesInIdOrder) {
  for (auto k : {StrategyKind::Interpretation, StrategyKind::Compilation}) {
    Engine e(k);
    e.run(R"(
var o = {x: 0};
var log = [];
aexpr(() => o.x + 1).onChange(v => log.push('a'));
aexpr(() => o.x + 2).onChange(v => log.push('b'));
aexpr(() => o.x + 3).onChange(v => log.push('c'));
o.x = 5;
print(log);
)");
    EXPECT_EQ(e.output(), "[\"a\", \"b\", \"c\"]\n") << strategy_name(k);
  }
}

TEST(AExpr, CallbacksRunOncePerChangeAndNotOnEqualWrites) {
  for (auto k : {StrategyKind::Interpretation, StrategyKind::Compilation}) {
    Engine e(k);
    e.run(R"(
var o = {x: 1};
var n = 0;
aexpr(() => o.x > 0).onChange(v => n++);
o.x = 2;
o.x = 3;
o.x = -1;
o.x = -1;
print(n);
)");
    EXPECT_EQ(e.output(), "1\n") << strategy_name(k);
  }
}

TEST(AExpr, PropagationLoopIsReported) {
  Engine e(StrategyKind::Compilation);
  e.max_rounds = 50;
  try {
    e.run("var o = {x: 0}; aexpr(() => o.x).onChange(v => { o.x = v + 1; }); o.x = 1;");
    FAIL();
  } catch (const ReactiveError& ex) {
    EXPECT_EQ(ex.kind(), ReactiveErrorKind::PropagationLoop);
  }
}

TEST(AExpr, CallbackErrorsAreRethrownAfterOthersRun) {
  Engine e(StrategyKind::Compilation);
  try {
    e.run(R"(
var o = {x: 0};
var seen = 0;
aexpr(() => o.x).onChange(v => assert(false));
aexpr(() => o.x).onChange(v => { seen = v; });
o.x = 7;
)");
    FAIL();
  } catch (const RuntimeError& ex) {
    EXPECT_EQ(ex.kind(), RuntimeErrorKind::AssertionFailed);
  }
  EXPECT_EQ(e.global("seen").as_number(), 7);
}

TEST(AExpr, CheckUnderEveryStrategy) {
  for (auto k : kAll) {
    Engine e(k);
    e.run("var o = {x: 0}; var n = 0; aexpr(() => o.x).onChange(v => n++);");
    e.run("o.x = 1; check(); check();");
    EXPECT_EQ(e.global("n").as_number(), 1) << strategy_name(k);
  }
}

TEST(Store, EveryMutationPassesTheObserver) {
  std::mt19937 rng(11);
  for (auto k : kAll) {
    for (int round = 0; round < 20; ++round) {
      Engine e(k);
      std::map<std::pair<HeapId, std::uint32_t>, Value> last;
      std::uint64_t observed = 0;
      e.set_write_observer([&](const DependencyKey& key, Value v) {
        ++observed;
        if (key.kind == DependencyKey::Kind::Member) last[{key.object(), key.slot}] = v;
      });
      std::uint64_t before = e.store_count();
      observed = 0;
      std::string src = "var os = [{a: 0, b: 0}, {a: 0, b: 0}, {a: 0, b: 0}];\naexpr(() => os[0].a + os[1].b);\n";
      for (int i = 0; i < 30; ++i) {
        std::string target = "os[" + std::to_string(rng() % 3) + "]." + (rng() % 2 ? "a" : "b");
        switch (rng() % 4) {
          case 0: src += target + " = " + std::to_string(rng() % 5) + ";\n"; break;
          case 1: src += target + " += 2;\n"; break;
          case 2: src += target + "++;\n"; break;
          default: src += "os[" + std::to_string(rng() % 3) + "]['c'] = " + std::to_string(rng() % 5) + ";\n"; break;
        }
      }
      e.run(src);
      EXPECT_EQ(observed, e.store_count() - before);
      Value os = e.global("os");
      for (Value obj : e.heap().object(os.heap_id()).elements) {
        for (auto& [key, v] : e.heap().object(obj.heap_id()).props) {
          auto it = last.find({obj.heap_id(), key.raw()});
          EXPECT_EQ(it == last.end() ? Value::number(0) : it->second, v) << strategy_name(k);
        }
      }
    }
  }
}

TEST(DependencyMap, StaysConsistent) {
  std::mt19937 rng(3);
  DependencyMap m;
  for (int i = 0; i < 500; ++i) {
    AExprId id = rng() % 20 + 1;
    if (rng() % 5 == 0) {
      m.remove(id);
    } else {
      std::vector<DependencyKey> keys;
      for (int j = rng() % 5; j > 0; --j) keys.push_back(DependencyKey::global(rng() % 10 + 1));
      std::sort(keys.begin(), keys.end());
      keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
      m.assign(id, keys);
      if (keys.empty()) {
        EXPECT_EQ(m.keys(id), nullptr);
      } else {
        EXPECT_EQ(*m.keys(id), keys);
      }
    }
    ASSERT_TRUE(m.consistent());
  }
}

TEST(DependencyMap, ReportsAddedAndDroppedKeys) {
  DependencyMap m;
  std::vector<DependencyKey> added, dropped;
  auto a = DependencyKey::global(1), b = DependencyKey::global(2);
  m.assign(1, {a, b}, &added, &dropped);
  EXPECT_EQ(added.size(), 2u);
  added.clear();
  m.assign(2, {a}, &added, &dropped);
  EXPECT_TRUE(added.empty());
  m.remove(1, &dropped);
  EXPECT_EQ(dropped, std::vector<DependencyKey>{b});
  EXPECT_EQ(m.dependents(a)->size(), 1u);
}
