#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "rxl/bench.hpp"
#include "rxl/engine.hpp"
#include "rxl/parser.hpp"
#include "rxl/queries.hpp"
#include "rxl/rewriter.hpp"
#include "rxl/signals.hpp"
#include "support.hpp"

using namespace rxl;
using rxl::test::data_path;
using rxl::test::slurp;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

void check_runtime(Outcome& o, Clock::time_point start, double limit) {
  double s = seconds_since(start);
  if (s >= limit) o.fail("took " + std::to_string(s) + " s, limit " + std::to_string(limit) + " s");
}

template <class T>
const T& pick(std::mt19937& rng, const std::vector<T>& xs) {
  return xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng)];
}

int uniform(std::mt19937& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// 1. Golden programs.

Outcome golden() {
  Outcome o;
  auto start = Clock::now();
  const std::vector<std::pair<std::string, StrategyKind>> cases = {
      {"on_change", StrategyKind::Compilation}, {"convention", StrategyKind::Convention},
      {"signals", StrategyKind::Compilation},   {"constraints", StrategyKind::Compilation},
      {"queries", StrategyKind::Compilation},   {"layers", StrategyKind::Compilation},
  };
  for (auto& [name, strategy] : cases) {
    std::string expected = slurp(data_path("golden/" + name + ".out"));
    std::string got;
    try {
      got = rxl::test::output_of(strategy, slurp(data_path("golden/" + name + ".rxl")));
    } catch (const std::exception& e) {
      o.fail(name + ": " + e.what());
      continue;
    }
    if (got != expected) o.fail(name + ": expected [" + expected + "] got [" + got + "]");
  }
  check_runtime(o, start, 1.0);
  if (o.pass) o.detail = std::to_string(cases.size()) + " programs match";
  return o;
}

// 2. Interpretation and compilation agree with a re-evaluate-everything oracle.

struct RandomProgram {
  std::string setup;
  std::vector<std::string> aexprs;
  std::vector<std::string> mutations;
};

std::string random_expr(std::mt19937& rng, int objects, int fields, int depth) {
  auto obj = [&] { return "o" + std::to_string(uniform(rng, 0, objects - 1)); };
  auto field = [&] { return "f" + std::to_string(uniform(rng, 0, fields - 1)); };
  int choice = uniform(rng, 0, depth > 0 ? 7 : 4);
  switch (choice) {
    case 0: return obj() + "." + field();
    case 1: return obj() + ".next." + field();
    case 2: return obj() + ".next.next." + field();
    case 3: return "sum(" + obj() + ")";
    case 4: return std::to_string(uniform(rng, 0, 3));
    case 5:
    case 6: {
      static const std::vector<std::string> ops = {" + ", " - ", " * "};
      return "(" + random_expr(rng, objects, fields, depth - 1) + pick(rng, ops) +
             random_expr(rng, objects, fields, depth - 1) + ")";
    }
    default:
      return "(" + random_expr(rng, objects, fields, depth - 1) + " > " + random_expr(rng, objects, fields, depth - 1) +
             " ? " + random_expr(rng, objects, fields, depth - 1) + " : " +
             random_expr(rng, objects, fields, depth - 1) + ")";
  }
}

RandomProgram random_program(std::mt19937& rng) {
  RandomProgram p;
  int objects = uniform(rng, 2, 4);
  int fields = uniform(rng, 2, 3);
  std::ostringstream s;
  for (int i = 0; i < objects; ++i) {
    s << "var o" << i << " = {";
    for (int f = 0; f < fields; ++f) s << "f" << f << ": " << uniform(rng, 0, 5) << ", ";
    s << "next: nil};\n";
  }
  for (int i = 0; i < objects; ++i) s << "o" << i << ".next = o" << (i + 1) % objects << ";\n";
  s << "function sum(o) { return o.f0 + o.f1; }\n";
  p.setup = s.str();
  int count = uniform(rng, 3, 6);
  for (int k = 0; k < count; ++k) {
    p.aexprs.push_back("aexpr(() => " + random_expr(rng, objects, fields, 2) + ").onChange(v => record(" +
                       std::to_string(k) + ", v));");
  }
  int mutations = uniform(rng, 10, 20);
  for (int m = 0; m < mutations; ++m) {
    std::string target = "o" + std::to_string(uniform(rng, 0, objects - 1)) + ".f" +
                         std::to_string(uniform(rng, 0, fields - 1));
    switch (uniform(rng, 0, 4)) {
      case 0:
        p.mutations.push_back("o" + std::to_string(uniform(rng, 0, objects - 1)) + ".next = o" +
                              std::to_string(uniform(rng, 0, objects - 1)) + ";");
        break;
      case 1: p.mutations.push_back(target + " += " + std::to_string(uniform(rng, 0, 2)) + ";"); break;
      case 2: p.mutations.push_back(target + (uniform(rng, 0, 1) ? "++;" : "--;")); break;
      default: p.mutations.push_back(target + " = " + std::to_string(uniform(rng, 0, 5)) + ";"); break;
    }
  }
  return p;
}

using Trace = std::vector<std::pair<int, std::string>>;

void install_recorder(Engine& e, Trace& trace) {
  e.define_global("record", e.new_native("record", [&trace](Engine& en, Value, std::span<const Value> args) {
    trace.emplace_back(static_cast<int>(args[0].as_number()), en.display(args[1]));
    return Value();
  }));
}

Trace run_strategy(StrategyKind k, const RandomProgram& p) {
  Trace trace;
  Engine e(k);
  install_recorder(e, trace);
  std::string src = p.setup;
  for (auto& a : p.aexprs) src += a + "\n";
  for (auto& m : p.mutations) src += m + "\n";
  e.run(src);
  return trace;
}

Trace run_oracle(const RandomProgram& p) {
  Trace trace;
  Engine e(StrategyKind::Convention);
  install_recorder(e, trace);
  e.run(p.setup);
  for (auto& a : p.aexprs) e.run(a);
  bool inside = false;
  e.set_write_observer([&](const DependencyKey&, Value) {
    if (inside) return;
    inside = true;
    e.check();
    inside = false;
  });
  for (auto& m : p.mutations) e.run(m);
  return trace;
}

std::string show(const Trace& t) {
  std::string s;
  for (auto& [k, v] : t) s += "(" + std::to_string(k) + "," + v + ")";
  return s;
}

Outcome strategy_equivalence() {
  Outcome o;
  auto start = Clock::now();
  std::mt19937 rng(2);
  const int programs = 60;
  std::size_t callbacks = 0;
  for (int i = 0; i < programs; ++i) {
    RandomProgram p = random_program(rng);
    try {
      Trace interp = run_strategy(StrategyKind::Interpretation, p);
      Trace comp = run_strategy(StrategyKind::Compilation, p);
      Trace oracle = run_oracle(p);
      callbacks += oracle.size();
      if (interp != comp || comp != oracle) {
        o.fail("program " + std::to_string(i) + ": interp " + show(interp) + " comp " + show(comp) + " oracle " +
               show(oracle));
      }
    } catch (const std::exception& e) {
      o.fail("program " + std::to_string(i) + ": " + e.what());
    }
  }
  check_runtime(o, start, 30.0);
  if (o.pass) o.detail = std::to_string(programs) + " programs, " + std::to_string(callbacks) + " callbacks agree";
  return o;
}

// 3. Instrumented programs behave like the originals.

Outcome rewriter_transparency() {
  Outcome o;
  auto start = Clock::now();
  std::vector<std::filesystem::path> files;
  for (auto& entry : std::filesystem::directory_iterator(data_path("corpus"))) {
    if (entry.path().extension() == ".rxl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.size() < 20) o.fail("corpus has only " + std::to_string(files.size()) + " programs");
  for (auto& f : files) {
    std::string name = f.filename().string();
    try {
      std::string source = slurp(f.string());
      std::string original = rxl::test::output_of(StrategyKind::Convention, source);
      std::string instrumented = rewrite_source(*parse(source));
      if (instrumented.find("get_") == std::string::npos) o.fail(name + ": rewrite produced no hooks");
      Engine e(StrategyKind::Compilation);
      e.run(instrumented, RunOptions{false, {}});
      if (original.empty()) o.fail(name + ": no output");
      if (e.output() != original) o.fail(name + ": outputs differ");
    } catch (const std::exception& e) {
      o.fail(name + ": " + e.what());
    }
  }
  check_runtime(o, start, 30.0);
  if (o.pass) o.detail = std::to_string(files.size()) + " programs byte-identical";
  return o;
}

// 4. Signals never expose inconsistent states.

struct SignalNode {
  std::vector<std::pair<std::size_t, int>> inputs;
  int constant = 0;
};

double eval_node(const SignalNode& n, const std::vector<double>& values) {
  double s = n.constant;
  for (auto& [i, c] : n.inputs) s += c * values[i];
  return std::fmod(s, 1000.0);
}

std::string node_name(std::size_t i, std::size_t bases) {
  return i < bases ? "b" + std::to_string(i) : "s" + std::to_string(i - bases);
}

Outcome glitch_freedom() {
  Outcome o;
  auto start = Clock::now();
  {
    Engine e(StrategyKind::Compilation);
    try {
      e.run(R"(
var a = 1;
signal b = a;
signal c = a + 1;
var observed = 0;
function checkConsistency() {
  observed++;
  assert(c === b + 1);
}
aexpr(() => b).onChange(checkConsistency);
aexpr(() => c).onChange(checkConsistency);
a++;
)");
      if (e.global("observed").as_number() != 2) o.fail("glitch program: callbacks did not run twice");
    } catch (const std::exception& ex) {
      o.fail(std::string("glitch program: ") + ex.what());
    }
  }
  std::mt19937 rng(4);
  const int dags = 100;
  long observations = 0;
  for (int d = 0; d < dags && o.pass; ++d) {
    std::size_t bases = static_cast<std::size_t>(uniform(rng, 1, 5));
    std::size_t total = static_cast<std::size_t>(uniform(rng, static_cast<int>(bases) + 1, 50));
    std::vector<SignalNode> nodes(total);
    std::vector<double> init(total, 0);
    std::ostringstream src;
    for (std::size_t i = 0; i < bases; ++i) {
      init[i] = uniform(rng, -20, 20);
      src << "var " << node_name(i, bases) << " = " << init[i] << ";\n";
    }
    for (std::size_t i = bases; i < total; ++i) {
      SignalNode& n = nodes[i];
      std::set<std::size_t> used;
      int fan = uniform(rng, 1, std::min<int>(3, static_cast<int>(i)));
      while (static_cast<int>(used.size()) < fan) {
        // Bias towards recent nodes so that graphs grow deep.
        std::size_t lo = i > 6 ? i - 6 : 0;
        used.insert(static_cast<std::size_t>(uniform(rng, uniform(rng, 0, 1) ? 0 : static_cast<int>(lo),
                                                     static_cast<int>(i) - 1)));
      }
      n.constant = uniform(rng, -5, 5);
      src << "signal " << node_name(i, bases) << " = (" << n.constant;
      for (std::size_t j : used) {
        int c = 0;
        while (c == 0) c = uniform(rng, -3, 3);
        n.inputs.emplace_back(j, c);
        src << " + " << c << " * " << node_name(j, bases);
      }
      src << ") % 1000;\n";
    }
    for (int k = 0; k < 4; ++k) {
      std::size_t x = static_cast<std::size_t>(uniform(rng, static_cast<int>(bases), static_cast<int>(total) - 1));
      std::size_t y = static_cast<std::size_t>(uniform(rng, static_cast<int>(bases), static_cast<int>(total) - 1));
      src << "aexpr(() => " << node_name(x, bases) << " + " << node_name(y, bases) << ").onChange(v => verify());\n";
      src << "aexpr(() => " << node_name(x, bases) << ").onChange(v => verify());\n";
    }

    Engine e(StrategyKind::Compilation);
    auto expected = [&] {
      std::vector<double> v(total);
      for (std::size_t i = 0; i < bases; ++i) v[i] = e.global(node_name(i, bases)).as_number();
      for (std::size_t i = bases; i < total; ++i) v[i] = eval_node(nodes[i], v);
      return v;
    };
    e.define_global("verify", e.new_native("verify", [&](Engine& en, Value, std::span<const Value>) {
      ++observations;
      std::vector<double> want = expected();
      for (std::size_t i = bases; i < total; ++i) {
        Value got = en.global(node_name(i, bases));
        if (!got.is_number() || got.as_number() != want[i]) {
          o.fail("dag " + std::to_string(d) + ": callback saw " + node_name(i, bases) + " = " + en.display(got) +
                 ", consistent value " + number_to_string(want[i]));
        }
      }
      return Value();
    }));
    try {
      e.run(src.str());
      for (int m = 0; m < 10 && o.pass; ++m) {
        std::size_t b = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(bases) - 1));
        int value = uniform(rng, -20, 20);
        std::vector<std::uint64_t> before;
        for (auto& s : e.signals().all()) before.push_back(s.resolutions);
        bool changed = e.global(node_name(b, bases)).as_number() != value;
        std::vector<bool> affected(total, false);
        affected[b] = true;
        for (std::size_t i = bases; i < total; ++i) {
          for (auto& [j, c] : nodes[i].inputs) affected[i] = affected[i] || affected[j];
        }
        e.run(node_name(b, bases) + " = " + std::to_string(value) + ";");
        std::vector<double> want = expected();
        auto& all = e.signals().all();
        for (std::size_t i = bases; i < total; ++i) {
          std::uint64_t runs = all[i - bases].resolutions - before[i - bases];
          std::uint64_t expect_runs = changed && affected[i] ? 1 : 0;
          if (runs != expect_runs) {
            o.fail("dag " + std::to_string(d) + ": resolver of " + node_name(i, bases) + " ran " +
                   std::to_string(runs) + " times, expected " + std::to_string(expect_runs));
          }
          if (e.global(node_name(i, bases)).as_number() != want[i]) {
            o.fail("dag " + std::to_string(d) + ": " + node_name(i, bases) + " stale after update");
          }
        }
      }
    } catch (const std::exception& ex) {
      o.fail("dag " + std::to_string(d) + ": " + ex.what());
    }
  }
  check_runtime(o, start, 30.0);
  if (o.pass) {
    o.detail = "glitch program and " + std::to_string(dags) + " dags consistent over " +
               std::to_string(observations) + " observations";
  }
  return o;
}

// 5. Constraint solving against an exact oracle.

using Q = boost::rational<long long>;

struct Row {
  std::vector<int> coef;
  int rhs = 0;
};

// Exact solve: constraints are visited in declaration order and each one that still involves
// an unpinned, non-absorbing variable hands the residual to the latest-declared such variable.
// Returns nullopt when a constraint that has no such variable left is violated.
std::optional<std::vector<Q>> oracle_solve(const std::vector<Row>& rows, const std::vector<Q>& current,
                                           std::optional<std::size_t> pinned) {
  std::size_t n = current.size();
  std::vector<std::size_t> absorbers;
  std::vector<std::size_t> used_rows;
  auto pivot_ok = [&](const std::vector<std::size_t>& rs, const std::vector<std::size_t>& cols) {
    std::size_t k = cols.size();
    std::vector<std::vector<Q>> m(k, std::vector<Q>(k));
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t c = 0; c < k; ++c) m[r][c] = rows[rs[r]].coef[cols[c]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      std::size_t p = c;
      while (p < k && m[p][c].numerator() == 0) ++p;
      if (p == k) return false;
      std::swap(m[p], m[c]);
      for (std::size_t r = c + 1; r < k; ++r) {
        Q f = m[r][c] / m[c][c];
        for (std::size_t cc = c; cc < k; ++cc) m[r][cc] -= f * m[c][cc];
      }
    }
    return true;
  };
  auto solve_with = [&](const std::vector<std::size_t>& rs, const std::vector<std::size_t>& cols) {
    std::size_t k = cols.size();
    std::vector<std::vector<Q>> m(k, std::vector<Q>(k + 1));
    for (std::size_t r = 0; r < k; ++r) {
      Q rhs = rows[rs[r]].rhs;
      for (std::size_t v = 0; v < n; ++v) {
        if (std::find(cols.begin(), cols.end(), v) == cols.end()) rhs -= Q(rows[rs[r]].coef[v]) * current[v];
      }
      for (std::size_t c = 0; c < k; ++c) m[r][c] = rows[rs[r]].coef[cols[c]];
      m[r][k] = rhs;
    }
    for (std::size_t c = 0; c < k; ++c) {
      std::size_t p = c;
      while (m[p][c].numerator() == 0) ++p;
      std::swap(m[p], m[c]);
      for (std::size_t r = 0; r < k; ++r) {
        if (r == c || m[r][c].numerator() == 0) continue;
        Q f = m[r][c] / m[c][c];
        for (std::size_t cc = c; cc <= k; ++cc) m[r][cc] -= f * m[c][cc];
      }
    }
    std::vector<Q> out = current;
    for (std::size_t c = 0; c < k; ++c) out[cols[c]] = m[c][k] / m[c][c];
    return out;
  };
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::optional<std::size_t> chosen;
    for (std::size_t v = n; v-- > 0;) {
      if (v == pinned ||
          std::find(absorbers.begin(), absorbers.end(), v) != absorbers.end()) {
        continue;
      }
      auto rs = used_rows;
      rs.push_back(r);
      auto cols = absorbers;
      cols.push_back(v);
      if (pivot_ok(rs, cols)) {
        chosen = v;
        break;
      }
    }
    if (chosen) {
      used_rows.push_back(r);
      absorbers.push_back(*chosen);
    }
  }
  std::vector<Q> out = absorbers.empty() ? current : solve_with(used_rows, absorbers);
  for (auto& row : rows) {
    Q s = 0;
    for (std::size_t v = 0; v < n; ++v) s += Q(row.coef[v]) * out[v];
    if ((s - Q(row.rhs)).numerator() != 0) return std::nullopt;
  }
  return out;
}

Outcome constraint_satisfaction() {
  Outcome o;
  auto start = Clock::now();
  std::mt19937 rng(5);
  int assignments = 0;
  int systems = 0;
  while (assignments < 1000 && o.pass) {
    ++systems;
    std::size_t n = static_cast<std::size_t>(uniform(rng, 2, 6));
    std::size_t m = static_cast<std::size_t>(uniform(rng, 1, std::min<int>(4, static_cast<int>(n) - 1)));
    std::vector<int> solution(n);
    for (auto& x : solution) x = uniform(rng, -9, 9);
    std::vector<Row> rows(m);
    std::ostringstream src;
    src << "var ";
    for (std::size_t v = 0; v < n; ++v) src << (v ? ", " : "") << "x" << v << " = " << solution[v];
    src << ";\n";
    for (auto& row : rows) {
      row.coef.assign(n, 0);
      int nonzero = 0;
      while (nonzero == 0) {
        for (auto& c : row.coef) {
          c = uniform(rng, 0, 2) == 0 ? 0 : uniform(rng, -3, 3);
          nonzero += c != 0;
        }
      }
      std::string lhs;
      for (std::size_t v = 0; v < n; ++v) {
        if (row.coef[v] == 0) continue;
        row.rhs += row.coef[v] * solution[v];
        lhs += (lhs.empty() ? "" : " + ") + std::to_string(row.coef[v]) + " * x" + std::to_string(v);
      }
      src << "always: " << lhs << " == " << row.rhs << ";\n";
    }
    std::vector<Q> state(solution.begin(), solution.end());
    Engine e(StrategyKind::Compilation);
    try {
      e.run(src.str());
      for (int step = 0; step < 10 && assignments < 1000 && o.pass; ++step) {
        std::size_t v = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(n) - 1));
        int value = uniform(rng, -12, 12);
        std::vector<Q> pinned_state = state;
        pinned_state[v] = value;
        auto want = oracle_solve(rows, pinned_state, v);
        if (!want) continue;
        ++assignments;
        e.run("x" + std::to_string(v) + " = " + std::to_string(value) + ";");
        state = *want;
        for (std::size_t i = 0; i < n; ++i) {
          double got = e.global("x" + std::to_string(i)).as_number();
          double exact = boost::rational_cast<double>(state[i]);
          if (std::fabs(got - exact) > 1e-9 * std::max(1.0, std::fabs(exact))) {
            o.fail("system " + std::to_string(systems) + ": after x" + std::to_string(v) + " = " +
                   std::to_string(value) + ", x" + std::to_string(i) + " = " + number_to_string(got) + ", oracle " +
                   number_to_string(exact) + "\n" + src.str());
          }
        }
        for (auto& row : rows) {
          double s = 0;
          double scale = 1;
          for (std::size_t i = 0; i < n; ++i) {
            double x = e.global("x" + std::to_string(i)).as_number();
            s += row.coef[i] * x;
            scale = std::max(scale, std::fabs(row.coef[i] * x));
          }
          if (std::fabs(s - row.rhs) > 1e-9 * scale) {
            o.fail("system " + std::to_string(systems) + ": constraint violated by " +
                   number_to_string(s - row.rhs));
          }
        }
      }
    } catch (const std::exception& ex) {
      o.fail("system " + std::to_string(systems) + ": " + ex.what() + "\n" + src.str());
    }
  }
  check_runtime(o, start, 30.0);
  if (o.pass) {
    o.detail = std::to_string(assignments) + " assignments over " + std::to_string(systems) + " systems match";
  }
  return o;
}

// 6. Benchmark ordering.

Outcome benchmark_ordering() {
  Outcome o;
  auto start = Clock::now();
  bench::Config cfg;
  cfg.seed = 42;
  std::ostringstream report;
  auto median = [](const bench::Result& r) { return r.median_ms; };
  try {
    for (bool same : {true, false}) {
      double conv = median(bench::construction(StrategyKind::Convention, same, cfg));
      double comp = median(bench::construction(StrategyKind::Compilation, same, cfg));
      double interp = median(bench::construction(StrategyKind::Interpretation, same, cfg));
      std::string tag = same ? "same" : "different";
      report << "construction/" << tag << " conv " << conv << " comp " << comp << " interp " << interp << "; ";
      if (!(conv < comp && comp < interp)) o.fail("(a) construction/" + tag + " ordering violated");
      if (interp < 5 * comp) {
        o.fail("(a) construction/" + tag + " interp/comp = " + std::to_string(interp / comp) + " < 5");
      }
    }
    double base = median(bench::update(std::nullopt, cfg));
    double conv = median(bench::update(StrategyKind::Convention, cfg));
    double interp = median(bench::update(StrategyKind::Interpretation, cfg));
    double comp = median(bench::update(StrategyKind::Compilation, cfg));
    report << "update baseline " << base << " conv " << conv << " interp " << interp << " comp " << comp << "; ";
    if (!(base <= conv && conv <= interp && interp <= comp)) o.fail("(b) update ordering violated");
    double plain = median(bench::rewrite_overhead(false, cfg));
    double hooked = median(bench::rewrite_overhead(true, cfg));
    report << "rewrite slowdown " << hooked / plain << "; ";
    if (!(hooked / plain > 1.5)) o.fail("(c) rewrite slowdown " + std::to_string(hooked / plain) + " <= 1.5");
    auto ratio = [&](int n) {
      return median(bench::scaling(StrategyKind::Compilation, n, cfg)) /
             median(bench::scaling(StrategyKind::Interpretation, n, cfg));
    };
    double r0 = ratio(0);
    double r30 = ratio(30);
    report << "scaling comp/interp n=0 " << r0 << " n=30 " << r30;
    if (!(r0 > r30)) o.fail("(d) scaling ratio at n=0 (" + std::to_string(r0) + ") <= n=30 (" + std::to_string(r30) + ")");
  } catch (const std::exception& ex) {
    o.fail(ex.what());
  }
  check_runtime(o, start, 300.0);
  o.detail = (o.pass ? "" : o.detail + " | ") + report.str();
  return o;
}

// 7. Trigger edges and initial calls.

bool truthy(int v) { return v != 0 && v != 1; }

Outcome trigger_semantics() {
  Outcome o;
  auto start = Clock::now();
  // Index into the value table; 0 is nil and 1 is false, everything else is truthy.
  const std::vector<std::string> values = {"nil", "false", "true", "0", "1", "2", "'a'", "''"};
  std::mt19937 rng(7);
  const int sequences = 100;
  long fires = 0;
  for (int s = 0; s < sequences; ++s) {
    int steps = uniform(rng, 5, 25);
    std::vector<int> seq(static_cast<std::size_t>(steps));
    for (auto& v : seq) v = uniform(rng, 0, static_cast<int>(values.size()) - 1);
    int first = uniform(rng, 0, static_cast<int>(values.size()) - 1);
    struct Reg {
      int at;
      bool on_true;
    };
    std::vector<Reg> regs;
    int count = uniform(rng, 1, 4);
    for (int r = 0; r < count; ++r) regs.push_back({uniform(rng, 0, steps), uniform(rng, 0, 1) == 1});

    std::vector<long> model(regs.size(), 0);
    for (std::size_t r = 0; r < regs.size(); ++r) {
      int cur = regs[r].at == 0 ? first : seq[static_cast<std::size_t>(regs[r].at - 1)];
      if (truthy(cur) == regs[r].on_true) ++model[r];
      for (int t = regs[r].at; t < steps; ++t) {
        bool before = truthy(cur);
        bool after = truthy(seq[static_cast<std::size_t>(t)]);
        if (regs[r].on_true ? after && !before : before && !after) ++model[r];
        cur = seq[static_cast<std::size_t>(t)];
      }
    }

    for (StrategyKind k : {StrategyKind::Compilation, StrategyKind::Interpretation, StrategyKind::Convention}) {
      Engine e(k);
      std::vector<long> got(regs.size(), 0);
      e.define_global("hit", e.new_native("hit", [&got](Engine&, Value, std::span<const Value> args) {
        ++got[static_cast<std::size_t>(args[0].as_number())];
        return Value();
      }));
      std::string sync = k == StrategyKind::Convention ? " check();" : "";
      try {
        e.run("var o = {v: " + values[static_cast<std::size_t>(first)] + "};");
        for (int t = 0; t <= steps; ++t) {
          for (std::size_t r = 0; r < regs.size(); ++r) {
            if (regs[r].at != t) continue;
            e.run(std::string("trigger(aexpr(() => o.v)).") + (regs[r].on_true ? "onBecomeTrue" : "onBecomeFalse") +
                  "(() => hit(" + std::to_string(r) + "));");
          }
          if (t < steps) e.run("o.v = " + values[static_cast<std::size_t>(seq[static_cast<std::size_t>(t)])] + ";" + sync);
        }
      } catch (const std::exception& ex) {
        o.fail(std::string(strategy_name(k)) + " sequence " + std::to_string(s) + ": " + ex.what());
        continue;
      }
      if (got != model) {
        std::string trace = "initial " + values[static_cast<std::size_t>(first)] + ", writes";
        for (int v : seq) trace += " " + values[static_cast<std::size_t>(v)];
        for (std::size_t r = 0; r < regs.size(); ++r) {
          trace += "; " + std::string(regs[r].on_true ? "true" : "false") + "@" + std::to_string(regs[r].at) +
                   " got " + std::to_string(got[r]) + " want " + std::to_string(model[r]);
        }
        o.fail(std::string(strategy_name(k)) + " sequence " + std::to_string(s) + ": " + trace);
      }
      for (long g : got) fires += g;
    }
  }
  check_runtime(o, start, 5.0);
  if (o.pass) o.detail = std::to_string(sequences) + " sequences x 3 strategies, " + std::to_string(fires) + " fires";
  return o;
}

// 8. Views equal from-scratch recomputation.

Outcome view_consistency() {
  Outcome o;
  auto start = Clock::now();
  std::mt19937 rng(8);
  const int sequences = 100;
  long checks = 0;
  const char* setup = R"(
class Box {
  constructor(flag) { this.flag = flag; }
}
class Item {
  constructor(x, box) {
    this.x = x;
    this.box = box;
  }
}
var boxes = [new Box(true), new Box(false), new Box(true), new Box(false)];
var items = [];
var big = select(Item, it => it.x > 3);
var bigEven = big.filter(it => it.x % 2 == 0);
var flagged = select(Item, it => it.x < 6).map(it => it.box).filter(b => b.flag);
var boxed = select(Item, it => it.box.flag).map(it => it.box);
)";
  for (int s = 0; s < sequences && o.pass; ++s) {
    Engine e(StrategyKind::Compilation);
    try {
      e.run(setup);
      int items = 0;
      int steps = uniform(rng, 10, 40);
      for (int t = 0; t < steps && o.pass; ++t) {
        int choice = items == 0 ? 0 : uniform(rng, 0, 3);
        std::string stmt;
        if (choice == 0) {
          stmt = "items.push(new Item(" + std::to_string(uniform(rng, 0, 9)) + ", boxes[" +
                 std::to_string(uniform(rng, 0, 3)) + "]));";
          ++items;
        } else if (choice == 1) {
          stmt = "items[" + std::to_string(uniform(rng, 0, items - 1)) + "].x = " + std::to_string(uniform(rng, 0, 9)) +
                 ";";
        } else if (choice == 2) {
          stmt = "items[" + std::to_string(uniform(rng, 0, items - 1)) + "].x += " +
                 std::to_string(uniform(rng, -3, 3)) + ";";
        } else {
          stmt = "boxes[" + std::to_string(uniform(rng, 0, 3)) + "].flag = " + (uniform(rng, 0, 1) ? "true" : "false") +
                 ";";
        }
        e.run(stmt);

        std::vector<Value> all = e.queries().instances(e.global("Item"));
        auto x_of = [&](Value it) { return e.load_member(it, PropKey::name(intern("x"))).as_number(); };
        auto box_of = [&](Value it) { return e.load_member(it, PropKey::name(intern("box"))); };
        auto flag_of = [&](Value b) { return e.load_member(b, PropKey::name(intern("flag"))).as_bool(); };
        std::multiset<std::string> want_big, want_even, want_flagged, want_boxed;
        std::set<HeapId> seen_flagged, seen_boxed;
        for (Value it : all) {
          double x = x_of(it);
          if (x > 3) want_big.insert(e.display(it) + "#" + std::to_string(it.heap_id()));
          if (x > 3 && std::fmod(x, 2) == 0) want_even.insert(e.display(it) + "#" + std::to_string(it.heap_id()));
          Value b = box_of(it);
          if (x < 6 && flag_of(b) && seen_flagged.insert(b.heap_id()).second) {
            want_flagged.insert("#" + std::to_string(b.heap_id()));
          }
          if (flag_of(b) && seen_boxed.insert(b.heap_id()).second) want_boxed.insert("#" + std::to_string(b.heap_id()));
        }
        auto view_items = [&](const char* name, bool with_display) {
          std::multiset<std::string> got;
          Value view = e.global(name);
          Value arr = e.call(e.load_member(view, PropKey::name(intern("items"))), {}, view);
          for (Value v : e.heap().object(arr.heap_id()).elements) {
            got.insert((with_display ? e.display(v) : "") + "#" + std::to_string(v.heap_id()));
          }
          return got;
        };
        ++checks;
        if (view_items("big", true) != want_big) o.fail("sequence " + std::to_string(s) + ": select view differs");
        if (view_items("bigEven", true) != want_even) o.fail("sequence " + std::to_string(s) + ": filter view differs");
        if (view_items("flagged", false) != want_flagged) {
          o.fail("sequence " + std::to_string(s) + ": select.map.filter view differs after " + stmt);
        }
        if (view_items("boxed", false) != want_boxed) {
          o.fail("sequence " + std::to_string(s) + ": select.map view differs after " + stmt);
        }
      }
    } catch (const std::exception& ex) {
      o.fail("sequence " + std::to_string(s) + ": " + ex.what());
    }
  }
  check_runtime(o, start, 30.0);
  if (o.pass) o.detail = std::to_string(sequences) + " sequences, " + std::to_string(checks) + " quiescent points";
  return o;
}

const std::map<int, std::pair<const char*, std::function<Outcome()>>>& criteria() {
  static const std::map<int, std::pair<const char*, std::function<Outcome()>>> all = {
      {1, {"golden examples", golden}},
      {2, {"strategy oracle equivalence", strategy_equivalence}},
      {3, {"rewriter transparency", rewriter_transparency}},
      {4, {"glitch freedom", glitch_freedom}},
      {5, {"constraint satisfaction", constraint_satisfaction}},
      {6, {"benchmark ordering", benchmark_ordering}},
      {7, {"trigger semantics", trigger_semantics}},
      {8, {"view consistency", view_consistency}},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::stoi(argv[i]));
  if (selected.empty()) {
    for (auto& [n, c] : criteria()) selected.push_back(n);
  }
  bool all_pass = true;
  for (int n : selected) {
    auto it = criteria().find(n);
    if (it == criteria().end()) {
      std::cerr << "unknown criterion " << n << '\n';
      return 2;
    }
    auto start = Clock::now();
    Outcome o = it->second.second();
    std::cout << "criterion " << n << " (" << it->second.first << "): " << (o.pass ? "PASS" : "FAIL") << " ["
              << seconds_since(start) << " s] " << o.detail << std::endl;
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
