#include "rxl/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <stdexcept>

namespace rxl::bench {

namespace {

constexpr const char* kRectangle = R"(
class Rectangle {
  constructor(width, height) {
    this.width = width;
    this.height = height;
  }
  aspectRatio() {
    return this.width / this.height;
  }
}
)";

constexpr const char* kConstruction = R"(
function rectangles(count, same) {
  let out = [];
  let shared = new Rectangle(4, 3);
  let i = 0;
  while (i < count) {
    out.push(same ? shared : new Rectangle(4 + i, 3));
    i++;
  }
  return out;
}
function build(rects) {
  let handles = [];
  for (let r of rects) handles.push(aexpr(() => r.aspectRatio()));
  return handles;
}
)";

constexpr const char* kUpdateSetup = R"(
let rect = new Rectangle(10, 20);
function watch() {
  aexpr(() => rect.aspectRatio()).onChange(ratio => {
    rect.height = rect.width * 2;
  });
}
)";

constexpr const char* kUpdateBaseline = R"(
function run(widths) {
  for (let w of widths) {
    rect.width = w;
    rect.height = rect.width * 2;
    assert(rect.aspectRatio() == 0.5);
  }
}
)";

constexpr const char* kUpdateConvention = R"(
function run(widths) {
  for (let w of widths) {
    rect.width = w;
    check();
    assert(rect.aspectRatio() == 0.5);
  }
}
)";

constexpr const char* kUpdateImplicit = R"(
function run(widths) {
  for (let w of widths) {
    rect.width = w;
    assert(rect.aspectRatio() == 0.5);
  }
}
)";

constexpr const char* kQuicksort = R"(
function quicksort(a, lo, hi) {
  if (lo >= hi) return;
  let pivot = a[hi];
  let i = lo;
  let j = lo;
  while (j < hi) {
    if (a[j] < pivot) {
      let t = a[i];
      a[i] = a[j];
      a[j] = t;
      i++;
    }
    j++;
  }
  let t = a[i];
  a[i] = a[hi];
  a[hi] = t;
  quicksort(a, lo, i - 1);
  quicksort(a, i + 1, hi);
}
function sort(a) {
  quicksort(a, 0, a.length - 1);
  return a;
}
function monitor(a, n) {
  let step = a.length / n;
  let k = 0;
  while (k < n) {
    let i = Math.floor(k * step);
    let h = aexpr(() => a[i]);
    let c = 0;
    while (c < 10) {
      h.onChange(v => nil);
      c++;
    }
    k++;
  }
}
)";

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double quantile(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  double pos = q * static_cast<double>(xs.size() - 1);
  auto lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

std::vector<double> random_numbers(std::uint32_t seed, int count, int lo, int hi) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> dist(lo, hi);
  std::vector<double> out(static_cast<std::size_t>(count));
  for (auto& x : out) x = dist(rng);
  return out;
}

Value array_of(Engine& e, const std::vector<double>& xs) {
  std::vector<Value> items;
  items.reserve(xs.size());
  for (double x : xs) items.push_back(Value::number(x));
  return e.new_array(std::move(items));
}

void expect_sorted(Engine& e, Value arr, std::vector<double> expected) {
  std::sort(expected.begin(), expected.end());
  const auto& got = e.heap().object(arr.heap_id()).elements;
  bool same = got.size() == expected.size();
  for (std::size_t i = 0; same && i < got.size(); ++i) {
    same = got[i].is_number() && got[i].as_number() == expected[i];
  }
  if (!same) throw ReactiveError(ReactiveErrorKind::MismatchedOutput, "quicksort produced a wrong result");
}

template <class Setup>
std::vector<double> measure(const Config& cfg, Setup setup) {
  std::vector<double> timings;
  timings.reserve(static_cast<std::size_t>(cfg.iterations));
  for (int i = 0; i < cfg.iterations; ++i) timings.push_back(setup(i));
  return timings;
}

std::string strategy_label(std::optional<StrategyKind> s) { return s ? strategy_name(*s) : "baseline"; }

}  // namespace

Result summarize(std::string scenario, std::string strategy, std::string param, std::uint32_t seed,
                 std::vector<double> timings, int measured) {
  Result r{std::move(scenario), std::move(strategy), std::move(param), seed, 0, 0, 0, std::move(timings)};
  std::size_t keep = std::min(r.timings.size(), static_cast<std::size_t>(std::max(measured, 1)));
  std::vector<double> tail(r.timings.end() - static_cast<std::ptrdiff_t>(keep), r.timings.end());
  if (tail.empty()) return r;
  r.median_ms = quantile(tail, 0.5);
  r.p25_ms = quantile(tail, 0.25);
  r.p75_ms = quantile(tail, 0.75);
  return r;
}

std::string csv_row(const Result& r) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f", r.median_ms, r.p25_ms, r.p75_ms);
  return r.scenario + "," + r.strategy + "," + r.param + "," + std::to_string(r.seed) + "," + buf;
}

const std::vector<std::string>& scenarios() {
  static const std::vector<std::string> names = {"construction", "update", "rewrite", "scaling"};
  return names;
}

const std::vector<int>& scaling_sizes() {
  static const std::vector<int> sizes = {0, 1, 10, 20, 30, 40, 50, 100, 150, 200, 250, 300};
  return sizes;
}

Result construction(StrategyKind strategy, bool same_object, const Config& cfg, int count) {
  auto timings = measure(cfg, [&](int) {
    Engine e(strategy);
    e.run(std::string(kRectangle) + kConstruction);
    Value rects = e.call(e.global("rectangles"), {Value::number(count), Value::boolean(same_object)});
    Value build = e.global("build");
    auto start = Clock::now();
    e.call(build, {rects});
    return elapsed_ms(start);
  });
  return summarize("construction", strategy_name(strategy), same_object ? "same" : "different", cfg.seed,
                   std::move(timings), cfg.measured);
}

Result update(std::optional<StrategyKind> strategy, const Config& cfg, int assignments) {
  std::vector<double> widths = random_numbers(cfg.seed, assignments, 1, 1000);
  const char* body = !strategy                                 ? kUpdateBaseline
                     : *strategy == StrategyKind::Convention ? kUpdateConvention
                                                               : kUpdateImplicit;
  auto timings = measure(cfg, [&](int) {
    Engine e(strategy.value_or(StrategyKind::Convention));
    e.run(std::string(kRectangle) + kUpdateSetup + body);
    if (strategy) e.call(e.global("watch"));
    Value input = array_of(e, widths);
    Value run = e.global("run");
    auto start = Clock::now();
    e.call(run, {input});
    return elapsed_ms(start);
  });
  return summarize("update", strategy_label(strategy), std::to_string(assignments), cfg.seed, std::move(timings),
                   cfg.measured);
}

Result rewrite_overhead(bool instrumented, const Config& cfg, int size) {
  auto timings = measure(cfg, [&](int i) {
    std::vector<double> data = random_numbers(cfg.seed + static_cast<std::uint32_t>(i), size, 0, 999999);
    Engine e(instrumented ? StrategyKind::Compilation : StrategyKind::Convention);
    e.run(kQuicksort);
    Value arr = array_of(e, data);
    Value sort = e.global("sort");
    auto start = Clock::now();
    e.call(sort, {arr});
    double ms = elapsed_ms(start);
    expect_sorted(e, arr, std::move(data));
    return ms;
  });
  return summarize("rewrite", instrumented ? "compilation" : "baseline", std::to_string(size), cfg.seed,
                   std::move(timings), cfg.measured);
}

Result scaling(StrategyKind strategy, int monitored, const Config& cfg, int size) {
  auto timings = measure(cfg, [&](int i) {
    std::vector<double> data = random_numbers(cfg.seed + static_cast<std::uint32_t>(i), size, 0, 999999);
    Engine e(strategy);
    e.run(kQuicksort);
    Value arr = array_of(e, data);
    if (monitored > 0) e.call(e.global("monitor"), {arr, Value::number(monitored)});
    Value sort = e.global("sort");
    auto start = Clock::now();
    e.call(sort, {arr});
    double ms = elapsed_ms(start);
    expect_sorted(e, arr, std::move(data));
    return ms;
  });
  return summarize("scaling", strategy_name(strategy), std::to_string(monitored), cfg.seed, std::move(timings),
                   cfg.measured);
}

std::vector<Result> run(const std::string& scenario, const std::string& strategy, const Config& cfg) {
  bool all = strategy.empty() || strategy == "all";
  std::vector<StrategyKind> kinds;
  if (all) {
    kinds = {StrategyKind::Convention, StrategyKind::Interpretation, StrategyKind::Compilation};
  } else if (auto k = parse_strategy(strategy)) {
    kinds = {*k};
  } else if (strategy != "baseline") {
    throw std::invalid_argument("unknown strategy '" + strategy + "'");
  }
  std::vector<Result> out;
  if (scenario == "construction") {
    for (StrategyKind k : kinds) {
      out.push_back(construction(k, true, cfg));
      out.push_back(construction(k, false, cfg));
    }
  } else if (scenario == "update") {
    if (all || strategy == "baseline") out.push_back(update(std::nullopt, cfg));
    for (StrategyKind k : kinds) out.push_back(update(k, cfg));
  } else if (scenario == "rewrite") {
    if (all || strategy == "baseline") out.push_back(rewrite_overhead(false, cfg));
    if (all || strategy == "compilation") out.push_back(rewrite_overhead(true, cfg));
  } else if (scenario == "scaling") {
    std::vector<StrategyKind> pair;
    for (StrategyKind k : {StrategyKind::Interpretation, StrategyKind::Compilation}) {
      if (all || std::find(kinds.begin(), kinds.end(), k) != kinds.end()) pair.push_back(k);
    }
    for (int n : scaling_sizes()) {
      for (StrategyKind k : pair) out.push_back(scaling(k, n, cfg));
    }
  } else {
    throw std::invalid_argument("unknown scenario '" + scenario + "'");
  }
  return out;
}

}  // namespace rxl::bench
