#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rxl/engine.hpp"

namespace rxl::bench {

struct Config {
  int iterations = 100;
  int measured = 30;
  std::uint32_t seed = 1;
};

struct Result {
  std::string scenario;
  std::string strategy;
  std::string param;
  std::uint32_t seed = 0;
  double median_ms = 0;
  double p25_ms = 0;
  double p75_ms = 0;
  std::vector<double> timings;
};

// Summarises the final `measured` timings of a run.
Result summarize(std::string scenario, std::string strategy, std::string param, std::uint32_t seed,
                 std::vector<double> timings, int measured);

inline constexpr const char* kCsvHeader = "scenario,strategy,param,seed,median_ms,p25_ms,p75_ms";
std::string csv_row(const Result& r);

const std::vector<std::string>& scenarios();
const std::vector<int>& scaling_sizes();

// Creating 1000 aexprs over a rectangle's aspect ratio, on one shared or on distinct rectangles.
Result construction(StrategyKind strategy, bool same_object, const Config& cfg, int count = 1000);
// 100,000 random width assignments, aspect ratio kept by a callback (or inline for the baseline).
Result update(std::optional<StrategyKind> strategy, const Config& cfg, int assignments = 100000);
// Quicksort of random numbers, original program versus its instrumented form.
Result rewrite_overhead(bool instrumented, const Config& cfg, int size = 10000);
// Quicksort of 1000 numbers with `monitored` aexprs on array slots, 10 no-op callbacks each.
Result scaling(StrategyKind strategy, int monitored, const Config& cfg, int size = 1000);

// Runs a named scenario; `strategy` empty or "all" means every applicable strategy.
std::vector<Result> run(const std::string& scenario, const std::string& strategy, const Config& cfg);

}  // namespace rxl::bench
