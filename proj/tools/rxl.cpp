#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rxl/bench.hpp"
#include "rxl/engine.hpp"
#include "rxl/parser.hpp"
#include "rxl/rewriter.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Output {
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file.open(path, std::ios::binary);
    if (!file) throw CLI::ValidationError("--out", "cannot write " + path);
  }
  std::ostream& stream() { return file.is_open() ? static_cast<std::ostream&>(file) : std::cout; }
  std::ofstream file;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rxl: active expressions over a small scripting language"};
  app.require_subcommand(1);

  std::string strategy;
  std::string out_path;
  std::uint32_t seed = 1;
  bool emit_ast = false;
  std::string input;
  std::vector<std::string> inputs;
  std::string scenario;
  int iterations = 100;
  int measured = 30;

  auto strategies = CLI::IsMember({"convention", "interpretation", "compilation"});

  auto* run = app.add_subcommand("run", "Run a program under one strategy");
  run->add_option("file", input, "Program file")->required()->check(CLI::ExistingFile);
  run->add_option("--strategy", strategy, "convention|interpretation|compilation")->required()->check(strategies);
  run->add_option("--out", out_path, "Write program output to a file");
  run->add_option("--seed", seed, "Unused by run; accepted for uniformity");

  auto* rewrite = app.add_subcommand("rewrite", "Print the instrumented form of a program");
  rewrite->add_option("file", input, "Program file")->required()->check(CLI::ExistingFile);
  rewrite->add_flag("--emit-ast", emit_ast, "Also print the AST of the instrumented program");
  rewrite->add_option("--out", out_path, "Write to a file");

  auto* bench = app.add_subcommand("bench", "Run a benchmark scenario and print CSV rows");
  bench->add_option("scenario", scenario, "construction|update|rewrite|scaling")->required();
  bench->add_option("--strategy", strategy, "convention|interpretation|compilation|baseline|all");
  bench->add_option("--seed", seed, "Random seed");
  bench->add_option("--iterations", iterations, "Iterations per configuration")->check(CLI::PositiveNumber);
  bench->add_option("--measured", measured, "Final iterations used for statistics")->check(CLI::PositiveNumber);
  bench->add_option("--out", out_path, "Write CSV to a file");

  auto* count = app.add_subcommand("count-nodes", "Print the AST node count of each file");
  count->add_option("files", inputs, "Program files")->required()->check(CLI::ExistingFile);
  count->add_option("--out", out_path, "Write to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*bench) {
      auto& names = rxl::bench::scenarios();
      if (std::find(names.begin(), names.end(), scenario) == names.end()) {
        std::cerr << "unknown scenario '" << scenario << "'\n" << bench->help();
        return 2;
      }
      if (!strategy.empty() && strategy != "all" && strategy != "baseline" && !rxl::parse_strategy(strategy)) {
        std::cerr << "unknown strategy '" << strategy << "'\n" << bench->help();
        return 2;
      }
    }
    Output out(out_path);
    std::ostream& os = out.stream();
    if (*run) {
      rxl::Engine engine(*rxl::parse_strategy(strategy));
      engine.set_echo(&os);
      engine.run(read_file(input));
    } else if (*rewrite) {
      rxl::ProgramPtr program = rxl::parse(read_file(input));
      std::string text = rxl::rewrite_source(*program);
      os << text;
      if (emit_ast) os << rxl::dump_ast(*rxl::parse(text));
    } else if (*bench) {
      rxl::bench::Config cfg{iterations, measured, seed};
      os << rxl::bench::kCsvHeader << '\n';
      os.flush();
      for (auto& r : rxl::bench::run(scenario, strategy, cfg)) {
        os << rxl::bench::csv_row(r) << '\n';
        os.flush();
      }
    } else if (*count) {
      for (auto& f : inputs) os << rxl::count_ast_nodes(*rxl::parse(read_file(f))) << '\n';
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
