#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "rxl/engine.hpp"

namespace rxl {

// sum(coef * x[var]) + constant == 0
struct LinearConstraint {
  std::vector<std::pair<std::size_t, double>> terms;
  double constant = 0;
};

inline constexpr double kConstraintTolerance = 1e-9;

// Solves the system by elimination in constraint order. Each constraint that still has
// free variables makes its latest-declared free variable (highest `order`) absorb the
// residual; every other unpinned variable keeps its current value.
// Throws UnsatisfiableSystem when a constraint without free variables is violated.
std::vector<double> solve_linear(const std::vector<LinearConstraint>& constraints, const std::vector<double>& current,
                                 const std::vector<std::uint64_t>& order,
                                 const std::vector<std::optional<double>>& pinned,
                                 double tolerance = kConstraintTolerance);

double residual(const LinearConstraint& c, const std::vector<double>& values);

// Lifts `lhs == rhs` into a linear constraint; `variable` maps an identifier node to a solver index.
LinearConstraint linearize(const Node& expr, const std::function<std::size_t(const Node&)>& variable);

class ConstraintSystem {
 public:
  struct Variable {
    DependencyKey key;
    ScopePtr scope;
    Symbol name = 0;
    std::uint64_t order = 0;
    Value cv;  // solver-side object with a `value` property
    AExprId to_cv = 0;
    AExprId to_var = 0;
  };

  explicit ConstraintSystem(Engine& engine) : engine_(engine) {}

  void declare(const Node& stmt, const ProgramPtr& program, const ScopePtr& env);

  const std::vector<Variable>& variables() const noexcept { return vars_; }
  const std::vector<LinearConstraint>& constraints() const noexcept { return constraints_; }
  std::vector<double> values() const;
  std::optional<std::size_t> find(std::string_view name) const;

 private:
  std::size_t variable_for(const Node& ident, const ScopePtr& env);
  void on_assign(std::size_t var, Value v);
  void resolve(std::optional<std::pair<std::size_t, double>> pin);

  Engine& engine_;
  std::vector<Variable> vars_;
  std::unordered_map<DependencyKey, std::size_t> by_key_;
  std::vector<LinearConstraint> constraints_;
};

}  // namespace rxl
