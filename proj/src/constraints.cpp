#include "rxl/constraints.hpp"

#include <cmath>
#include <map>

#include "rxl/triggers.hpp"

namespace rxl {

namespace {

constexpr double kZero = 1e-12;

struct Row {
  std::size_t pivot;
  std::vector<double> coef;
  double constant;
};

struct Linear {
  std::map<std::size_t, double> terms;
  double constant = 0;

  bool is_constant() const {
    for (auto& [v, c] : terms) {
      if (c != 0) return false;
    }
    return true;
  }
  Linear& scale(double k) {
    for (auto& [v, c] : terms) c *= k;
    constant *= k;
    return *this;
  }
  Linear& add(const Linear& o, double k) {
    for (auto& [v, c] : o.terms) terms[v] += k * c;
    constant += k * o.constant;
    return *this;
  }
};

[[noreturn]] void nonlinear(const Node& n, const std::string& why) {
  throw ReactiveError(ReactiveErrorKind::NonlinearConstraint,
                      why + " at " + std::to_string(n.span.line) + ":" + std::to_string(n.span.column));
}

Linear lift(const Node& n, const std::function<std::size_t(const Node&)>& variable) {
  switch (n.kind) {
    case NodeKind::Literal:
      if (n.literal != LiteralKind::Number) nonlinear(n, "non-numeric literal in constraint");
      return Linear{{}, n.number};
    case NodeKind::Ident: {
      Linear l;
      l.terms[variable(n)] = 1;
      return l;
    }
    case NodeKind::Unary: {
      Linear l = lift(n.child(0), variable);
      if (n.op == Op::Neg) return l.scale(-1);
      if (n.op == Op::Plus) return l;
      nonlinear(n, "unsupported operator in constraint");
    }
    case NodeKind::Binary: {
      Linear a = lift(n.child(0), variable);
      Linear b = lift(n.child(1), variable);
      switch (n.op) {
        case Op::Add: return a.add(b, 1);
        case Op::Sub: return a.add(b, -1);
        case Op::Mul:
          if (a.is_constant()) return b.scale(a.constant);
          if (b.is_constant()) return a.scale(b.constant);
          nonlinear(n, "product of variables in constraint");
        case Op::Div:
          if (b.is_constant() && b.constant != 0) return a.scale(1 / b.constant);
          nonlinear(n, "division by a non-constant in constraint");
        default: nonlinear(n, std::string("operator '") + op_text(n.op) + "' in constraint");
      }
    }
    default: nonlinear(n, std::string("unsupported ") + node_kind_name(n.kind) + " in constraint");
  }
}

}  // namespace

double residual(const LinearConstraint& c, const std::vector<double>& values) {
  double r = c.constant;
  for (auto& [v, k] : c.terms) r += k * values[v];
  return r;
}

std::vector<double> solve_linear(const std::vector<LinearConstraint>& constraints, const std::vector<double>& current,
                                 const std::vector<std::uint64_t>& order,
                                 const std::vector<std::optional<double>>& pinned, double tolerance) {
  std::size_t n = current.size();
  std::vector<Row> rows;
  std::vector<bool> is_pivot(n, false);
  for (std::size_t ci = 0; ci < constraints.size(); ++ci) {
    std::vector<double> a(n, 0.0);
    double a0 = constraints[ci].constant;
    for (auto& [v, k] : constraints[ci].terms) a[v] += k;
    for (auto& r : rows) {
      double k = a[r.pivot];
      if (k == 0) continue;
      for (std::size_t j = 0; j < n; ++j) a[j] += k * r.coef[j];
      a0 += k * r.constant;
      a[r.pivot] = 0;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (pinned[j] && a[j] != 0) {
        a0 += a[j] * *pinned[j];
        a[j] = 0;
      }
    }
    std::optional<std::size_t> absorber;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::fabs(a[j]) <= kZero) {
        a[j] = 0;
        continue;
      }
      if (!absorber || order[j] > order[*absorber]) absorber = j;
    }
    if (!absorber) {
      if (std::fabs(a0) > tolerance) {
        throw ReactiveError(ReactiveErrorKind::UnsatisfiableSystem,
                            "constraint " + std::to_string(ci + 1) + " cannot be satisfied (residual " +
                                number_to_string(a0) + ")");
      }
      continue;
    }
    std::size_t q = *absorber;
    Row row{q, std::vector<double>(n, 0.0), -a0 / a[q]};
    for (std::size_t j = 0; j < n; ++j) {
      if (j != q && a[j] != 0) row.coef[j] = -a[j] / a[q];
    }
    for (auto& r : rows) {
      double k = r.coef[q];
      if (k == 0) continue;
      for (std::size_t j = 0; j < n; ++j) r.coef[j] += k * row.coef[j];
      r.constant += k * row.constant;
      r.coef[q] = 0;
    }
    is_pivot[q] = true;
    rows.push_back(std::move(row));
  }
  std::vector<double> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = pinned[j] ? *pinned[j] : current[j];
  for (auto& r : rows) {
    double v = r.constant;
    for (std::size_t j = 0; j < n; ++j) {
      if (r.coef[j] != 0) v += r.coef[j] * x[j];
    }
    x[r.pivot] = v;
  }
  return x;
}

LinearConstraint linearize(const Node& expr, const std::function<std::size_t(const Node&)>& variable) {
  if (expr.kind != NodeKind::Binary) nonlinear(expr, "constraint must be an equality");
  switch (expr.op) {
    case Op::Eq:
    case Op::StrictEq: break;
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
    case Op::Ne:
    case Op::StrictNe:
      throw ReactiveError(ReactiveErrorKind::UnsupportedRelation,
                          std::string("only equality constraints are supported, got '") + op_text(expr.op) + "'");
    default: nonlinear(expr, "constraint must be an equality");
  }
  Linear l = lift(expr.child(0), variable);
  l.add(lift(expr.child(1), variable), -1);
  LinearConstraint c;
  c.constant = l.constant;
  for (auto& [v, k] : l.terms) {
    if (k != 0) c.terms.emplace_back(v, k);
  }
  return c;
}

std::vector<double> ConstraintSystem::values() const {
  std::vector<double> out;
  out.reserve(vars_.size());
  for (auto& v : vars_) out.push_back(engine_.load_member(v.cv, PropKey::name(sym::value())).as_number());
  return out;
}

std::optional<std::size_t> ConstraintSystem::find(std::string_view name) const {
  Symbol s = intern(name);
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].name == s) return i;
  }
  return std::nullopt;
}

std::size_t ConstraintSystem::variable_for(const Node& ident, const ScopePtr& env) {
  Scope* owner = nullptr;
  Scope::Binding* b = env->lookup(ident.symbol, &owner);
  if (!b) {
    throw RuntimeError(RuntimeErrorKind::UndefinedVariable, "'" + symbol_text(ident.symbol) + "' is not defined",
                       ident.span.pos());
  }
  DependencyKey key = engine_.binding_key(*owner, ident.symbol);
  if (auto it = by_key_.find(key); it != by_key_.end()) return it->second;
  if (!b->value.is_number()) nonlinear(ident, "constrained variable '" + symbol_text(ident.symbol) + "' is not a number");
  ScopePtr scope;
  for (ScopePtr s = env; s; s = s->parent()) {
    if (s.get() == owner) {
      scope = s;
      break;
    }
  }
  std::size_t i = vars_.size();
  Variable var;
  var.key = key;
  var.scope = scope;
  var.name = ident.symbol;
  var.order = b->decl_seq;
  var.cv = engine_.new_object();
  engine_.heap().object(var.cv.heap_id()).props.emplace_back(PropKey::name(sym::value()), b->value);
  vars_.push_back(var);
  by_key_.emplace(key, i);

  Value read_var = engine_.new_native("constraint_var", [this, i](Engine& e, Value, std::span<const Value>) {
    return e.read_local(*vars_[i].scope, vars_[i].name);
  });
  AExprHandle to_cv = engine_.create_aexpr(read_var);
  to_cv.on_change([this, i](Engine&, Value v) { on_assign(i, v); });
  Value read_cv = engine_.new_native("constraint_cv", [this, i](Engine& e, Value, std::span<const Value>) {
    return e.read_member(vars_[i].cv, PropKey::name(sym::value()));
  });
  AExprHandle to_var = engine_.create_aexpr(read_cv);
  to_var.on_change([this, i](Engine& e, Value v) {
    Variable& var = vars_[i];
    Scope::Binding* b = var.scope->find_local(var.name);
    if (b && b->value != v) e.write_local(*var.scope, var.name, v);
  });
  vars_[i].to_cv = to_cv.id();
  vars_[i].to_var = to_var.id();
  return i;
}

void ConstraintSystem::declare(const Node& stmt, const ProgramPtr&, const ScopePtr& env) {
  if (engine_.strategy() != StrategyKind::Compilation) {
    throw ReactiveError(ReactiveErrorKind::UnsupportedStrategy,
                        std::string("constraints require the compilation strategy, engine runs ") +
                            strategy_name(engine_.strategy()));
  }
  LinearConstraint c = linearize(stmt.child(0), [&](const Node& id) { return variable_for(id, env); });
  constraints_.push_back(c);
  try {
    resolve(std::nullopt);
  } catch (...) {
    constraints_.pop_back();
    throw;
  }
  Value sentinel = engine_.new_native("constraint_holds", [this, c](Engine& e, Value, std::span<const Value>) {
    double r = c.constant;
    for (auto& [v, k] : c.terms) {
      Value x = e.read_local(*vars_[v].scope, vars_[v].name);
      if (!x.is_number()) return Value::boolean(false);
      r += k * x.as_number();
    }
    return Value::boolean(std::fabs(r) <= kConstraintTolerance);
  });
  AExprHandle h = engine_.create_aexpr(sentinel);
  on_become_false(engine_, h, [this](Engine&) { resolve(std::nullopt); });
}

void ConstraintSystem::on_assign(std::size_t var, Value v) {
  if (!v.is_number()) {
    throw ReactiveError(ReactiveErrorKind::NonlinearConstraint,
                        "constrained variable '" + symbol_text(vars_[var].name) + "' assigned a non-number");
  }
  if (engine_.load_member(vars_[var].cv, PropKey::name(sym::value())) == v) return;
  resolve(std::make_pair(var, v.as_number()));
}

void ConstraintSystem::resolve(std::optional<std::pair<std::size_t, double>> pin) {
  std::vector<double> current = values();
  std::vector<std::uint64_t> order;
  std::vector<std::optional<double>> pinned(vars_.size());
  for (auto& v : vars_) order.push_back(v.order);
  if (pin) pinned[pin->first] = pin->second;
  std::vector<double> next = solve_linear(constraints_, current, order, pinned);
  Engine::PropagationScope hold(engine_);
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    double old = current[i];
    bool changed = pin && pin->first == i ? next[i] != old
                                           : std::fabs(next[i] - old) > kZero * std::max(1.0, std::fabs(old));
    if (changed) engine_.write_member(vars_[i].cv, PropKey::name(sym::value()), Value::number(next[i]));
  }
  hold.finish();
}

}  // namespace rxl
