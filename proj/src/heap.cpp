#include "rxl/heap.hpp"

namespace rxl {

namespace {
constexpr std::size_t kIndexThreshold = 12;
}

Scope::Binding* Scope::find_local(Symbol s) noexcept {
  if (index_) {
    auto it = index_->find(s);
    return it == index_->end() ? nullptr : &bindings_[it->second];
  }
  for (auto& b : bindings_) {
    if (b.name == s) return &b;
  }
  return nullptr;
}

Scope::Binding* Scope::lookup(Symbol s, Scope** owner) noexcept {
  for (Scope* sc = this; sc; sc = sc->parent_.get()) {
    if (Binding* b = sc->find_local(s)) {
      if (owner) *owner = sc;
      return b;
    }
  }
  return nullptr;
}

Scope::Binding& Scope::declare(Symbol s, Value v, std::uint64_t seq) {
  if (Binding* b = find_local(s)) {
    b->value = v;
    return *b;
  }
  bindings_.push_back({s, v, seq});
  if (index_) {
    index_->emplace(s, static_cast<std::uint32_t>(bindings_.size() - 1));
  } else if (bindings_.size() > kIndexThreshold) {
    index_ = std::make_unique<std::unordered_map<Symbol, std::uint32_t>>();
    for (std::uint32_t i = 0; i < bindings_.size(); ++i) index_->emplace(bindings_[i].name, i);
  }
  return bindings_.back();
}

}  // namespace rxl
