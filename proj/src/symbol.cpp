#include "rxl/symbol.hpp"

#include <array>
#include <atomic>
#include <charconv>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace rxl {
namespace {

constexpr std::uint32_t kChunkBits = 12;
constexpr std::uint32_t kChunkSize = 1u << kChunkBits;
constexpr std::uint32_t kMaxChunks = 1u << 14;
constexpr std::uint32_t kNoIndex = 0xffffffffu;

struct Entry {
  std::string text;
  std::uint32_t index = kNoIndex;
};

struct Chunk {
  std::array<Entry, kChunkSize> entries;
};

std::uint32_t canonical_index(std::string_view s) {
  if (s.empty() || s.size() > 9) return kNoIndex;
  if (s.size() > 1 && s[0] == '0') return kNoIndex;
  std::uint32_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return kNoIndex;
  return v;
}

// Readers never lock: an id is only handed out after its entry is fully written,
// and chunks are never moved or freed.
class Interner {
 public:
  Interner() { intern(""); }

  Symbol intern(std::string_view text) {
    std::lock_guard lock(mu_);
    if (auto it = ids_.find(text); it != ids_.end()) return it->second;
    std::uint32_t id = count_;
    std::uint32_t c = id >> kChunkBits;
    if (c >= kMaxChunks) throw std::length_error("symbol table full");
    Chunk* chunk = chunks_[c].load(std::memory_order_relaxed);
    if (!chunk) {
      owned_[c] = std::make_unique<Chunk>();
      chunk = owned_[c].get();
      chunks_[c].store(chunk, std::memory_order_release);
    }
    Entry& e = chunk->entries[id & (kChunkSize - 1)];
    e.text.assign(text);
    e.index = canonical_index(text);
    ids_.emplace(std::string_view(e.text), id);
    count_ = id + 1;
    return id;
  }

  const Entry& entry(Symbol s) const {
    Chunk* chunk = chunks_[s >> kChunkBits].load(std::memory_order_acquire);
    return chunk->entries[s & (kChunkSize - 1)];
  }

 private:
  std::mutex mu_;
  std::unordered_map<std::string_view, Symbol> ids_;
  std::array<std::atomic<Chunk*>, kMaxChunks> chunks_{};
  std::array<std::unique_ptr<Chunk>, kMaxChunks> owned_{};
  std::uint32_t count_ = 0;
};

Interner& interner() {
  static Interner* table = new Interner();
  return *table;
}

}  // namespace

Symbol intern(std::string_view text) { return interner().intern(text); }

const std::string& symbol_text(Symbol s) { return interner().entry(s).text; }

std::optional<std::uint32_t> symbol_index(Symbol s) {
  std::uint32_t i = interner().entry(s).index;
  if (i == kNoIndex) return std::nullopt;
  return i;
}

namespace sym {
Symbol this_() {
  static const Symbol s = intern("this");
  return s;
}
Symbol length() {
  static const Symbol s = intern("length");
  return s;
}
Symbol value() {
  static const Symbol s = intern("value");
  return s;
}
Symbol constructor() {
  static const Symbol s = intern("constructor");
  return s;
}
}  // namespace sym

}  // namespace rxl
