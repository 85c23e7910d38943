#include "flatnf/var.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <deque>
#include <map>
#include <mutex>
#include <numeric>
#include <tuple>

#include "flatnf/errors.hpp"

namespace flatnf {

namespace {

// Interning appends to `data` (deque: element addresses are stable) and publishes a
// fresh rank snapshot used by operator<. Old snapshots are leaked on purpose; the
// variable universe of a run is small, so the total waste is bounded and tiny.
struct Registry {
  std::mutex mu;
  std::deque<VarData> data;
  std::map<std::tuple<std::string, uint8_t, int>, uint32_t> index;
  std::atomic<const std::vector<uint32_t>*> ranks{nullptr};
};

Registry& registry() {
  static Registry r;
  return r;
}

int order_compare(const VarData& a, const VarData& b) {
  if (a.kind != b.kind)
    return static_cast<uint8_t>(a.kind) < static_cast<uint8_t>(b.kind) ? -1 : 1;
  int c = natural_compare(a.name, b.name);
  if (c != 0) return c;
  if (a.shift != b.shift) return a.shift < b.shift ? -1 : 1;
  return 0;
}

}  // namespace

Var Var::intern(const std::string& name, VarKind kind, int shift) {
  auto& r = registry();
  std::lock_guard<std::mutex> lock(r.mu);
  auto key = std::make_tuple(name, static_cast<uint8_t>(kind), shift);
  auto it = r.index.find(key);
  if (it != r.index.end()) return Var(it->second);
  uint32_t id = static_cast<uint32_t>(r.data.size());
  r.data.push_back(VarData{name, kind, shift});
  r.index.emplace(key, id);

  std::vector<uint32_t> by_order(id + 1);
  std::iota(by_order.begin(), by_order.end(), 0u);
  std::sort(by_order.begin(), by_order.end(), [&](uint32_t x, uint32_t y) {
    return order_compare(r.data[x], r.data[y]) < 0;
  });
  auto* table = new std::vector<uint32_t>(id + 1);
  for (uint32_t rank = 0; rank <= id; ++rank) (*table)[by_order[rank]] = rank;
  r.ranks.store(table, std::memory_order_release);
  return Var(id);
}

const VarData& Var::data() const { return registry().data[id_]; }

int natural_compare(const std::string& a, const std::string& b) {
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (std::isdigit(static_cast<unsigned char>(a[i])) &&
        std::isdigit(static_cast<unsigned char>(b[j]))) {
      size_t i0 = i, j0 = j;
      while (i < a.size() && std::isdigit(static_cast<unsigned char>(a[i]))) ++i;
      while (j < b.size() && std::isdigit(static_cast<unsigned char>(b[j]))) ++j;
      std::string da = a.substr(i0, i - i0), db = b.substr(j0, j - j0);
      std::string ta = da, tb = db;
      ta.erase(0, ta.find_first_not_of('0'));
      tb.erase(0, tb.find_first_not_of('0'));
      if (ta.size() != tb.size()) return ta.size() < tb.size() ? -1 : 1;
      if (ta != tb) return ta < tb ? -1 : 1;
      if (da.size() != db.size()) return da.size() < db.size() ? -1 : 1;
    } else {
      if (a[i] != b[j]) return a[i] < b[j] ? -1 : 1;
      ++i;
      ++j;
    }
  }
  if (i < a.size()) return 1;
  if (j < b.size()) return -1;
  return 0;
}

bool Var::operator<(const Var& o) const {
  if (id_ == o.id_) return false;
  const auto* t = registry().ranks.load(std::memory_order_acquire);
  return (*t)[id_] < (*t)[o.id_];
}

std::string Var::display() const {
  const VarData& d = data();
  switch (d.kind) {
    case VarKind::StatePlus:
      return d.name + "_p";
    case VarKind::Output:
      return d.shift == 0 ? d.name : d.name + "_" + std::to_string(d.shift);
    default:
      return d.name;
  }
}

Var Var::plus() const {
  const VarData& d = data();
  if (d.kind != VarKind::State) throw ChartMismatch("plus() on non-state " + display());
  return state_plus(d.name);
}

Var Var::unplus() const {
  const VarData& d = data();
  if (d.kind != VarKind::StatePlus)
    throw ChartMismatch("unplus() on non-shifted " + display());
  return state(d.name);
}

Var Var::shifted(int delta) const {
  const VarData& d = data();
  if (d.kind != VarKind::Output)
    throw ChartMismatch("shifted() on non-output " + display());
  return output(d.name, d.shift + delta);
}

}  // namespace flatnf
