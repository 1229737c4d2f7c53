#include "mtp2/state.hpp"

#include <atomic>
#include <stdexcept>
#include <string>

namespace mtp2 {

namespace {
std::atomic<int> g_max_dim{20};
}

int max_dim() { return g_max_dim.load(); }

void set_max_dim(int cap) {
  if (cap < 1 || cap > 30) throw std::invalid_argument("dimension cap must be in [1,30]");
  g_max_dim.store(cap);
}

void ensure_dim(int d) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (d > max_dim()) {
    throw std::invalid_argument("dimension " + std::to_string(d) + " exceeds cap " +
                                std::to_string(max_dim()) +
                                " (dense tables hold 2^d entries; raise with set_max_dim)");
  }
}

std::size_t state_count(int d) {
  ensure_dim(d);
  return std::size_t{1} << d;
}

state_t full_mask(int d) {
  ensure_dim(d);
  return static_cast<state_t>((std::uint64_t{1} << d) - 1);
}

State::State(state_t bits, int dim) : bits_(bits), dim_(dim) {
  ensure_dim(dim);
  if (bits > full_mask(dim)) throw std::invalid_argument("state bits out of range for dimension");
}

int State::coord_sign(int i) const {
  if (i < 0 || i >= dim_) throw std::out_of_range("coordinate index out of range");
  return (bits_ >> i) & 1u ? 1 : -1;
}

State State::complement() const { return State(~bits_ & full_mask(dim_), dim_); }

namespace {
void check_same_dim(const State& a, const State& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch in lattice operation");
}
}  // namespace

State meet(const State& a, const State& b) {
  check_same_dim(a, b);
  return State(a.bits() & b.bits(), a.dim());
}

State join(const State& a, const State& b) {
  check_same_dim(a, b);
  return State(a.bits() | b.bits(), a.dim());
}

namespace {

StateSet closure_impl(const StateSet& u, bool with_complement) {
  if (u.members.empty()) throw std::invalid_argument("closure of empty state set");
  const int d = u.dim;
  const state_t full = full_mask(d);
  std::vector<char> seen(state_count(d), 0);
  std::vector<state_t> pool;
  pool.reserve(u.members.size());
  auto add = [&](state_t s) {
    if (!seen[s]) {
      seen[s] = 1;
      pool.push_back(s);
    }
  };
  for (state_t s : u.members) {
    if (s > full) throw std::invalid_argument("state bits out of range for dimension");
    add(s);
  }
  // Worklist fixed point: combine every newly added state with all states
  // admitted before it, so every pair is eventually visited.
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const state_t x = pool[i];
    if (with_complement) add(~x & full);
    for (std::size_t j = 0; j <= i; ++j) {
      add(x & pool[j]);
      add(x | pool[j]);
    }
  }
  StateSet out;
  out.dim = d;
  out.members.insert(pool.begin(), pool.end());
  return out;
}

}  // namespace

StateSet lattice_closure(const StateSet& u) { return closure_impl(u, false); }

StateSet algebra_closure(const StateSet& u) { return closure_impl(u, true); }

std::size_t elementary_pair_count(int d) {
  if (d < 2) throw std::invalid_argument("elementary pairs need d >= 2");
  ensure_dim(d);
  const auto ud = static_cast<std::size_t>(d);
  return ud * (ud - 1) / 2 * (std::size_t{1} << (d - 2));
}

std::vector<ElementaryPair> elementary_pairs(int d) {
  const std::size_t count = elementary_pair_count(d);
  if (count > (std::size_t{1} << 26))
    throw std::invalid_argument("elementary pair enumeration too large to materialize");
  std::vector<ElementaryPair> out;
  out.reserve(count);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      std::vector<int> rest;
      rest.reserve(d - 2);
      for (int v = 0; v < d; ++v)
        if (v != i && v != j) rest.push_back(v);
      const state_t sub = state_t{1} << (d - 2);
      for (state_t a = 0; a < sub; ++a) {
        state_t ctx = 0;
        for (int k = 0; k < d - 2; ++k)
          if ((a >> k) & 1u) ctx |= state_t{1} << rest[k];
        out.push_back({ctx | (state_t{1} << i), ctx | (state_t{1} << j), i, j, ctx});
      }
    }
  }
  return out;
}

}  // namespace mtp2
