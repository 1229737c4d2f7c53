#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <vector>

namespace mtp2 {

// A point of {-1,+1}^d is stored as a d-bit mask: bit i set <=> coordinate i
// equals +1. States therefore correspond to subsets of {0,..,d-1}, and the
// coordinatewise min/max are bitwise AND/OR.
using state_t = std::uint32_t;

/// Current dimension cap for dense 2^d tables (default 20, configurable).
int max_dim();
void set_max_dim(int cap);

/// Throws std::invalid_argument if d < 1 or d exceeds the cap.
void ensure_dim(int d);

/// 2^d, after validating d against the cap.
std::size_t state_count(int d);

/// Mask with the low d bits set (the all-plus state).
state_t full_mask(int d);

class State {
 public:
  State(state_t bits, int dim);

  state_t bits() const { return bits_; }
  int dim() const { return dim_; }
  /// +1 if coordinate i is +1, else -1.
  int coord_sign(int i) const;
  /// The global sign flip x -> -x.
  State complement() const;

  bool operator==(const State&) const = default;

 private:
  state_t bits_;
  int dim_;
};

State meet(const State& a, const State& b);
State join(const State& a, const State& b);

struct StateSet {
  int dim = 0;
  std::set<state_t> members;

  bool contains(state_t s) const { return members.count(s) != 0; }
  std::size_t size() const { return members.size(); }
  bool operator==(const StateSet&) const = default;
};

/// Smallest superset of u closed under meet and join.
StateSet lattice_closure(const StateSet& u);

/// Smallest superset of u closed under meet, join, and the sign flip.
StateSet algebra_closure(const StateSet& u);

/// An unordered pair {context|{i}, context|{j}}: the two states agree outside
/// {i,j} and carry opposite signs there.
struct ElementaryPair {
  state_t x = 0;        // context | 1<<i
  state_t y = 0;        // context | 1<<j
  int i = 0;
  int j = 0;            // i < j
  state_t context = 0;  // assignment to the remaining d-2 coordinates
};

/// d*(d-1)/2 * 2^(d-2) entries, no duplicates, deterministic order.
std::vector<ElementaryPair> elementary_pairs(int d);
std::size_t elementary_pair_count(int d);

}  // namespace mtp2
