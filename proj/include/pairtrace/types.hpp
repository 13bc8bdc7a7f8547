#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace pairtrace {

using ItemId = std::uint64_t;
using HeapId = std::uint64_t;
using LinkId = std::uint64_t;

inline constexpr std::uint64_t kNone = std::numeric_limits<std::uint64_t>::max();

/// Delete-min linking discipline of a heap.
enum class Strategy { TwoPass, Multipass };

const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

/// A key is an ordinary 64-bit signed integer, or the minus-infinity
/// sentinel used internally by delete. The sentinel compares below every
/// ordinary key and is never accepted from callers, so user keys keep the
/// full int64 range.
struct Key {
  std::int64_t value = 0;
  bool minus_inf = false;

  static constexpr Key minus_infinity() { return Key{0, true}; }
  static constexpr Key of(std::int64_t v) { return Key{v, false}; }

  friend constexpr bool operator==(const Key& a, const Key& b) {
    return a.minus_inf == b.minus_inf && (a.minus_inf || a.value == b.value);
  }
  friend constexpr bool operator<(const Key& a, const Key& b) {
    if (a.minus_inf) return !b.minus_inf;
    if (b.minus_inf) return false;
    return a.value < b.value;
  }
  friend constexpr bool operator<=(const Key& a, const Key& b) { return !(b < a); }
};

/// Raised for contract violations: dead heap ids, invalid keys, items in
/// the wrong heap, malformed traces and workloads.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pairtrace
