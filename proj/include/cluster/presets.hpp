#pragma once

// Named quivers used by the CLI and the test suites.  Dynkin presets use the
// linear orientation along each arm.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cluster/quiver.hpp"

namespace cluster {

namespace detail {

inline BMatrix from_arrows(std::size_t n, const std::vector<std::pair<int, int>>& arrows, int mult = 1) {
  BMatrix b(n);
  for (auto [from, to] : arrows) b.set(static_cast<std::size_t>(from - 1), static_cast<std::size_t>(to - 1), mult);
  return b;
}

inline BMatrix type_a(int n) {
  std::vector<std::pair<int, int>> arrows;
  for (int i = 1; i < n; ++i) arrows.emplace_back(i, i + 1);
  return from_arrows(static_cast<std::size_t>(n), arrows);
}

// Path 1 -> ... -> n-2, with n-2 -> n-1 and n-2 -> n.
inline BMatrix type_d(int n) {
  std::vector<std::pair<int, int>> arrows;
  for (int i = 1; i < n - 2; ++i) arrows.emplace_back(i, i + 1);
  arrows.emplace_back(n - 2, n - 1);
  arrows.emplace_back(n - 2, n);
  return from_arrows(static_cast<std::size_t>(n), arrows);
}

// Path 1 -> ... -> n-1, plus 3 -> n.
inline BMatrix type_e(int n) {
  std::vector<std::pair<int, int>> arrows;
  for (int i = 1; i < n - 1; ++i) arrows.emplace_back(i, i + 1);
  arrows.emplace_back(3, n);
  return from_arrows(static_cast<std::size_t>(n), arrows);
}

}  // namespace detail

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"a2", "a3", "a4", "a5", "d4", "d5", "e6", "e7", "e8", "kronecker", "atilde12"};
  return names;
}

inline std::optional<BMatrix> preset(const std::string& name) {
  if (name.size() == 2 && name[0] == 'a' && name[1] >= '2' && name[1] <= '5') return detail::type_a(name[1] - '0');
  if (name == "d4") return detail::type_d(4);
  if (name == "d5") return detail::type_d(5);
  if (name == "e6") return detail::type_e(6);
  if (name == "e7") return detail::type_e(7);
  if (name == "e8") return detail::type_e(8);
  if (name == "kronecker") return BMatrix::from_rows({{0, 2}, {-2, 0}});
  // Cyclic quiver 2 -> 1, 1 => 3 (double), 3 -> 2.
  if (name == "atilde12") return BMatrix::from_rows({{0, -1, 2}, {1, 0, -1}, {-2, 1, 0}});
  return std::nullopt;
}

}  // namespace cluster
