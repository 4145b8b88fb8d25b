#pragma once

// Skew-symmetric exchange matrices (quivers without loops or 2-cycles),
// matrix mutation, acyclicity and ADE / extended-ADE diagram recognition.

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace cluster {

/// n x n skew-symmetric integer matrix; b(i, j) > 0 means b(i, j) arrows i -> j.
class BMatrix {
 public:
  BMatrix() = default;

  /// Zero matrix (the quiver with n vertices and no arrows).
  explicit BMatrix(std::size_t n) : n_(n), b_(n * n, 0) {}

  static BMatrix from_rows(const std::vector<std::vector<int>>& rows) {
    BMatrix m(rows.size());
    for (std::size_t i = 0; i < m.n_; ++i) {
      if (rows[i].size() != m.n_) throw std::invalid_argument("exchange matrix is not square");
      for (std::size_t j = 0; j < m.n_; ++j) m.b_[i * m.n_ + j] = rows[i][j];
    }
    m.validate();
    return m;
  }

  std::size_t size() const { return n_; }
  int operator()(std::size_t i, std::size_t j) const { return b_[i * n_ + j]; }

  /// Sets b(i, j) = v and b(j, i) = -v.
  void set(std::size_t i, std::size_t j, int v) {
    if (i >= n_ || j >= n_) throw std::out_of_range("vertex out of range");
    if (i == j && v != 0) throw std::invalid_argument("loops are not allowed");
    b_[i * n_ + j] = v;
    b_[j * n_ + i] = -v;
  }

  std::vector<std::vector<int>> rows() const {
    std::vector<std::vector<int>> r(n_, std::vector<int>(n_));
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) r[i][j] = (*this)(i, j);
    return r;
  }

  int max_abs_entry() const {
    int m = 0;
    for (int v : b_) m = std::max(m, std::abs(v));
    return m;
  }

  /// Simultaneous row/column permutation: result(i, j) = b(perm[i], perm[j]).
  BMatrix permuted(std::span<const std::size_t> perm) const {
    BMatrix m(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) m.b_[i * n_ + j] = (*this)(perm[i], perm[j]);
    return m;
  }

  BMatrix opposite() const {
    BMatrix m = *this;
    for (int& v : m.b_) v = -v;
    return m;
  }

  const std::vector<int>& entries() const { return b_; }

  bool operator==(const BMatrix&) const = default;
  auto operator<=>(const BMatrix&) const = default;

 private:
  void validate() const {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if ((*this)(i, j) != -(*this)(j, i))
          throw std::invalid_argument("exchange matrix is not skew-symmetric at (" +
                                      std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
  }

  std::size_t n_ = 0;
  std::vector<int> b_;
};

/// Matrix mutation in direction k (0-based):
///   b'(i,j) = -b(i,j)                                   if k in {i, j}
///   b'(i,j) = b(i,j) + sign(b(i,k)) max(b(i,k) b(k,j), 0)  otherwise.
inline BMatrix mutate_matrix(const BMatrix& b, std::size_t k) {
  const std::size_t n = b.size();
  if (k >= n) throw std::out_of_range("mutation direction out of range");
  BMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      int v;
      if (i == k || j == k) {
        v = -b(i, j);
      } else {
        const int bik = b(i, k), bkj = b(k, j);
        const int sign = (bik > 0) - (bik < 0);
        v = b(i, j) + sign * std::max(bik * bkj, 0);
      }
      m.set(i, j, v);
    }
  return m;
}

inline bool is_acyclic(const BMatrix& b) {
  const std::size_t n = b.size();
  std::vector<int> indeg(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (b(i, j) > 0) ++indeg[j];
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push_back(i);
  std::size_t seen = 0;
  while (!ready.empty()) {
    const std::size_t v = ready.back();
    ready.pop_back();
    ++seen;
    for (std::size_t j = 0; j < n; ++j)
      if (b(v, j) > 0 && --indeg[j] == 0) ready.push_back(j);
  }
  return seen == n;
}

inline bool is_connected(const BMatrix& b) {
  const std::size_t n = b.size();
  if (n == 0) return true;
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t j = 0; j < n; ++j)
      if (b(v, j) != 0 && !seen[j]) {
        seen[j] = true;
        ++count;
        stack.push_back(j);
      }
  }
  return count == n;
}

enum class TypeFamily { A, D, E, ATilde, DTilde, ETilde, Rank2, Unknown };

/// Diagram type read off a single exchange matrix.  `n` is the Dynkin index
/// (D~_n has n + 1 vertices), `p`/`q` the arrow counts of an acyclic cycle
/// for A~(p,q), `r` the arrow multiplicity in rank 2.
struct TypeLabel {
  TypeFamily family = TypeFamily::Unknown;
  int n = 0;
  int p = 0;
  int q = 0;
  int r = 0;

  bool operator==(const TypeLabel&) const = default;

  bool is_dynkin() const {
    return family == TypeFamily::A || family == TypeFamily::D || family == TypeFamily::E;
  }
  bool is_euclidean() const {
    return family == TypeFamily::ATilde || family == TypeFamily::DTilde ||
           family == TypeFamily::ETilde;
  }

  /// For rank 2: the Dynkin type the quiver is equivalent to (r = 1 -> A2).
  /// r = 0 is A1 x A1, which is not a connected Dynkin label.
  std::optional<TypeLabel> dynkin_equivalent() const {
    if (is_dynkin()) return *this;
    if (family == TypeFamily::Rank2 && r == 1) return TypeLabel{TypeFamily::A, 2};
    return std::nullopt;
  }

  std::string to_string() const {
    switch (family) {
      case TypeFamily::A: return "A" + std::to_string(n);
      case TypeFamily::D: return "D" + std::to_string(n);
      case TypeFamily::E: return "E" + std::to_string(n);
      case TypeFamily::ATilde: return "A~(" + std::to_string(p) + "," + std::to_string(q) + ")";
      case TypeFamily::DTilde: return "D~" + std::to_string(n);
      case TypeFamily::ETilde: return "E~" + std::to_string(n);
      case TypeFamily::Rank2: return "rank2(r=" + std::to_string(r) + ")";
      case TypeFamily::Unknown: break;
    }
    return "unknown";
  }
};

/// Classifies the given matrix only (never its mutation class).
inline TypeLabel classify(const BMatrix& b) {
  const std::size_t n = b.size();
  if (n == 1) return {TypeFamily::A, 1};
  if (n == 2) return {TypeFamily::Rank2, 0, 0, 0, std::abs(b(0, 1))};
  if (!is_acyclic(b) || b.max_abs_entry() > 1 || !is_connected(b)) return {};

  std::vector<std::vector<std::size_t>> adj(n);
  std::size_t edges = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (b(i, j) != 0) {
        adj[i].push_back(j);
        if (i < j) ++edges;
      }
  const int nv = static_cast<int>(n);

  if (edges == n) {
    // Connected with one independent cycle: A~ iff the graph is the cycle itself.
    for (const auto& nb : adj)
      if (nb.size() != 2) return {};
    int forward = 0;
    std::size_t prev = 0, cur = adj[0][0];
    if (b(0, cur) > 0) ++forward;
    while (cur != 0) {
      const std::size_t next = adj[cur][0] == prev ? adj[cur][1] : adj[cur][0];
      if (b(cur, next) > 0) ++forward;
      prev = cur;
      cur = next;
    }
    const int backward = nv - forward;
    return {TypeFamily::ATilde, nv - 1, std::min(forward, backward), std::max(forward, backward)};
  }
  if (edges != n - 1) return {};

  // Tree.  Arm length = number of vertices on the path from a branch
  // neighbour out to a leaf.
  auto arm = [&](std::size_t from, std::size_t start) {
    int len = 1;
    std::size_t prev = from, cur = start;
    while (adj[cur].size() == 2) {
      const std::size_t next = adj[cur][0] == prev ? adj[cur][1] : adj[cur][0];
      prev = cur;
      cur = next;
      ++len;
    }
    return adj[cur].size() == 1 ? len : -1;
  };

  std::vector<std::size_t> branch;
  for (std::size_t v = 0; v < n; ++v)
    if (adj[v].size() >= 3) branch.push_back(v);

  if (branch.empty()) return {TypeFamily::A, nv};

  if (branch.size() == 1) {
    const std::size_t c = branch.front();
    std::vector<int> arms;
    for (std::size_t nb : adj[c]) arms.push_back(arm(c, nb));
    std::sort(arms.begin(), arms.end());
    if (arms.size() == 4) {
      if (arms == std::vector<int>{1, 1, 1, 1}) return {TypeFamily::DTilde, 4};
      return {};
    }
    if (arms.size() != 3) return {};
    if (arms[0] == 1 && arms[1] == 1) return {TypeFamily::D, nv};
    if (arms == std::vector<int>{1, 2, 2}) return {TypeFamily::E, 6};
    if (arms == std::vector<int>{1, 2, 3}) return {TypeFamily::E, 7};
    if (arms == std::vector<int>{1, 2, 4}) return {TypeFamily::E, 8};
    if (arms == std::vector<int>{2, 2, 2}) return {TypeFamily::ETilde, 6};
    if (arms == std::vector<int>{1, 3, 3}) return {TypeFamily::ETilde, 7};
    if (arms == std::vector<int>{1, 2, 5}) return {TypeFamily::ETilde, 8};
    return {};
  }

  if (branch.size() == 2) {
    // D~_{n-1}: two trivalent vertices, each carrying two leaves.
    for (std::size_t c : branch) {
      if (adj[c].size() != 3) return {};
      int leaves = 0;
      for (std::size_t nb : adj[c])
        if (adj[nb].size() == 1) ++leaves;
      if (leaves != 2) return {};
    }
    return {TypeFamily::DTilde, nv - 1};
  }
  return {};
}

/// Calls fn on every skew-symmetric n x n matrix with |b(i,j)| <= bound,
/// exactly once each.  Order: upper-triangle entries in row-major order
/// form an odometer over -bound..bound with the last entry fastest.
inline void for_each_matrix(std::size_t n, int bound, const std::function<void(const BMatrix&)>& fn) {
  if (n < 1 || bound < 0) throw std::invalid_argument("for_each_matrix: need n >= 1, bound >= 0");
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) slots.emplace_back(i, j);
  std::vector<int> digits(slots.size(), -bound);
  while (true) {
    BMatrix m(n);
    for (std::size_t s = 0; s < slots.size(); ++s) m.set(slots[s].first, slots[s].second, digits[s]);
    fn(m);
    std::size_t s = slots.size();
    while (s > 0 && digits[s - 1] == bound) digits[--s] = -bound;
    if (s == 0) return;
    ++digits[s - 1];
  }
}

inline std::vector<BMatrix> enumerate_matrices(std::size_t n, int bound) {
  std::vector<BMatrix> out;
  for_each_matrix(n, bound, [&](const BMatrix& m) { out.push_back(m); });
  return out;
}

inline nlohmann::json to_json(const BMatrix& b) { return b.rows(); }

/// Accepts {"rank": n, "arrows": [[from, to, multiplicity], ...]} with
/// 1-based vertices, or {"matrix": [[...], ...]}.  Parallel arrow entries
/// in the same direction add up; loops, 2-cycles and non-positive
/// multiplicities are rejected.  Disconnected quivers are accepted.
inline BMatrix quiver_from_json(const nlohmann::json& j) {
  if (j.contains("matrix")) {
    if (j.contains("arrows")) throw std::invalid_argument("quiver has both \"matrix\" and \"arrows\"");
    const auto rows = j.at("matrix").get<std::vector<std::vector<int>>>();
    if (rows.empty()) throw std::invalid_argument("empty exchange matrix");
    return BMatrix::from_rows(rows);
  }
  const long rank = j.at("rank").get<long>();
  if (rank <= 0) throw std::invalid_argument("rank must be positive");
  const auto n = static_cast<std::size_t>(rank);
  BMatrix b(n);
  for (const auto& a : j.at("arrows")) {
    if (!a.is_array() || a.size() != 3) throw std::invalid_argument("arrow must be [from, to, multiplicity]");
    const long from = a[0].get<long>(), to = a[1].get<long>(), mult = a[2].get<long>();
    if (from < 1 || to < 1 || from > rank || to > rank)
      throw std::invalid_argument("arrow vertex out of range");
    if (from == to) throw std::invalid_argument("loop at vertex " + std::to_string(from));
    if (mult <= 0) throw std::invalid_argument("arrow multiplicity must be positive");
    const std::size_t i = static_cast<std::size_t>(from - 1), k = static_cast<std::size_t>(to - 1);
    if (b(i, k) < 0)
      throw std::invalid_argument("2-cycle between vertices " + std::to_string(from) + " and " +
                                  std::to_string(to));
    b.set(i, k, b(i, k) + static_cast<int>(mult));
  }
  return b;
}

}  // namespace cluster
