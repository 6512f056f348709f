#pragma once

/// @file structures.hpp
/// Monotone failure sets on the hypercube {0,1}^n and the product
/// operator that nests one system inside the components of another.
///
/// Coordinates are 0-based. A value of 1 marks a failed component.
/// A product of an inner structure on r coordinates with an outer
/// structure on m coordinates lives on r*m coordinates laid out
/// block-major: grid index (i, j) (component i of block j) is stored at
/// flat index j*r + i.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace thresholdlab {

/// A point of {0,1}^n.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::vector<std::uint8_t> bits);

  /// Parses a string of '0'/'1' characters; character i is coordinate i.
  static Configuration from_bitstring(std::string_view text);
  /// Low n bits of `mask`, bit i is coordinate i. Requires n <= 64.
  static Configuration from_mask(std::uint64_t mask, int n);

  std::size_t size() const noexcept { return bits_.size(); }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  std::string to_bitstring() const;
  std::uint64_t to_mask() const;

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Largest ground size handled by exhaustive enumeration.
inline constexpr int kExhaustiveCap = 20;

enum class Topology { circular, linear };

class StructureExpr;
struct ExprNode;

/// System fails iff at least k of its n components fail.
struct KOutOfN {
  std::int64_t k;
  std::int64_t n;
};

/// System fails iff k consecutive components fail.
struct Consecutive {
  std::int64_t k;
  std::int64_t n;
  Topology topology;
};

/// Bitmap-backed up-closed set on at most kExhaustiveCap coordinates.
struct Explicit {
  int n;
  std::shared_ptr<const std::vector<bool>> members;  // indexed by mask
  std::shared_ptr<const std::vector<std::uint64_t>> counts_by_weight;

  bool contains_mask(std::uint64_t mask) const { return (*members)[mask]; }
};

/// Immutable handle on a structure expression tree. Copies share nodes.
class StructureExpr {
 public:
  static StructureExpr k_out_of_n(std::int64_t k, std::int64_t n);
  static StructureExpr series(std::int64_t n) { return k_out_of_n(1, n); }
  static StructureExpr parallel(std::int64_t n) { return k_out_of_n(n, n); }
  static StructureExpr consecutive(std::int64_t k, std::int64_t n,
                                   Topology topology = Topology::circular);
  /// `members` must list every member of an up-closed, nontrivial set.
  static StructureExpr explicit_set(int n,
                                    const std::vector<Configuration>& members);
  /// Same, from a membership bitmap of length 2^n.
  static StructureExpr explicit_bitmap(int n, std::vector<bool> members);

  const ExprNode& node() const noexcept { return *node_; }
  std::int64_t ground_size() const noexcept { return ground_size_; }

 private:
  friend StructureExpr product(const StructureExpr& inner,
                               const StructureExpr& outer);
  StructureExpr(std::shared_ptr<const ExprNode> node, std::int64_t size)
      : node_(std::move(node)), ground_size_(size) {}

  std::shared_ptr<const ExprNode> node_;
  std::int64_t ground_size_;
};

/// Replace each of outer's m components by an independent copy of inner.
struct Product {
  StructureExpr inner;
  StructureExpr outer;
};

struct ExprNode {
  std::variant<KOutOfN, Consecutive, Product, Explicit> v;
};

StructureExpr product(const StructureExpr& inner, const StructureExpr& outer);

/// Parallel-series system B_k: floor(log2 k) components per block,
/// floor(k / log2 k) blocks, failure iff some block fails entirely.
/// Requires k >= 2.
StructureExpr parallel_series(std::int64_t k);

/// Majority system A_{floor(n/2), n}.
StructureExpr majority(std::int64_t n);

inline std::int64_t ground_size(const StructureExpr& expr) {
  return expr.ground_size();
}

/// Membership of `cfg` in the failure set. Throws InputError on a length
/// mismatch.
bool membership(const StructureExpr& expr, const Configuration& cfg);
bool membership(const StructureExpr& expr, std::span<const std::uint8_t> bits);

/// Membership of the configuration encoded by the low bits of `mask`.
/// Requires ground_size(expr) <= 64.
bool membership_mask(const StructureExpr& expr, std::uint64_t mask);

/// Pair of permutations acting on the (i, j) grid of a product.
/// g permutes components within blocks, h permutes the blocks.
class PermutationPair {
 public:
  PermutationPair(std::vector<int> g, std::vector<int> h);
  static PermutationPair identity(int r, int m);

  const std::vector<int>& g() const noexcept { return g_; }
  const std::vector<int>& h() const noexcept { return h_; }

  /// zeta_(i,j) = eta_(g(i), h(j)) on the block-major layout.
  Configuration apply(const Configuration& cfg) const;

 private:
  std::vector<int> g_;
  std::vector<int> h_;
};

/// Exhaustive check that every member stays a member under any single
/// 0 -> 1 flip. Rejects ground sizes above kExhaustiveCap.
bool verify_monotone(const StructureExpr& expr);

/// Randomized up-closure spot check for structures too large to enumerate.
bool spot_check_monotone(const StructureExpr& expr, int samples,
                         std::uint64_t seed);

/// Exhaustive check that the product is invariant under `pair`.
bool verify_invariance(const StructureExpr& expr, const PermutationPair& pair);

/// Human-readable description, e.g. "KOutOfN{2,3}".
std::string describe(const StructureExpr& expr);

}  // namespace thresholdlab
