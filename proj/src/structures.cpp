#include "thresholdlab/structures.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "thresholdlab/errors.hpp"
#include "thresholdlab/kernels.hpp"

namespace thresholdlab {

namespace {

constexpr std::int64_t kMaxGroundSize = std::int64_t{1} << 40;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool consecutive_member(const Consecutive& c,
                        std::span<const std::uint8_t> bits) {
  const std::int64_t n = c.n;
  std::int64_t run = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    run = bits[i] ? run + 1 : 0;
    if (run >= c.k) return true;
  }
  if (c.topology == Topology::linear || run == n) return false;
  // Trailing run wraps onto the leading run.
  std::int64_t lead = 0;
  while (lead < n && bits[lead]) ++lead;
  return run + lead >= c.k;
}

bool member_impl(const StructureExpr& expr, std::span<const std::uint8_t> bits);

bool product_member(const Product& prod, std::span<const std::uint8_t> bits) {
  const std::int64_t r = prod.inner.ground_size();
  const std::int64_t m = prod.outer.ground_size();
  std::vector<std::uint8_t> indicator(static_cast<std::size_t>(m));
  for (std::int64_t j = 0; j < m; ++j) {
    indicator[j] = member_impl(prod.inner, bits.subspan(j * r, r)) ? 1 : 0;
  }
  return member_impl(prod.outer, indicator);
}

bool member_impl(const StructureExpr& expr,
                 std::span<const std::uint8_t> bits) {
  return std::visit(
      Overloaded{
          [&](const KOutOfN& a) {
            std::int64_t failed = 0;
            for (auto b : bits) failed += b;
            return failed >= a.k;
          },
          [&](const Consecutive& c) { return consecutive_member(c, bits); },
          [&](const Product& p) { return product_member(p, bits); },
          [&](const Explicit& e) {
            std::uint64_t mask = 0;
            for (int i = 0; i < e.n; ++i) {
              mask |= std::uint64_t{bits[i]} << i;
            }
            return e.contains_mask(mask);
          },
      },
      expr.node().v);
}

std::uint64_t low_bits(std::int64_t n) {
  return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

bool consecutive_member_mask(const Consecutive& c, std::uint64_t mask) {
  const auto n = static_cast<int>(c.n);
  mask &= low_bits(n);
  // Runs of length >= k: AND of k shifted copies.
  std::uint64_t runs = mask;
  for (std::int64_t s = 1; s < c.k && runs; ++s) runs &= mask >> s;
  if (runs) return true;
  if (c.topology == Topology::linear) return false;
  if (mask == low_bits(n)) return true;
  int lead = std::countr_one(mask);
  int trail = std::countl_one(mask << (64 - n));
  return lead + trail >= c.k;
}

void check_bits(std::span<const std::uint8_t> bits) {
  for (auto b : bits) {
    if (b > 1) throw InputError("configuration entries must be 0 or 1");
  }
}

}  // namespace

Configuration::Configuration(std::vector<std::uint8_t> bits)
    : bits_(std::move(bits)) {
  check_bits(bits_);
}

Configuration Configuration::from_bitstring(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char ch : text) {
    if (ch != '0' && ch != '1') {
      throw InputError("bitstring may only contain '0' and '1'");
    }
    bits.push_back(ch == '1' ? 1 : 0);
  }
  return Configuration(std::move(bits));
}

Configuration Configuration::from_mask(std::uint64_t mask, int n) {
  if (n < 0 || n > 64) throw InputError("mask width must be in [0, 64]");
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) bits[i] = (mask >> i) & 1U;
  return Configuration(std::move(bits));
}

std::string Configuration::to_bitstring() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

std::uint64_t Configuration::to_mask() const {
  if (bits_.size() > 64) throw InputError("configuration wider than 64 bits");
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    mask |= std::uint64_t{bits_[i]} << i;
  }
  return mask;
}

StructureExpr StructureExpr::k_out_of_n(std::int64_t k, std::int64_t n) {
  if (n < 1 || n > kMaxGroundSize) {
    throw InputError("kofn: n must be a positive size, got " +
                     std::to_string(n));
  }
  if (k < 1 || k > n) {
    throw InputError("kofn: need 1 <= k <= n, got k=" + std::to_string(k) +
                     ", n=" + std::to_string(n));
  }
  return StructureExpr(std::make_shared<const ExprNode>(ExprNode{KOutOfN{k, n}}),
                       n);
}

StructureExpr StructureExpr::consecutive(std::int64_t k, std::int64_t n,
                                         Topology topology) {
  if (n < 1 || n > kMaxGroundSize) {
    throw InputError("consec: n must be a positive size, got " +
                     std::to_string(n));
  }
  if (k < 1 || k > n) {
    throw InputError("consec: need 1 <= k <= n, got k=" + std::to_string(k) +
                     ", n=" + std::to_string(n));
  }
  return StructureExpr(
      std::make_shared<const ExprNode>(ExprNode{Consecutive{k, n, topology}}),
      n);
}

StructureExpr StructureExpr::explicit_bitmap(int n, std::vector<bool> members) {
  if (n < 1 || n > kExhaustiveCap) {
    throw InputError("explicit: n must be in [1, " +
                     std::to_string(kExhaustiveCap) + "], got " +
                     std::to_string(n));
  }
  const std::uint64_t count = std::uint64_t{1} << n;
  if (members.size() != count) {
    throw InputError("explicit: bitmap must have 2^n entries");
  }
  if (std::none_of(members.begin(), members.end(), [](bool b) { return b; })) {
    throw InputError("explicit: empty set is trivial");
  }
  if (members[0]) throw InputError("explicit: full set is trivial");
  for (std::uint64_t x = 0; x < count; ++x) {
    if (!members[x]) continue;
    for (int i = 0; i < n; ++i) {
      std::uint64_t y = x | (std::uint64_t{1} << i);
      if (!members[y]) {
        throw InputError("explicit: set is not up-closed: " +
                         Configuration::from_mask(x, n).to_bitstring() +
                         " is a member but " +
                         Configuration::from_mask(y, n).to_bitstring() +
                         " is not");
      }
    }
  }
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n) + 1, 0);
  for (std::uint64_t x = 0; x < count; ++x) {
    if (members[x]) ++counts[std::popcount(x)];
  }
  auto shared = std::make_shared<const std::vector<bool>>(std::move(members));
  auto shared_counts =
      std::make_shared<const std::vector<std::uint64_t>>(std::move(counts));
  return StructureExpr(
      std::make_shared<const ExprNode>(ExprNode{
          Explicit{n, std::move(shared), std::move(shared_counts)}}),
      n);
}

StructureExpr StructureExpr::explicit_set(
    int n, const std::vector<Configuration>& members) {
  if (n < 1 || n > kExhaustiveCap) {
    throw InputError("explicit: n must be in [1, " +
                     std::to_string(kExhaustiveCap) + "], got " +
                     std::to_string(n));
  }
  std::vector<bool> bitmap(std::size_t{1} << n, false);
  for (const auto& cfg : members) {
    if (cfg.size() != static_cast<std::size_t>(n)) {
      throw InputError("explicit: member " + cfg.to_bitstring() +
                       " does not have length " + std::to_string(n));
    }
    bitmap[cfg.to_mask()] = true;
  }
  return explicit_bitmap(n, std::move(bitmap));
}

StructureExpr product(const StructureExpr& inner, const StructureExpr& outer) {
  const std::int64_t r = inner.ground_size();
  const std::int64_t m = outer.ground_size();
  if (r > kMaxGroundSize / m) {
    throw InputError("prod: ground size overflow");
  }
  return StructureExpr(
      std::make_shared<const ExprNode>(ExprNode{Product{inner, outer}}), r * m);
}

StructureExpr parallel_series(std::int64_t k) {
  if (k < 2) throw InputError("parallel-series B_k requires k >= 2");
  const double lg = std::log2(static_cast<double>(k));
  const auto m = static_cast<std::int64_t>(std::floor(lg));
  const auto r = static_cast<std::int64_t>(std::floor(k / lg));
  if (m < 1 || r < 1) throw InputError("parallel-series B_k is degenerate");
  return product(StructureExpr::parallel(m), StructureExpr::series(r));
}

StructureExpr majority(std::int64_t n) {
  if (n < 2) throw InputError("majority requires n >= 2");
  return StructureExpr::k_out_of_n(n / 2, n);
}

bool membership(const StructureExpr& expr, std::span<const std::uint8_t> bits) {
  if (static_cast<std::int64_t>(bits.size()) != expr.ground_size()) {
    throw InputError("configuration has length " + std::to_string(bits.size()) +
                     " but the structure has ground size " +
                     std::to_string(expr.ground_size()));
  }
  return member_impl(expr, bits);
}

bool membership(const StructureExpr& expr, const Configuration& cfg) {
  return membership(expr, cfg.bits());
}

bool membership_mask(const StructureExpr& expr, std::uint64_t mask) {
  return std::visit(
      Overloaded{
          [&](const KOutOfN& a) {
            return std::popcount(mask & low_bits(a.n)) >= a.k;
          },
          [&](const Consecutive& c) { return consecutive_member_mask(c, mask); },
          [&](const Product& p) {
            const std::int64_t r = p.inner.ground_size();
            const std::int64_t m = p.outer.ground_size();
            const std::uint64_t block = low_bits(r);
            std::uint64_t indicator = 0;
            for (std::int64_t j = 0; j < m; ++j) {
              if (membership_mask(p.inner, (mask >> (j * r)) & block)) {
                indicator |= std::uint64_t{1} << j;
              }
            }
            return membership_mask(p.outer, indicator);
          },
          [&](const Explicit& e) {
            return e.contains_mask(mask & low_bits(e.n));
          },
      },
      expr.node().v);
}

PermutationPair::PermutationPair(std::vector<int> g, std::vector<int> h)
    : g_(std::move(g)), h_(std::move(h)) {
  auto check = [](const std::vector<int>& perm, const char* name) {
    std::vector<bool> seen(perm.size(), false);
    for (int v : perm) {
      if (v < 0 || static_cast<std::size_t>(v) >= perm.size() || seen[v]) {
        throw InputError(std::string(name) + " is not a permutation");
      }
      seen[v] = true;
    }
  };
  check(g_, "g");
  check(h_, "h");
}

PermutationPair PermutationPair::identity(int r, int m) {
  std::vector<int> g(r), h(m);
  for (int i = 0; i < r; ++i) g[i] = i;
  for (int j = 0; j < m; ++j) h[j] = j;
  return PermutationPair(std::move(g), std::move(h));
}

Configuration PermutationPair::apply(const Configuration& cfg) const {
  const std::size_t r = g_.size();
  const std::size_t m = h_.size();
  if (cfg.size() != r * m) {
    throw InputError("permutation pair does not match configuration size");
  }
  std::vector<std::uint8_t> out(cfg.size());
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < r; ++i) {
      out[j * r + i] = cfg[static_cast<std::size_t>(h_[j]) * r + g_[i]];
    }
  }
  return Configuration(std::move(out));
}

bool verify_monotone(const StructureExpr& expr) {
  const std::int64_t n = expr.ground_size();
  if (n > kExhaustiveCap) {
    throw InputError("verify_monotone: ground size " + std::to_string(n) +
                     " exceeds the exhaustive cap " +
                     std::to_string(kExhaustiveCap) +
                     "; use a sampled spot check instead");
  }
  const auto members = kernels::enumerate_members_parallel(expr);
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t x = 0; x < count; ++x) {
    if (!members[x]) continue;
    for (std::int64_t i = 0; i < n; ++i) {
      if (!members[x | (std::uint64_t{1} << i)]) return false;
    }
  }
  return true;
}

bool spot_check_monotone(const StructureExpr& expr, int samples,
                         std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(expr.ground_size());
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> coord(0, n - 1);
  std::vector<std::uint8_t> bits(n);
  for (int s = 0; s < samples; ++s) {
    // Sweep the density so both sides of the threshold get probed.
    const double p = unit(gen);
    for (auto& b : bits) b = unit(gen) < p ? 1 : 0;
    if (!member_impl(expr, bits)) continue;
    const std::size_t i = coord(gen);
    if (bits[i]) continue;
    bits[i] = 1;
    if (!member_impl(expr, bits)) return false;
  }
  return true;
}

bool verify_invariance(const StructureExpr& expr, const PermutationPair& pair) {
  const auto* prod = std::get_if<Product>(&expr.node().v);
  if (prod == nullptr) throw InputError("verify_invariance needs a product");
  const std::int64_t n = expr.ground_size();
  if (n > kExhaustiveCap) {
    throw InputError("verify_invariance: ground size " + std::to_string(n) +
                     " exceeds the exhaustive cap " +
                     std::to_string(kExhaustiveCap));
  }
  if (static_cast<std::int64_t>(pair.g().size()) !=
          prod->inner.ground_size() ||
      static_cast<std::int64_t>(pair.h().size()) != prod->outer.ground_size()) {
    throw InputError("permutation pair does not match the product's grid");
  }
  const auto members = kernels::enumerate_members_parallel(expr);
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t x = 0; x < count; ++x) {
    if (!members[x]) continue;
    auto moved = pair.apply(Configuration::from_mask(x, static_cast<int>(n)));
    if (!members[moved.to_mask()]) return false;
  }
  return true;
}

std::string describe(const StructureExpr& expr) {
  return std::visit(
      Overloaded{
          [](const KOutOfN& a) {
            return "KOutOfN{" + std::to_string(a.k) + "," +
                   std::to_string(a.n) + "}";
          },
          [](const Consecutive& c) {
            return "Consecutive{" + std::to_string(c.k) + "," +
                   std::to_string(c.n) + "," +
                   (c.topology == Topology::circular ? "circular" : "linear") +
                   "}";
          },
          [](const Product& p) {
            return "Product{" + describe(p.inner) + "," + describe(p.outer) +
                   "}";
          },
          [](const Explicit& e) {
            std::size_t count = std::count(e.members->begin(),
                                           e.members->end(), true);
            return "Explicit{n=" + std::to_string(e.n) + ",members=" +
                   std::to_string(count) + "}";
          },
      },
      expr.node().v);
}

}  // namespace thresholdlab
