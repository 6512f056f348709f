#include "thresholdlab/expr_text.hpp"

#include <cctype>
#include <charconv>
#include <string>
#include <vector>

#include "thresholdlab/errors.hpp"

namespace thresholdlab {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  StructureExpr parse_all() {
    StructureExpr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) {
      fail(std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string_view word() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }

  std::int64_t integer() {
    skip_ws();
    std::int64_t v = 0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    if (first == last || !std::isdigit(static_cast<unsigned char>(*first))) {
      fail("expected a non-negative integer");
    }
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{}) fail("integer out of range");
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }

  std::string bitstring() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (text_[pos_] == '0' || text_[pos_] == '1')) {
      ++pos_;
    }
    if (pos_ == start) fail("expected a bitstring of 0/1");
    return std::string(text_.substr(start, pos_ - start));
  }

  // Structural errors from the constructors are reported at the start of
  // the offending term.
  template <class Build>
  StructureExpr build_at(std::size_t at, Build build) {
    try {
      return build();
    } catch (const ParseError&) {
      throw;
    } catch (const InputError& e) {
      throw ParseError(e.what(), at);
    }
  }

  StructureExpr expr() {
    skip_ws();
    const std::size_t at = pos_;
    const std::string_view name = word();
    if (name.empty()) fail("expected an expression");
    expect('(');
    if (name == "kofn") {
      const auto k = integer();
      expect(',');
      const auto n = integer();
      expect(')');
      return build_at(at, [&] { return StructureExpr::k_out_of_n(k, n); });
    }
    if (name == "series" || name == "parallel") {
      const auto n = integer();
      expect(')');
      return build_at(at, [&] {
        return name == "series" ? StructureExpr::series(n)
                                : StructureExpr::parallel(n);
      });
    }
    if (name == "consec") {
      const auto k = integer();
      expect(',');
      const auto n = integer();
      Topology topology = Topology::circular;
      if (accept(',')) {
        const std::size_t topo_at = pos_;
        const std::string_view t = word();
        if (t == "circular") {
          topology = Topology::circular;
        } else if (t == "linear") {
          topology = Topology::linear;
        } else {
          pos_ = topo_at;
          skip_ws();
          fail("expected 'circular' or 'linear'");
        }
      }
      expect(')');
      return build_at(at, [&] { return StructureExpr::consecutive(k, n, topology); });
    }
    if (name == "prod") {
      StructureExpr inner = expr();
      expect(',');
      StructureExpr outer = expr();
      expect(')');
      return build_at(at, [&] { return product(inner, outer); });
    }
    if (name == "explicit") {
      const auto n = integer();
      if (n < 1 || n > kExhaustiveCap) {
        fail("explicit sets need 1 <= n <= " + std::to_string(kExhaustiveCap));
      }
      expect(';');
      std::vector<Configuration> members;
      do {
        const std::size_t bits_at = (skip_ws(), pos_);
        std::string bits = bitstring();
        if (static_cast<std::int64_t>(bits.size()) != n) {
          pos_ = bits_at;
          fail("bitstring length " + std::to_string(bits.size()) +
               " does not match n=" + std::to_string(n));
        }
        members.push_back(Configuration::from_bitstring(bits));
      } while (accept(','));
      expect(')');
      return build_at(at, [&] {
        return StructureExpr::explicit_set(static_cast<int>(n), members);
      });
    }
    pos_ = at;
    fail("unknown constructor '" + std::string(name) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void format_into(const StructureExpr& expr, std::string& out) {
  const auto& v = expr.node().v;
  if (const auto* a = std::get_if<KOutOfN>(&v)) {
    out += "kofn(" + std::to_string(a->k) + "," + std::to_string(a->n) + ")";
  } else if (const auto* c = std::get_if<Consecutive>(&v)) {
    out += "consec(" + std::to_string(c->k) + "," + std::to_string(c->n) + "," +
           (c->topology == Topology::circular ? "circular" : "linear") + ")";
  } else if (const auto* p = std::get_if<Product>(&v)) {
    out += "prod(";
    format_into(p->inner, out);
    out += ",";
    format_into(p->outer, out);
    out += ")";
  } else {
    const auto& e = std::get<Explicit>(v);
    out += "explicit(" + std::to_string(e.n) + ";";
    bool first = true;
    const std::uint64_t count = std::uint64_t{1} << e.n;
    for (std::uint64_t x = 0; x < count; ++x) {
      if (!e.contains_mask(x)) continue;
      if (!first) out += ",";
      first = false;
      out += Configuration::from_mask(x, e.n).to_bitstring();
    }
    out += ")";
  }
}

}  // namespace

StructureExpr parse_expr(std::string_view text) { return Parser(text).parse_all(); }

std::string format_expr(const StructureExpr& expr) {
  std::string out;
  format_into(expr, out);
  return out;
}

}  // namespace thresholdlab
