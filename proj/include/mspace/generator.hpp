#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>

#include "mspace/rational.hpp"

namespace mspace {

// Raised when machines or points from different presentations are mixed.
struct IncompatibleSpaceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Digit generator for the digit presentation of the binary-stream space:
// polarity Zero is the open "digit `index` is 0", polarity One the open
// "digit `index` is 1".
struct DigitGen {
  std::uint64_t index = 0;
  bool one = false;  // false: zero-polarity, true: one-polarity

  friend auto operator<=>(const DigitGen&, const DigitGen&) = default;
};

// Prefix generator: streams beginning with `word` (a finite binary string,
// possibly empty; the empty word denotes the whole space).
struct PrefixGen {
  std::string word;  // characters '0'/'1'

  friend auto operator<=>(const PrefixGen&, const PrefixGen&) = default;
};

// Rational open interval on the unit interval, 0 <= lo < hi <= 1.
// Endpoint semantics follow the subspace trace: lo == 0 includes the point 0,
// hi == 1 includes the point 1.
struct IntervalGen {
  Rational lo;
  Rational hi;

  friend bool operator==(const IntervalGen& a, const IntervalGen& b) {
    return a.lo == b.lo && a.hi == b.hi;
  }
  friend std::strong_ordering operator<=>(const IntervalGen& a, const IntervalGen& b) {
    if (a.lo != b.lo) return a.lo < b.lo ? std::strong_ordering::less : std::strong_ordering::greater;
    if (a.hi != b.hi) return a.hi < b.hi ? std::strong_ordering::less : std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
};

// Generator of a user-supplied presentation; `tag` identifies the owning
// presentation, `index` its position in that presentation's enumeration.
struct OpaqueGen {
  std::uint64_t index = 0;
  std::string tag;

  friend auto operator<=>(const OpaqueGen&, const OpaqueGen&) = default;
};

// A subbasic open of some presented space. The payload kind doubles as the
// space tag for the built-in presentations.
class GeneratorId {
 public:
  using Payload = std::variant<DigitGen, PrefixGen, IntervalGen, OpaqueGen>;

  static GeneratorId digit(std::uint64_t index, bool one) {
    return GeneratorId(DigitGen{index, one});
  }
  static GeneratorId prefix(std::string word) {
    for (char c : word)
      if (c != '0' && c != '1') throw std::invalid_argument("prefix generator: word must be binary");
    return GeneratorId(PrefixGen{std::move(word)});
  }
  static GeneratorId interval(Rational lo, Rational hi) {
    if (!(Rational(0) <= lo && lo < hi && hi <= Rational(1)))
      throw std::invalid_argument("interval generator: need 0 <= lo < hi <= 1");
    return GeneratorId(IntervalGen{std::move(lo), std::move(hi)});
  }
  static GeneratorId opaque(std::uint64_t index, std::string tag = "opaque") {
    return GeneratorId(OpaqueGen{index, std::move(tag)});
  }

  const Payload& payload() const { return payload_; }

  bool is_digit() const { return std::holds_alternative<DigitGen>(payload_); }
  bool is_prefix() const { return std::holds_alternative<PrefixGen>(payload_); }
  bool is_interval() const { return std::holds_alternative<IntervalGen>(payload_); }
  bool is_opaque() const { return std::holds_alternative<OpaqueGen>(payload_); }

  const DigitGen& as_digit() const { return std::get<DigitGen>(payload_); }
  const PrefixGen& as_prefix() const { return std::get<PrefixGen>(payload_); }
  const IntervalGen& as_interval() const { return std::get<IntervalGen>(payload_); }
  const OpaqueGen& as_opaque() const { return std::get<OpaqueGen>(payload_); }

  // Identifier of the owning presentation.
  std::string space_tag() const {
    switch (payload_.index()) {
      case 0: return "cantor-digits";
      case 1: return "cantor-prefix";
      case 2: return "interval";
      default: return as_opaque().tag;
    }
  }

  std::string to_string() const {
    switch (payload_.index()) {
      case 0: {
        const auto& d = as_digit();
        return (d.one ? "u" : "z") + std::to_string(d.index);
      }
      case 1:
        return "l\"" + as_prefix().word + "\"";
      case 2: {
        const auto& iv = as_interval();
        return "i(" + mspace::to_string(iv.lo) + "," + mspace::to_string(iv.hi) + ")";
      }
      default: {
        const auto& o = as_opaque();
        return "<" + o.tag + ":" + std::to_string(o.index) + ">";
      }
    }
  }

  friend bool operator==(const GeneratorId& a, const GeneratorId& b) {
    return a.payload_ == b.payload_;
  }

  // Canonical order: digit generators by (index, zero < one), prefix
  // generators length-lexicographically, intervals by (lo, hi), opaque by
  // (tag, index). Payload kinds never mix inside one machine, but the order
  // is total so generators can live in ordered containers.
  friend std::strong_ordering operator<=>(const GeneratorId& a, const GeneratorId& b) {
    if (a.payload_.index() != b.payload_.index())
      return a.payload_.index() <=> b.payload_.index();
    switch (a.payload_.index()) {
      case 0: {
        const auto &x = a.as_digit(), &y = b.as_digit();
        if (x.index != y.index) return x.index <=> y.index;
        return static_cast<int>(x.one) <=> static_cast<int>(y.one);
      }
      case 1: {
        const auto &x = a.as_prefix().word, &y = b.as_prefix().word;
        if (x.size() != y.size()) return x.size() <=> y.size();
        return x.compare(y) <=> 0;
      }
      case 2:
        return a.as_interval() <=> b.as_interval();
      default: {
        const auto &x = a.as_opaque(), &y = b.as_opaque();
        if (int c = x.tag.compare(y.tag); c != 0) return c <=> 0;
        return x.index <=> y.index;
      }
    }
  }

 private:
  explicit GeneratorId(Payload p) : payload_(std::move(p)) {}
  Payload payload_;
};

}  // namespace mspace
