/*
 * Fixed-width bit-vector types and constant arithmetic.
 *
 * All arithmetic wraps (two's complement / modular). Widths up to 128 bits
 * are supported so that template expressions promoted beyond 64 bits
 * (e.g. 33-bit negations, 66-bit octagon sums) evaluate exactly.
 */
#pragma once

#include <cassert>
#include <cstdint>
#include <string>
#include <stdexcept>

namespace kiwi {

using uint128 = unsigned __int128;
using int128 = __int128;

enum class Signedness { Unsigned, Signed };

struct BvType {
  Signedness sign = Signedness::Unsigned;
  unsigned width = 32;

  bool operator==(const BvType&) const = default;

  bool is_bool() const { return width == 1 && sign == Signedness::Unsigned; }
  bool is_signed() const { return sign == Signedness::Signed; }

  static BvType boolean() { return {Signedness::Unsigned, 1}; }
  static BvType u(unsigned w) { return {Signedness::Unsigned, w}; }
  static BvType s(unsigned w) { return {Signedness::Signed, w}; }

  std::string str() const {
    if (is_bool()) return "bool";
    return (is_signed() ? "i" : "u") + std::to_string(width);
  }
};

inline uint128 mask_of(unsigned width) {
  assert(width >= 1 && width <= 128);
  if (width == 128) return ~(uint128)0;
  return (((uint128)1) << width) - 1;
}

/// A bit-vector constant: `width` low bits of `bits` are significant.
class BvConst {
public:
  BvConst() = default;
  BvConst(const BvType& t, uint128 raw) : type_(t), bits_(raw & mask_of(t.width)) {}

  static BvConst from_int(const BvType& t, int128 v) {
    return BvConst(t, (uint128)v);
  }
  static BvConst bool_val(bool b) { return BvConst(BvType::boolean(), b ? 1 : 0); }

  const BvType& type() const { return type_; }
  uint128 bits() const { return bits_; }
  bool is_true() const { return bits_ != 0; }
  bool is_zero() const { return bits_ == 0; }

  /// Value as a mathematical integer (sign-extended when the type is signed).
  int128 as_int() const {
    if (type_.is_signed() && sign_bit()) {
      return (int128)(bits_ | ~mask_of(type_.width));
    }
    return (int128)bits_;
  }

  bool sign_bit() const { return (bits_ >> (type_.width - 1)) & 1; }

  bool operator==(const BvConst& o) const {
    return type_ == o.type_ && bits_ == o.bits_;
  }

  std::string str() const;

private:
  BvType type_;
  uint128 bits_ = 0;
};

inline std::string int128_to_string(int128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  uint128 u = neg ? (uint128)0 - (uint128)v : (uint128)v;
  std::string s;
  while (u) {
    s.push_back(char('0' + (unsigned)(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  return std::string(s.rbegin(), s.rend());
}

inline std::string uint128_to_string(uint128 u) {
  if (u == 0) return "0";
  std::string s;
  while (u) {
    s.push_back(char('0' + (unsigned)(u % 10)));
    u /= 10;
  }
  return std::string(s.rbegin(), s.rend());
}

inline std::string BvConst::str() const {
  if (type_.is_bool()) return bits_ ? "TRUE" : "FALSE";
  if (type_.is_signed()) return int128_to_string(as_int());
  return uint128_to_string(bits_) + "u";
}

// ---- wrapping arithmetic on constants ---------------------------------------

inline BvConst bv_add(const BvConst& a, const BvConst& b) {
  assert(a.type() == b.type());
  return BvConst(a.type(), a.bits() + b.bits());
}
inline BvConst bv_sub(const BvConst& a, const BvConst& b) {
  assert(a.type() == b.type());
  return BvConst(a.type(), a.bits() - b.bits());
}
inline BvConst bv_neg(const BvConst& a) {
  return BvConst(a.type(), (uint128)0 - a.bits());
}
inline BvConst bv_mul(const BvConst& a, const BvConst& b) {
  assert(a.type() == b.type());
  return BvConst(a.type(), a.bits() * b.bits());
}

/// Division is total: x/0 = all-ones, x%0 = x. Signed division truncates
/// toward zero; INT_MIN / -1 wraps to INT_MIN.
inline BvConst bv_div(const BvConst& a, const BvConst& b) {
  assert(a.type() == b.type());
  if (b.is_zero()) return BvConst(a.type(), ~(uint128)0);
  if (a.type().is_signed()) {
    int128 x = a.as_int(), y = b.as_int();
    if (y == -1) return bv_neg(a);
    return BvConst::from_int(a.type(), x / y);
  }
  return BvConst(a.type(), a.bits() / b.bits());
}
inline BvConst bv_mod(const BvConst& a, const BvConst& b) {
  assert(a.type() == b.type());
  if (b.is_zero()) return a;
  if (a.type().is_signed()) {
    int128 x = a.as_int(), y = b.as_int();
    if (y == -1) return BvConst::from_int(a.type(), 0);
    return BvConst::from_int(a.type(), x % y);
  }
  return BvConst(a.type(), a.bits() % b.bits());
}

inline BvConst bv_and(const BvConst& a, const BvConst& b) {
  assert(a.type() == b.type());
  return BvConst(a.type(), a.bits() & b.bits());
}
inline BvConst bv_or(const BvConst& a, const BvConst& b) {
  assert(a.type() == b.type());
  return BvConst(a.type(), a.bits() | b.bits());
}
inline BvConst bv_xor(const BvConst& a, const BvConst& b) {
  assert(a.type() == b.type());
  return BvConst(a.type(), a.bits() ^ b.bits());
}
inline BvConst bv_not(const BvConst& a) {
  return BvConst(a.type(), ~a.bits());
}

/// Shift amounts >= width yield 0 (or all-sign-bits for ashr).
inline BvConst bv_shl(const BvConst& a, const BvConst& b) {
  uint128 sh = b.bits();
  if (sh >= a.type().width) return BvConst(a.type(), 0);
  return BvConst(a.type(), a.bits() << (unsigned)sh);
}
inline BvConst bv_lshr(const BvConst& a, const BvConst& b) {
  uint128 sh = b.bits();
  if (sh >= a.type().width) return BvConst(a.type(), 0);
  return BvConst(a.type(), a.bits() >> (unsigned)sh);
}
inline BvConst bv_ashr(const BvConst& a, const BvConst& b) {
  uint128 sh = b.bits();
  bool s = a.sign_bit();
  if (sh >= a.type().width) return BvConst(a.type(), s ? ~(uint128)0 : 0);
  uint128 r = a.bits() >> (unsigned)sh;
  if (s) r |= ~(mask_of(a.type().width) >> (unsigned)sh) ;
  return BvConst(a.type(), r);
}

inline bool bv_ult(const BvConst& a, const BvConst& b) { return a.bits() < b.bits(); }

/// Interprets both bit patterns as signed, independent of the declared type.
inline bool bv_slt(const BvConst& a, const BvConst& b) {
  auto as_signed = [](const BvConst& c) -> int128 {
    if (c.sign_bit()) return (int128)(c.bits() | ~mask_of(c.type().width));
    return (int128)c.bits();
  };
  return as_signed(a) < as_signed(b);
}

inline BvConst bv_zero_extend(const BvConst& a, const BvType& to) {
  assert(to.width > a.type().width);
  return BvConst(to, a.bits());
}
inline BvConst bv_sign_extend(const BvConst& a, const BvType& to) {
  assert(to.width > a.type().width);
  uint128 r = a.bits();
  if (a.sign_bit()) r |= mask_of(to.width) & ~mask_of(a.type().width);
  return BvConst(to, r);
}
inline BvConst bv_extract(const BvConst& a, const BvType& to) {
  assert(to.width <= a.type().width);
  return BvConst(to, a.bits());
}

/// Largest representable value of `t`, as a mathematical integer.
inline int128 type_max(const BvType& t) {
  if (t.is_signed()) return (int128)(mask_of(t.width) >> 1);
  return (int128)mask_of(t.width);
}
/// Smallest representable value of `t`.
inline int128 type_min(const BvType& t) {
  if (t.is_signed()) return -(int128)(mask_of(t.width) >> 1) - 1;
  return 0;
}

}  // namespace kiwi
