#pragma once
#include <array>
#include <cstddef>
#include <cstdint>

#include "snow3g/probe.hpp"

// GF(2^8) arithmetic over beta, root of x^8 + x^7 + x^5 + x^3 + 1, and the
// two GF(2^32) multiplications the LFSR feedback needs: by alpha and by
// alpha^-1. A GF(2^32) element is four GF(2^8) coefficients (c3, c2, c1, c0)
// packed into a word with c3 as the most significant byte.
namespace snow3g {

using byte_t = std::uint8_t;
using word_t = std::uint32_t;

// Reduction constant of x^8 + x^7 + x^5 + x^3 + 1 (the x^8 term dropped).
inline constexpr byte_t beta_reduction = 0xA9;

// Powers of beta concatenated (most significant byte first) by MULalpha and
// DIValpha respectively.
inline constexpr std::array<unsigned, 4> mul_alpha_exponents = { 23, 245, 48, 239 };
inline constexpr std::array<unsigned, 4> div_alpha_exponents = { 16, 39, 6, 64 };

// Multiply v by x modulo the polynomial whose low eight bits are c.
inline constexpr byte_t
mulx(const byte_t v, const byte_t c) noexcept
{
  const byte_t shifted = static_cast<byte_t>(v << 1);
  return (v & 0x80) ? static_cast<byte_t>(shifted ^ c) : shifted;
}

// mulx applied i times. Iterative; i == 0 is the identity.
inline constexpr byte_t
mulx_pow(byte_t v, unsigned i, const byte_t c) noexcept
{
  for (; i != 0; --i) {
    v = mulx(v, c);
  }
  return v;
}

namespace detail {

template<typename Probe>
inline byte_t
timed_mulx_pow(Probe& probe, const byte_t v, const unsigned i) noexcept
{
  PhaseScope scope{ probe, Phase::mulxpow };
  return mulx_pow(v, i, beta_reduction);
}

template<typename Probe>
inline word_t
concat_powers(Probe& probe, const byte_t c, const std::array<unsigned, 4>& exps) noexcept
{
  return (word_t{ timed_mulx_pow(probe, c, exps[0]) } << 24) |
         (word_t{ timed_mulx_pow(probe, c, exps[1]) } << 16) |
         (word_t{ timed_mulx_pow(probe, c, exps[2]) } << 8) |
         word_t{ timed_mulx_pow(probe, c, exps[3]) };
}

}

// c * (beta^23, beta^245, beta^48, beta^239): the contribution of the top
// coefficient c of a word to that word multiplied by alpha.
template<typename Probe = NullProbe>
inline word_t
mul_alpha_recursive(const byte_t c, Probe&& probe = Probe{}) noexcept
{
  return detail::concat_powers(probe, c, mul_alpha_exponents);
}

// c * (beta^16, beta^39, beta^6, beta^64): the contribution of the bottom
// coefficient c of a word to that word multiplied by alpha^-1.
template<typename Probe = NullProbe>
inline word_t
div_alpha_recursive(const byte_t c, Probe&& probe = Probe{}) noexcept
{
  return detail::concat_powers(probe, c, div_alpha_exponents);
}

// Precomputed MULalpha / DIValpha, 256 words each (2048 bytes in total).
struct MulTables
{
  std::array<word_t, 256> mul_alpha;
  std::array<word_t, 256> div_alpha;
};

static_assert(sizeof(MulTables) == 2048);

MulTables
build_tables() noexcept;

// Tables built once per process on first use.
const MulTables&
shared_tables() noexcept;

enum class MulKind : std::uint8_t
{
  recursive,
  table,
};

// Computes every product on demand with iterated mulx. The only strategy
// that reports mulxpow/mul_alpha/div_alpha phases to a probe.
class RecursiveMul
{
public:
  static constexpr MulKind kind = MulKind::recursive;

  template<typename Probe>
  word_t mul_alpha(const byte_t c, Probe& probe) const noexcept
  {
    PhaseScope scope{ probe, Phase::mul_alpha };
    return mul_alpha_recursive(c, probe);
  }

  template<typename Probe>
  word_t div_alpha(const byte_t c, Probe& probe) const noexcept
  {
    PhaseScope scope{ probe, Phase::div_alpha };
    return div_alpha_recursive(c, probe);
  }

  word_t mul_alpha(const byte_t c) const noexcept { return mul_alpha_recursive(c); }
  word_t div_alpha(const byte_t c) const noexcept { return div_alpha_recursive(c); }
};

// Single array lookup per product. Lookups are inlined into the caller and do
// not open a phase of their own, so their cost lands in the LFSR clock.
class TableMul
{
public:
  static constexpr MulKind kind = MulKind::table;

  TableMul() noexcept
    : tables_(shared_tables())
  {}

  explicit TableMul(const MulTables& tables) noexcept
    : tables_(tables)
  {}

  template<typename Probe>
  word_t mul_alpha(const byte_t c, Probe&) const noexcept
  {
    return tables_.mul_alpha[c];
  }

  template<typename Probe>
  word_t div_alpha(const byte_t c, Probe&) const noexcept
  {
    return tables_.div_alpha[c];
  }

  word_t mul_alpha(const byte_t c) const noexcept { return tables_.mul_alpha[c]; }
  word_t div_alpha(const byte_t c) const noexcept { return tables_.div_alpha[c]; }

  const MulTables& tables() const noexcept { return tables_; }

private:
  MulTables tables_;
};

}
