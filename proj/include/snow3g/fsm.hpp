#pragma once
#include <array>

#include "snow3g/field.hpp"
#include "snow3g/probe.hpp"

namespace snow3g {

// Byte boxes behind S1 (the AES S-box) and S2 (SNOW 3G's own box).
struct SboxTables
{
  std::array<byte_t, 256> sr;
  std::array<byte_t, 256> sq;
};

extern const SboxTables sbox_tables;

inline constexpr byte_t s1_reduction = 0x1B;
inline constexpr byte_t s2_reduction = 0x69;

namespace detail {

// Byte substitution followed by the MixColumn-style mixing shared by S1 and
// S2; only the box and the mixing polynomial differ.
inline word_t
sbox_word(const std::array<byte_t, 256>& box, const byte_t c, const word_t w) noexcept
{
  const byte_t b0 = box[(w >> 24) & 0xff];
  const byte_t b1 = box[(w >> 16) & 0xff];
  const byte_t b2 = box[(w >> 8) & 0xff];
  const byte_t b3 = box[w & 0xff];

  const byte_t r0 = mulx(b0, c) ^ b1 ^ b2 ^ mulx(b3, c) ^ b3;
  const byte_t r1 = mulx(b0, c) ^ b0 ^ mulx(b1, c) ^ b2 ^ b3;
  const byte_t r2 = b0 ^ mulx(b1, c) ^ b1 ^ mulx(b2, c) ^ b3;
  const byte_t r3 = b0 ^ b1 ^ mulx(b2, c) ^ b2 ^ mulx(b3, c);

  return (word_t{ r0 } << 24) | (word_t{ r1 } << 16) | (word_t{ r2 } << 8) | word_t{ r3 };
}

}

inline word_t
s1(const word_t w) noexcept
{
  return detail::sbox_word(sbox_tables.sr, s1_reduction, w);
}

inline word_t
s2(const word_t w) noexcept
{
  return detail::sbox_word(sbox_tables.sq, s2_reduction, w);
}

struct FsmState
{
  word_t r1 = 0;
  word_t r2 = 0;
  word_t r3 = 0;

  friend bool operator==(const FsmState&, const FsmState&) = default;
};

// Clocks the FSM once with LFSR taps s15 and s5 and returns the output word
// F = (s15 + R1) ^ R2. All new register values are computed from the
// pre-clock registers before any of them is written.
template<typename Probe = NullProbe>
inline word_t
clock_fsm(FsmState& state, const word_t s15, const word_t s5, Probe&& probe = Probe{}) noexcept
{
  PhaseScope scope{ probe, Phase::fsm_clock };

  const word_t f = (s15 + state.r1) ^ state.r2;
  const word_t r = state.r2 + (state.r3 ^ s5);

  word_t r3;
  {
    PhaseScope s2_scope{ probe, Phase::s2 };
    r3 = s2(state.r2);
  }
  word_t r2;
  {
    PhaseScope s1_scope{ probe, Phase::s1 };
    r2 = s1(state.r1);
  }

  state.r1 = r;
  state.r2 = r2;
  state.r3 = r3;
  return f;
}

}
