#pragma once
#include <array>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>

#include "snow3g/field.hpp"

// The 16-stage LFSR in four storage layouts. All of them expose the same
// conceptual register s0..s15: shift_in(v) drops s0, moves every stage one
// position down and writes v into s15. They differ only in how much data
// moves per clock.
namespace snow3g {

inline constexpr std::size_t lfsr_length = 16;

using Stages = std::array<word_t, lfsr_length>;

enum class LfsrKind : std::uint8_t
{
  hardcode,
  traditional,
  circular,
  sliding,
};

inline constexpr std::array<LfsrKind, 4> all_lfsr_kinds = {
  LfsrKind::hardcode, LfsrKind::traditional, LfsrKind::circular, LfsrKind::sliding
};

constexpr std::string_view
to_string(const LfsrKind k) noexcept
{
  switch (k) {
    case LfsrKind::hardcode:
      return "hardcode";
    case LfsrKind::traditional:
      return "traditional";
    case LfsrKind::circular:
      return "circular";
    case LfsrKind::sliding:
      return "sliding";
  }
  return "?";
}

std::optional<LfsrKind>
parse_lfsr_kind(std::string_view name) noexcept;

namespace detail {

inline void
check_load_size(const std::span<const word_t> stages)
{
  if (stages.size() != lfsr_length) {
    throw std::invalid_argument("LFSR load needs exactly 16 words");
  }
}

inline void
check_stage_index(const std::size_t i)
{
  if (i >= lfsr_length) {
    throw std::out_of_range("LFSR stage index must be in [0, 16)");
  }
}

}

template<typename T>
concept LfsrStrategy = std::default_initializable<T> &&
                       requires(T& lfsr, const T& clfsr, std::span<const word_t> in, word_t v) {
                         { T::kind } -> std::convertible_to<LfsrKind>;
                         lfsr.load(in);
                         lfsr.shift_in(v);
                         { clfsr.stage(std::size_t{}) } -> std::same_as<word_t>;
                         { clfsr.template at<0>() } -> std::same_as<word_t>;
                         { clfsr.stages() } -> std::same_as<Stages>;
                       };

// Sixteen named slots shifted by straight-line assignments, no loop.
class HardcodeLfsr
{
public:
  static constexpr LfsrKind kind = LfsrKind::hardcode;

  void load(const std::span<const word_t> in)
  {
    detail::check_load_size(in);
    for (std::size_t i = 0; i < lfsr_length; ++i) {
      this->*slots[i] = in[i];
    }
  }

  word_t stage(const std::size_t i) const
  {
    detail::check_stage_index(i);
    return this->*slots[i];
  }

  template<std::size_t I>
    requires(I < lfsr_length)
  word_t at() const noexcept
  {
    return this->*slots[I];
  }

  void shift_in(const word_t v) noexcept
  {
    s0 = s1;
    s1 = s2;
    s2 = s3;
    s3 = s4;
    s4 = s5;
    s5 = s6;
    s6 = s7;
    s7 = s8;
    s8 = s9;
    s9 = s10;
    s10 = s11;
    s11 = s12;
    s12 = s13;
    s13 = s14;
    s14 = s15;
    s15 = v;
  }

  Stages stages() const noexcept
  {
    Stages out{};
    for (std::size_t i = 0; i < lfsr_length; ++i) {
      out[i] = this->*slots[i];
    }
    return out;
  }

private:
  word_t s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, s5 = 0, s6 = 0, s7 = 0;
  word_t s8 = 0, s9 = 0, s10 = 0, s11 = 0, s12 = 0, s13 = 0, s14 = 0, s15 = 0;

  static constexpr std::array<word_t HardcodeLfsr::*, lfsr_length> slots = {
    &HardcodeLfsr::s0,  &HardcodeLfsr::s1,  &HardcodeLfsr::s2,  &HardcodeLfsr::s3,
    &HardcodeLfsr::s4,  &HardcodeLfsr::s5,  &HardcodeLfsr::s6,  &HardcodeLfsr::s7,
    &HardcodeLfsr::s8,  &HardcodeLfsr::s9,  &HardcodeLfsr::s10, &HardcodeLfsr::s11,
    &HardcodeLfsr::s12, &HardcodeLfsr::s13, &HardcodeLfsr::s14, &HardcodeLfsr::s15,
  };
};

// Flat array; every clock moves 15 words down by one.
class TraditionalLfsr
{
public:
  static constexpr LfsrKind kind = LfsrKind::traditional;

  void load(const std::span<const word_t> in)
  {
    detail::check_load_size(in);
    for (std::size_t i = 0; i < lfsr_length; ++i) {
      s_[i] = in[i];
    }
  }

  word_t stage(const std::size_t i) const
  {
    detail::check_stage_index(i);
    return s_[i];
  }

  template<std::size_t I>
    requires(I < lfsr_length)
  word_t at() const noexcept
  {
    return s_[I];
  }

  void shift_in(const word_t v) noexcept
  {
    for (std::size_t i = 0; i < lfsr_length - 1; ++i) {
      s_[i] = s_[i + 1];
    }
    s_[lfsr_length - 1] = v;
  }

  Stages stages() const noexcept { return s_; }

private:
  Stages s_{};
};

// Content stays put; a head index marks s0 and wraps with a mask. The new
// word goes into the slot the outgoing s0 occupied.
class CircularLfsr
{
public:
  static constexpr LfsrKind kind = LfsrKind::circular;

  void load(const std::span<const word_t> in)
  {
    detail::check_load_size(in);
    for (std::size_t i = 0; i < lfsr_length; ++i) {
      s_[i] = in[i];
    }
    head_ = 0;
  }

  word_t stage(const std::size_t i) const
  {
    detail::check_stage_index(i);
    return s_[(head_ + i) & mask];
  }

  template<std::size_t I>
    requires(I < lfsr_length)
  word_t at() const noexcept
  {
    return s_[(head_ + I) & mask];
  }

  void shift_in(const word_t v) noexcept
  {
    s_[head_] = v;
    head_ = (head_ + 1) & mask;
  }

  Stages stages() const noexcept
  {
    Stages out{};
    for (std::size_t i = 0; i < lfsr_length; ++i) {
      out[i] = s_[(head_ + i) & mask];
    }
    return out;
  }

  std::size_t head() const noexcept { return head_; }

private:
  static constexpr std::size_t mask = lfsr_length - 1;

  Stages s_{};
  std::size_t head_ = 0;
};

// Double-length buffer whose halves mirror each other, so the 16-word window
// starting at origin p is always contiguous and reads need no wraparound.
// Each clock advances p and writes the new word to both copies of its slot.
class SlidingLfsr
{
public:
  static constexpr LfsrKind kind = LfsrKind::sliding;

  void load(const std::span<const word_t> in)
  {
    detail::check_load_size(in);
    for (std::size_t i = 0; i < lfsr_length; ++i) {
      s_[i] = in[i];
      s_[i + lfsr_length] = in[i];
    }
    origin_ = 0;
  }

  word_t stage(const std::size_t i) const
  {
    detail::check_stage_index(i);
    return s_[origin_ + i];
  }

  template<std::size_t I>
    requires(I < lfsr_length)
  word_t at() const noexcept
  {
    return s_[origin_ + I];
  }

  void shift_in(const word_t v) noexcept
  {
    origin_ = (origin_ + 1) & mask;
    const std::size_t last = origin_ + (lfsr_length - 1);
    s_[last] = v;
    s_[last ^ lfsr_length] = v;
  }

  Stages stages() const noexcept
  {
    Stages out{};
    for (std::size_t i = 0; i < lfsr_length; ++i) {
      out[i] = s_[origin_ + i];
    }
    return out;
  }

  std::size_t origin() const noexcept { return origin_; }

  // Raw 32-slot storage, for checking the mirror invariant.
  std::span<const word_t, 2 * lfsr_length> storage() const noexcept { return s_; }

private:
  static constexpr std::size_t mask = lfsr_length - 1;

  std::array<word_t, 2 * lfsr_length> s_{};
  std::size_t origin_ = 0;
};

static_assert(LfsrStrategy<HardcodeLfsr>);
static_assert(LfsrStrategy<TraditionalLfsr>);
static_assert(LfsrStrategy<CircularLfsr>);
static_assert(LfsrStrategy<SlidingLfsr>);

}
