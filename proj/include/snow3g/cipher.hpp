#pragma once
#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "snow3g/field.hpp"
#include "snow3g/fsm.hpp"
#include "snow3g/lfsr.hpp"
#include "snow3g/probe.hpp"

namespace snow3g {

inline constexpr unsigned init_clock_count = 32;

// 128-bit key and IV, each as four words. Word 0 holds the first eight hex
// digits of the textual form.
struct KeyIv
{
  std::array<word_t, 4> key{};
  std::array<word_t, 4> iv{};

  // Throws std::invalid_argument unless both are exactly 32 hex digits.
  static KeyIv from_hex(std::string_view key_hex, std::string_view iv_hex);

  friend bool operator==(const KeyIv&, const KeyIv&) = default;
};

// Parses 32 hex digits (either case) into four big-endian words.
std::array<word_t, 4>
parse_hex128(std::string_view hex);

std::string
to_hex128(const std::array<word_t, 4>& words);

constexpr std::string_view
to_string(const MulKind k) noexcept
{
  return k == MulKind::recursive ? "recursive" : "table";
}

std::optional<MulKind>
parse_mul_kind(std::string_view name) noexcept;

struct StrategyConfig
{
  LfsrKind lfsr = LfsrKind::sliding;
  MulKind mul = MulKind::table;

  friend bool operator==(const StrategyConfig&, const StrategyConfig&) = default;
};

// "<mul>+<lfsr>", e.g. "table+sliding".
std::string
to_string(const StrategyConfig& config);

std::optional<StrategyConfig>
parse_config(std::string_view name) noexcept;

// All 8 combinations, recursive multiplication first.
std::array<StrategyConfig, 8>
all_configs() noexcept;

// Initial LFSR contents derived from key and IV, before any clocking.
Stages
initial_stages(const KeyIv& kiv) noexcept;

struct StateSnapshot
{
  Stages lfsr{};
  FsmState fsm{};

  friend bool operator==(const StateSnapshot&, const StateSnapshot&) = default;
};

// Keystream-mode feedback word alpha*s0 ^ s2 ^ alpha^-1*s11, computed byte
// wise: the shifted parts of s0 and s11 plus one MULalpha and one DIValpha
// product for the coefficient that falls off each end.
template<LfsrStrategy Lfsr, typename Mul, typename Probe = NullProbe>
inline word_t
feedback(const Lfsr& lfsr, const Mul& mul, Probe&& probe = Probe{}) noexcept
{
  const word_t s0 = lfsr.template at<0>();
  const word_t s2 = lfsr.template at<2>();
  const word_t s11 = lfsr.template at<11>();

  return ((s0 << 8) & 0xffffff00) ^ mul.mul_alpha(static_cast<byte_t>(s0 >> 24), probe) ^ s2 ^
         ((s11 >> 8) & 0x00ffffff) ^ mul.div_alpha(static_cast<byte_t>(s11 & 0xff), probe);
}

// One generator with its strategies fixed at compile time. Probes are
// passed per call and only observe; they never change the output.
template<LfsrStrategy Lfsr, typename Mul>
class BasicSnow3G
{
public:
  using lfsr_type = Lfsr;
  using mul_type = Mul;

  BasicSnow3G() = default;

  explicit BasicSnow3G(Mul mul)
    : mul_(std::move(mul))
  {}

  BasicSnow3G(const KeyIv& kiv, Mul mul = Mul{})
    : mul_(std::move(mul))
  {
    initialize(kiv);
  }

  static constexpr StrategyConfig config() noexcept { return { Lfsr::kind, Mul::kind }; }

  // Loads key and IV, clears the FSM and runs the 32 output-free clocks in
  // which F is folded into the feedback.
  template<typename Probe = NullProbe>
  void initialize(const KeyIv& kiv, Probe&& probe = Probe{})
  {
    const Stages stages = initial_stages(kiv);
    lfsr_.load(stages);
    fsm_ = FsmState{};
    init_clocks_ = 0;
    for (unsigned i = 0; i < init_clock_count; ++i) {
      const word_t f = clock_fsm(fsm_, lfsr_.template at<15>(), lfsr_.template at<5>(), probe);
      clock_lfsr(f, probe);
      ++init_clocks_;
    }
    initialized_ = true;
    primed_ = false;
  }

  // Fills out with the next keystream words. The first call also performs
  // the discarded FSM clock and keystream-mode LFSR clock that separate
  // initialization from output, even when out is empty.
  template<typename Probe = NullProbe>
  void keystream(const std::span<word_t> out, Probe&& probe = Probe{})
  {
    if (!initialized_) {
      throw std::logic_error("keystream requested from an uninitialized generator");
    }
    PhaseScope scope{ probe, Phase::generate };
    if (!primed_) {
      clock_fsm(fsm_, lfsr_.template at<15>(), lfsr_.template at<5>(), probe);
      clock_lfsr(0, probe);
      primed_ = true;
    }
    for (word_t& z : out) {
      const word_t f = clock_fsm(fsm_, lfsr_.template at<15>(), lfsr_.template at<5>(), probe);
      z = f ^ lfsr_.template at<0>();
      clock_lfsr(0, probe);
    }
  }

  bool initialized() const noexcept { return initialized_; }
  unsigned init_clocks() const noexcept { return init_clocks_; }

  StateSnapshot snapshot() const noexcept { return { lfsr_.stages(), fsm_ }; }

  const Lfsr& lfsr() const noexcept { return lfsr_; }
  const Mul& mul() const noexcept { return mul_; }

private:
  template<typename Probe>
  void clock_lfsr(const word_t extra, Probe& probe) noexcept
  {
    PhaseScope scope{ probe, Phase::lfsr_shift };
    lfsr_.shift_in(feedback(lfsr_, mul_, probe) ^ extra);
  }

  Lfsr lfsr_{};
  FsmState fsm_{};
  Mul mul_{};
  unsigned init_clocks_ = 0;
  bool initialized_ = false;
  bool primed_ = false;
};

template<typename T>
struct type_tag
{
  using type = T;
};

// Calls fn(type_tag<Lfsr>{}, type_tag<Mul>{}) with the strategy types named
// by config, so callers can instantiate BasicSnow3G without a virtual hop.
template<typename Fn>
decltype(auto)
with_strategies(const StrategyConfig config, Fn&& fn)
{
  const auto with_mul = [&](auto lfsr_tag) -> decltype(auto) {
    if (config.mul == MulKind::recursive) {
      return fn(lfsr_tag, type_tag<RecursiveMul>{});
    }
    return fn(lfsr_tag, type_tag<TableMul>{});
  };
  switch (config.lfsr) {
    case LfsrKind::hardcode:
      return with_mul(type_tag<HardcodeLfsr>{});
    case LfsrKind::traditional:
      return with_mul(type_tag<TraditionalLfsr>{});
    case LfsrKind::circular:
      return with_mul(type_tag<CircularLfsr>{});
    case LfsrKind::sliding:
      break;
  }
  return with_mul(type_tag<SlidingLfsr>{});
}

// Generator whose strategies are chosen at run time. Besides whole words it
// hands out keystream bytes (most significant byte of each word first) and
// keeps the unused tail of a word between byte-oriented calls.
class Snow3G
{
public:
  // Uninitialized; keystream calls throw until initialize() is called.
  explicit Snow3G(StrategyConfig config = {});

  Snow3G(StrategyConfig config, const KeyIv& kiv);

  Snow3G(Snow3G&&) noexcept;
  Snow3G& operator=(Snow3G&&) noexcept;
  ~Snow3G();

  void initialize(const KeyIv& kiv);

  // Counts phase entries; used to check the initialization clock count.
  void initialize(const KeyIv& kiv, CountingProbe& probe);

  void keystream(std::span<word_t> out);
  void keystream(std::span<word_t> out, CountingProbe& probe);
  std::vector<word_t> keystream(std::size_t n);

  void keystream_bytes(std::span<std::uint8_t> out);

  // out[i] = in[i] ^ keystream byte i. out may alias in.
  void apply(std::span<const std::uint8_t> in, std::span<std::uint8_t> out);

  StrategyConfig config() const noexcept { return config_; }
  bool initialized() const noexcept;
  unsigned init_clocks() const noexcept;
  StateSnapshot snapshot() const;

  struct Engine;

private:
  StrategyConfig config_;
  std::unique_ptr<Engine> engine_;
  std::array<std::uint8_t, 4> pending_{};
  std::size_t pending_len_ = 0;
};

// Encrypts or decrypts data with the generator's next keystream bytes.
std::vector<std::uint8_t>
xor_cipher(Snow3G& gen, std::span<const std::uint8_t> data);

}
