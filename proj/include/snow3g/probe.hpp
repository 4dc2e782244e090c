#pragma once
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace snow3g {

// Categories the benchmark harness attributes time to. Names follow the
// per-function rows of the original SNOW 3G profiling tables.
enum class Phase : std::uint8_t
{
  mulxpow,
  mul_alpha,
  div_alpha,
  lfsr_shift,
  fsm_clock,
  s1,
  s2,
  generate,
  main,
};

inline constexpr std::size_t phase_count = 9;

inline constexpr std::array<Phase, phase_count> all_phases = {
  Phase::mulxpow, Phase::mul_alpha, Phase::div_alpha, Phase::lfsr_shift, Phase::fsm_clock,
  Phase::s1,      Phase::s2,        Phase::generate,  Phase::main,
};

// Identifier used in CSV output and on the command line.
constexpr std::string_view
phase_id(const Phase p) noexcept
{
  constexpr std::array<std::string_view, phase_count> ids = {
    "mulxpow", "mul_alpha", "div_alpha", "lfsr_shift", "fsm_clock", "s1", "s2", "generate", "main",
  };
  return ids[static_cast<std::size_t>(p)];
}

// Row label in markdown reports.
constexpr std::string_view
phase_label(const Phase p) noexcept
{
  constexpr std::array<std::string_view, phase_count> labels = {
    "MULxPow", "MULalpha", "DIValpha", "ClockLFSRKeyStreamMode", "ClockFSM",
    "S1",      "S2",       "GenerateKeystream", "main",
  };
  return labels[static_cast<std::size_t>(p)];
}

std::optional<Phase>
parse_phase(std::string_view id) noexcept;

// A probe observes phase entry/exit. Must never influence cipher state.
template<typename T>
concept PhaseProbe = requires(T& probe, Phase p) {
  probe.enter(p);
  probe.leave();
};

// Probe that does nothing; the default everywhere outside the harness.
struct NullProbe
{
  constexpr void enter(Phase) noexcept {}
  constexpr void leave() noexcept {}
};

// Counts invocations per phase and how many phases were opened directly
// inside each phase. No clock reads.
class CountingProbe
{
public:
  void enter(const Phase p) noexcept
  {
    if (depth_ != 0) {
      ++children_[static_cast<std::size_t>(stack_[depth_ - 1])];
    }
    ++invocations_[static_cast<std::size_t>(p)];
    stack_[depth_++] = p;
  }

  void leave() noexcept { --depth_; }

  std::uint64_t invocations(const Phase p) const noexcept
  {
    return invocations_[static_cast<std::size_t>(p)];
  }

  std::uint64_t children(const Phase p) const noexcept
  {
    return children_[static_cast<std::size_t>(p)];
  }

  void reset() noexcept { *this = CountingProbe{}; }

private:
  std::array<std::uint64_t, phase_count> invocations_{};
  std::array<std::uint64_t, phase_count> children_{};
  std::array<Phase, 16> stack_{};
  std::size_t depth_ = 0;
};

template<PhaseProbe Probe>
class PhaseScope
{
public:
  PhaseScope(Probe& probe, const Phase p) noexcept
    : probe_(probe)
  {
    probe_.enter(p);
  }
  ~PhaseScope() { probe_.leave(); }

  PhaseScope(const PhaseScope&) = delete;
  PhaseScope& operator=(const PhaseScope&) = delete;

private:
  Probe& probe_;
};

}
