#pragma once
#include <array>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "snow3g/cipher.hpp"
#include "snow3g/probe.hpp"

// Benchmark harness: bulk keystream generation with per-phase self-time
// accounting, reported in the layout of per-function profiling tables
// (time in ms, share of total, throughput).
namespace snow3g::bench {

inline constexpr std::size_t canonical_runs = 10;
inline constexpr std::size_t canonical_bytes = 10'000'000;

// Self-time profiler. Time between two consecutive enter/leave events is
// charged to the innermost open phase, so a phase's time excludes everything
// nested inside it.
class PhaseProfiler
{
public:
  using clock = std::chrono::steady_clock;

  void enter(const Phase p) noexcept
  {
    const auto now = clock::now();
    if (depth_ != 0) {
      const std::size_t top = index(stack_[depth_ - 1].phase);
      self_[top] += now - last_;
      ++children_[top];
    }
    stack_[depth_++] = { p, now };
    ++invocations_[index(p)];
    last_ = now;
  }

  void leave() noexcept
  {
    const auto now = clock::now();
    const Frame& f = stack_[--depth_];
    self_[index(f.phase)] += now - last_;
    inclusive_[index(f.phase)] += now - f.start;
    last_ = now;
  }

  double self_ns(const Phase p) const noexcept { return ns(self_[index(p)]); }
  double inclusive_ns(const Phase p) const noexcept { return ns(inclusive_[index(p)]); }
  std::uint64_t invocations(const Phase p) const noexcept { return invocations_[index(p)]; }
  std::uint64_t children(const Phase p) const noexcept { return children_[index(p)]; }

  void reset() noexcept { *this = PhaseProfiler{}; }

private:
  struct Frame
  {
    Phase phase = Phase::main;
    clock::time_point start{};
  };

  static constexpr std::size_t index(const Phase p) noexcept { return static_cast<std::size_t>(p); }
  static double ns(const clock::duration d) noexcept
  {
    return std::chrono::duration<double, std::nano>(d).count();
  }

  std::array<clock::duration, phase_count> self_{};
  std::array<clock::duration, phase_count> inclusive_{};
  std::array<std::uint64_t, phase_count> invocations_{};
  std::array<std::uint64_t, phase_count> children_{};
  std::array<Frame, 16> stack_{};
  std::size_t depth_ = 0;
  clock::time_point last_{};
};

// Statistical profiler. Scopes only push and pop the current phase; a
// periodic timer signal records which phases are open at that instant. A
// phase's self time is its share of samples (innermost open phase) times the
// measured wall time, so per-scope cost is a few stores instead of two clock
// reads. At most one instance can be sampling at a time.
class SamplingProfiler
{
public:
  explicit SamplingProfiler(std::chrono::microseconds period = std::chrono::microseconds{ 200 });
  ~SamplingProfiler();

  SamplingProfiler(const SamplingProfiler&) = delete;
  SamplingProfiler& operator=(const SamplingProfiler&) = delete;

  // Throws std::runtime_error if the timer cannot be created or another
  // profiler is already sampling.
  void start();
  void stop() noexcept;

  void enter(const Phase p) noexcept
  {
    const std::uint32_t d = depth_.load(std::memory_order_relaxed);
    stack_[d].store(p, std::memory_order_relaxed);
    depth_.store(d + 1, std::memory_order_release);
    ++invocations_[index(p)];
  }

  void leave() noexcept
  {
    depth_.store(depth_.load(std::memory_order_relaxed) - 1, std::memory_order_relaxed);
  }

  std::uint64_t self_samples(const Phase p) const noexcept { return self_[index(p)]; }
  std::uint64_t inclusive_samples(const Phase p) const noexcept { return inclusive_[index(p)]; }
  std::uint64_t samples() const noexcept { return attributed_; } // with a phase open
  std::uint64_t idle_samples() const noexcept { return idle_; }  // with none open
  std::uint64_t invocations(const Phase p) const noexcept { return invocations_[index(p)]; }
  std::chrono::microseconds period() const noexcept { return period_; }

private:
  static constexpr std::size_t index(const Phase p) noexcept { return static_cast<std::size_t>(p); }
  static void on_signal(int) noexcept;
  void sample() noexcept;

  std::chrono::microseconds period_;
  std::array<std::atomic<Phase>, 16> stack_{};
  std::atomic<std::uint32_t> depth_{ 0 };
  std::array<std::uint64_t, phase_count> invocations_{};
  // Written only from the signal handler while sampling.
  std::array<std::uint64_t, phase_count> self_{};
  std::array<std::uint64_t, phase_count> inclusive_{};
  std::uint64_t attributed_ = 0;
  std::uint64_t idle_ = 0;
  void* timer_ = nullptr;
  bool running_ = false;
};

// Cost the scoped-timer profiler adds, measured on empty scopes.
struct TimerOverhead
{
  double own_ns = 0;    // charged to an empty phase per invocation
  double parent_ns = 0; // charged to the enclosing phase per nested scope
};

TimerOverhead
calibrate_timer_overhead();

enum class Instrumentation : std::uint8_t
{
  sampled,  // phase stack sampled by a periodic timer signal
  timed,    // scoped timers, overhead-corrected self time
  counters, // invocation counts x isolated per-phase cost
};

std::string_view
to_string(Instrumentation mode) noexcept;

std::optional<Instrumentation>
parse_instrumentation(std::string_view name) noexcept;

// Isolated per-invocation costs in ns, measured outside the generator.
struct UnitCosts
{
  double mulxpow_mul_set = 0; // the four mulx_pow calls of one MULalpha
  double mulxpow_div_set = 0; // the four mulx_pow calls of one DIValpha
  double mul_alpha = 0;       // inclusive
  double div_alpha = 0;       // inclusive
  double lfsr_clock = 0;      // feedback + shift, inclusive
  double fsm_clock = 0;       // inclusive of S1 and S2
  double s1 = 0;
  double s2 = 0;
};

UnitCosts
measure_unit_costs(StrategyConfig config);

struct BenchOptions
{
  Instrumentation mode = Instrumentation::sampled;
  bool cross_check = true; // sampled/timed: also compare against unit-cost estimates
  std::chrono::microseconds sample_period{ 200 };
  bool clean_pass = true; // also time each run without instrumentation
  std::uint64_t seed = 0x5eed;
};

struct BenchRow
{
  Phase phase = Phase::main;
  double time_ms = 0;
  double percent = 0;
  double throughput_paper = 0; // MB over ms, as printed in the original tables
  double throughput_mbps = 0;  // 10^6 bytes per second
  std::uint64_t invocations = 0;
};

struct CrossCheckRow
{
  Phase phase = Phase::main;
  double measured_ms = 0;
  double estimated_ms = 0;
  double deviation = 0; // |measured - estimated| / max(measured, estimated)
  bool flagged = false;
};

inline constexpr double cross_check_tolerance = 0.20;

struct BenchReport
{
  StrategyConfig config;
  Instrumentation mode = Instrumentation::sampled;
  std::size_t runs = 0;
  std::size_t bytes_per_run = 0;

  // Sorted by time, largest first. In sampled mode each row is the phase's
  // share of samples times clean_wall_ms (wall_ms without a clean pass).
  std::vector<BenchRow> rows;
  double total_time_ms = 0; // sum of rows
  double total_throughput_paper = 0;
  double total_throughput_mbps = 0;

  double wall_ms = 0; // instrumented runs, including instrumentation cost
  double run_ms_min = 0;
  double run_ms_mean = 0;
  double run_ms_max = 0;
  std::vector<double> run_ms;       // per instrumented run
  std::vector<double> clean_run_ms; // per clean run
  double clean_wall_ms = 0;         // the same runs without instrumentation
  double clean_run_ms_min = 0;
  std::uint64_t clean_checksum = 0;
  TimerOverhead overhead;    // timed mode
  std::uint64_t samples = 0; // sampled mode, samples with a phase open
  std::vector<CrossCheckRow> cross_check;
  std::uint64_t checksum = 0; // XOR of every generated keystream word

  const BenchRow* row(Phase p) const noexcept;
  double phase_ms(Phase p) const noexcept; // 0 when the phase has no row
};

// Throughput for time_ms spent on runs x bytes_per_run bytes, in 10^6 bytes
// per second. At 10 runs of 10^7 bytes this is 10^5 / time_ms, the
// convention of the original tables (labelled Mbps there).
double
paper_throughput(double time_ms, std::size_t runs, std::size_t bytes_per_run) noexcept;

double
throughput_mbps(double time_ms, std::size_t runs, std::size_t bytes_per_run) noexcept;

// Key and IV used for run number run_index.
KeyIv
bench_key_iv(std::uint64_t seed, std::size_t run_index) noexcept;

// XOR of all keystream words the benchmark would generate, computed without
// any instrumentation.
std::uint64_t
reference_checksum(StrategyConfig config, std::size_t runs, std::size_t bytes_per_run,
                   std::uint64_t seed);

// Benchmarks several configurations with their runs interleaved. Throws
// std::invalid_argument when runs == 0 or bytes_per_run < 4.
std::vector<BenchReport>
run_matrix(std::span<const StrategyConfig> configs, std::size_t runs, std::size_t bytes_per_run,
           const BenchOptions& options = {});

BenchReport
run_bench(StrategyConfig config, std::size_t runs, std::size_t bytes_per_run,
          const BenchOptions& options = {});

struct PhaseImprovement
{
  Phase phase = Phase::main;
  std::optional<double> percent; // empty when the baseline never ran the phase
};

struct Comparison
{
  StrategyConfig baseline;
  StrategyConfig candidate;
  std::vector<PhaseImprovement> phases;
  double overall_percent = 0;
};

// (baseline - candidate) / baseline per phase and overall, in percent.
// Throws std::invalid_argument when runs or bytes_per_run differ.
Comparison
compare_configs(const BenchReport& baseline, const BenchReport& candidate);

enum class ReportFormat : std::uint8_t
{
  markdown,
  csv,
};

std::optional<ReportFormat>
parse_report_format(std::string_view name) noexcept;

inline constexpr std::string_view csv_header =
  "phase,time_ms,percent,throughput_paper_convention,throughput_MBps,invocations";

std::string
emit_report(const BenchReport& report, ReportFormat format);

std::string
emit_comparison(const std::vector<Comparison>& comparisons, ReportFormat format);

struct CsvRow
{
  std::string phase; // a phase id or "total"
  double time_ms = 0;
  double percent = 0;
  double throughput_paper = 0;
  double throughput_mbps = 0;
  std::uint64_t invocations = 0;
};

// Parses the CSV emitted for one report. Throws std::invalid_argument on
// malformed input.
std::vector<CsvRow>
parse_report_csv(std::string_view text);

}
