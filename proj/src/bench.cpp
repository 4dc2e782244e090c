#include "snow3g/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include <signal.h>
#include <time.h>

namespace snow3g::bench {

namespace {

using clock = std::chrono::steady_clock;

double
elapsed_ms(const clock::time_point start) noexcept
{
  return std::chrono::duration<double, std::milli>(clock::now() - start).count();
}

double
median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// Keeps results observable so the measured loops are not optimized away.
volatile std::uint64_t g_sink = 0;

// Best-of-three ns per iteration for body(i), i in [0, iterations).
template<typename Body>
double
ns_per_iteration(const std::size_t iterations, Body&& body)
{
  double best = 0;
  for (int rep = 0; rep < 3; ++rep) {
    std::uint64_t acc = 0;
    const auto start = clock::now();
    for (std::size_t i = 0; i < iterations; ++i) {
      acc ^= body(i);
    }
    const double ns = std::chrono::duration<double, std::nano>(clock::now() - start).count();
    g_sink = g_sink ^ acc;
    const double per = ns / static_cast<double>(iterations);
    best = rep == 0 ? per : std::min(best, per);
  }
  return best;
}

struct RunResult
{
  double ms = 0;
  std::uint64_t checksum = 0;
};

// One benchmark run: set up a generator for kiv and produce bytes_per_run
// bytes of keystream in blocks, all inside the main phase.
template<typename Lfsr, typename Mul, typename Probe>
RunResult
one_run(Probe& probe, const std::size_t bytes_per_run, const KeyIv& kiv)
{
  constexpr std::size_t block_words = 1024;
  const std::size_t words = (bytes_per_run + 3) / 4;
  std::vector<word_t> block(block_words);
  word_t acc = 0;

  const auto start = clock::now();
  {
    PhaseScope main_scope{ probe, Phase::main };
    BasicSnow3G<Lfsr, Mul> gen;
    gen.initialize(kiv, probe);
    for (std::size_t done = 0; done < words;) {
      const std::size_t n = std::min(block_words, words - done);
      gen.keystream(std::span<word_t>{ block.data(), n }, probe);
      for (std::size_t i = 0; i < n; ++i) {
        acc ^= block[i];
      }
      done += n;
    }
  }
  return { elapsed_ms(start), acc };
}

struct PhaseTotals
{
  std::array<double, phase_count> ms{};
  std::array<std::uint64_t, phase_count> invocations{};
  std::array<bool, phase_count> present{};
};

constexpr std::size_t
idx(const Phase p) noexcept
{
  return static_cast<std::size_t>(p);
}

// Self-time estimates from invocation counts and isolated unit costs. The
// generate phase has no isolated equivalent and is left unset.
template<typename Counts>
PhaseTotals
estimate_from_counts(const Counts& counts, const UnitCosts& u, const MulKind mul)
{
  const auto n = [&](Phase p) { return static_cast<double>(counts.invocations(p)); };
  const auto pos = [](double v) { return std::max(0.0, v); };
  constexpr double ns_to_ms = 1e-6;

  PhaseTotals t;
  const auto set = [&](Phase p, double ns) {
    t.ms[idx(p)] = ns * ns_to_ms;
    t.invocations[idx(p)] = counts.invocations(p);
    t.present[idx(p)] = counts.invocations(p) != 0;
  };

  if (mul == MulKind::recursive) {
    set(Phase::mulxpow, n(Phase::mul_alpha) * u.mulxpow_mul_set +
                          n(Phase::div_alpha) * u.mulxpow_div_set);
    set(Phase::mul_alpha, n(Phase::mul_alpha) * pos(u.mul_alpha - u.mulxpow_mul_set));
    set(Phase::div_alpha, n(Phase::div_alpha) * pos(u.div_alpha - u.mulxpow_div_set));
    set(Phase::lfsr_shift, n(Phase::lfsr_shift) * pos(u.lfsr_clock - u.mul_alpha - u.div_alpha));
  } else {
    set(Phase::lfsr_shift, n(Phase::lfsr_shift) * u.lfsr_clock);
  }
  set(Phase::fsm_clock, n(Phase::fsm_clock) * pos(u.fsm_clock - u.s1 - u.s2));
  set(Phase::s1, n(Phase::s1) * u.s1);
  set(Phase::s2, n(Phase::s2) * u.s2);
  return t;
}

void
fill_rows(BenchReport& report, const PhaseTotals& totals)
{
  report.rows.clear();
  for (const Phase p : all_phases) {
    if (!totals.present[idx(p)]) {
      continue;
    }
    BenchRow row;
    row.phase = p;
    row.time_ms = totals.ms[idx(p)];
    row.invocations = totals.invocations[idx(p)];
    report.rows.push_back(row);
  }
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const BenchRow& a, const BenchRow& b) { return a.time_ms > b.time_ms; });

  report.total_time_ms = 0;
  for (const auto& row : report.rows) {
    report.total_time_ms += row.time_ms;
  }
  for (auto& row : report.rows) {
    row.percent = report.total_time_ms > 0 ? 100.0 * row.time_ms / report.total_time_ms : 0.0;
    row.throughput_paper = paper_throughput(row.time_ms, report.runs, report.bytes_per_run);
    row.throughput_mbps = throughput_mbps(row.time_ms, report.runs, report.bytes_per_run);
  }
  report.total_throughput_paper =
    paper_throughput(report.total_time_ms, report.runs, report.bytes_per_run);
  report.total_throughput_mbps =
    throughput_mbps(report.total_time_ms, report.runs, report.bytes_per_run);
}

void
add_cross_check(BenchReport& report, const PhaseTotals& measured, const PhaseTotals& estimated)
{
  for (const Phase p : all_phases) {
    if (!estimated.present[idx(p)]) {
      continue;
    }
    CrossCheckRow row;
    row.phase = p;
    row.measured_ms = measured.ms[idx(p)];
    row.estimated_ms = estimated.ms[idx(p)];
    const double denom = std::max(row.measured_ms, row.estimated_ms);
    row.deviation = denom > 0 ? std::abs(row.measured_ms - row.estimated_ms) / denom : 0.0;
    row.flagged = row.deviation > cross_check_tolerance;
    report.cross_check.push_back(row);
  }
}

struct RunSeries
{
  std::vector<double> ms;
  std::uint64_t checksum = 0;

  void add(const RunResult& r)
  {
    ms.push_back(r.ms);
    checksum ^= r.checksum;
  }
  double sum() const { return std::accumulate(ms.begin(), ms.end(), 0.0); }
};

void
fill_run_stats(BenchReport& report, const RunSeries& instrumented, const RunSeries& clean)
{
  const auto& ms = instrumented.ms;
  report.wall_ms = instrumented.sum();
  report.run_ms_min = *std::min_element(ms.begin(), ms.end());
  report.run_ms_max = *std::max_element(ms.begin(), ms.end());
  report.run_ms_mean = report.wall_ms / static_cast<double>(ms.size());
  report.checksum = instrumented.checksum;
  report.run_ms = ms;
  report.clean_run_ms = clean.ms;
  if (!clean.ms.empty()) {
    report.clean_wall_ms = clean.sum();
    report.clean_run_ms_min = *std::min_element(clean.ms.begin(), clean.ms.end());
    report.clean_checksum = clean.checksum;
  }
}

// Everything accumulated for one configuration across the interleaved runs.
struct Session
{
  StrategyConfig config;
  CountingProbe counts;
  PhaseProfiler profiler;
  std::unique_ptr<SamplingProfiler> sampler;
  RunSeries instrumented;
  RunSeries clean;
  std::function<RunResult(const KeyIv&)> run_instrumented;
  std::function<RunResult(const KeyIv&)> run_clean;
};

void
bind_runs(Session& s, const Instrumentation mode, const std::size_t bytes_per_run)
{
  with_strategies(s.config, [&](auto lfsr_tag, auto mul_tag) {
    using Lfsr = typename decltype(lfsr_tag)::type;
    using Mul = typename decltype(mul_tag)::type;
    s.run_clean = [bytes_per_run](const KeyIv& kiv) {
      NullProbe none;
      return one_run<Lfsr, Mul>(none, bytes_per_run, kiv);
    };
    switch (mode) {
      case Instrumentation::sampled:
        s.run_instrumented = [&s, bytes_per_run](const KeyIv& kiv) {
          s.sampler->start();
          const RunResult r = one_run<Lfsr, Mul>(*s.sampler, bytes_per_run, kiv);
          s.sampler->stop();
          return r;
        };
        break;
      case Instrumentation::timed:
        s.run_instrumented = [&s, bytes_per_run](const KeyIv& kiv) {
          return one_run<Lfsr, Mul>(s.profiler, bytes_per_run, kiv);
        };
        break;
      case Instrumentation::counters:
        s.run_instrumented = [&s, bytes_per_run](const KeyIv& kiv) {
          return one_run<Lfsr, Mul>(s.counts, bytes_per_run, kiv);
        };
        break;
    }
    return 0;
  });
}

void
finish_report(BenchReport& report, Session& s, const BenchOptions& options)
{
  const StrategyConfig config = s.config;
  fill_run_stats(report, s.instrumented, s.clean);

  PhaseTotals totals;
  switch (options.mode) {
    case Instrumentation::counters: {
      totals = estimate_from_counts(s.counts, measure_unit_costs(config), config.mul);
      const double accounted = std::accumulate(totals.ms.begin(), totals.ms.end(), 0.0);
      const double base_ms = report.clean_wall_ms > 0 ? report.clean_wall_ms : report.wall_ms;
      totals.ms[idx(Phase::main)] = std::max(0.0, base_ms - accounted);
      totals.invocations[idx(Phase::main)] = s.counts.invocations(Phase::main);
      totals.present[idx(Phase::main)] = true;
      fill_rows(report, totals);
      return;
    }
    case Instrumentation::sampled: {
      report.samples = s.sampler->samples();
      // Samples give each phase's share; the time they share out is the
      // uninstrumented wall time when there is one, since marking phases
      // slows the loop being measured.
      const double base_ms = report.clean_wall_ms > 0 ? report.clean_wall_ms : report.wall_ms;
      const double ms_per_sample =
        report.samples != 0 ? base_ms / static_cast<double>(report.samples) : 0.0;
      for (const Phase p : all_phases) {
        totals.ms[idx(p)] = static_cast<double>(s.sampler->self_samples(p)) * ms_per_sample;
        totals.invocations[idx(p)] = s.sampler->invocations(p);
        totals.present[idx(p)] = s.sampler->invocations(p) != 0;
      }
      break;
    }
    case Instrumentation::timed:
      for (const Phase p : all_phases) {
        const double inv = static_cast<double>(s.profiler.invocations(p));
        const double kids = static_cast<double>(s.profiler.children(p));
        const double corrected = s.profiler.self_ns(p) - inv * report.overhead.own_ns -
                                 kids * report.overhead.parent_ns;
        totals.ms[idx(p)] = std::max(0.0, corrected) * 1e-6;
        totals.invocations[idx(p)] = s.profiler.invocations(p);
        totals.present[idx(p)] = s.profiler.invocations(p) != 0;
      }
      break;
  }
  fill_rows(report, totals);

  if (options.cross_check) {
    const UnitCosts units = measure_unit_costs(config);
    const PhaseTotals est = options.mode == Instrumentation::sampled
                              ? estimate_from_counts(*s.sampler, units, config.mul)
                              : estimate_from_counts(s.profiler, units, config.mul);
    add_cross_check(report, totals, est);
  }
}

std::string
fmt_fixed(const double v, const int decimals)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string
fmt_number(const double v)
{
  // Enough digits for the CSV to round-trip through parse_report_csv.
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}

std::string_view
to_string(const Instrumentation mode) noexcept
{
  switch (mode) {
    case Instrumentation::sampled:
      return "sampled";
    case Instrumentation::timed:
      return "timed";
    case Instrumentation::counters:
      return "counters";
  }
  return "?";
}

std::optional<Instrumentation>
parse_instrumentation(const std::string_view name) noexcept
{
  for (const auto m : { Instrumentation::sampled, Instrumentation::timed, Instrumentation::counters }) {
    if (name == to_string(m)) {
      return m;
    }
  }
  return std::nullopt;
}

namespace {

std::atomic<SamplingProfiler*> g_active_sampler{ nullptr };

}

SamplingProfiler::SamplingProfiler(const std::chrono::microseconds period)
  : period_(period)
{
  if (period_.count() <= 0) {
    throw std::invalid_argument("sampling period must be positive");
  }
}

SamplingProfiler::~SamplingProfiler()
{
  stop();
}

void
SamplingProfiler::on_signal(int) noexcept
{
  if (SamplingProfiler* self = g_active_sampler.load(std::memory_order_relaxed)) {
    self->sample();
  }
}

void
SamplingProfiler::sample() noexcept
{
  const std::uint32_t d = depth_.load(std::memory_order_relaxed);
  std::atomic_signal_fence(std::memory_order_seq_cst);
  if (d == 0) {
    ++idle_;
    return;
  }
  ++attributed_;
  ++self_[index(stack_[d - 1].load(std::memory_order_relaxed))];
  for (std::uint32_t i = 0; i < d; ++i) {
    ++inclusive_[index(stack_[i].load(std::memory_order_relaxed))];
  }
}

void
SamplingProfiler::start()
{
  if (running_) {
    return;
  }
  SamplingProfiler* expected = nullptr;
  if (!g_active_sampler.compare_exchange_strong(expected, this)) {
    throw std::runtime_error("another sampling profiler is active");
  }

  struct sigaction action = {};
  action.sa_handler = &SamplingProfiler::on_signal;
  action.sa_flags = SA_RESTART;
  sigemptyset(&action.sa_mask);
  sigaction(SIGPROF, &action, nullptr);

  sigevent event = {};
  event.sigev_notify = SIGEV_SIGNAL;
  event.sigev_signo = SIGPROF;
  timer_t timer{};
  if (timer_create(CLOCK_MONOTONIC, &event, &timer) != 0) {
    g_active_sampler.store(nullptr);
    throw std::runtime_error("timer_create failed");
  }
  const auto us = period_.count();
  itimerspec interval = {};
  interval.it_interval.tv_sec = static_cast<time_t>(us / 1'000'000);
  interval.it_interval.tv_nsec = static_cast<long>(us % 1'000'000) * 1000;
  interval.it_value = interval.it_interval;
  if (timer_settime(timer, 0, &interval, nullptr) != 0) {
    timer_delete(timer);
    g_active_sampler.store(nullptr);
    throw std::runtime_error("timer_settime failed");
  }
  timer_ = timer;
  running_ = true;
}

void
SamplingProfiler::stop() noexcept
{
  if (!running_) {
    return;
  }
  timer_delete(static_cast<timer_t>(timer_));
  // A signal raised just before the delete may still be pending; block and
  // discard it so the handler cannot run after this object is gone.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGPROF);
  sigset_t old;
  sigprocmask(SIG_BLOCK, &set, &old);
  timespec zero{};
  while (sigtimedwait(&set, nullptr, &zero) == SIGPROF) {
  }
  g_active_sampler.store(nullptr);
  sigprocmask(SIG_SETMASK, &old, nullptr);
  std::atomic_signal_fence(std::memory_order_seq_cst);
  timer_ = nullptr;
  running_ = false;
}

TimerOverhead
calibrate_timer_overhead()
{
  constexpr std::size_t scopes = 200'000;
  std::vector<double> own;
  std::vector<double> parent;
  for (int trial = 0; trial < 7; ++trial) {
    PhaseProfiler profiler;
    profiler.enter(Phase::main);
    for (std::size_t i = 0; i < scopes; ++i) {
      profiler.enter(Phase::generate);
      profiler.leave();
    }
    profiler.leave();
    own.push_back(profiler.self_ns(Phase::generate) / scopes);
    parent.push_back(profiler.self_ns(Phase::main) / scopes);
  }
  return { median(own), median(parent) };
}

UnitCosts
measure_unit_costs(const StrategyConfig config)
{
  constexpr std::size_t inputs = 1024;
  std::mt19937 rng(12345);
  std::array<word_t, inputs> in{};
  for (auto& w : in) {
    w = rng();
  }
  const auto byte_at = [&](std::size_t i) { return static_cast<byte_t>(in[i & (inputs - 1)]); };
  const auto word_at = [&](std::size_t i) { return in[i & (inputs - 1)]; };

  UnitCosts u;
  constexpr std::size_t slow_iters = 1 << 15;
  constexpr std::size_t fast_iters = 1 << 20;

  u.mulxpow_mul_set = ns_per_iteration(slow_iters, [&](std::size_t i) -> std::uint64_t {
    const byte_t c = byte_at(i);
    std::uint64_t r = 0;
    for (const unsigned e : mul_alpha_exponents) {
      r = (r << 8) | mulx_pow(c, e, beta_reduction);
    }
    return r;
  });
  u.mulxpow_div_set = ns_per_iteration(slow_iters, [&](std::size_t i) -> std::uint64_t {
    const byte_t c = byte_at(i);
    std::uint64_t r = 0;
    for (const unsigned e : div_alpha_exponents) {
      r = (r << 8) | mulx_pow(c, e, beta_reduction);
    }
    return r;
  });

  with_strategies(config, [&](auto lfsr_tag, auto mul_tag) {
    using Lfsr = typename decltype(lfsr_tag)::type;
    using Mul = typename decltype(mul_tag)::type;
    const Mul mul{};
    const std::size_t iters = Mul::kind == MulKind::recursive ? slow_iters : fast_iters;
    u.mul_alpha = ns_per_iteration(iters, [&](std::size_t i) -> std::uint64_t {
      return mul.mul_alpha(byte_at(i));
    });
    u.div_alpha = ns_per_iteration(iters, [&](std::size_t i) -> std::uint64_t {
      return mul.div_alpha(byte_at(i));
    });
    Lfsr lfsr;
    lfsr.load(std::span<const word_t>{ in.data(), lfsr_length });
    u.lfsr_clock = ns_per_iteration(iters, [&](std::size_t) -> std::uint64_t {
      const word_t v = feedback(lfsr, mul);
      lfsr.shift_in(v);
      return v;
    });
    return 0;
  });

  FsmState state{ in[0], in[1], in[2] };
  u.fsm_clock = ns_per_iteration(fast_iters, [&](std::size_t i) -> std::uint64_t {
    return clock_fsm(state, word_at(i), word_at(i + 7));
  });
  u.s1 = ns_per_iteration(fast_iters, [&](std::size_t i) -> std::uint64_t { return s1(word_at(i)); });
  u.s2 = ns_per_iteration(fast_iters, [&](std::size_t i) -> std::uint64_t { return s2(word_at(i)); });
  return u;
}

const BenchRow*
BenchReport::row(const Phase p) const noexcept
{
  const auto it = std::find_if(rows.begin(), rows.end(), [p](const BenchRow& r) { return r.phase == p; });
  return it == rows.end() ? nullptr : &*it;
}

double
BenchReport::phase_ms(const Phase p) const noexcept
{
  const BenchRow* r = row(p);
  return r ? r->time_ms : 0.0;
}

double
paper_throughput(const double time_ms, const std::size_t runs, const std::size_t bytes_per_run) noexcept
{
  if (time_ms <= 0) {
    return 0;
  }
  // Cumulative megabytes over cumulative milliseconds, scaled to seconds.
  const double megabytes = static_cast<double>(runs) * static_cast<double>(bytes_per_run) / 1e6;
  return megabytes * 1e3 / time_ms;
}

double
throughput_mbps(const double time_ms, const std::size_t runs, const std::size_t bytes_per_run) noexcept
{
  if (time_ms <= 0) {
    return 0;
  }
  const double bytes = static_cast<double>(runs) * static_cast<double>(bytes_per_run);
  return bytes / 1e6 / (time_ms / 1e3);
}

KeyIv
bench_key_iv(const std::uint64_t seed, const std::size_t run_index) noexcept
{
  std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (run_index + 1)));
  KeyIv kiv;
  for (auto& w : kiv.key) {
    w = static_cast<word_t>(rng());
  }
  for (auto& w : kiv.iv) {
    w = static_cast<word_t>(rng());
  }
  return kiv;
}

std::uint64_t
reference_checksum(const StrategyConfig config, const std::size_t runs,
                   const std::size_t bytes_per_run, const std::uint64_t seed)
{
  Session s;
  s.config = config;
  bind_runs(s, Instrumentation::counters, bytes_per_run);
  std::uint64_t acc = 0;
  for (std::size_t r = 0; r < runs; ++r) {
    acc ^= s.run_clean(bench_key_iv(seed, r)).checksum;
  }
  return acc;
}

std::vector<BenchReport>
run_matrix(const std::span<const StrategyConfig> configs, const std::size_t runs,
           const std::size_t bytes_per_run, const BenchOptions& options)
{
  if (runs == 0) {
    throw std::invalid_argument("runs must be at least 1");
  }
  if (bytes_per_run < 4) {
    throw std::invalid_argument("bytes per run must be at least 4");
  }

  // Built before timing starts.
  (void)shared_tables();

  std::vector<std::unique_ptr<Session>> sessions;
  for (const StrategyConfig config : configs) {
    auto s = std::make_unique<Session>();
    s->config = config;
    if (options.mode == Instrumentation::sampled) {
      s->sampler = std::make_unique<SamplingProfiler>(options.sample_period);
    }
    bind_runs(*s, options.mode, bytes_per_run);
    sessions.push_back(std::move(s));
  }

  TimerOverhead overhead;
  if (options.mode == Instrumentation::timed) {
    overhead = calibrate_timer_overhead();
  }

  // Run r of every configuration happens before run r+1 of any, so a slow
  // stretch on a shared machine lands on all of them. The clean twin of each
  // run alternates between going first and second.
  for (std::size_t r = 0; r < runs; ++r) {
    const KeyIv kiv = bench_key_iv(options.seed, r);
    for (auto& s : sessions) {
      if (!options.clean_pass) {
        s->instrumented.add(s->run_instrumented(kiv));
      } else if (r % 2 == 0) {
        s->clean.add(s->run_clean(kiv));
        s->instrumented.add(s->run_instrumented(kiv));
      } else {
        s->instrumented.add(s->run_instrumented(kiv));
        s->clean.add(s->run_clean(kiv));
      }
    }
  }

  std::vector<BenchReport> reports;
  for (auto& s : sessions) {
    BenchReport report;
    report.config = s->config;
    report.mode = options.mode;
    report.runs = runs;
    report.bytes_per_run = bytes_per_run;
    report.overhead = overhead;
    finish_report(report, *s, options);
    reports.push_back(std::move(report));
  }
  return reports;
}

BenchReport
run_bench(const StrategyConfig config, const std::size_t runs, const std::size_t bytes_per_run,
          const BenchOptions& options)
{
  return run_matrix(std::span<const StrategyConfig>{ &config, 1 }, runs, bytes_per_run, options)
    .front();
}

Comparison
compare_configs(const BenchReport& baseline, const BenchReport& candidate)
{
  if (baseline.runs != candidate.runs || baseline.bytes_per_run != candidate.bytes_per_run) {
    throw std::invalid_argument("reports were measured with different runs/bytes settings");
  }
  Comparison c;
  c.baseline = baseline.config;
  c.candidate = candidate.config;
  for (const Phase p : all_phases) {
    const bool in_base = baseline.row(p) != nullptr;
    const bool in_cand = candidate.row(p) != nullptr;
    if (!in_base && !in_cand) {
      continue;
    }
    PhaseImprovement imp{ p, std::nullopt };
    const double b = baseline.phase_ms(p);
    if (b > 0) {
      imp.percent = 100.0 * (b - candidate.phase_ms(p)) / b;
    }
    c.phases.push_back(imp);
  }
  if (baseline.total_time_ms > 0) {
    c.overall_percent =
      100.0 * (baseline.total_time_ms - candidate.total_time_ms) / baseline.total_time_ms;
  }
  return c;
}

std::optional<ReportFormat>
parse_report_format(const std::string_view name) noexcept
{
  if (name == "md" || name == "markdown") {
    return ReportFormat::markdown;
  }
  if (name == "csv") {
    return ReportFormat::csv;
  }
  return std::nullopt;
}

std::string
emit_report(const BenchReport& report, const ReportFormat format)
{
  std::ostringstream out;
  if (format == ReportFormat::csv) {
    out << csv_header << '\n';
    for (const auto& r : report.rows) {
      out << phase_id(r.phase) << ',' << fmt_number(r.time_ms) << ',' << fmt_number(r.percent)
          << ',' << fmt_number(r.throughput_paper) << ',' << fmt_number(r.throughput_mbps) << ','
          << r.invocations << '\n';
    }
    const double total_pct = report.rows.empty() ? 0.0 : 100.0;
    out << "total," << fmt_number(report.total_time_ms) << ',' << fmt_number(total_pct) << ','
        << fmt_number(report.total_throughput_paper) << ','
        << fmt_number(report.total_throughput_mbps) << ",0\n";
    return out.str();
  }

  out << "### " << to_string(report.config) << ": " << report.runs << " runs x "
      << report.bytes_per_run << " bytes (" << to_string(report.mode) << ")\n\n";
  out << "| Function | Time (ms) | % | Throughput (MB/s) |\n";
  out << "|---|---:|---:|---:|\n";
  for (const auto& r : report.rows) {
    out << "| " << phase_label(r.phase) << " | " << fmt_fixed(r.time_ms, 1) << " | "
        << fmt_fixed(r.percent, 1) << " | " << fmt_fixed(r.throughput_paper, 1) << " |\n";
  }
  out << "| Total Time | " << fmt_fixed(report.total_time_ms, 1) << " | "
      << (report.rows.empty() ? "0.0" : "100.0") << " | "
      << fmt_fixed(report.total_throughput_paper, 1) << " |\n";

  if (report.runs != 0 && report.wall_ms > 0) {
    out << "\nwall " << fmt_fixed(report.wall_ms, 1) << " ms; per run min/mean/max "
        << fmt_fixed(report.run_ms_min, 1) << " / " << fmt_fixed(report.run_ms_mean, 1) << " / "
        << fmt_fixed(report.run_ms_max, 1) << " ms";
    if (report.mode == Instrumentation::timed) {
      out << "; timer overhead " << fmt_fixed(report.overhead.own_ns, 1) << " ns/scope (+"
          << fmt_fixed(report.overhead.parent_ns, 1) << " ns to parent)";
    } else if (report.mode == Instrumentation::sampled) {
      out << "; " << report.samples << " samples";
    }
    out << '\n';
    if (report.clean_wall_ms > 0) {
      out << "uninstrumented wall " << fmt_fixed(report.clean_wall_ms, 1) << " ms (fastest run "
          << fmt_fixed(report.clean_run_ms_min, 1) << " ms)\n";
    }
  }

  if (!report.cross_check.empty()) {
    out << "\n| Function | Measured (ms) | Counter estimate (ms) | Deviation (%) | |\n";
    out << "|---|---:|---:|---:|---|\n";
    for (const auto& c : report.cross_check) {
      out << "| " << phase_label(c.phase) << " | " << fmt_fixed(c.measured_ms, 1) << " | "
          << fmt_fixed(c.estimated_ms, 1) << " | " << fmt_fixed(100.0 * c.deviation, 1) << " | "
          << (c.flagged ? "DISAGREE" : "ok") << " |\n";
    }
  }
  return out.str();
}

std::string
emit_comparison(const std::vector<Comparison>& comparisons, const ReportFormat format)
{
  std::ostringstream out;
  const auto pct = [](const std::optional<double>& v) {
    return v ? fmt_fixed(*v, 1) : std::string("n/a");
  };

  if (format == ReportFormat::csv) {
    out << "baseline,candidate,phase,improvement_percent\n";
    for (const auto& c : comparisons) {
      for (const auto& p : c.phases) {
        out << to_string(c.baseline) << ',' << to_string(c.candidate) << ',' << phase_id(p.phase)
            << ',' << (p.percent ? fmt_number(*p.percent) : std::string("")) << '\n';
      }
      out << to_string(c.baseline) << ',' << to_string(c.candidate) << ",total,"
          << fmt_number(c.overall_percent) << '\n';
    }
    return out.str();
  }

  out << "### Improvement over baseline (%)\n\n| Candidate | Baseline | Total |";
  for (const Phase p : all_phases) {
    out << ' ' << phase_label(p) << " |";
  }
  out << "\n|---|---|---:|";
  for (std::size_t i = 0; i < phase_count; ++i) {
    out << "---:|";
  }
  out << '\n';
  for (const auto& c : comparisons) {
    out << "| " << to_string(c.candidate) << " | " << to_string(c.baseline) << " | "
        << fmt_fixed(c.overall_percent, 1) << " |";
    for (const Phase p : all_phases) {
      const auto it = std::find_if(c.phases.begin(), c.phases.end(),
                                   [p](const PhaseImprovement& x) { return x.phase == p; });
      out << ' ' << (it == c.phases.end() ? std::string("") : pct(it->percent)) << " |";
    }
    out << '\n';
  }
  return out.str();
}

std::vector<CsvRow>
parse_report_csv(const std::string_view text)
{
  std::vector<CsvRow> rows;
  std::istringstream in{ std::string(text) };
  std::string line;
  if (!std::getline(in, line) || line != csv_header) {
    throw std::invalid_argument("missing or unexpected CSV header");
  }

  const auto to_double = [](const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) {
      throw std::invalid_argument("bad number '" + s + "'");
    }
    return v;
  };

  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) {
      cells.push_back(cell);
    }
    if (cells.size() != 6) {
      throw std::invalid_argument("expected 6 CSV columns in '" + line + "'");
    }
    CsvRow r;
    r.phase = cells[0];
    r.time_ms = to_double(cells[1]);
    r.percent = to_double(cells[2]);
    r.throughput_paper = to_double(cells[3]);
    r.throughput_mbps = to_double(cells[4]);
    const auto [ptr, ec] =
      std::from_chars(cells[5].data(), cells[5].data() + cells[5].size(), r.invocations);
    if (ec != std::errc{} || ptr != cells[5].data() + cells[5].size()) {
      throw std::invalid_argument("bad invocation count '" + cells[5] + "'");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}
