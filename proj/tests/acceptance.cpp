// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cli.hpp"
#include "oracle.hpp"
#include "snow3g/bench.hpp"
#include "snow3g/conformance.hpp"

using namespace snow3g;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void
report(const char* name, const bool ok, const std::string& detail)
{
  std::printf("%s  %-34s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) {
    ++failures;
  }
}

double
seconds_since(const Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string
fmt(const char* f, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

KeyIv
random_kiv(std::mt19937_64& rng)
{
  KeyIv kiv;
  for (auto& w : kiv.key) {
    w = static_cast<word_t>(rng());
  }
  for (auto& w : kiv.iv) {
    w = static_cast<word_t>(rng());
  }
  return kiv;
}

void
mul_equivalence()
{
  const auto t0 = Clock::now();
  const TableMul table;
  const RecursiveMul recursive;
  int bad = 0;
  for (unsigned c = 0; c < 256; ++c) {
    const auto b = static_cast<byte_t>(c);
    bad += table.mul_alpha(b) != recursive.mul_alpha(b);
    bad += table.div_alpha(b) != recursive.div_alpha(b);
  }
  const double s = seconds_since(t0);
  report("mul strategy equivalence", bad == 0 && s < 1.0,
         fmt("256 inputs x 2 ops, %d mismatches, %.3f s (limit 1 s)", bad, s));
}

void
lfsr_equivalence()
{
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  long bad = 0;
  for (int load = 0; load < 20; ++load) {
    Stages init{};
    for (auto& w : init) {
      w = static_cast<word_t>(rng());
    }
    HardcodeLfsr hard;
    TraditionalLfsr trad;
    CircularLfsr circ;
    SlidingLfsr slide;
    hard.load(init);
    trad.load(init);
    circ.load(init);
    slide.load(init);
    for (int step = 0; step < 10000; ++step) {
      const auto v = static_cast<word_t>(rng());
      hard.shift_in(v);
      trad.shift_in(v);
      circ.shift_in(v);
      slide.shift_in(v);
      for (std::size_t i = 0; i < lfsr_length; ++i) {
        const word_t ref = trad.stage(i);
        bad += hard.stage(i) != ref || circ.stage(i) != ref || slide.stage(i) != ref;
      }
    }
  }
  const double s = seconds_since(t0);
  report("LFSR strategy equivalence", bad == 0 && s < 10.0,
         fmt("20 loads x 10^4 shifts x 16 stages, %ld mismatches, %.3f s (limit 10 s)", bad, s));
}

void
matrix_equivalence()
{
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  int bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const KeyIv kiv = random_kiv(rng);
    const auto ref = Snow3G(all_configs()[0], kiv).keystream(2500);
    for (const auto& config : all_configs()) {
      bad += Snow3G(config, kiv).keystream(2500) != ref;
    }
  }
  const double s = seconds_since(t0);
  report("generator matrix equivalence", bad == 0 && s < 30.0,
         fmt("100 key/IV x 8 configs x 2500 words, %d differing streams, %.3f s (limit 30 s)",
             bad, s));
}

void
conformance()
{
  std::ifstream in(SNOW3G_DATA_DIR "/etsi_test_sets.txt");
  std::ostringstream text;
  text << in.rdbuf();
  std::vector<TestVector> vectors;
  try {
    vectors = parse_vectors(text.str());
  } catch (const std::exception& e) {
    report("conformance vectors", false, e.what());
    return;
  }
  int failed_configs = 0;
  for (const auto& config : all_configs()) {
    const auto r = run_vectors(vectors, config);
    if (!r.passed()) {
      ++failed_configs;
      std::fputs(format_report(r).c_str(), stdout);
    }
  }
  report("conformance vectors", vectors.size() >= 4 && failed_configs == 0,
         fmt("%zu vectors, %d of 8 configs failing", vectors.size(), failed_configs));
}

void
feedback_oracle()
{
  std::mt19937_64 rng(303);
  int bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Stages s{};
    for (auto& w : s) {
      w = static_cast<word_t>(rng());
    }
    SlidingLfsr slide;
    TraditionalLfsr trad;
    slide.load(s);
    trad.load(s);
    const word_t expected = oracle::feedback(s[0], s[2], s[11]);
    bad += feedback(slide, TableMul{}) != expected;
    bad += feedback(trad, RecursiveMul{}) != expected;
  }
  report("feedback oracle", bad == 0,
         fmt("100 random states x 2 strategies, %d mismatches", bad));
}

struct Matrix
{
  std::map<std::string, bench::BenchReport> reports;

  const bench::BenchReport& at(const LfsrKind l, const MulKind m) const
  {
    return reports.at(to_string(StrategyConfig{ l, m }));
  }
};

Matrix
run_matrix()
{
  const auto configs = all_configs();
  const auto t0 = Clock::now();
  auto reports = bench::run_matrix(configs, bench::canonical_runs, bench::canonical_bytes);
  Matrix m;
  for (auto& r : reports) {
    std::printf("      bench %-22s total %10.1f ms  instrumented wall %10.1f ms  %8llu samples\n",
                to_string(r.config).c_str(), r.total_time_ms, r.wall_ms,
                static_cast<unsigned long long>(r.samples));
    m.reports.emplace(to_string(r.config), std::move(r));
  }
  std::printf("      matrix took %.1f s\n", seconds_since(t0));
  std::fflush(stdout);
  return m;
}

void
benchmark_shape(const Matrix& m)
{
  using L = LfsrKind;
  using M = MulKind;

  // (a) for every LFSR strategy
  bool a = true;
  std::string a_detail;
  for (const LfsrKind l : all_lfsr_kinds) {
    const double rec = m.at(l, M::recursive).total_time_ms;
    const double tab = m.at(l, M::table).total_time_ms;
    a = a && rec >= 2.0 * tab;
    a_detail += fmt("%s %.1fx ", std::string(to_string(l)).c_str(), rec / tab);
  }
  report("bench (a) recursive >= 2x table", a, a_detail);

  bool b = true;
  std::string b_detail;
  for (const LfsrKind l : all_lfsr_kinds) {
    const auto& r = m.at(l, M::recursive);
    b = b && !r.rows.empty() && r.rows.front().phase == Phase::mulxpow;
    const auto* row = r.row(Phase::mulxpow);
    b_detail += fmt("%s %.1f%% ", std::string(to_string(l)).c_str(), row ? row->percent : 0.0);
  }
  report("bench (b) mulxpow dominates recursive", b, b_detail);

  const double slide_shift = m.at(L::sliding, M::table).phase_ms(Phase::lfsr_shift);
  const double trad_shift = m.at(L::traditional, M::table).phase_ms(Phase::lfsr_shift);
  report("bench (c) sliding shift < traditional", slide_shift < trad_shift,
         fmt("table+sliding %.1f ms vs table+traditional %.1f ms", slide_shift, trad_shift));

  const double opt = m.at(L::sliding, M::table).total_time_ms;
  const double base = m.at(L::traditional, M::table).total_time_ms;
  report("bench (d) table+sliding <= 1.02 x trad", opt <= base * 1.02,
         fmt("%.1f ms vs %.1f ms (ratio %.3f)", opt, base, opt / base));
}

// The scoped-timer mode is kept for comparison; on machines where a clock
// read costs more than an LFSR clock its corrected rows are mostly noise.
void
timed_mode_info()
{
  bench::BenchOptions options;
  options.mode = bench::Instrumentation::timed;
  options.cross_check = false;
  const StrategyConfig pair[] = { { LfsrKind::sliding, MulKind::table },
                                  { LfsrKind::traditional, MulKind::table } };
  const auto r = bench::run_matrix(pair, bench::canonical_runs, bench::canonical_bytes, options);
  std::printf("      info: timed mode shift %.1f vs %.1f ms, total %.1f vs %.1f ms "
              "(table+sliding vs table+traditional, %.0f ns per scope subtracted)\n",
              r[0].phase_ms(Phase::lfsr_shift), r[1].phase_ms(Phase::lfsr_shift),
              r[0].total_time_ms, r[1].total_time_ms, r[0].overhead.own_ns);
}

void
throughput_identity(const Matrix& m)
{
  double worst = 0;
  for (const auto& [name, r] : m.reports) {
    for (const auto& row : r.rows) {
      if (row.time_ms <= 0) {
        continue;
      }
      const double expected = 1e5 / row.time_ms;
      worst = std::max(worst, std::abs(row.throughput_paper - expected) / expected);
    }
    const double expected = 1e5 / r.total_time_ms;
    worst = std::max(worst, std::abs(r.total_throughput_paper - expected) / expected);
  }
  const auto rounded = [](const double ms) {
    return std::round(bench::paper_throughput(ms, 10, 10'000'000) * 10) / 10;
  };
  const bool anchors = rounded(31014.6) == 3.2 && rounded(5368.5) == 18.6 && rounded(29054.9) == 3.4;
  report("throughput convention", worst < 0.01 && anchors,
         fmt("max relative error %.2e over all rows, anchors %s", worst, anchors ? "ok" : "off"));
}

std::string
read_file(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  return { std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>() };
}

void
xor_involution()
{
  const fs::path dir = fs::temp_directory_path() / ("snow3g_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::mt19937_64 rng(404);
  int bad = 0;
  std::size_t biggest = 0;
  for (int i = 0; i < 50; ++i) {
    const KeyIv kiv = random_kiv(rng);
    // Sizes cover empty, tiny, non-multiple-of-4 and up to 1 MB.
    const std::size_t size = i == 0 ? 0 : (i == 1 ? 1'000'000 : rng() % 1'000'001);
    biggest = std::max(biggest, size);
    std::string data(size, '\0');
    for (auto& c : data) {
      c = static_cast<char>(rng());
    }
    const auto plain = (dir / "plain").string();
    const auto cipher = (dir / "cipher").string();
    const auto back = (dir / "back").string();
    std::ofstream(plain, std::ios::binary) << data;

    const auto config = all_configs()[i % 8];
    const std::string key = to_hex128(kiv.key);
    const std::string iv = to_hex128(kiv.iv);
    const std::string lfsr(to_string(config.lfsr));
    const std::string mul(to_string(config.mul));
    std::ostringstream out;
    std::ostringstream err;
    const auto encrypt = [&](const std::string& in, const std::string& to) {
      const char* argv[] = { "snow3g", "encrypt", "--key", key.c_str(), "--iv",  iv.c_str(),
                             "--in",   in.c_str(), "--out", to.c_str(), "--lfsr", lfsr.c_str(),
                             "--mul",  mul.c_str() };
      return cli::run(static_cast<int>(std::size(argv)), argv, out, err);
    };
    if (encrypt(plain, cipher) != 0 || encrypt(cipher, back) != 0) {
      ++bad;
      continue;
    }
    const bool changed = size < 16 || read_file(cipher) != data;
    bad += !changed || read_file(back) != data;
  }
  fs::remove_all(dir);
  report("XOR involution", bad == 0,
         fmt("50 files up to %zu bytes via the encrypt command, %d failures", biggest, bad));
}

void
instrumentation_neutrality(const Matrix& m)
{
  int bad = 0;
  for (const auto& [name, r] : m.reports) {
    bad += r.checksum != r.clean_checksum;
  }

  std::mt19937_64 rng(505);
  for (int trial = 0; trial < 10; ++trial) {
    const KeyIv kiv = random_kiv(rng);
    BasicSnow3G<TraditionalLfsr, RecursiveMul> plain(kiv);
    std::vector<word_t> want(2500);
    plain.keystream(want);

    bench::PhaseProfiler profiler;
    BasicSnow3G<TraditionalLfsr, RecursiveMul> timed;
    timed.initialize(kiv, profiler);
    std::vector<word_t> got(2500);
    timed.keystream(got, profiler);
    bad += got != want;

    bench::SamplingProfiler sampler(std::chrono::microseconds{ 20 });
    sampler.start();
    BasicSnow3G<TraditionalLfsr, RecursiveMul> sampled;
    sampled.initialize(kiv, sampler);
    sampled.keystream(got, sampler);
    sampler.stop();
    bad += got != want;
  }
  report("instrumentation neutrality", bad == 0,
         fmt("8 canonical bench checksums vs clean runs + 10 x 2 profiled streams, %d differences",
             bad));
}

}

int
main()
{
  const auto t0 = Clock::now();
  mul_equivalence();
  lfsr_equivalence();
  matrix_equivalence();
  conformance();
  feedback_oracle();
  xor_involution();

  std::printf("      running the benchmark matrix: %zu runs x %zu bytes per config\n",
              bench::canonical_runs, bench::canonical_bytes);
  std::fflush(stdout);
  const Matrix m = run_matrix();
  benchmark_shape(m);
  timed_mode_info();
  throughput_identity(m);
  instrumentation_neutrality(m);

  std::printf("%d criteria failed, %.1f s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
