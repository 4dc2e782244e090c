#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "snow3g/bench.hpp"
#include "snow3g/cipher.hpp"
#include "snow3g/conformance.hpp"

namespace snow3g::cli {

namespace {

struct UsageError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct StrategyFlags
{
  std::string lfsr = "sliding";
  std::string mul = "table";

  StrategyConfig resolve() const
  {
    const auto l = parse_lfsr_kind(lfsr);
    if (!l) {
      throw UsageError("unknown --lfsr '" + lfsr + "' (hardcode|traditional|circular|sliding)");
    }
    const auto m = parse_mul_kind(mul);
    if (!m) {
      throw UsageError("unknown --mul '" + mul + "' (recursive|table)");
    }
    return { *l, *m };
  }
};

void
add_strategy_flags(CLI::App& cmd, StrategyFlags& flags)
{
  cmd.add_option("--lfsr", flags.lfsr, "LFSR strategy: hardcode|traditional|circular|sliding")
    ->capture_default_str();
  cmd.add_option("--mul", flags.mul, "multiplication strategy: recursive|table")
    ->capture_default_str();
}

KeyIv
parse_key_iv(const std::string& key, const std::string& iv)
{
  try {
    return KeyIv::from_hex(key, iv);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("key/iv: ") + e.what());
  }
}

std::vector<std::uint8_t>
read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path + "' for reading");
  }
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw IoError("error reading '" + path + "'");
  }
  return data;
}

void
write_file(const std::string& path, const std::vector<std::uint8_t>& data)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) {
    throw IoError("error writing '" + path + "'");
  }
}

int
cmd_keystream(const std::string& key, const std::string& iv, const std::size_t n_bytes,
              const StrategyFlags& flags, const std::string& format, std::ostream& out)
{
  if (format != "hex" && format != "raw") {
    throw UsageError("--format must be hex or raw");
  }
  Snow3G gen(flags.resolve(), parse_key_iv(key, iv));

  static constexpr char digits[] = "0123456789abcdef";
  std::vector<std::uint8_t> chunk;
  std::string hex;
  for (std::size_t done = 0; done < n_bytes;) {
    chunk.resize(std::min<std::size_t>(1 << 16, n_bytes - done));
    gen.keystream_bytes(chunk);
    if (format == "raw") {
      out.write(reinterpret_cast<const char*>(chunk.data()), static_cast<std::streamsize>(chunk.size()));
    } else {
      hex.clear();
      for (const std::uint8_t b : chunk) {
        hex.push_back(digits[b >> 4]);
        hex.push_back(digits[b & 0xf]);
      }
      out << hex;
    }
    done += chunk.size();
  }
  if (format == "hex" && n_bytes != 0) {
    out << '\n';
  }
  out.flush();
  if (!out) {
    throw IoError("error writing keystream");
  }
  return exit_ok;
}

int
cmd_encrypt(const std::string& key, const std::string& iv, const std::string& in_path,
            const std::string& out_path, const StrategyFlags& flags)
{
  Snow3G gen(flags.resolve(), parse_key_iv(key, iv));
  const auto data = read_file(in_path);
  write_file(out_path, xor_cipher(gen, data));
  return exit_ok;
}

int
cmd_verify(const std::string& path, const bool all_configs_flag, const StrategyFlags& flags,
           std::ostream& out, std::ostream& err)
{
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();

  std::vector<TestVector> vectors;
  try {
    vectors = parse_vectors(text.str());
  } catch (const VectorParseError& e) {
    err << path << ": " << e.what() << '\n';
    return exit_usage;
  }

  std::vector<StrategyConfig> configs;
  if (all_configs_flag) {
    const auto all = all_configs();
    configs.assign(all.begin(), all.end());
  } else {
    configs.push_back(flags.resolve());
  }

  out << vectors.size() << " vectors\n";
  bool ok = true;
  for (const auto& config : configs) {
    const auto report = run_vectors(vectors, config);
    out << format_report(report);
    ok = ok && report.passed();
  }
  out << (ok ? "PASS\n" : "FAIL\n");
  return ok ? exit_ok : exit_verify_failed;
}

int
cmd_bench(const std::size_t runs, const std::size_t bytes, const bool matrix,
          const std::string& report_name, const std::string& mode_name,
          const std::uint32_t sample_us, const bool cross_check,
          const std::uint64_t seed, const StrategyFlags& flags, std::ostream& out)
{
  const auto format = bench::parse_report_format(report_name);
  if (!format) {
    throw UsageError("--report must be md or csv");
  }
  bench::BenchOptions options;
  const auto mode = bench::parse_instrumentation(mode_name);
  if (!mode) {
    throw UsageError("--mode must be sampled, timed or counters");
  }
  options.mode = *mode;
  if (sample_us == 0) {
    throw UsageError("--sample-us must be >= 1");
  }
  options.sample_period = std::chrono::microseconds{ sample_us };
  options.cross_check = cross_check;
  options.seed = seed;
  if (runs == 0 || bytes < 4) {
    throw UsageError("--runs must be >= 1 and --bytes >= 4");
  }

  std::vector<StrategyConfig> configs;
  if (matrix) {
    const auto all = all_configs();
    configs.assign(all.begin(), all.end());
  } else {
    configs.push_back(flags.resolve());
  }

  const auto reports = bench::run_matrix(configs, runs, bytes, options);
  for (const auto& report : reports) {
    if (*format == bench::ReportFormat::csv) {
      out << "# " << to_string(report.config) << '\n';
    }
    out << bench::emit_report(report, *format) << '\n';
  }

  if (matrix) {
    const StrategyConfig baseline_config{ LfsrKind::traditional, MulKind::recursive };
    const auto baseline = std::find_if(reports.begin(), reports.end(), [&](const auto& r) {
      return r.config == baseline_config;
    });
    std::vector<bench::Comparison> comparisons;
    for (const auto& r : reports) {
      comparisons.push_back(bench::compare_configs(*baseline, r));
    }
    if (*format == bench::ReportFormat::csv) {
      out << "# comparison\n";
    }
    out << bench::emit_comparison(comparisons, *format);
  }
  return exit_ok;
}

}

int
run(const int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{ "SNOW 3G keystream generator with pluggable LFSR and multiplication strategies" };
  app.require_subcommand(1);

  std::string key;
  std::string iv;
  StrategyFlags flags;

  auto* ks = app.add_subcommand("keystream", "write keystream bytes");
  std::size_t ks_bytes = 0;
  std::string ks_format = "hex";
  ks->add_option("--key", key, "128-bit key, 32 hex digits")->required();
  ks->add_option("--iv", iv, "128-bit IV, 32 hex digits")->required();
  ks->add_option("-n,--bytes", ks_bytes, "number of keystream bytes")->required();
  ks->add_option("--format", ks_format, "hex|raw")->capture_default_str();
  add_strategy_flags(*ks, flags);

  auto* enc = app.add_subcommand("encrypt", "XOR a file with the keystream (also decrypts)");
  std::string in_path;
  std::string out_path;
  enc->add_option("--key", key, "128-bit key, 32 hex digits")->required();
  enc->add_option("--iv", iv, "128-bit IV, 32 hex digits")->required();
  enc->add_option("--in", in_path, "input file")->required();
  enc->add_option("--out", out_path, "output file")->required();
  add_strategy_flags(*enc, flags);

  auto* ver = app.add_subcommand("verify", "check known-answer vectors");
  std::string vector_path;
  bool all_configs_flag = false;
  ver->add_option("vectors", vector_path, "vector file")->required();
  ver->add_flag("--all-configs", all_configs_flag, "check all 8 strategy combinations");
  add_strategy_flags(*ver, flags);

  auto* bn = app.add_subcommand("bench", "per-phase keystream benchmark");
  std::size_t runs = bench::canonical_runs;
  std::size_t bytes = bench::canonical_bytes;
  bool matrix = false;
  std::string report = "md";
  std::string mode = "sampled";
  std::uint32_t sample_us = 200;
  bool no_cross_check = false;
  std::uint64_t seed = bench::BenchOptions{}.seed;
  bn->add_option("--runs", runs, "number of runs")->capture_default_str();
  bn->add_option("--bytes", bytes, "keystream bytes per run")->capture_default_str();
  bn->add_flag("--matrix", matrix, "bench all 8 configurations and compare");
  bn->add_option("--report", report, "md|csv")->capture_default_str();
  bn->add_option("--mode", mode, "sampled|timed|counters")->capture_default_str();
  bn->add_option("--sample-us", sample_us, "sampling period in microseconds")
    ->capture_default_str();
  bn->add_flag("--no-cross-check", no_cross_check, "skip the unit-cost cross-check");
  bn->add_option("--seed", seed, "key/IV seed")->capture_default_str();
  add_strategy_flags(*bn, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }

  try {
    if (*ks) {
      return cmd_keystream(key, iv, ks_bytes, flags, ks_format, out);
    }
    if (*enc) {
      return cmd_encrypt(key, iv, in_path, out_path, flags);
    }
    if (*ver) {
      return cmd_verify(vector_path, all_configs_flag, flags, out, err);
    }
    return cmd_bench(runs, bytes, matrix, report, mode, sample_us, !no_cross_check, seed, flags, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return exit_io;
  }
}

}
