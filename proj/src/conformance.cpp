#include "snow3g/conformance.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace snow3g {

namespace {

std::string_view
trim(std::string_view s) noexcept
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view>
split(std::string_view s, const char sep)
{
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = s.find(sep);
    out.push_back(s.substr(0, pos));
    if (pos == std::string_view::npos) {
      return out;
    }
    s.remove_prefix(pos + 1);
  }
}

std::vector<std::string_view>
tokens(std::string_view s)
{
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) {
      ++i;
    }
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') {
      ++i;
    }
    if (i > start) {
      out.push_back(s.substr(start, i - start));
    }
  }
  return out;
}

std::string_view
field_value(const std::string_view token, const std::string_view name, const std::size_t line)
{
  if (token.size() <= name.size() || token.substr(0, name.size()) != name ||
      token[name.size()] != '=') {
    throw VectorParseError(line, "expected field '" + std::string(name) + "=', got '" +
                                   std::string(token) + "'");
  }
  return token.substr(name.size() + 1);
}

std::array<word_t, 4>
parse_hex_field(const std::string_view hex, const std::string_view name, const std::size_t line)
{
  try {
    return parse_hex128(hex);
  } catch (const std::invalid_argument& e) {
    throw VectorParseError(line, std::string(name) + ": " + e.what());
  }
}

word_t
parse_word(const std::string_view hex, const std::size_t line)
{
  if (hex.size() != 8) {
    throw VectorParseError(line, "keystream word '" + std::string(hex) +
                                   "' must be exactly 8 hex digits");
  }
  word_t value = 0;
  const auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), value, 16);
  if (ec != std::errc{} || ptr != hex.data() + hex.size()) {
    throw VectorParseError(line, "invalid hex in keystream word '" + std::string(hex) + "'");
  }
  return value;
}

std::size_t
parse_index(const std::string_view digits, const std::size_t line)
{
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size()) {
    throw VectorParseError(line, "invalid keystream index '" + std::string(digits) + "'");
  }
  if (value == 0) {
    throw VectorParseError(line, "keystream indices start at 1");
  }
  return value;
}

std::string
word_hex(const word_t w)
{
  char buf[9];
  std::snprintf(buf, sizeof(buf), "%08x", static_cast<unsigned>(w));
  return buf;
}

}

std::vector<TestVector>
parse_vectors(const std::string_view text)
{
  std::vector<TestVector> out;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }

    const auto fields = tokens(line);
    if (fields.size() != 3) {
      throw VectorParseError(line_no, "expected 'key=... iv=... ks=...', got " +
                                        std::to_string(fields.size()) + " fields");
    }

    TestVector v;
    v.line = line_no;
    v.kiv.key = parse_hex_field(field_value(fields[0], "key", line_no), "key", line_no);
    v.kiv.iv = parse_hex_field(field_value(fields[1], "iv", line_no), "iv", line_no);

    for (const std::string_view entry : split(field_value(fields[2], "ks", line_no), ',')) {
      const auto colon = entry.find(':');
      if (colon == std::string_view::npos) {
        throw VectorParseError(line_no, "keystream entry '" + std::string(entry) +
                                          "' is not <index>:<word>");
      }
      const std::size_t index = parse_index(entry.substr(0, colon), line_no);
      if (!v.expected.empty() && index <= v.expected.back().index) {
        throw VectorParseError(line_no, "keystream indices must be strictly increasing");
      }
      v.expected.push_back({ index, parse_word(entry.substr(colon + 1), line_no) });
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::string
serialize_vectors(const std::vector<TestVector>& vectors)
{
  std::string out;
  for (const auto& v : vectors) {
    out += "key=" + to_hex128(v.kiv.key) + " iv=" + to_hex128(v.kiv.iv) + " ks=";
    for (std::size_t i = 0; i < v.expected.size(); ++i) {
      if (i != 0) {
        out += ',';
      }
      out += std::to_string(v.expected[i].index) + ":" + word_hex(v.expected[i].value);
    }
    out += '\n';
  }
  return out;
}

bool
ConformanceReport::passed() const noexcept
{
  return failures() == 0;
}

std::size_t
ConformanceReport::failures() const noexcept
{
  return static_cast<std::size_t>(
    std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.passed(); }));
}

ConformanceReport
run_vectors(const std::vector<TestVector>& vectors, const StrategyConfig config)
{
  ConformanceReport report{ config, {} };
  report.results.reserve(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const TestVector& v = vectors[i];
    VectorResult result{ i, v.line, {} };
    if (!v.expected.empty()) {
      Snow3G gen(config, v.kiv);
      const auto words = gen.keystream(v.expected.back().index);
      for (const auto& e : v.expected) {
        const word_t got = words[e.index - 1];
        if (got != e.value) {
          result.mismatches.push_back({ e.index, got, e.value });
        }
      }
    }
    report.results.push_back(std::move(result));
  }
  return report;
}

std::string
format_report(const ConformanceReport& report)
{
  std::ostringstream out;
  out << "config " << to_string(report.config) << ": " << report.results.size() << " vectors, "
      << report.failures() << " failed\n";
  for (const auto& r : report.results) {
    out << "  vector " << r.vector + 1;
    if (r.line != 0) {
      out << " (line " << r.line << ")";
    }
    out << (r.passed() ? ": pass\n" : ": FAIL\n");
    for (const auto& m : r.mismatches) {
      out << "    z" << m.index << ": got " << word_hex(m.got) << ", expected "
          << word_hex(m.expected) << '\n';
    }
  }
  return out.str();
}

}
