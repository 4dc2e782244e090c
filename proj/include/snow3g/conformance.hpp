#pragma once
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "snow3g/cipher.hpp"

// Known-answer vectors in a line-oriented text format:
//
//   key=<32 hex> iv=<32 hex> ks=<idx>:<8 hex>[,<idx>:<8 hex>...]
//
// '#' starts a comment that runs to the end of the line, blank lines are
// ignored and hex is case-insensitive. Indices count keystream words from 1
// and must be strictly increasing within a line.
namespace snow3g {

struct ExpectedWord
{
  std::size_t index = 0;
  word_t value = 0;

  friend bool operator==(const ExpectedWord&, const ExpectedWord&) = default;
};

struct TestVector
{
  KeyIv kiv;
  std::vector<ExpectedWord> expected;
  std::size_t line = 0; // 1-based source line, 0 when built in code

  friend bool operator==(const TestVector& a, const TestVector& b)
  {
    return a.kiv == b.kiv && a.expected == b.expected;
  }
};

class VectorParseError : public std::runtime_error
{
public:
  VectorParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what)
    , line_(line)
  {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

std::vector<TestVector>
parse_vectors(std::string_view text);

// One line per vector, lowercase hex, no comments.
std::string
serialize_vectors(const std::vector<TestVector>& vectors);

struct Mismatch
{
  std::size_t index = 0;
  word_t got = 0;
  word_t expected = 0;
};

struct VectorResult
{
  std::size_t vector = 0; // position in the input list
  std::size_t line = 0;
  std::vector<Mismatch> mismatches;

  bool passed() const noexcept { return mismatches.empty(); }
};

struct ConformanceReport
{
  StrategyConfig config;
  std::vector<VectorResult> results;

  bool passed() const noexcept;
  std::size_t failures() const noexcept;
};

ConformanceReport
run_vectors(const std::vector<TestVector>& vectors, StrategyConfig config);

// Human-readable, one line per vector plus details for every mismatch.
std::string
format_report(const ConformanceReport& report);

}
