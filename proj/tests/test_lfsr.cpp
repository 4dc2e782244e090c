#include <doctest.h>

#include <random>
#include <vector>

#include "snow3g/lfsr.hpp"

using namespace snow3g;

TEST_CASE_TEMPLATE("LFSR load and stage reads", Lfsr, HardcodeLfsr, TraditionalLfsr, CircularLfsr,
                   SlidingLfsr)
{
  Lfsr lfsr;
  const Stages zeros{};
  lfsr.load(zeros);
  CHECK(lfsr.stage(7) == 0u);

  Stages ramp{};
  for (std::size_t i = 0; i < lfsr_length; ++i) {
    ramp[i] = static_cast<word_t>(i);
  }
  lfsr.load(ramp);
  for (std::size_t i = 0; i < lfsr_length; ++i) {
    CHECK(lfsr.stage(i) == i);
  }
  CHECK(lfsr.template at<0>() == 0u);
  CHECK(lfsr.template at<15>() == 15u);
  CHECK(lfsr.stages() == ramp);
}

TEST_CASE_TEMPLATE("LFSR rejects bad input", Lfsr, HardcodeLfsr, TraditionalLfsr, CircularLfsr,
                   SlidingLfsr)
{
  Lfsr lfsr;
  const std::vector<word_t> short_load(15, 1);
  const std::vector<word_t> long_load(17, 1);
  CHECK_THROWS_AS(lfsr.load(short_load), std::invalid_argument);
  CHECK_THROWS_AS(lfsr.load(long_load), std::invalid_argument);
  CHECK_THROWS_AS(lfsr.stage(16), std::out_of_range);
}

TEST_CASE_TEMPLATE("LFSR shift_in contract", Lfsr, HardcodeLfsr, TraditionalLfsr, CircularLfsr,
                   SlidingLfsr)
{
  Lfsr lfsr;
  lfsr.load(Stages{});
  lfsr.shift_in(0);
  CHECK(lfsr.stages() == Stages{});

  std::mt19937 rng(5);
  Stages init{};
  for (auto& w : init) {
    w = rng();
  }
  lfsr.load(init);
  const word_t v = 0xDEADBEEF;
  lfsr.shift_in(v);
  CHECK(lfsr.stage(15) == v);
  for (std::size_t i = 0; i + 1 < lfsr_length; ++i) {
    CHECK(lfsr.stage(i) == init[i + 1]);
  }

  // Sixteen shifts replace the whole register.
  Stages fresh{};
  for (auto& w : fresh) {
    w = rng();
    lfsr.shift_in(w);
  }
  CHECK(lfsr.stages() == fresh);
}

TEST_CASE("all four strategies agree under random shifting")
{
  std::mt19937 rng(17);
  Stages init{};
  for (auto& w : init) {
    w = rng();
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
    const word_t v = rng();
    hard.shift_in(v);
    trad.shift_in(v);
    circ.shift_in(v);
    slide.shift_in(v);
    const Stages ref = trad.stages();
    REQUIRE(hard.stages() == ref);
    REQUIRE(circ.stages() == ref);
    REQUIRE(slide.stages() == ref);
    REQUIRE(circ.template at<11>() == ref[11]);
    REQUIRE(slide.template at<5>() == ref[5]);
  }
}

TEST_CASE("circular head and sliding mirror invariants")
{
  std::mt19937 rng(23);
  CircularLfsr circ;
  SlidingLfsr slide;
  Stages init{};
  for (auto& w : init) {
    w = rng();
  }
  circ.load(init);
  slide.load(init);

  for (int step = 0; step < 100; ++step) {
    const word_t v = rng();
    circ.shift_in(v);
    slide.shift_in(v);
    REQUIRE(circ.head() < lfsr_length);
    REQUIRE(circ.head() == static_cast<std::size_t>(step + 1) % lfsr_length);
    REQUIRE(slide.origin() < lfsr_length);
    const auto storage = slide.storage();
    REQUIRE(storage.size() == 32);
    for (std::size_t j = 0; j < lfsr_length; ++j) {
      REQUIRE(storage[j] == storage[j + lfsr_length]);
    }
  }
}

TEST_CASE("strategy names")
{
  for (const LfsrKind k : all_lfsr_kinds) {
    CHECK(parse_lfsr_kind(to_string(k)) == k);
  }
  CHECK_FALSE(parse_lfsr_kind("ring").has_value());
}
