#include "snow3g/cipher.hpp"

#include <algorithm>

namespace snow3g {

namespace {

int
hex_value(const char ch) noexcept
{
  if (ch >= '0' && ch <= '9') {
    return ch - '0';
  }
  if (ch >= 'a' && ch <= 'f') {
    return ch - 'a' + 10;
  }
  if (ch >= 'A' && ch <= 'F') {
    return ch - 'A' + 10;
  }
  return -1;
}

}

std::array<word_t, 4>
parse_hex128(const std::string_view hex)
{
  if (hex.size() != 32) {
    throw std::invalid_argument("expected 32 hex digits, got " + std::to_string(hex.size()) +
                                " characters");
  }
  std::array<word_t, 4> words{};
  for (std::size_t i = 0; i < hex.size(); ++i) {
    const int v = hex_value(hex[i]);
    if (v < 0) {
      throw std::invalid_argument("invalid hex digit '" + std::string(1, hex[i]) + "'");
    }
    words[i / 8] = (words[i / 8] << 4) | static_cast<word_t>(v);
  }
  return words;
}

std::string
to_hex128(const std::array<word_t, 4>& words)
{
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(32);
  for (const word_t w : words) {
    for (int shift = 28; shift >= 0; shift -= 4) {
      out.push_back(digits[(w >> shift) & 0xf]);
    }
  }
  return out;
}

KeyIv
KeyIv::from_hex(const std::string_view key_hex, const std::string_view iv_hex)
{
  return { parse_hex128(key_hex), parse_hex128(iv_hex) };
}

std::optional<MulKind>
parse_mul_kind(const std::string_view name) noexcept
{
  if (name == "recursive") {
    return MulKind::recursive;
  }
  if (name == "table") {
    return MulKind::table;
  }
  return std::nullopt;
}

std::optional<LfsrKind>
parse_lfsr_kind(const std::string_view name) noexcept
{
  for (const LfsrKind k : all_lfsr_kinds) {
    if (to_string(k) == name) {
      return k;
    }
  }
  return std::nullopt;
}

std::string
to_string(const StrategyConfig& config)
{
  return std::string(to_string(config.mul)) + "+" + std::string(to_string(config.lfsr));
}

std::optional<StrategyConfig>
parse_config(const std::string_view name) noexcept
{
  const auto plus = name.find('+');
  if (plus == std::string_view::npos) {
    return std::nullopt;
  }
  const auto mul = parse_mul_kind(name.substr(0, plus));
  const auto lfsr = parse_lfsr_kind(name.substr(plus + 1));
  if (!mul || !lfsr) {
    return std::nullopt;
  }
  return StrategyConfig{ *lfsr, *mul };
}

std::array<StrategyConfig, 8>
all_configs() noexcept
{
  std::array<StrategyConfig, 8> out{};
  std::size_t n = 0;
  for (const MulKind m : { MulKind::recursive, MulKind::table }) {
    for (const LfsrKind l : all_lfsr_kinds) {
      out[n++] = { l, m };
    }
  }
  return out;
}

Stages
initial_stages(const KeyIv& kiv) noexcept
{
  constexpr word_t ones = 0xffffffff;
  const auto& k = kiv.key;
  const auto& iv = kiv.iv;

  Stages s{};
  s[15] = k[3] ^ iv[0];
  s[14] = k[2];
  s[13] = k[1];
  s[12] = k[0] ^ iv[1];
  s[11] = k[3] ^ ones;
  s[10] = k[2] ^ ones ^ iv[2];
  s[9] = k[1] ^ ones ^ iv[3];
  s[8] = k[0] ^ ones;
  s[7] = k[3];
  s[6] = k[2];
  s[5] = k[1];
  s[4] = k[0];
  s[3] = k[3] ^ ones;
  s[2] = k[2] ^ ones;
  s[1] = k[1] ^ ones;
  s[0] = k[0] ^ ones;
  return s;
}

struct Snow3G::Engine
{
  virtual ~Engine() = default;
  virtual void initialize(const KeyIv& kiv) = 0;
  virtual void initialize(const KeyIv& kiv, CountingProbe& probe) = 0;
  virtual void keystream(std::span<word_t> out) = 0;
  virtual void keystream(std::span<word_t> out, CountingProbe& probe) = 0;
  virtual bool initialized() const noexcept = 0;
  virtual unsigned init_clocks() const noexcept = 0;
  virtual StateSnapshot snapshot() const noexcept = 0;
};

namespace {

template<typename Lfsr, typename Mul>
class EngineImpl final : public Snow3G::Engine
{
public:
  void initialize(const KeyIv& kiv) override { gen_.initialize(kiv); }
  void initialize(const KeyIv& kiv, CountingProbe& probe) override { gen_.initialize(kiv, probe); }
  void keystream(std::span<word_t> out) override { gen_.keystream(out); }
  void keystream(std::span<word_t> out, CountingProbe& probe) override
  {
    gen_.keystream(out, probe);
  }
  bool initialized() const noexcept override { return gen_.initialized(); }
  unsigned init_clocks() const noexcept override { return gen_.init_clocks(); }
  StateSnapshot snapshot() const noexcept override { return gen_.snapshot(); }

private:
  BasicSnow3G<Lfsr, Mul> gen_;
};

std::unique_ptr<Snow3G::Engine>
make_engine(const StrategyConfig config)
{
  return with_strategies(config, [](auto lfsr, auto mul) -> std::unique_ptr<Snow3G::Engine> {
    return std::make_unique<EngineImpl<typename decltype(lfsr)::type, typename decltype(mul)::type>>();
  });
}

}

Snow3G::Snow3G(const StrategyConfig config)
  : config_(config)
  , engine_(make_engine(config))
{}

Snow3G::Snow3G(const StrategyConfig config, const KeyIv& kiv)
  : Snow3G(config)
{
  initialize(kiv);
}

Snow3G::Snow3G(Snow3G&&) noexcept = default;
Snow3G&
Snow3G::operator=(Snow3G&&) noexcept = default;
Snow3G::~Snow3G() = default;

void
Snow3G::initialize(const KeyIv& kiv)
{
  engine_->initialize(kiv);
  pending_len_ = 0;
}

void
Snow3G::initialize(const KeyIv& kiv, CountingProbe& probe)
{
  engine_->initialize(kiv, probe);
  pending_len_ = 0;
}

void
Snow3G::keystream(const std::span<word_t> out)
{
  engine_->keystream(out);
}

void
Snow3G::keystream(const std::span<word_t> out, CountingProbe& probe)
{
  engine_->keystream(out, probe);
}

std::vector<word_t>
Snow3G::keystream(const std::size_t n)
{
  std::vector<word_t> out(n);
  keystream(std::span<word_t>{ out });
  return out;
}

void
Snow3G::keystream_bytes(const std::span<std::uint8_t> out)
{
  std::size_t pos = 0;
  while (pending_len_ != 0 && pos < out.size()) {
    out[pos++] = pending_[4 - pending_len_--];
  }
  if (pos == out.size()) {
    return;
  }

  std::array<word_t, 256> block{};
  while (pos < out.size()) {
    const std::size_t remaining = out.size() - pos;
    const std::size_t words = std::min(block.size(), (remaining + 3) / 4);
    keystream(std::span<word_t>{ block.data(), words });
    for (std::size_t w = 0; w < words; ++w) {
      const word_t z = block[w];
      const std::array<std::uint8_t, 4> bytes = {
        static_cast<std::uint8_t>(z >> 24),
        static_cast<std::uint8_t>(z >> 16),
        static_cast<std::uint8_t>(z >> 8),
        static_cast<std::uint8_t>(z),
      };
      const std::size_t take = std::min<std::size_t>(4, out.size() - pos);
      std::copy_n(bytes.begin(), take, out.begin() + static_cast<std::ptrdiff_t>(pos));
      pos += take;
      if (take < 4) {
        pending_ = bytes;
        pending_len_ = 4 - take;
      }
    }
  }
}

void
Snow3G::apply(const std::span<const std::uint8_t> in, const std::span<std::uint8_t> out)
{
  if (out.size() < in.size()) {
    throw std::invalid_argument("output buffer shorter than input");
  }
  std::array<std::uint8_t, 1024> ks{};
  for (std::size_t pos = 0; pos < in.size(); pos += ks.size()) {
    const std::size_t n = std::min(ks.size(), in.size() - pos);
    keystream_bytes(std::span<std::uint8_t>{ ks.data(), n });
    for (std::size_t i = 0; i < n; ++i) {
      out[pos + i] = in[pos + i] ^ ks[i];
    }
  }
}

bool
Snow3G::initialized() const noexcept
{
  return engine_->initialized();
}

unsigned
Snow3G::init_clocks() const noexcept
{
  return engine_->init_clocks();
}

StateSnapshot
Snow3G::snapshot() const
{
  return engine_->snapshot();
}

std::vector<std::uint8_t>
xor_cipher(Snow3G& gen, const std::span<const std::uint8_t> data)
{
  std::vector<std::uint8_t> out(data.size());
  gen.apply(data, out);
  return out;
}

}
