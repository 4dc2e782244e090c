#include "snow3g/field.hpp"

namespace snow3g {

MulTables
build_tables() noexcept
{
  MulTables t{};
  for (unsigned c = 0; c < 256; ++c) {
    t.mul_alpha[c] = mul_alpha_recursive(static_cast<byte_t>(c));
    t.div_alpha[c] = div_alpha_recursive(static_cast<byte_t>(c));
  }
  return t;
}

const MulTables&
shared_tables() noexcept
{
  static const MulTables tables = build_tables();
  return tables;
}

std::optional<Phase>
parse_phase(const std::string_view id) noexcept
{
  for (const Phase p : all_phases) {
    if (phase_id(p) == id) {
      return p;
    }
  }
  return std::nullopt;
}

}
