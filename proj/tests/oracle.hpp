#pragma once
// Reference arithmetic for the tests. Written from the field definitions
// only: general polynomial multiplication in GF(2^8), GF(2^32) as
// GF(2^8)[x] / (x^4 + b^23 x^3 + b^245 x^2 + b^48 x + b^239), and the two
// byte boxes from their algebraic definitions. Shares no code with the
// library.
#include <array>
#include <cstdint>

namespace oracle {

// Full 9-bit moduli.
inline constexpr unsigned beta_poly = 0x1A9; // x^8 + x^7 + x^5 + x^3 + 1
inline constexpr unsigned aes_poly = 0x11B;  // x^8 + x^4 + x^3 + x + 1
inline constexpr unsigned sq_poly = 0x169;   // x^8 + x^6 + x^5 + x^3 + 1

inline std::uint8_t
gf_mul(unsigned a, unsigned b, const unsigned poly)
{
  unsigned product = 0;
  for (int bit = 0; bit < 8; ++bit) {
    if (b & (1u << bit)) {
      product ^= a << bit;
    }
  }
  for (int bit = 14; bit >= 8; --bit) {
    if (product & (1u << bit)) {
      product ^= poly << (bit - 8);
    }
  }
  return static_cast<std::uint8_t>(product);
}

inline std::uint8_t
gf_pow(const std::uint8_t a, unsigned e, const unsigned poly)
{
  std::uint8_t r = 1;
  for (; e != 0; --e) {
    r = gf_mul(r, a, poly);
  }
  return r;
}

inline std::uint8_t
beta_pow(const unsigned e)
{
  return gf_pow(0x02, e, beta_poly);
}

// Element of GF(2^32): c[0] is the coefficient of x^3, c[3] the constant.
using Ext = std::array<std::uint8_t, 4>;

inline Ext
from_word(const std::uint32_t w)
{
  return { static_cast<std::uint8_t>(w >> 24), static_cast<std::uint8_t>(w >> 16),
           static_cast<std::uint8_t>(w >> 8), static_cast<std::uint8_t>(w) };
}

inline std::uint32_t
to_word(const Ext& e)
{
  return (std::uint32_t{ e[0] } << 24) | (std::uint32_t{ e[1] } << 16) |
         (std::uint32_t{ e[2] } << 8) | std::uint32_t{ e[3] };
}

inline Ext
ext_mul(const Ext& a, const Ext& b)
{
  // prod[k] is the coefficient of x^k.
  std::array<std::uint8_t, 7> prod{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      prod[(3 - i) + (3 - j)] ^= gf_mul(a[i], b[j], beta_poly);
    }
  }
  // x^4 = b^23 x^3 + b^245 x^2 + b^48 x + b^239 (characteristic 2).
  const std::array<std::uint8_t, 4> tail = { beta_pow(239), beta_pow(48), beta_pow(245),
                                             beta_pow(23) };
  for (int k = 6; k >= 4; --k) {
    const std::uint8_t c = prod[k];
    prod[k] = 0;
    for (int t = 0; t < 4; ++t) {
      prod[k - 4 + t] ^= gf_mul(c, tail[t], beta_poly);
    }
  }
  return { prod[3], prod[2], prod[1], prod[0] };
}

inline Ext
ext_pow(Ext base, std::uint64_t e)
{
  Ext r = { 0, 0, 0, 1 };
  while (e != 0) {
    if (e & 1) {
      r = ext_mul(r, base);
    }
    base = ext_mul(base, base);
    e >>= 1;
  }
  return r;
}

inline const Ext alpha = { 0, 0, 1, 0 };

// alpha^(2^32 - 2) = alpha^-1 in a field of 2^32 elements.
inline Ext
alpha_inverse()
{
  return ext_pow(alpha, 0xFFFFFFFEull);
}

inline std::uint32_t
feedback(const std::uint32_t s0, const std::uint32_t s2, const std::uint32_t s11)
{
  static const Ext inv = alpha_inverse();
  return to_word(ext_mul(alpha, from_word(s0))) ^ s2 ^ to_word(ext_mul(inv, from_word(s11)));
}

// AES S-box: inversion in GF(2^8)/0x11B followed by the affine map.
inline std::uint8_t
aes_sbox(const std::uint8_t x)
{
  const std::uint8_t inv = x == 0 ? 0 : gf_pow(x, 254, aes_poly);
  std::uint8_t r = 0x63;
  for (int i = 0; i < 5; ++i) {
    r ^= static_cast<std::uint8_t>((inv << i) | (inv >> (8 - i)));
  }
  return r;
}

// SNOW 3G SQ box: Dickson polynomial g49 over GF(2^8)/0x169, plus 0x25.
inline std::uint8_t
sq_box(const std::uint8_t x)
{
  std::uint8_t r = 0x25;
  for (const unsigned e : { 1u, 9u, 13u, 15u, 33u, 41u, 45u, 47u, 49u }) {
    r ^= gf_pow(x, e, sq_poly);
  }
  return r;
}

// Circulant mixing with rows (2,1,1,3), (3,2,1,1), (1,3,2,1), (1,1,3,2).
template<typename Box>
std::uint32_t
mix_word(const std::uint32_t w, Box box, const unsigned poly)
{
  const Ext in = from_word(w);
  const Ext b = { box(in[0]), box(in[1]), box(in[2]), box(in[3]) };
  constexpr std::array<std::array<unsigned, 4>, 4> m = { { { 2, 1, 1, 3 },
                                                           { 3, 2, 1, 1 },
                                                           { 1, 3, 2, 1 },
                                                           { 1, 1, 3, 2 } } };
  Ext out{};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      out[r] ^= gf_mul(b[c], m[r][c], poly);
    }
  }
  return to_word(out);
}

inline std::uint32_t
s1(const std::uint32_t w)
{
  return mix_word(w, aes_sbox, aes_poly);
}

inline std::uint32_t
s2(const std::uint32_t w)
{
  return mix_word(w, sq_box, sq_poly);
}

}
