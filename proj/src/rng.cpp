#include "seedrl/rng.hpp"

#include <cmath>
#include <numbers>

namespace seedrl {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_combine(std::uint64_t h, std::uint64_t value) {
  return mix64(h ^ mix64(value + 0x632be59bd9b4e019ULL));
}

std::uint64_t derive_seed(std::uint64_t parent, Stream stream, std::uint64_t index) {
  return hash_combine(hash_combine(mix64(parent), static_cast<std::uint64_t>(stream)), index);
}

Rng make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

namespace {

std::uint64_t counter_bits(std::uint64_t key, std::initializer_list<std::uint64_t> coords) {
  std::uint64_t h = mix64(key);
  for (auto c : coords) h = hash_combine(h, c);
  return h;
}

// Maps 53 random bits to the open interval (0, 1).
double open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

double counter_uniform(std::uint64_t key, std::initializer_list<std::uint64_t> coords) {
  return open_unit(counter_bits(key, coords));
}

double counter_exponential(std::uint64_t key, std::initializer_list<std::uint64_t> coords) {
  return -std::log(counter_uniform(key, coords));
}

double counter_normal(std::uint64_t key, std::initializer_list<std::uint64_t> coords) {
  // Box-Muller on two decorrelated draws from the same coordinate.
  const std::uint64_t base = counter_bits(key, coords);
  const double u1 = open_unit(mix64(base ^ 0x1ULL));
  const double u2 = open_unit(mix64(base ^ 0x2ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace seedrl
