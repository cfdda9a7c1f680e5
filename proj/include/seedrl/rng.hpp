#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace seedrl {

using Rng = std::mt19937_64;

/// Independent purposes a replication seed fans out to. Strategies compared on the
/// same replication seed therefore share the true model, arrivals and noise streams.
enum class Stream : std::uint64_t {
  replication = 1,
  model = 2,
  arrivals = 3,
  agent_seed = 4,
  noise = 5,
  resample = 6,
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

std::uint64_t hash_combine(std::uint64_t h, std::uint64_t value);

/// Seed for substream `index` of purpose `stream` below `parent`.
std::uint64_t derive_seed(std::uint64_t parent, Stream stream, std::uint64_t index = 0);

Rng make_rng(std::uint64_t seed);

/// Counter-based variates: a pure function of (key, coordinates), so the i-th element
/// of a conceptually infinite i.i.d. stream can be regenerated on demand.
double counter_uniform(std::uint64_t key, std::initializer_list<std::uint64_t> coords);
double counter_exponential(std::uint64_t key, std::initializer_list<std::uint64_t> coords);
double counter_normal(std::uint64_t key, std::initializer_list<std::uint64_t> coords);

}  // namespace seedrl
