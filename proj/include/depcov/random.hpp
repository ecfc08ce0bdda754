#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace depcov {

using Engine = std::mt19937_64;

// Independent stream for (seed, purpose, index). Every sample, replicate and
// replication draws from its own stream, so serial and parallel execution
// consume identical random numbers.
Engine stream(std::uint64_t seed, std::string_view purpose, std::uint64_t index);

std::uint64_t entropy_seed();

// Uniform random permutation of 0..n-1 (Fisher-Yates).
std::vector<std::size_t> random_permutation(std::size_t n, Engine& engine);

double standard_normal(Engine& engine);
double rademacher(Engine& engine);

}  // namespace depcov
