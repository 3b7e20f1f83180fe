#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace fluxladder {

// FNV-1a 64-bit; stable config fingerprint embedded in outputs.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

// Deterministic float formatting ("%.12g") so outputs are byte-reproducible.
std::string fmt_double(double v);

// Substream seed derivation: mixes a base seed with a stream index through
// splitmix64 so parallel consumers get decorrelated, reproducible streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Uniform double in [0,1) from 53 high bits of the engine output; avoids the
// implementation-defined std::uniform_real_distribution.
double uniform01(std::mt19937_64& rng);

// Index drawn from an (unnormalized) nonnegative weight vector by inverse
// CDF; deterministic across platforms for a fixed engine state.
std::size_t sample_index(std::span<const double> cumulative, double total,
                         std::mt19937_64& rng);

std::vector<double> cumulative_sum(std::span<const double> weights);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace fluxladder
