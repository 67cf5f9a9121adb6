#pragma once

// Synthetic segmentation-style data, dataset splits and the JSONL dataset
// format.
//
// File layout (UTF-8, one JSON object per line):
//
//   {"format":"oce-rcps-dataset","version":1,"m":100,"count":2,"seed":7,"params":{...}}
//   {"scores":[0.912345678,0.0123,...],"truth":[0,4,17]}
//   {"scores":[...],"truth":[...]}
//
// "seed" and "params" may be null for data that did not come from the
// generator. Scores are written with 9 significant digits.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "ocecal/risk.hpp"

namespace ocecal {

struct GeneratorParams {
  std::size_t m = 100;        ///< elements per example
  double rho = 0.3;           ///< probability an element is positive
  double difficulty_a = 2.0;  ///< Beta shape of the per-example difficulty d
  double difficulty_b = 2.0;
  double sharpness = 8.0;     ///< kappa

  friend bool operator==(const GeneratorParams&, const GeneratorParams&) = default;
};

void validate(const GeneratorParams& params);

struct Dataset {
  std::size_t m = 0;
  std::vector<ScoredExample> examples;
  std::optional<std::uint64_t> seed;
  std::optional<GeneratorParams> params;

  std::size_t size() const noexcept { return examples.size(); }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Every example valid with exactly `m` scores; `require_truth` additionally
/// rejects empty truth sets (needed by the FNR loss).
void validate(const Dataset& data, bool require_truth = false);

/// Joins two datasets with matching m. Provenance fields are dropped unless
/// both sides agree.
Dataset concatenate(const Dataset& a, const Dataset& b);

/// Rounds a score to the 9 significant digits used by the file format.
double quantize_score(double score);

/// Draws `count` examples. Example i uses its own stream
/// Rng(mix_seed(seed, i)) and consumes it in this order:
///
///   1. d ~ Beta(difficulty_a, difficulty_b)
///   2. positives: one uniform per element, positive when u < rho; redrawn
///      as a block until at least one element is positive (10,000 attempts)
///   3. scores in element order: positives ~ Beta(1 + k(1-d), 1 + k d),
///      negatives ~ Beta(1.5, 1 + k(1-d)), each passed through quantize_score
///
/// The output is therefore independent of how examples are scheduled.
Dataset generate_dataset(const GeneratorParams& params, std::size_t count, std::uint64_t seed);

inline constexpr std::size_t kMaxPositiveAttempts = 10'000;

struct SplitSpec {
  std::size_t opt_size = 200;
  std::size_t cal_size = 800;
  std::size_t test_size = 781;

  std::size_t total() const noexcept { return opt_size + cal_size + test_size; }
  friend bool operator==(const SplitSpec&, const SplitSpec&) = default;
};

struct SplitIndices {
  std::vector<std::size_t> opt;
  std::vector<std::size_t> cal;
  std::vector<std::size_t> test;
};

/// Fisher-Yates permutation of 0..n-1 (for i = n-1 down to 1, swap i with
/// uniform_index(i + 1)) from Rng(seed); the first opt_size entries form the
/// optimization split, the next cal_size the calibration split, the next
/// test_size the test split.
SplitIndices split_indices(std::size_t n, const SplitSpec& split, std::uint64_t seed);

struct DatasetSplits {
  Dataset opt;
  Dataset cal;
  Dataset test;
};

DatasetSplits split_dataset(const Dataset& data, const SplitSpec& split, std::uint64_t seed);

/// Gathers `indices` of `data` into a new dataset with the same m.
Dataset subset(const Dataset& data, std::span<const std::size_t> indices);

struct ReadOptions {
  bool require_truth = false;
};

/// Throws DataError naming the offending line.
Dataset read_dataset(std::istream& in, const ReadOptions& options = {});
Dataset read_dataset(const std::filesystem::path& path, const ReadOptions& options = {});

void write_dataset(std::ostream& out, const Dataset& data);
void write_dataset(const std::filesystem::path& path, const Dataset& data);

}  // namespace ocecal
