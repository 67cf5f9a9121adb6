#include "ocecal/taskgen.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <utility>

#include <fmt/format.h>

#include "ocecal/error.hpp"
#include "ocecal/random.hpp"

namespace ocecal {

void validate(const GeneratorParams& p) {
  if (p.m == 0) throw InvalidArgument("generator: m must be >= 1");
  if (!(p.rho > 0.0 && p.rho < 1.0)) {
    throw InvalidArgument(fmt::format("generator: rho must lie in (0,1), got {}", p.rho));
  }
  const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(p.difficulty_a) || !positive(p.difficulty_b)) {
    throw InvalidArgument("generator: difficulty shapes must be > 0");
  }
  if (!positive(p.sharpness)) throw InvalidArgument("generator: sharpness must be > 0");
}

void validate(const Dataset& data, bool require_truth) {
  if (data.m == 0) throw InvalidExample("dataset has m = 0");
  for (std::size_t i = 0; i < data.examples.size(); ++i) {
    const auto& ex = data.examples[i];
    if (ex.scores.size() != data.m) {
      throw InvalidExample(
          fmt::format("example {} has {} scores, expected m = {}", i, ex.scores.size(), data.m));
    }
    try {
      validate(ex, require_truth);
    } catch (const InvalidExample& e) {
      throw InvalidExample(fmt::format("example {}: {}", i, e.what()));
    }
  }
}

Dataset concatenate(const Dataset& a, const Dataset& b) {
  if (a.m != b.m) {
    throw InvalidArgument(fmt::format("cannot concatenate datasets with m = {} and m = {}", a.m, b.m));
  }
  Dataset out;
  out.m = a.m;
  out.examples = a.examples;
  out.examples.insert(out.examples.end(), b.examples.begin(), b.examples.end());
  if (a.seed == b.seed) out.seed = a.seed;
  if (a.params == b.params) out.params = a.params;
  return out;
}

double quantize_score(double score) {
  const auto text = fmt::format("{:.9g}", score);
  return std::strtod(text.c_str(), nullptr);
}

Dataset generate_dataset(const GeneratorParams& params, std::size_t count, std::uint64_t seed) {
  validate(params);
  if (count == 0) throw InvalidArgument("generator: count must be >= 1");

  Dataset data;
  data.m = params.m;
  data.seed = seed;
  data.params = params;
  data.examples.reserve(count);

  const double k = params.sharpness;
  std::vector<bool> positive(params.m);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(mix_seed(seed, i));
    const double d = rng.beta(params.difficulty_a, params.difficulty_b);

    bool any = false;
    for (std::size_t attempt = 0; !any; ++attempt) {
      if (attempt == kMaxPositiveAttempts) {
        throw InvalidArgument(fmt::format(
            "generator: no positive element after {} attempts (m = {}, rho = {})",
            kMaxPositiveAttempts, params.m, params.rho));
      }
      for (std::size_t j = 0; j < params.m; ++j) {
        positive[j] = rng.uniform() < params.rho;
        any = any || positive[j];
      }
    }

    ScoredExample ex;
    ex.scores.resize(params.m);
    for (std::size_t j = 0; j < params.m; ++j) {
      const double s = positive[j] ? rng.beta(1.0 + k * (1.0 - d), 1.0 + k * d)
                                   : rng.beta(1.5, 1.0 + k * (1.0 - d));
      ex.scores[j] = quantize_score(s);
      if (positive[j]) ex.truth.push_back(static_cast<std::uint32_t>(j));
    }
    data.examples.push_back(std::move(ex));
  }
  return data;
}

SplitIndices split_indices(std::size_t n, const SplitSpec& split, std::uint64_t seed) {
  if (split.total() > n) {
    throw InvalidArgument(fmt::format("split sizes {}+{}+{} exceed the {} available examples",
                                      split.opt_size, split.cal_size, split.test_size, n));
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i-- > 1;) {
    std::swap(perm[i], perm[rng.uniform_index(i + 1)]);
  }
  SplitIndices out;
  auto it = perm.begin();
  const auto take = [&it](std::size_t k) {
    std::vector<std::size_t> part(it, it + static_cast<std::ptrdiff_t>(k));
    it += static_cast<std::ptrdiff_t>(k);
    return part;
  };
  out.opt = take(split.opt_size);
  out.cal = take(split.cal_size);
  out.test = take(split.test_size);
  return out;
}

Dataset subset(const Dataset& data, std::span<const std::size_t> indices) {
  Dataset out;
  out.m = data.m;
  out.examples.reserve(indices.size());
  for (auto i : indices) out.examples.push_back(data.examples.at(i));
  return out;
}

DatasetSplits split_dataset(const Dataset& data, const SplitSpec& split, std::uint64_t seed) {
  const auto idx = split_indices(data.size(), split, seed);
  return {subset(data, idx.opt), subset(data, idx.cal), subset(data, idx.test)};
}

}  // namespace ocecal
