#include <sys/utsname.h>

#include <algorithm>
#include <chrono>
#include <thread>

#include "mshap/random.hpp"
#include "mshap/simulation.hpp"

namespace mshap {
namespace {

using Clock = std::chrono::steady_clock;

// Seconds per call of `fn`: one discarded warm-up, then the median over
// `repetitions` batches. Each batch repeats the call until it spans at
// least `min_batch` seconds so that fast calls stay above timer resolution.
template <typename Fn>
double median_seconds(Fn&& fn, int repetitions, double min_batch) {
  fn();
  std::vector<double> samples;
  for (int r = 0; r < std::max(repetitions, 5); ++r) {
    long calls = 0;
    const auto start = Clock::now();
    double elapsed = 0.0;
    do {
      fn();
      ++calls;
      elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    } while (elapsed < min_batch);
    samples.push_back(elapsed / static_cast<double>(calls));
  }
  std::nth_element(samples.begin(), samples.begin() + samples.size() / 2, samples.end());
  return samples[samples.size() / 2];
}

// Frequency-like and severity-like parts over p unit-box covariates.
Model bench_part_f(Index p) {
  return Model(p, [](std::span<const double> x) {
    double acc = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) acc += 0.5 * x[j] / static_cast<double>(j + 1);
    return acc;
  });
}

Model bench_part_g(Index p) {
  return Model(p, [](std::span<const double> x) {
    double acc = 3.0;
    for (std::size_t j = 0; j < x.size(); ++j) acc += x[j] * x[j] + x[j] * x[(j + 1) % x.size()];
    return acc;
  });
}

}  // namespace

std::string_view to_string(BenchMethod method) {
  switch (method) {
    case BenchMethod::Composition: return "composition";
    case BenchMethod::ExactEnumeration: return "exact_enumeration";
    case BenchMethod::PermutationSampling: return "permutation_sampling";
  }
  return "unknown";
}

std::vector<BenchRecord> bench_scaling(const BenchConfig& config) {
  if (config.background_size < 1) throw InvalidInputError("background_size must be positive");
  std::vector<BenchRecord> records;
  for (Index p : config.p_values) {
    if (p < 1) throw InvalidInputError("bench p values must be positive");
    for (Index n : config.n_values) {
      if (n < 1) throw InvalidInputError("bench n values must be positive");
      const std::uint64_t seed =
          derive_seed(config.seed, static_cast<std::uint64_t>(p) * 1000003u +
                                       static_cast<std::uint64_t>(n));
      const CovariateSpec box = CovariateSpec::symmetric_unit(p);
      const Matrix instances = gen_covariates(box, n, derive_seed(seed, 0));
      const BackgroundSet background(gen_covariates(box, config.background_size, derive_seed(seed, 1)));
      const Model f = bench_part_f(p);
      const Model g = bench_part_g(p);
      const Model h(p, [&f, &g](std::span<const double> x) { return f(x) * g(x); });

      const auto record = [&](BenchMethod method, auto&& fn) {
        BenchRecord rec;
        rec.p = p;
        rec.n = n;
        rec.method = method;
        try {
          rec.wall_seconds = median_seconds(fn, config.repetitions, config.min_batch_seconds);
          rec.per_observation_seconds = rec.wall_seconds / static_cast<double>(n);
        } catch (const EnumerationLimitError& e) {
          rec.wall_seconds = 0.0;
          rec.per_observation_seconds = 0.0;
          rec.error = e.what();
        }
        records.push_back(std::move(rec));
      };

      // Part explanations are inputs to composition, not part of its cost.
      // Above the enumeration limit they come from the sampler instead.
      ShapExplanation part_f, part_g;
      ShapleyOptions exact;
      exact.enumeration_limit = config.enumeration_limit;
      if (p <= config.enumeration_limit) {
        part_f = explain_exact(f, instances, background, exact);
        part_g = explain_exact(g, instances, background, exact);
      } else {
        part_f = explain_sampling(f, instances, background, config.sampling_permutations, seed);
        part_g = explain_sampling(g, instances, background, config.sampling_permutations, seed);
      }
      const double mu_h = baseline(h, background);

      record(BenchMethod::Composition, [&] {
        const MshapExplanation z = combine(part_f, part_g, mu_h, AlphaMethod::AbsoluteWeights);
        return z.values(0, 0);
      });
      record(BenchMethod::ExactEnumeration, [&] {
        return explain_exact(h, instances, background, exact).values(0, 0);
      });
      record(BenchMethod::PermutationSampling, [&] {
        return explain_sampling(h, instances, background, config.sampling_permutations, seed)
            .values(0, 0);
      });
    }
  }
  return records;
}

std::string machine_descriptor() {
  std::string out;
  utsname info{};
  if (uname(&info) == 0) {
    out += std::string(info.sysname) + " " + info.release + " " + info.machine;
  } else {
    out += "unknown-os";
  }
  out += "; hardware_threads=" + std::to_string(std::thread::hardware_concurrency());
#if defined(__clang__)
  out += "; clang " __clang_version__;
#elif defined(__GNUC__)
  out += "; gcc " __VERSION__;
#endif
  out += "; rng=";
  out += Rng::kName;
  return out;
}

}  // namespace mshap
