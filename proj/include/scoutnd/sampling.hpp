#pragma once

#include <cstdint>

#include "scoutnd/common.hpp"

namespace scoutnd {

enum class SampleScheme { kPseudo, kQmc };

// One batch of unit-hypercube rows over the joint (design, noise) space.
// Design dimensions come first, then noise dimensions.
struct SampleBatch {
  std::vector<Vec> u_design;  // S x d
  std::vector<Vec> u_noise;   // S x noise_dim
  SampleScheme scheme = SampleScheme::kPseudo;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(u_design.size()); }
  void validate() const;
};

// Counter-based i.i.d. uniform [0,1) rows: entry (i, j) is a pure function of
// (seed, i, j), so identical seeds reproduce identical matrices and rows can
// be generated in any order.
std::vector<Vec> draw_pseudo(int dim_total, int count, std::uint64_t seed);

enum class SobolScramble { kNone, kOwen };

// Sobol sequence from the Joe-Kuo direction numbers (dimensions <= 80),
// gray-code order, 32-bit resolution. Scrambling is Matousek linear
// scrambling plus a random digital shift, keyed by the seed; pass kNone to
// get the raw table-verifiable sequence (first point is the origin).
class SobolSequence {
 public:
  SobolSequence(int dim, SobolScramble scramble, std::uint64_t seed);

  Vec next();
  std::vector<Vec> take(int count);
  int dim() const { return dim_; }

  static int max_dim();

 private:
  int dim_;
  std::uint64_t index_ = 0;
  std::vector<std::uint32_t> state_;               // current integer point
  std::vector<std::uint32_t> shift_;               // per-dim digital shift
  std::vector<std::vector<std::uint32_t>> dirs_;   // per-dim direction numbers
};

std::vector<Vec> draw_sobol(int dim_total, int count, std::uint64_t seed,
                            SobolScramble scramble = SobolScramble::kOwen);

// Joint batch over design-then-noise dimensions under one scheme.
SampleBatch make_batch(SampleScheme scheme, int count, int design_dim,
                       int noise_dim, std::uint64_t seed);

// Test-support uniformity measure: max over the given anchored boxes
// [0, corner) of |empirical fraction - volume|.
double star_discrepancy_proxy(const std::vector<Vec>& points,
                              const std::vector<Vec>& boxes);

// CSV dump for cross-language verification of batches.
std::string batch_to_csv(const SampleBatch& batch);

}  // namespace scoutnd
