#include "scoutnd/sampling.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "scoutnd/sobol_table.hpp"

namespace scoutnd {

namespace {
constexpr int kBits = 32;
constexpr double kInv32 = 0x1.0p-32;
}  // namespace

void SampleBatch::validate() const {
  if (u_design.empty()) throw ValueError("batch: need at least one sample");
  if (!u_noise.empty() && u_noise.size() != u_design.size()) {
    throw DimensionError("batch: design and noise row counts differ");
  }
  for (const auto& rows : {&u_design, &u_noise}) {
    for (const Vec& r : *rows) {
      for (double u : r) {
        if (!(u >= 0.0 && u < 1.0)) throw ValueError("batch: entry outside [0,1)");
      }
    }
  }
}

std::vector<Vec> draw_pseudo(int dim_total, int count, std::uint64_t seed) {
  if (dim_total < 1 || count < 1) {
    throw ValueError("draw_pseudo: dim_total and count must be >= 1");
  }
  const std::uint64_t base = derive_seed(seed, 0x70736575646fULL);  // "pseudo"
  const std::uint64_t gamma = 0x9e3779b97f4a7c15ULL;
  std::vector<Vec> rows(count, Vec(dim_total));
  for (int i = 0; i < count; ++i) {
    std::uint64_t row_base =
        base + gamma * (static_cast<std::uint64_t>(i) * dim_total);
    for (int j = 0; j < dim_total; ++j) {
      rows[i][j] = u64_to_unit(mix64(row_base + gamma * j));
    }
  }
  return rows;
}

SobolSequence::SobolSequence(int dim, SobolScramble scramble, std::uint64_t seed)
    : dim_(dim) {
  if (dim < 1) throw ValueError("sobol: dimension must be >= 1");
  if (dim > detail::kSobolMaxDim) {
    throw ValueError("sobol: dimension " + std::to_string(dim) +
                     " exceeds direction-number table (max " +
                     std::to_string(detail::kSobolMaxDim) + ")");
  }
  dirs_.assign(dim, std::vector<std::uint32_t>(kBits));
  state_.assign(dim, 0);
  shift_.assign(dim, 0);

  for (int j = 0; j < dim; ++j) {
    auto& v = dirs_[j];
    if (j == 0) {
      for (int k = 1; k <= kBits; ++k) v[k - 1] = 1u << (kBits - k);
    } else {
      const auto& row = detail::kSobolDirections[j - 1];
      const int s = static_cast<int>(row[0]);
      const std::uint32_t a = row[1];
      for (int k = 1; k <= s; ++k) v[k - 1] = row[1 + k] << (kBits - k);
      for (int k = s + 1; k <= kBits; ++k) {
        std::uint32_t w = v[k - s - 1] ^ (v[k - s - 1] >> s);
        for (int i = 1; i < s; ++i) {
          if ((a >> (s - 1 - i)) & 1u) w ^= v[k - i - 1];
        }
        v[k - 1] = w;
      }
    }
  }

  if (scramble == SobolScramble::kOwen) {
    // Matousek linear scramble: random lower-triangular bit matrix with unit
    // diagonal applied to each direction number, plus a digital shift.
    for (int j = 0; j < dim; ++j) {
      std::uint64_t key = derive_seed(seed, 0x6c6d73ULL, j);
      std::uint32_t masks[kBits];
      for (int k = 1; k <= kBits; ++k) {
        std::uint32_t rnd =
            static_cast<std::uint32_t>(mix64(key + 0x9e3779b97f4a7c15ULL * k));
        std::uint32_t diag = 1u << (kBits - k);
        std::uint32_t above = k >= 2 ? ~((1u << (kBits - k + 1)) - 1u) : 0u;
        masks[k - 1] = (rnd & above) | diag;
      }
      for (int c = 0; c < kBits; ++c) {
        std::uint32_t y = 0;
        for (int k = 1; k <= kBits; ++k) {
          y |= static_cast<std::uint32_t>(std::popcount(dirs_[j][c] & masks[k - 1]) & 1)
               << (kBits - k);
        }
        dirs_[j][c] = y;
      }
      shift_[j] = static_cast<std::uint32_t>(
          mix64(derive_seed(seed, 0x736866ULL, j)));
    }
  }
}

Vec SobolSequence::next() {
  Vec out(dim_);
  for (int j = 0; j < dim_; ++j) {
    out[j] = static_cast<double>(state_[j] ^ shift_[j]) * kInv32;
  }
  // Antonov-Saleev: flip the direction number indexed by the lowest zero bit.
  int c = std::countr_one(index_);
  if (c < kBits) {
    for (int j = 0; j < dim_; ++j) state_[j] ^= dirs_[j][c];
  }
  ++index_;
  return out;
}

std::vector<Vec> SobolSequence::take(int count) {
  std::vector<Vec> rows;
  rows.reserve(count);
  for (int i = 0; i < count; ++i) rows.push_back(next());
  return rows;
}

int SobolSequence::max_dim() { return detail::kSobolMaxDim; }

std::vector<Vec> draw_sobol(int dim_total, int count, std::uint64_t seed,
                            SobolScramble scramble) {
  if (count < 1) throw ValueError("draw_sobol: count must be >= 1");
  SobolSequence seq(dim_total, scramble, seed);
  return seq.take(count);
}

SampleBatch make_batch(SampleScheme scheme, int count, int design_dim,
                       int noise_dim, std::uint64_t seed) {
  if (design_dim < 1 || noise_dim < 0) {
    throw ValueError("make_batch: bad dimensions");
  }
  int dim_total = design_dim + noise_dim;
  std::vector<Vec> rows = scheme == SampleScheme::kQmc
                              ? draw_sobol(dim_total, count, seed)
                              : draw_pseudo(dim_total, count, seed);
  SampleBatch batch;
  batch.scheme = scheme;
  batch.seed = seed;
  batch.u_design.assign(count, Vec(design_dim));
  batch.u_noise.assign(count, Vec(noise_dim));
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < design_dim; ++j) batch.u_design[i][j] = rows[i][j];
    for (int j = 0; j < noise_dim; ++j) batch.u_noise[i][j] = rows[i][design_dim + j];
  }
  return batch;
}

double star_discrepancy_proxy(const std::vector<Vec>& points,
                              const std::vector<Vec>& boxes) {
  if (points.empty()) throw ValueError("star_discrepancy_proxy: no points");
  double worst = 0.0;
  for (const Vec& corner : boxes) {
    double volume = 1.0;
    for (double c : corner) volume *= c;
    std::size_t inside = 0;
    for (const Vec& p : points) {
      bool in = p.size() == corner.size();
      for (size_t j = 0; in && j < corner.size(); ++j) in = p[j] < corner[j];
      inside += in ? 1 : 0;
    }
    double frac = static_cast<double>(inside) / static_cast<double>(points.size());
    worst = std::max(worst, std::abs(frac - volume));
  }
  return worst;
}

std::string batch_to_csv(const SampleBatch& batch) {
  std::ostringstream out;
  int d = batch.u_design.empty() ? 0 : static_cast<int>(batch.u_design[0].size());
  int nd = batch.u_noise.empty() ? 0 : static_cast<int>(batch.u_noise[0].size());
  out << "scheme,seed,S,dim\n"
      << (batch.scheme == SampleScheme::kQmc ? "QMC" : "PSEUDO") << ','
      << batch.seed << ',' << batch.size() << ',' << d + nd << '\n';
  for (int i = 0; i < batch.size(); ++i) {
    for (int j = 0; j < d; ++j) {
      if (j) out << ',';
      out << format_double(batch.u_design[i][j]);
    }
    for (int j = 0; j < nd; ++j) {
      if (d + j) out << ',';
      out << format_double(batch.u_noise[i][j]);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace scoutnd
