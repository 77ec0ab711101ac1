#pragma once

#include "qhelly/dr.hpp"
#include "qhelly/john.hpp"
#include "qhelly/random.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace qhelly {

struct RandomSimplex {
  std::vector<int> indices;      // sampled decomposition indices
  std::vector<Vector> vertices;  // o followed by the sampled points
  double volume = 0.0;           // zero for repeated or dependent picks
};

// d independent picks, w_i with probability c_i / d, joined with the origin.
inline RandomSimplex pivovarov_sample(const ContactDecomposition& dec, std::uint64_t seed) {
  const int d = dec.dim();
  Rng rng = make_rng(seed);
  std::discrete_distribution<int> pick(dec.weights.begin(), dec.weights.end());
  RandomSimplex s;
  s.vertices.push_back(Vector::Zero(d));
  Matrix m(d, d);
  for (int k = 0; k < d; ++k) {
    const int i = pick(rng);
    s.indices.push_back(i);
    s.vertices.push_back(dec.points[static_cast<std::size_t>(i)]);
    m.col(k) = dec.points[static_cast<std::size_t>(i)];
  }
  s.volume = std::abs(m.determinant()) / factorial(d);
  return s;
}

struct PivovarovMoments {
  long long trials = 0;
  double mean_volume = 0.0;
  double mean_volume_sq = 0.0;
  double se_mean_volume = 0.0;
  double se_mean_volume_sq = 0.0;
  double rms_volume = 0.0;     // sqrt(E[vol^2])
  double se_rms_volume = 0.0;  // delta-method propagation
};

// Monte Carlo moments of the random simplex volume; trial k uses sub-seed (seed, k).
inline PivovarovMoments pivovarov_moments(const ContactDecomposition& dec, long long trials, std::uint64_t seed) {
  PivovarovMoments r;
  r.trials = trials;
  double s1 = 0, s2 = 0, s4 = 0;
  for (long long k = 0; k < trials; ++k) {
    const double v = pivovarov_sample(dec, split_seed(seed, static_cast<std::uint64_t>(k))).volume;
    s1 += v;
    s2 += v * v;
    s4 += v * v * v * v;
  }
  const double n = static_cast<double>(trials);
  r.mean_volume = s1 / n;
  r.mean_volume_sq = s2 / n;
  if (trials > 1) {
    const double var1 = std::max(0.0, (s2 - n * r.mean_volume * r.mean_volume) / (n - 1));
    const double var2 = std::max(0.0, (s4 - n * r.mean_volume_sq * r.mean_volume_sq) / (n - 1));
    r.se_mean_volume = std::sqrt(var1 / n);
    r.se_mean_volume_sq = std::sqrt(var2 / n);
  }
  r.rms_volume = std::sqrt(r.mean_volume_sq);
  r.se_rms_volume = r.rms_volume > 0 ? r.se_mean_volume_sq / (2.0 * r.rms_volume) : 0.0;
  return r;
}

struct ExactMoments {
  double mean_volume = 0.0;
  double mean_volume_sq = 0.0;
};

// Exact E[vol] and E[vol^2] by summing over all n^d ordered picks; throws CapExceeded past 1e7 terms.
inline ExactMoments pivovarov_exact_moments(const ContactDecomposition& dec) {
  const int d = dec.dim();
  const auto n = dec.size();
  if (std::pow(static_cast<double>(n), d) > 1e7) throw Error(ErrorKind::CapExceeded, "too many picks to enumerate");
  double total = 0.0;
  for (double c : dec.weights) total += c;
  ExactMoments r;
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  Matrix m(d, d);
  for (;;) {
    double p = 1.0;
    for (int k = 0; k < d; ++k) {
      const auto i = idx[static_cast<std::size_t>(k)];
      p *= dec.weights[i] / total;
      m.col(k) = dec.points[i];
    }
    const double v = std::abs(m.determinant()) / factorial(d);
    r.mean_volume += p * v;
    r.mean_volume_sq += p * v * v;
    int k = 0;
    while (k < d && ++idx[static_cast<std::size_t>(k)] == n) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == d) break;
  }
  return r;
}

// Random replacement for dr_select: resamples until the simplex is non-degenerate,
// then orthonormalizes the picks so v_i lies in span{z_1..z_i} with <v_i, z_i> > 0.
inline DRBasis pivovarov_basis(const ContactDecomposition& dec, std::uint64_t seed) {
  const int d = dec.dim();
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    const auto s = pivovarov_sample(dec, split_seed(seed, attempt));
    if (s.volume * factorial(d) <= 1e-9) continue;
    DRBasis b;
    for (int k = 0; k < d; ++k) {
      const Vector& v = s.vertices[static_cast<std::size_t>(k + 1)];
      Vector r = v;
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& z : b.z) r -= z.dot(r) * z;
      b.z.push_back(r / r.norm());
      b.v.push_back(v);
      b.sources.push_back(s.indices[static_cast<std::size_t>(k)]);
    }
    return b;
  }
  throw Error(ErrorKind::NumericalBreakdown, "random selector produced only degenerate simplices");
}

}  // namespace qhelly
