#pragma once

#include "qhelly/config.hpp"
#include "qhelly/john.hpp"

#include <limits>
#include <string>
#include <vector>

namespace qhelly {

// Orthonormal z_1..z_d and contact points v_1..v_d with v_i in span{z_1..z_i}
// and <v_i, z_i> >= sqrt((d-i+1)/d). `sources` index the decomposition.
struct DRBasis {
  std::vector<Vector> z;
  std::vector<Vector> v;
  std::vector<int> sources;
};

// Index maximizing <w_i, T w_i>; smallest index wins ties.
inline std::size_t trace_pick(const Matrix& t, const ContactDecomposition& dec) {
  std::size_t best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dec.size(); ++i) {
    const double val = dec.points[i].dot(t * dec.points[i]);
    if (val > best_val) {
      best_val = val;
      best = i;
    }
  }
  return best;
}

inline DRBasis dr_select(const ContactDecomposition& dec) {
  const int d = dec.dim();
  if (dec.size() == 0) throw Error(ErrorKind::NumericalBreakdown, "empty decomposition");
  DRBasis basis;
  basis.z.push_back(dec.points[0] / dec.points[0].norm());
  basis.v.push_back(dec.points[0]);
  basis.sources.push_back(0);
  Matrix span = Matrix::Zero(d, d);
  for (int k = 1; k < d; ++k) {
    span.col(k - 1) = basis.z.back();
    const auto zk = span.leftCols(k);
    const Matrix proj = Matrix::Identity(d, d) - zk * zk.transpose();
    const std::size_t pick = trace_pick(proj, dec);
    const Vector& w = dec.points[pick];
    Vector tw = proj * w;
    tw -= zk * (zk.transpose() * tw);  // second pass against cancellation
    const double need = static_cast<double>(d - k) / d;
    if (tw.squaredNorm() < need - 1e-6)
      throw Error(ErrorKind::NumericalBreakdown,
                  "|T w|^2 = " + std::to_string(tw.squaredNorm()) + " below (d-k)/d = " + std::to_string(need));
    basis.z.push_back(tw / tw.norm());
    basis.v.push_back(w);
    basis.sources.push_back(static_cast<int>(pick));
  }
  return basis;
}

}  // namespace qhelly
