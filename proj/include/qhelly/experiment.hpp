#pragma once

#include "qhelly/bounds.hpp"
#include "qhelly/generators.hpp"
#include "qhelly/selection.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace qhelly {

struct ExperimentRow {
  int d = 0;
  int m = 0;
  std::uint64_t seed = 0;
  int g_size = 0;
  double volume_f = std::numeric_limits<double>::quiet_NaN();
  double volume_g = std::numeric_limits<double>::quiet_NaN();
  double ratio = std::numeric_limits<double>::quiet_NaN();
  double bound = std::numeric_limits<double>::quiet_NaN();
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double volume_s1 = std::numeric_limits<double>::quiet_NaN();
  double min_dr_slack = std::numeric_limits<double>::quiet_NaN();
  double oracle_ratio = std::numeric_limits<double>::quiet_NaN();  // only with ExperimentConfig::oracle
  double wall_ms = 0.0;
  std::string status;  // ok, check_failed, or the error kind
};

struct ExperimentConfig {
  std::vector<int> dims;
  std::vector<int> facet_counts;  // m values; entries below d + 1 are skipped
  std::uint64_t seed = 0;
  int trials = 1;                 // seeds seed, seed + 1, ...
  bool warp = false;
  bool oracle = false;            // exhaustive optimum for d <= 3, m <= 12
  Selector selector = Selector::DvoretzkyRogers;
  Tolerances tolerances;
  double check_scale = 10.0;
  unsigned threads = 0;           // 0 = hardware concurrency
};

// min_i <v_i, z_i> - sqrt((d - i + 1) / d); NaN when the basis carries no such guarantee.
inline double min_dr_slack(const Certificate& cert) {
  if (cert.selector != "dr") return std::numeric_limits<double>::quiet_NaN();
  const int d = cert.dim();
  double slack = std::numeric_limits<double>::infinity();
  for (int i = 0; i < d; ++i) {
    const auto k = static_cast<std::size_t>(i);
    slack = std::min(slack, cert.basis.v[k].dot(cert.basis.z[k]) - std::sqrt(double(d - i) / d));
  }
  return slack;
}

inline ExperimentRow run_trial(int d, int m, std::uint64_t seed, const ExperimentConfig& cfg) {
  ExperimentRow row;
  row.d = d;
  row.m = m;
  row.seed = seed;
  row.bound = explicit_bound(d);
  const auto start = std::chrono::steady_clock::now();
  try {
    auto doc = gen_tangent_random(d, m, seed);
    if (cfg.warp) doc = gen_affine_warp(doc, seed);
    const auto cert = select(doc.to_polytope(cfg.tolerances), {cfg.selector, seed, cfg.tolerances});
    row.g_size = static_cast<int>(cert.subfamily.size());
    row.volume_f = cert.volume_f;
    row.volume_g = cert.volume_g;
    row.ratio = cert.ratio;
    row.lambda = cert.lambda;
    row.volume_s1 = cert.s1.volume;
    row.min_dr_slack = min_dr_slack(cert);
    if (cfg.oracle && d <= 3 && m <= kMaxOracleFacets) {
      const auto best = oracle_min_subfamily(cert.instance.normalized, 2 * d, cfg.tolerances);
      if (best.found()) row.oracle_ratio = best.volume / cert.volume_f;
    }
    row.status = check_certificate(cert, cfg.check_scale).pass() ? "ok" : "check_failed";
  } catch (const Error& e) {
    row.status = std::string(to_string(e.kind()));
  }
  row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

// Rows come back ordered by (d, m, seed) whatever order the workers finish in.
inline std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg) {
  struct Job {
    int d, m;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  auto dims = cfg.dims;
  auto ms = cfg.facet_counts;
  std::sort(dims.begin(), dims.end());
  std::sort(ms.begin(), ms.end());
  for (int d : dims)
    for (int m : ms) {
      if (m < d + 1) continue;
      for (int t = 0; t < cfg.trials; ++t) jobs.push_back({d, m, cfg.seed + static_cast<std::uint64_t>(t)});
    }

  std::vector<ExperimentRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) rows[i] = run_trial(jobs[i].d, jobs[i].m, jobs[i].seed, cfg);
  };
  unsigned n = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

inline void write_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
  out << "d,m,seed,g_size,volume_f,volume_g,ratio,explicit_bound,lambda,volume_s1,min_dr_slack,oracle_ratio,wall_ms,status\r\n";
  auto num = [](double x) {
    if (std::isnan(x)) return std::string();
    std::ostringstream s;
    s << std::setprecision(17) << x;
    return s.str();
  };
  for (const auto& r : rows) {
    out << r.d << ',' << r.m << ',' << r.seed << ',' << r.g_size << ',' << num(r.volume_f) << ',' << num(r.volume_g)
        << ',' << num(r.ratio) << ',' << num(r.bound) << ',' << num(r.lambda) << ',' << num(r.volume_s1) << ','
        << num(r.min_dr_slack) << ',' << num(r.oracle_ratio) << ',' << num(r.wall_ms) << ',' << r.status << "\r\n";
  }
}

}  // namespace qhelly
