#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

namespace mahlerlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Default tolerances used across the geometric kernels.  Vertex dedupe is
// relative to the body's outer radius so exact identities stay testable at
// 1e-6 and below.
inline constexpr double kDedupeTol = 1e-9;
inline constexpr double kFeasTol = 1e-9;
inline constexpr double kGaugeTol = 1e-10;

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct OriginNotInterior : Error { using Error::Error; };
struct Unbounded : Error { using Error::Error; };
struct Degenerate : Error { using Error::Error; };
struct NotProper : Error { using Error::Error; };
struct ToleranceNotReached : Error { using Error::Error; };
struct SingularCovariance : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct OutsideDualInterior : Error { using Error::Error; };
struct NotInteriorPrimal : Error { using Error::Error; };
struct OutsideCone : Error { using Error::Error; };
struct PointNotInterior : Error { using Error::Error; };
struct BarycenterNotComputable : Error { using Error::Error; };
struct EmptyIntersection : Error { using Error::Error; };
struct EmptySlab : Error { using Error::Error; };
struct CertificateFailed : Error { using Error::Error; };
struct FixtureMissing : Error { using Error::Error; };

using Rng = std::mt19937_64;

/// Seeded sub-stream: stable derivation so parallel workers stay reproducible
/// regardless of how many threads actually run.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return Rng(z ^ (z >> 31));
}

inline int max_threads() {
  if (const char* env = std::getenv("MAHLERLAB_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

inline Vec random_direction(int dim, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec u(dim);
  do {
    for (int i = 0; i < dim; ++i) u[i] = gauss(rng);
  } while (u.norm() < 1e-12);
  return u / u.norm();
}

inline double log_sum_exp(const Vec& logs) {
  double m = logs.maxCoeff();
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (int i = 0; i < logs.size(); ++i) s += std::exp(logs[i] - m);
  return m + std::log(s);
}

}  // namespace mahlerlab
