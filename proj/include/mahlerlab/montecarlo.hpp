#pragma once

#include <atomic>
#include <thread>

#include "mahlerlab/builders.hpp"
#include "mahlerlab/moments.hpp"

namespace mahlerlab {

/// Monte Carlo moment estimate with per-entry standard errors.  The sampler
/// is rejection from the bounding box when the acceptance rate allows,
/// otherwise hit-and-run from the interior point (burn-in 10 dim, thinning
/// dim); hit-and-run does not estimate the volume.
struct MCMoments {
  MomentData mean;
  double volume_error = 0.0;
  Vec barycenter_error;
  Mat second_moment_error;
  long samples = 0;
  std::uint64_t seed = 0;
  std::string sampler;
  double acceptance = 0.0;
  bool volume_known = false;
  bool acceptance_too_low = false;  // reported, not thrown
};

namespace detail {

// Work is split over a fixed number of logical streams so results do not
// depend on the actual thread count.
inline constexpr int kStreams = 8;
inline constexpr int kBatchesPerStream = 32;

struct BatchStats {
  std::vector<double> acc_rate;       // rejection only
  std::vector<Vec> mean_x;
  std::vector<Mat> mean_xx;
  std::vector<long> accepted;
};

template <class Fn>
inline void run_streams(int nstreams, Fn&& body) {
  int workers = std::min(nstreams, max_threads());
  if (workers <= 1) {
    for (int s = 0; s < nstreams; ++s) body(s);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (int s = next.fetch_add(1); s < nstreams; s = next.fetch_add(1)) body(s);
    });
  }
  for (auto& t : pool) t.join();
}

inline void pool_batches(const std::vector<BatchStats>& stats, int dim, MCMoments& out) {
  std::vector<Vec> bx;
  std::vector<Mat> bxx;
  for (const auto& s : stats)
    for (size_t b = 0; b < s.mean_x.size(); ++b) {
      if (s.accepted[b] <= 0) continue;
      bx.push_back(s.mean_x[b]);
      bxx.push_back(s.mean_xx[b]);
    }
  const double nb = static_cast<double>(bx.size());
  if (nb < 2) throw Error("mc_moments: too few non-empty batches");
  Vec mx = Vec::Zero(dim);
  Mat mxx = Mat::Zero(dim, dim);
  for (size_t b = 0; b < bx.size(); ++b) { mx += bx[b]; mxx += bxx[b]; }
  mx /= nb;
  mxx /= nb;
  Vec vx = Vec::Zero(dim);
  Mat vxx = Mat::Zero(dim, dim);
  for (size_t b = 0; b < bx.size(); ++b) {
    vx += (bx[b] - mx).cwiseAbs2();
    vxx += (bxx[b] - mxx).cwiseAbs2();
  }
  out.mean.barycenter = mx;
  out.mean.second_moment = mxx;
  out.mean.covariance = mxx - mx * mx.transpose();
  out.barycenter_error = (vx / (nb * (nb - 1.0))).cwiseSqrt();
  out.second_moment_error = (vxx / (nb * (nb - 1.0))).cwiseSqrt();
}

}  // namespace detail

inline double estimate_acceptance(const ConvexOracle& body, long pilot,
                                  std::uint64_t seed) {
  const int d = body.dim;
  const double r = body.outer_radius;
  Rng rng = make_stream(seed, 0xacce97);
  std::uniform_real_distribution<double> unif(-r, r);
  long hits = 0;
  Vec x(d);
  for (long i = 0; i < pilot; ++i) {
    for (int j = 0; j < d; ++j) x[j] = unif(rng);
    if (body.contains(x, 1e-9)) ++hits;
  }
  return static_cast<double>(hits) / pilot;
}

inline MCMoments mc_moments(const ConvexOracle& body, long samples, std::uint64_t seed) {
  if (samples < 1000) throw Error("mc_moments: need at least 10^3 samples");
  const int d = body.dim;
  const double r = body.outer_radius;
  MCMoments out;
  out.samples = samples;
  out.seed = seed;
  out.acceptance = estimate_acceptance(body, std::min<long>(samples, 20000), seed);
  const bool rejection = out.acceptance >= 1e-3;
  out.acceptance_too_low = !rejection;
  out.sampler = rejection ? "rejection" : "hit-and-run";

  std::vector<detail::BatchStats> stats(detail::kStreams);
  const long per_stream = (samples + detail::kStreams - 1) / detail::kStreams;
  const long per_batch = std::max<long>(1, per_stream / detail::kBatchesPerStream);

  if (rejection) {
    detail::run_streams(detail::kStreams, [&](int s) {
      Rng rng = make_stream(seed, 1000 + s);
      std::uniform_real_distribution<double> unif(-r, r);
      detail::BatchStats& bs = stats[s];
      Vec x(d);
      for (int b = 0; b < detail::kBatchesPerStream; ++b) {
        long acc = 0;
        Vec sx = Vec::Zero(d);
        Mat sxx = Mat::Zero(d, d);
        for (long i = 0; i < per_batch; ++i) {
          for (int j = 0; j < d; ++j) x[j] = unif(rng);
          if (!body.contains(x, 1e-9)) continue;
          ++acc;
          sx += x;
          sxx += x * x.transpose();
        }
        bs.acc_rate.push_back(static_cast<double>(acc) / per_batch);
        bs.accepted.push_back(acc);
        bs.mean_x.push_back(acc ? Vec(sx / acc) : Vec(Vec::Zero(d)));
        bs.mean_xx.push_back(acc ? Mat(sxx / acc) : Mat(Mat::Zero(d, d)));
      }
    });
    detail::pool_batches(stats, d, out);
    double box_vol = std::pow(2.0 * r, d);
    double macc = 0.0, vacc = 0.0;
    long nb = 0;
    for (const auto& s : stats)
      for (double a : s.acc_rate) { macc += a; ++nb; }
    macc /= nb;
    for (const auto& s : stats)
      for (double a : s.acc_rate) vacc += (a - macc) * (a - macc);
    out.mean.volume = macc * box_vol;
    out.volume_error = box_vol * std::sqrt(vacc / (nb * (nb - 1.0)));
    out.volume_known = true;
    out.acceptance = macc;
    return out;
  }

  // hit-and-run: independent chains per stream
  const int burn = 10 * d;
  const int thin = d;
  detail::run_streams(detail::kStreams, [&](int s) {
    Rng rng = make_stream(seed, 2000 + s);
    detail::BatchStats& bs = stats[s];
    Vec p = body.interior_point;
    auto chord_step = [&](Vec& pos) {
      Vec u = random_direction(d, rng);
      double hi = body.outer_radius + pos.norm() + 1.0;
      auto inside = [&](double t) { return body.contains(pos + t * u, 1e-9); };
      double tp = bisect_boundary(inside, hi, 40);
      double tm = -bisect_boundary([&](double t) { return inside(-t); }, hi, 40);
      std::uniform_real_distribution<double> unif(tm, tp);
      pos += unif(rng) * u;
    };
    for (int i = 0; i < burn; ++i) chord_step(p);
    for (int b = 0; b < detail::kBatchesPerStream; ++b) {
      long count = 0;
      Vec sx = Vec::Zero(d);
      Mat sxx = Mat::Zero(d, d);
      for (long i = 0; i < per_batch; ++i) {
        for (int t = 0; t < thin; ++t) chord_step(p);
        ++count;
        sx += p;
        sxx += p * p.transpose();
      }
      bs.accepted.push_back(count);
      bs.mean_x.push_back(Vec(sx / count));
      bs.mean_xx.push_back(Mat(sxx / count));
    }
  });
  detail::pool_batches(stats, d, out);
  out.mean.volume = std::numeric_limits<double>::quiet_NaN();
  out.volume_error = std::numeric_limits<double>::quiet_NaN();
  out.volume_known = false;
  return out;
}

/// Weighted pooling of two independent estimates of the same body.
inline MCMoments pool_estimates(const MCMoments& a, const MCMoments& b) {
  MCMoments out = a;
  double wa = static_cast<double>(a.samples), wb = static_cast<double>(b.samples);
  double w = wa + wb;
  out.samples = a.samples + b.samples;
  out.mean.barycenter = (wa * a.mean.barycenter + wb * b.mean.barycenter) / w;
  out.mean.second_moment = (wa * a.mean.second_moment + wb * b.mean.second_moment) / w;
  out.mean.covariance =
      out.mean.second_moment - out.mean.barycenter * out.mean.barycenter.transpose();
  if (a.volume_known && b.volume_known)
    out.mean.volume = (wa * a.mean.volume + wb * b.mean.volume) / w;
  out.barycenter_error = ((wa * wa * a.barycenter_error.cwiseAbs2() +
                           wb * wb * b.barycenter_error.cwiseAbs2()) /
                          (w * w))
                             .cwiseSqrt();
  out.second_moment_error = ((wa * wa * a.second_moment_error.cwiseAbs2() +
                              wb * wb * b.second_moment_error.cwiseAbs2()) /
                             (w * w))
                                .cwiseSqrt();
  return out;
}

}  // namespace mahlerlab
