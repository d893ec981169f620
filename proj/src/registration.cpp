#include "sdfpose/registration.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/SVD>

#include "sdfpose/kdtree.h"
#include "sdfpose/metrics.h"

namespace sdfpose {

SimilarityTransform SimilarityMatrix::to_transform() const {
  return {s, rotation_params_from_matrix(r), t};
}

SimilarityMatrix SimilarityMatrix::from_transform(const SimilarityTransform& g) {
  return {g.s, rotation_matrix(g.rot), g.t};
}

SimilarityMatrix umeyama(const std::vector<Vec3>& src, const std::vector<Vec3>& dst) {
  if (src.size() != dst.size()) throw std::invalid_argument("umeyama: point counts differ");
  if (src.size() < 3) throw std::invalid_argument("umeyama: need at least 3 pairs");
  const double n = static_cast<double>(src.size());
  Vec3 mu_s = Vec3::Zero(), mu_d = Vec3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    mu_s += src[i];
    mu_d += dst[i];
  }
  mu_s /= n;
  mu_d /= n;
  double var_s = 0.0;
  Mat3 cov = Mat3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Vec3 a = src[i] - mu_s;
    var_s += a.squaredNorm();
    cov += (dst[i] - mu_d) * a.transpose();
  }
  var_s /= n;
  cov /= n;
  if (!(var_s > 0.0)) throw std::invalid_argument("umeyama: source points coincide");

  Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 d = svd.singularValues();
  if (!(d[1] > 1e-12 * std::max(d[0], 1e-300)))
    throw std::invalid_argument("umeyama: degenerate configuration (collinear points)");
  Vec3 sign = Vec3::Ones();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) sign[2] = -1.0;

  SimilarityMatrix out;
  out.r = svd.matrixU() * sign.asDiagonal() * svd.matrixV().transpose();
  out.s = d.dot(sign) / var_s;
  out.t = mu_d - out.s * out.r * mu_s;
  return out;
}

SimilarityMatrix umeyama(const std::vector<Vec3>& src, const std::vector<Vec3>& dst,
                         const Correspondences& pairs) {
  std::vector<Vec3> a, b;
  a.reserve(pairs.size());
  b.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= src.size() ||
        static_cast<std::size_t>(j) >= dst.size())
      throw std::invalid_argument("umeyama: correspondence index out of range");
    a.push_back(src[static_cast<std::size_t>(i)]);
    b.push_back(dst[static_cast<std::size_t>(j)]);
  }
  return umeyama(a, b);
}

Assignment hungarian(const Eigen::MatrixXd& cost) {
  const int rows = static_cast<int>(cost.rows()), cols = static_cast<int>(cost.cols());
  if (rows == 0 || cols == 0) throw std::invalid_argument("hungarian: empty cost matrix");
  if (!cost.allFinite()) throw std::invalid_argument("hungarian: non-finite cost");

  const int n = std::max(rows, cols);
  const double pad = cost.maxCoeff() + 1.0;
  auto c = [&](int i, int j) { return (i < rows && j < cols) ? cost(i, j) : pad; };

  // Shortest augmenting paths with row/column potentials; 1-based internally.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment out;
  std::vector<int> col_of_row(n, -1);
  for (int j = 1; j <= n; ++j) col_of_row[p[j] - 1] = j - 1;
  for (int i = 0; i < rows; ++i) {
    const int j = col_of_row[i];
    if (j < cols) {
      out.pairs.emplace_back(i, j);
      out.cost += cost(i, j);
    }
  }
  return out;
}

SimilarityTransform coarse_init(const SurfacePointSet& test, const SurfacePointSet& match,
                                const Vec3& axis, double step_degrees) {
  if (test.empty() || match.empty()) throw std::invalid_argument("coarse_init: empty point set");
  if (!(axis.norm() > 0.0)) throw std::invalid_argument("coarse_init: zero axis");
  if (!(step_degrees > 0.0)) throw std::invalid_argument("coarse_init: step must be positive");
  const BoundingSphere bt = bounding_sphere(test.points);
  const BoundingSphere bm = bounding_sphere(match.points);
  if (!(bm.radius > 0.0)) throw std::invalid_argument("coarse_init: match set has zero radius");

  const auto angles = spherical_from_axis(axis);
  const KdTree tree(test.points);
  const auto steps = static_cast<int>(std::ceil(360.0 / step_degrees - 1e-9));

  SimilarityTransform best;
  double best_score = std::numeric_limits<double>::infinity();
  for (int k = 0; k < steps; ++k) {
    SimilarityTransform g;
    g.s = bt.radius / bm.radius;
    g.rot = {angles[0], angles[1], wrap_angle(k * step_degrees * kPi / 180.0)};
    const Mat3 r = rotation_matrix(g.rot);
    g.t = bt.center - g.s * (r * bm.center);
    double worst = 0.0;
    for (const auto& p : match.points) {
      worst = std::max(worst, tree.nearest(g.s * (r * p) + g.t).distance);
      if (worst >= best_score) break;
    }
    if (worst < best_score) {
      best_score = worst;
      best = g;
    }
  }
  return best;
}

std::vector<Vec3> subsample(const std::vector<Vec3>& points, std::size_t n, std::uint64_t seed) {
  if (points.size() <= n) return points;
  std::vector<Vec3> out;
  out.reserve(n);
  if (n == 0) return out;
  // Farthest-point sampling from a seeded start.
  std::mt19937_64 rng(seed);
  std::size_t next = std::uniform_int_distribution<std::size_t>(0, points.size() - 1)(rng);
  std::vector<double> dist(points.size(), std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < n; ++k) {
    const Vec3 c = points[next];
    out.push_back(c);
    std::size_t far = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      dist[i] = std::min(dist[i], (points[i] - c).squaredNorm());
      if (dist[i] > dist[far]) far = i;
    }
    next = far;
  }
  return out;
}

IcpResult assignment_icp(const SurfacePointSet& src, const SurfacePointSet& dst,
                         const SimilarityMatrix& init, const IcpConfig& cfg) {
  if (src.empty() || dst.empty()) throw std::invalid_argument("assignment_icp: empty point set");
  if (cfg.iterations < 1) throw std::invalid_argument("assignment_icp: iterations must be >= 1");
  const std::size_t n = std::min({src.size(), dst.size(), cfg.max_points});
  const std::vector<Vec3> a = subsample(src.points, n, cfg.seed);
  const std::vector<Vec3> b = subsample(dst.points, n, cfg.seed + 1);

  IcpResult out;
  out.transform = init;
  Correspondences previous;
  Eigen::MatrixXd cost(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (int it = 0; it < cfg.iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 y = out.transform.apply(a[i]);
      for (std::size_t j = 0; j < n; ++j)
        cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (y - b[j]).squaredNorm();
    }
    const Assignment assignment = hungarian(cost);
    out.objective.push_back(assignment.cost);
    out.iterations = it + 1;
    if (assignment.pairs == previous) break;
    try {
      out.transform = umeyama(a, b, assignment.pairs);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("assignment_icp: iteration " + std::to_string(it) + ": " + e.what());
    }
    previous = assignment.pairs;
  }
  return out;
}

}  // namespace sdfpose
