#include "sdfpose/metrics.h"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "sdfpose/kdtree.h"

namespace sdfpose {

BoundingSphere bounding_sphere(const std::vector<Vec3>& points) {
  if (points.empty()) throw std::invalid_argument("bounding_sphere of an empty point set");
  BoundingSphere out;
  for (const auto& p : points) out.center += p;
  out.center /= static_cast<double>(points.size());
  for (const auto& p : points) out.radius = std::max(out.radius, (p - out.center).norm());
  return out;
}

namespace {

void check_sets(const SurfacePointSet& a, const SurfacePointSet& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("metric on an empty point set");
}

double fraction_within(const std::vector<Vec3>& from, const KdTree& to, double eps) {
  std::size_t hits = 0;
  for (const auto& p : from)
    if (to.nearest(p).distance < eps) ++hits;
  return static_cast<double>(hits) / static_cast<double>(from.size());
}

double fraction_within_brute(const std::vector<Vec3>& from, const std::vector<Vec3>& to,
                             double eps) {
  std::size_t hits = 0;
  for (const auto& p : from)
    if (brute_force_nearest(to, p).distance < eps) ++hits;
  return static_cast<double>(hits) / static_cast<double>(from.size());
}

double mean_nn(const std::vector<Vec3>& from, const KdTree& to) {
  double sum = 0.0;
  for (const auto& p : from) sum += to.nearest(p).distance;
  return sum / static_cast<double>(from.size());
}

}  // namespace

PrecisionRecall precision_recall(const SurfacePointSet& est, const SurfacePointSet& gt,
                                 double eps) {
  check_sets(est, gt);
  if (!(eps > 0.0)) throw std::invalid_argument("precision_recall: eps must be positive");
  const KdTree gt_tree(gt.points);
  const KdTree est_tree(est.points);
  return {fraction_within(est.points, gt_tree, eps), fraction_within(gt.points, est_tree, eps)};
}

PrecisionRecall precision_recall_brute_force(const SurfacePointSet& est,
                                             const SurfacePointSet& gt, double eps) {
  check_sets(est, gt);
  if (!(eps > 0.0)) throw std::invalid_argument("precision_recall: eps must be positive");
  return {fraction_within_brute(est.points, gt.points, eps),
          fraction_within_brute(gt.points, est.points, eps)};
}

double harmonic_f(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

FScoreReport f_score(const SurfacePointSet& est, const SurfacePointSet& gt, double eps_fraction,
                     std::optional<double> eps) {
  check_sets(est, gt);
  FScoreReport out;
  out.epsilon = eps ? *eps : eps_fraction * bounding_sphere(gt.points).radius;
  if (!(out.epsilon > 0.0)) throw std::invalid_argument("f_score: reference set has zero radius");
  const PrecisionRecall pr = precision_recall(est, gt, out.epsilon);
  out.precision = pr.precision;
  out.recall = pr.recall;
  out.f = harmonic_f(pr.precision, pr.recall);
  out.n_est = est.size();
  out.n_gt = gt.size();
  return out;
}

FScoreReport f_score(const SurfacePointSet& est, const SurfacePointSet& est_target,
                     const SurfacePointSet& gt, const SurfacePointSet& gt_target,
                     double eps_fraction, std::optional<double> eps) {
  check_sets(est, gt_target);
  check_sets(gt, est_target);
  FScoreReport out;
  out.epsilon = eps ? *eps : eps_fraction * bounding_sphere(gt.points).radius;
  if (!(out.epsilon > 0.0)) throw std::invalid_argument("f_score: reference set has zero radius");
  out.precision = fraction_within(est.points, KdTree(gt_target.points), out.epsilon);
  out.recall = fraction_within(gt.points, KdTree(est_target.points), out.epsilon);
  out.f = harmonic_f(out.precision, out.recall);
  out.n_est = est.size();
  out.n_gt = gt.size();
  return out;
}

FScoreReport f_score(const TriangleMesh& est, const TriangleMesh& gt, std::size_t n,
                     double eps_fraction, std::uint64_t seed, std::optional<double> eps,
                     std::size_t densify) {
  const SurfacePointSet a = sample_surface(est, n, seed);
  const SurfacePointSet b = sample_surface(gt, n, seed + 1);
  if (densify <= 1) return f_score(a, b, eps_fraction, eps);
  const SurfacePointSet a_dense = sample_surface(est, n * densify, seed + 2);
  const SurfacePointSet b_dense = sample_surface(gt, n * densify, seed + 3);
  return f_score(a, a_dense, b, b_dense, eps_fraction, eps);
}

double rotation_error(double theta_hat, double theta) {
  const double d = std::fmod(std::abs(theta_hat - theta), 2.0 * kPi);
  return std::min(d, 2.0 * kPi - d);
}

double chamfer(const SurfacePointSet& a, const SurfacePointSet& b) {
  check_sets(a, b);
  const KdTree ta(a.points), tb(b.points);
  return mean_nn(a.points, tb) + mean_nn(b.points, ta);
}

double chamfer_brute_force(const SurfacePointSet& a, const SurfacePointSet& b) {
  check_sets(a, b);
  double ab = 0.0, ba = 0.0;
  for (const auto& p : a.points) ab += brute_force_nearest(b.points, p).distance;
  for (const auto& p : b.points) ba += brute_force_nearest(a.points, p).distance;
  return ab / a.size() + ba / b.size();
}

std::string metrics_csv(const std::vector<MetricRow>& rows) {
  std::string out = "case_id,precision,recall,f,epsilon,rotation_error\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f,%.9g,%.9g\n", r.report.precision,
                  r.report.recall, r.report.f, r.report.epsilon, r.rotation_error);
    out += r.case_id + buf;
  }
  return out;
}

}  // namespace sdfpose
