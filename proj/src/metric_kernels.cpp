#include "hyperembed/metric_kernels.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hyperembed/errors.hpp"

namespace hyperembed {
namespace {

void require_same_dim(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DomainError("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()));
  }
}

// 1 - |x|^2, floored so that boundary points (which projection never
// produces) do not divide by zero.
double ball_gap(double sq_norm) {
  return std::max(1.0 - sq_norm, std::numeric_limits<double>::min());
}

}  // namespace

std::string_view to_string(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::poincare:
      return "poincare";
    case ScoreKind::euclidean:
      return "euclidean";
    case ScoreKind::translational:
      return "translational";
  }
  return "unknown";
}

ScoreKind parse_score_kind(std::string_view name) {
  if (name == "poincare") return ScoreKind::poincare;
  if (name == "euclidean") return ScoreKind::euclidean;
  if (name == "translational") return ScoreKind::translational;
  throw InputError("unknown score kind '" + std::string(name) +
                   "' (expected poincare, euclidean or translational)");
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

void require_finite(std::span<const double> a, std::string_view what) {
  for (double x : a) {
    if (!std::isfinite(x)) throw DomainError("non-finite coordinate in " + std::string(what));
  }
}

DistanceGradientParts distance_parts(std::span<const double> theta,
                                     std::span<const double> x) {
  DistanceGradientParts p;
  p.alpha = ball_gap(squared_norm(theta));
  p.beta = ball_gap(squared_norm(x));
  p.gamma = 1.0 + 2.0 * squared_distance(theta, x) / (p.alpha * p.beta);
  return p;
}

double poincare_distance(std::span<const double> u, std::span<const double> v) {
  require_same_dim(u, v);
  require_finite(u, "poincare_distance");
  require_finite(v, "poincare_distance");
  const double alpha = ball_gap(squared_norm(u));
  const double beta = ball_gap(squared_norm(v));
  // arcosh(1 + z) = log1p(z + sqrt(z (z + 2))) keeps full precision for
  // nearby points where gamma - 1 is tiny.
  const double z = std::max(0.0, 2.0 * squared_distance(u, v) / (alpha * beta));
  return std::log1p(z + std::sqrt(z * (z + 2.0)));
}

void poincare_distance_grad(std::span<const double> theta, std::span<const double> x,
                            std::span<double> out) {
  require_same_dim(theta, x);
  if (out.size() != theta.size()) throw DomainError("gradient buffer has wrong dimension");
  require_finite(theta, "poincare_distance_grad");
  require_finite(x, "poincare_distance_grad");

  const double theta_sq = squared_norm(theta);
  const double x_sq = squared_norm(x);
  const double alpha = ball_gap(theta_sq);
  const double beta = ball_gap(x_sq);
  const double z = 2.0 * squared_distance(theta, x) / (alpha * beta);  // gamma - 1
  // gamma^2 - 1 = (gamma - 1)(gamma + 1)
  const double gamma_sq_minus_one = z * (z + 2.0);
  if (!(gamma_sq_minus_one > 0.0)) {
    throw SingularGradientError("distance gradient is undefined at coincident points");
  }

  const double scale = 4.0 / (beta * std::sqrt(gamma_sq_minus_one));
  const double theta_coef = (x_sq - 2.0 * dot(theta, x) + 1.0) / (alpha * alpha);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    out[i] = scale * (theta_coef * theta[i] - x[i] / alpha);
  }
}

Vec poincare_distance_grad(std::span<const double> theta, std::span<const double> x) {
  Vec out(theta.size());
  poincare_distance_grad(theta, x, out);
  return out;
}

double riemannian_scale(std::span<const double> theta) {
  const double gap = 1.0 - squared_norm(theta);
  return gap * gap / 4.0;
}

Vec riemannian_rescale(std::span<const double> grad_e, std::span<const double> theta) {
  require_same_dim(grad_e, theta);
  require_finite(grad_e, "riemannian_rescale");
  require_finite(theta, "riemannian_rescale");
  const double s = riemannian_scale(theta);
  Vec out(grad_e.begin(), grad_e.end());
  for (double& g : out) g *= s;
  return out;
}

void project_in_place(std::span<double> theta, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("projection epsilon must lie in (0, 1)");
  require_finite(theta, "project_in_place");
  const double max_norm = 1.0 - epsilon;
  const double norm = std::sqrt(squared_norm(theta));
  if (norm < max_norm) return;

  // Shrink the factor one ulp at a time until the rounded norm is inside the
  // closed (1 - epsilon) ball; a second projection then sees factor 1 exactly.
  const Vec original(theta.begin(), theta.end());
  double factor = max_norm / norm;
  for (;;) {
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = original[i] * factor;
    if (std::sqrt(squared_norm(theta)) <= max_norm) return;
    factor = std::nextafter(factor, 0.0);
  }
}

Vec project_to_ball(std::span<const double> theta, double epsilon) {
  Vec out(theta.begin(), theta.end());
  project_in_place(out, epsilon);
  return out;
}

double euclidean_score(std::span<const double> u, std::span<const double> v) {
  return squared_distance(u, v);
}

void euclidean_score_grad(std::span<const double> u, std::span<const double> v,
                          std::span<double> out) {
  require_same_dim(u, v);
  if (out.size() != u.size()) throw DomainError("gradient buffer has wrong dimension");
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = 2.0 * (u[i] - v[i]);
}

double translational_score(std::span<const double> u, std::span<const double> v,
                           std::span<const double> r) {
  require_same_dim(u, v);
  require_same_dim(u, r);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double t = u[i] - v[i] + r[i];
    s += t * t;
  }
  return s;
}

void translational_score_grad(std::span<const double> u, std::span<const double> v,
                              std::span<const double> r, std::span<double> out) {
  require_same_dim(u, v);
  require_same_dim(u, r);
  if (out.size() != u.size()) throw DomainError("gradient buffer has wrong dimension");
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = 2.0 * (u[i] - v[i] + r[i]);
}

}  // namespace hyperembed
