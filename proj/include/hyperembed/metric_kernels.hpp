#pragma once

// Distance kernels for the Poincare ball and the two flat baselines.
//
// Every function here is pure and works on double-precision spans; the
// (1 - |x|^2) terms lose too much precision in single precision once points
// sit within 1e-5 of the boundary.

#include <span>
#include <string_view>
#include <vector>

namespace hyperembed {

using Vec = std::vector<double>;

inline constexpr double kDefaultEpsilon = 1e-5;

/// Which dissimilarity an embedding is trained and evaluated with.
enum class ScoreKind { poincare, euclidean, translational };

std::string_view to_string(ScoreKind kind);
/// Accepts "poincare", "euclidean" and "translational"; throws InputError otherwise.
ScoreKind parse_score_kind(std::string_view name);

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);
double squared_distance(std::span<const double> a, std::span<const double> b);

/// Throws DomainError if any coordinate is NaN or infinite.
void require_finite(std::span<const double> a, std::string_view what);

/// Intermediates of the distance gradient for the pair (theta, x).
struct DistanceGradientParts {
  double alpha = 1.0;  // 1 - |theta|^2
  double beta = 1.0;   // 1 - |x|^2
  double gamma = 1.0;  // 1 + 2 |theta - x|^2 / (alpha beta), the arcosh argument
};

DistanceGradientParts distance_parts(std::span<const double> theta, std::span<const double> x);

/// Hyperbolic distance arcosh(1 + 2|u-v|^2 / ((1-|u|^2)(1-|v|^2))).
double poincare_distance(std::span<const double> u, std::span<const double> v);

/// Euclidean partial derivative of d(theta, x) with respect to theta, written
/// into `out`. The derivative with respect to x is poincare_distance_grad(x, theta).
/// Throws SingularGradientError when theta and x coincide.
void poincare_distance_grad(std::span<const double> theta, std::span<const double> x,
                            std::span<double> out);
Vec poincare_distance_grad(std::span<const double> theta, std::span<const double> x);

/// Inverse metric factor (1 - |theta|^2)^2 / 4.
double riemannian_scale(std::span<const double> theta);
Vec riemannian_rescale(std::span<const double> grad_e, std::span<const double> theta);

/// Pulls theta back to norm 1 - epsilon when |theta| >= 1 - epsilon; leaves
/// interior points untouched. The result always satisfies |theta| <= 1 - epsilon
/// in floating point, so the operation is idempotent.
void project_in_place(std::span<double> theta, double epsilon = kDefaultEpsilon);
Vec project_to_ball(std::span<const double> theta, double epsilon = kDefaultEpsilon);

/// |u - v|^2.
double euclidean_score(std::span<const double> u, std::span<const double> v);
/// Gradient of euclidean_score with respect to u: 2(u - v).
void euclidean_score_grad(std::span<const double> u, std::span<const double> v,
                          std::span<double> out);

/// |u - v + r|^2 with the learned global translation r.
double translational_score(std::span<const double> u, std::span<const double> v,
                           std::span<const double> r);
/// Gradient of translational_score with respect to u (and r): 2(u - v + r).
/// The gradient with respect to v is its negation.
void translational_score_grad(std::span<const double> u, std::span<const double> v,
                              std::span<const double> r, std::span<double> out);

}  // namespace hyperembed
