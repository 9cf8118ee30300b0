#pragma once

// Constructors for the metric families studied here, each paired with a
// closed-form Christoffel/curvature oracle.
//
// Coordinate orders (0-based position: name):
//   warped3d    0: x1, 1: x2, 2: t        g = t^2 e^{2 alpha(x)} (dx1^2 + dx2^2) + dt^2, t > 0
//   mbeta       0..3: x1..x4              g = x3^2 dx1^2 + (x3 + beta x4)^2 dx2^2 + dx3^2 + dx4^2
//   dunn        0..p-1: x1..xp, p..2p-1: y1..yp
//                                         g(dxi,dxj) = psi_ij(x), g(dxi,dyi) = 1
//   fiedler     0: x, 1..nu: u1..unu, nu+1: y
//                                         g(dx,dx) = -2 f(u), g(dx,dy) = 1, g(dua,dub) = Xi_ab
//   lorentz_mf  0: x, 1: xt, 2: y         g(dx,dx) = -2 f(y), g(dx,dxt) = 1, g(dy,dy) = 1

#include <random>
#include <string>
#include <variant>
#include <vector>

#include "skt/chart.hpp"

namespace skt {

struct Warped3dParams {
  std::string alpha = "0";  // over x1, x2
};

struct MBetaParams {
  double beta = 1.0;
};

struct DunnParams {
  int p = 1;
  std::vector<std::vector<std::string>> psi;  // p x p over x1..xp; empty entries mean 0
};

struct FiedlerParams {
  int nu = 1;
  Matrix xi;          // nu x nu, defaults to the identity when empty
  std::string f = "0";  // over u1..unu
};

struct LorentzMfParams {
  std::string f = "s_plus";  // preset name or an expression in y
};

using FamilyParams = std::variant<Warped3dParams, MBetaParams, DunnParams, FiedlerParams, LorentzMfParams>;

struct FamilySpec {
  FamilyParams params;

  /// "warped3d", "mbeta", "dunn", "fiedler" or "lorentz_mf".
  std::string id() const;
  std::size_t dimension() const;
};

struct FamilyInfo {
  std::string id;
  std::string coordinates;
  std::string metric;
};

std::vector<FamilyInfo> family_list();

/// Preset name -> f(y) source text.
const std::vector<std::pair<std::string, std::string>>& lorentz_presets();

/// Source text of f for a lorentz_mf spec (resolving preset names).
std::string resolve_lorentz_f(const std::string& f);

/// Throws CatalogError naming the violated hypothesis.
void validate(const FamilySpec& spec);

Chart build(const FamilySpec& spec);

/// Closed-form geometry from the family's tables: metric, inverse,
/// Christoffels of both kinds and the listed curvature components completed
/// by symmetry. Ricci and scalar are contractions of those components.
CurvatureData oracle_curvature(const FamilySpec& spec, std::span<const double> point);

double scalar_curvature_closed_form(const FamilySpec& spec, std::span<const double> point);

/// The surface e^{2 alpha} (dx1^2 + dx2^2) on its own.
Chart surface_chart(const std::string& alpha);
double surface_scalar_closed_form(const std::string& alpha, std::span<const double> point);

/// A random point of the family's domain in a moderate box.
std::vector<double> sample_domain_point(const FamilySpec& spec, std::mt19937_64& rng);

}  // namespace skt
