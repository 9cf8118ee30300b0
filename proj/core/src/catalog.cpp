#include "skt/catalog.hpp"

#include <cmath>

#include "skt/error.hpp"

namespace skt {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Expression parse_param(const std::string& text, std::size_t dim, const VariableTable& names, const std::string& what) {
  try {
    return parse(text.empty() ? "0" : text, dim, names);
  } catch (const ParseError& e) {
    throw CatalogError(what + ": " + e.what());
  }
}

VariableTable table_of(const std::vector<std::string>& names) {
  VariableTable t;
  for (std::size_t i = 0; i < names.size(); ++i) t[names[i]] = static_cast<int>(i);
  return t;
}

std::vector<std::string> dunn_names(int p) {
  std::vector<std::string> n;
  for (int i = 1; i <= p; ++i) n.push_back("x" + std::to_string(i));
  for (int i = 1; i <= p; ++i) n.push_back("y" + std::to_string(i));
  return n;
}

std::vector<std::string> fiedler_names(int nu) {
  std::vector<std::string> n{"x"};
  for (int a = 1; a <= nu; ++a) n.push_back("u" + std::to_string(a));
  n.push_back("y");
  return n;
}

const std::vector<std::string> kLorentzNames{"x", "xt", "y"};
const std::vector<std::string> kWarpedNames{"x1", "x2", "t"};

Expression surface_alpha(const std::string& alpha) {
  return parse_param(alpha, 2, VariableTable{{"x1", 0}, {"x2", 1}}, "alpha");
}

std::vector<std::vector<Expression>> zero_components(std::size_t n) {
  return std::vector<std::vector<Expression>>(n, std::vector<Expression>(n, Expression::constant(n, 0.0)));
}

void set_sym(std::vector<std::vector<Expression>>& c, std::size_t i, std::size_t j, const Expression& e) {
  c[i][j] = e;
  c[j][i] = e;
}

// Parsed psi entries over the 2p Dunn coordinates.
std::vector<std::vector<Expression>> dunn_psi(const DunnParams& d) {
  const auto n = static_cast<std::size_t>(2 * d.p);
  const VariableTable names = table_of(dunn_names(d.p));
  std::vector<std::vector<Expression>> psi(d.p, std::vector<Expression>(d.p, Expression::constant(n, 0.0)));
  for (int i = 0; i < d.p; ++i) {
    for (int j = 0; j < d.p; ++j) {
      const std::string text =
          (static_cast<std::size_t>(i) < d.psi.size() && static_cast<std::size_t>(j) < d.psi[i].size()) ? d.psi[i][j]
                                                                                                           : "0";
      psi[i][j] = parse_param(text, n, names, "psi" + std::to_string(i + 1) + std::to_string(j + 1));
    }
  }
  return psi;
}

Matrix fiedler_xi(const FiedlerParams& f) {
  return f.xi.size() == 0 ? Matrix::Identity(f.nu, f.nu) : f.xi;
}

Expression fiedler_f(const FiedlerParams& f) {
  return parse_param(f.f, static_cast<std::size_t>(f.nu + 2), table_of(fiedler_names(f.nu)), "f");
}

Expression lorentz_f(const LorentzMfParams& l) {
  return parse_param(resolve_lorentz_f(l.f), 3, table_of(kLorentzNames), "f");
}

void require_domain(const FamilySpec& spec, std::span<const double> point) {
  if (point.size() != spec.dimension()) {
    throw ChartError(ChartError::Kind::BadInput, spec.id() + " point needs " + std::to_string(spec.dimension()) +
                                                     " coordinates");
  }
  std::visit(overloaded{
                 [&](const Warped3dParams&) {
                   if (!(point[2] > 0.0)) throw ChartError(ChartError::Kind::DomainViolation, "warped3d needs t > 0");
                 },
                 [&](const MBetaParams&) {
                   if (!(point[2] > 0.0 && point[3] > 0.0)) {
                     throw ChartError(ChartError::Kind::DomainViolation, "mbeta needs x3 > 0 and x4 > 0");
                   }
                 },
                 [](const auto&) {},
             },
             spec.params);
}

// Contracts a curvature tensor with an inverse metric into Ricci and scalar.
void contract(CurvatureData& d) {
  const auto n = static_cast<std::size_t>(d.metric.rows());
  d.ricci = Matrix::Zero(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      double v = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t l = 0; l < n; ++l) v += d.inverse_metric(i, l) * d.riemann(i, j, k, l);
      }
      d.ricci(j, k) = v;
    }
  }
  d.scalar = (d.inverse_metric.cwiseProduct(d.ricci)).sum();
}

CurvatureData empty_data(std::span<const double> point) {
  const std::size_t n = point.size();
  CurvatureData d;
  d.point = Eigen::Map<const Vector>(point.data(), static_cast<Eigen::Index>(n));
  d.metric = Matrix::Zero(n, n);
  d.inverse_metric = Matrix::Zero(n, n);
  d.gamma_first = Tensor3<double>(n);
  d.gamma_second = Tensor3<double>(n);
  d.riemann = Tensor4<double>(n);
  return d;
}

CurvatureData warped_oracle(const Warped3dParams& w, std::span<const double> p) {
  const Expression alpha = surface_alpha(w.alpha);
  const std::vector<double> x{p[0], p[1]};
  const Jet2<double> a = alpha.eval_jet2(x);
  const double a1 = a.grad[0], a2 = a.grad[1], a11 = a.hessian(0, 0), a22 = a.hessian(1, 1);
  const double t = p[2], E = std::exp(2.0 * a.value), t2E = t * t * E;
  CurvatureData d = empty_data(p);
  d.metric.diagonal() << t2E, t2E, 1.0;
  d.inverse_metric.diagonal() << 1.0 / t2E, 1.0 / t2E, 1.0;
  auto& G = d.gamma_first;
  G(0, 0, 0) = a1 * t2E;
  G(0, 0, 1) = -a2 * t2E;
  G(0, 0, 2) = -t * E;
  G(0, 1, 0) = G(1, 0, 0) = a2 * t2E;
  G(0, 1, 1) = G(1, 0, 1) = a1 * t2E;
  G(0, 2, 0) = G(2, 0, 0) = t * E;
  G(1, 1, 0) = -a1 * t2E;
  G(1, 1, 1) = a2 * t2E;
  G(1, 1, 2) = -t * E;
  G(1, 2, 1) = G(2, 1, 1) = t * E;
  auto& S = d.gamma_second;
  S(0, 0, 0) = a1;
  S(1, 0, 0) = -a2;
  S(2, 0, 0) = -t * E;
  S(0, 0, 1) = S(0, 1, 0) = a2;
  S(1, 0, 1) = S(1, 1, 0) = a1;
  S(0, 0, 2) = S(0, 2, 0) = 1.0 / t;
  S(0, 1, 1) = -a1;
  S(1, 1, 1) = a2;
  S(2, 1, 1) = -t * E;
  S(1, 1, 2) = S(1, 2, 1) = 1.0 / t;
  d.riemann.set_with_symmetries(0, 1, 1, 0, -t2E * (a11 + a22 + E));
  contract(d);
  return d;
}

CurvatureData mbeta_oracle(const MBetaParams& m, std::span<const double> p) {
  const double b = m.beta, x3 = p[2], h = p[2] + m.beta * p[3];
  CurvatureData d = empty_data(p);
  d.metric.diagonal() << x3 * x3, h * h, 1.0, 1.0;
  d.inverse_metric.diagonal() << 1.0 / (x3 * x3), 1.0 / (h * h), 1.0, 1.0;
  auto& G = d.gamma_first;
  G(0, 0, 2) = -x3;
  G(0, 2, 0) = G(2, 0, 0) = x3;
  G(1, 1, 2) = -h;
  G(1, 2, 1) = G(2, 1, 1) = h;
  G(1, 1, 3) = -b * h;
  G(1, 3, 1) = G(3, 1, 1) = b * h;
  auto& S = d.gamma_second;
  S(2, 0, 0) = -x3;
  S(0, 0, 2) = S(0, 2, 0) = 1.0 / x3;
  S(2, 1, 1) = -h;
  S(3, 1, 1) = -b * h;
  S(1, 1, 2) = S(1, 2, 1) = 1.0 / h;
  S(1, 1, 3) = S(1, 3, 1) = b / h;
  d.riemann.set_with_symmetries(0, 1, 1, 0, -x3 * h);
  contract(d);
  return d;
}

CurvatureData dunn_oracle(const DunnParams& dp, std::span<const double> pt) {
  const auto psi = dunn_psi(dp);
  const std::size_t p = static_cast<std::size_t>(dp.p);
  std::vector<std::vector<Jet2<double>>> J(p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) J[i].push_back(psi[i][j].eval_jet2(pt));
  }
  // psi_{ij/k} and psi_{ij/kl}
  auto d1 = [&](std::size_t i, std::size_t j, std::size_t k) { return J[i][j].grad[k]; };
  auto d2 = [&](std::size_t i, std::size_t j, std::size_t k, std::size_t l) { return J[i][j].hessian(k, l); };
  CurvatureData d = empty_data(pt);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      d.metric(i, j) = J[i][j].value;
      d.inverse_metric(p + i, p + j) = -J[i][j].value;
    }
    d.metric(i, p + i) = d.metric(p + i, i) = 1.0;
    d.inverse_metric(i, p + i) = d.inverse_metric(p + i, i) = 1.0;
  }
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t k = 0; k < p; ++k) {
        const double v = 0.5 * (d1(i, k, j) + d1(j, k, i) - d1(i, j, k));
        d.gamma_first(i, j, k) = v;
        d.gamma_second(p + k, i, j) = v;
      }
    }
  }
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t k = 0; k < p; ++k) {
        for (std::size_t l = 0; l < p; ++l) {
          d.riemann(i, j, k, l) = -0.5 * (d2(i, l, j, k) + d2(j, k, i, l) - d2(i, k, j, l) - d2(j, l, i, k));
        }
      }
    }
  }
  contract(d);
  return d;
}

CurvatureData fiedler_oracle(const FiedlerParams& fp, std::span<const double> pt) {
  const std::size_t nu = static_cast<std::size_t>(fp.nu), y = nu + 1;
  const Matrix xi = fiedler_xi(fp);
  const Matrix xi_inv = xi.inverse();
  const Jet2<double> f = fiedler_f(fp).eval_jet2(pt);
  CurvatureData d = empty_data(pt);
  d.metric(0, 0) = -2.0 * f.value;
  d.metric(0, y) = d.metric(y, 0) = 1.0;
  d.metric.block(1, 1, nu, nu) = xi;
  d.inverse_metric(0, y) = d.inverse_metric(y, 0) = 1.0;
  d.inverse_metric(y, y) = 2.0 * f.value;
  d.inverse_metric.block(1, 1, nu, nu) = xi_inv;
  for (std::size_t a = 0; a < nu; ++a) {
    const double fa = f.grad[1 + a];
    d.gamma_first(0, 0, 1 + a) = fa;
    d.gamma_first(1 + a, 0, 0) = d.gamma_first(0, 1 + a, 0) = -fa;
    d.gamma_second(y, 0, 1 + a) = d.gamma_second(y, 1 + a, 0) = -fa;
    double s = 0.0;
    for (std::size_t b = 0; b < nu; ++b) s += xi_inv(a, b) * f.grad[1 + b];
    d.gamma_second(1 + a, 0, 0) = s;
  }
  for (std::size_t a = 0; a < nu; ++a) {
    for (std::size_t b = 0; b < nu; ++b) {
      const double fab = f.hessian(1 + a, 1 + b);
      d.riemann(0, 1 + a, 1 + b, 0) = fab;
      d.riemann(1 + a, 0, 1 + b, 0) = -fab;
      d.riemann(0, 1 + a, 0, 1 + b) = -fab;
      d.riemann(1 + a, 0, 0, 1 + b) = fab;
    }
  }
  contract(d);
  return d;
}

CurvatureData lorentz_oracle(const LorentzMfParams& lp, std::span<const double> pt) {
  const Jet2<double> f = lorentz_f(lp).eval_jet2(pt);
  const double f1 = f.grad[2], f2 = f.hessian(2, 2);
  CurvatureData d = empty_data(pt);
  d.metric(0, 0) = -2.0 * f.value;
  d.metric(0, 1) = d.metric(1, 0) = 1.0;
  d.metric(2, 2) = 1.0;
  d.inverse_metric(0, 1) = d.inverse_metric(1, 0) = 1.0;
  d.inverse_metric(1, 1) = 2.0 * f.value;
  d.inverse_metric(2, 2) = 1.0;
  d.gamma_first(0, 0, 2) = f1;
  d.gamma_first(2, 0, 0) = d.gamma_first(0, 2, 0) = -f1;
  d.gamma_second(2, 0, 0) = f1;
  d.gamma_second(1, 0, 2) = d.gamma_second(1, 2, 0) = -f1;
  d.riemann.set_with_symmetries(0, 2, 2, 0, f2);
  contract(d);
  return d;
}

}  // namespace

std::string FamilySpec::id() const {
  return std::visit(overloaded{
                        [](const Warped3dParams&) { return std::string("warped3d"); },
                        [](const MBetaParams&) { return std::string("mbeta"); },
                        [](const DunnParams&) { return std::string("dunn"); },
                        [](const FiedlerParams&) { return std::string("fiedler"); },
                        [](const LorentzMfParams&) { return std::string("lorentz_mf"); },
                    },
                    params);
}

std::size_t FamilySpec::dimension() const {
  return std::visit(overloaded{
                        [](const Warped3dParams&) -> std::size_t { return 3; },
                        [](const MBetaParams&) -> std::size_t { return 4; },
                        [](const DunnParams& d) -> std::size_t { return static_cast<std::size_t>(2 * d.p); },
                        [](const FiedlerParams& f) -> std::size_t { return static_cast<std::size_t>(f.nu + 2); },
                        [](const LorentzMfParams&) -> std::size_t { return 3; },
                    },
                    params);
}

std::vector<FamilyInfo> family_list() {
  return {
      {"warped3d", "x1, x2, t", "dt^2 + t^2 e^{2 alpha(x1,x2)} (dx1^2 + dx2^2), t > 0"},
      {"mbeta", "x1, x2, x3, x4", "x3^2 dx1^2 + (x3 + beta x4)^2 dx2^2 + dx3^2 + dx4^2, x3 > 0, x4 > 0, beta > 0"},
      {"dunn", "x1..xp, y1..yp", "g(dxi,dxj) = psi_ij(x), g(dxi,dyi) = 1"},
      {"fiedler", "x, u1..unu, y", "g(dx,dx) = -2 f(u), g(dx,dy) = 1, g(dua,dub) = Xi_ab"},
      {"lorentz_mf", "x, xt, y", "g(dx,dx) = -2 f(y), g(dx,dxt) = 1, g(dy,dy) = 1"},
  };
}

const std::vector<std::pair<std::string, std::string>>& lorentz_presets() {
  static const std::vector<std::pair<std::string, std::string>> presets{
      {"s_plus", "0.5*y^2"},
      {"s_minus", "-0.5*y^2"},
      {"n1m", "-exp(-y)"},
      {"n2m", "-exp(-y)+y"},
      {"n3m", "-exp(-y)-exp(-2*y)"},
      {"n1p", "exp(y)"},
      {"n2p", "exp(y)+y"},
      {"n3p", "exp(y)+exp(2*y)"},
  };
  return presets;
}

std::string resolve_lorentz_f(const std::string& f) {
  for (const auto& [name, text] : lorentz_presets()) {
    if (name == f) return text;
  }
  return f;
}

void validate(const FamilySpec& spec) {
  std::visit(overloaded{
                 [](const Warped3dParams& w) { surface_alpha(w.alpha); },
                 [](const MBetaParams& m) {
                   if (!(m.beta > 0.0) || !std::isfinite(m.beta)) {
                     throw CatalogError("mbeta: hypothesis beta > 0 violated (beta = " + std::to_string(m.beta) + ")");
                   }
                 },
                 [](const DunnParams& d) {
                   if (d.p < 1) throw CatalogError("dunn: p must be at least 1");
                   if (d.psi.size() > static_cast<std::size_t>(d.p)) throw CatalogError("dunn: psi has more than p rows");
                   for (const auto& row : d.psi) {
                     if (row.size() > static_cast<std::size_t>(d.p)) throw CatalogError("dunn: psi has more than p columns");
                   }
                   const auto psi = dunn_psi(d);
                   for (int i = 0; i < d.p; ++i) {
                     for (int j = 0; j < d.p; ++j) {
                       for (int k = 0; k < d.p; ++k) {
                         if (psi[i][j].uses_variable(d.p + k)) {
                           throw CatalogError("dunn: psi" + std::to_string(i + 1) + std::to_string(j + 1) +
                                              " depends on y" + std::to_string(k + 1) +
                                              "; hypothesis psi = psi(x) violated");
                         }
                       }
                       if (j > i && !(psi[i][j] == psi[j][i])) {
                         throw CatalogError("dunn: hypothesis psi_ij = psi_ji violated at (" + std::to_string(i + 1) +
                                            "," + std::to_string(j + 1) + ")");
                       }
                     }
                   }
                 },
                 [](const FiedlerParams& f) {
                   if (f.nu < 1) throw CatalogError("fiedler: nu must be at least 1");
                   const Matrix xi = fiedler_xi(f);
                   if (xi.rows() != f.nu || xi.cols() != f.nu) throw CatalogError("fiedler: Xi must be nu x nu");
                   if ((xi - xi.transpose()).cwiseAbs().maxCoeff() > 0.0) {
                     throw CatalogError("fiedler: hypothesis Xi symmetric violated");
                   }
                   try {
                     signature_of(xi);
                   } catch (const ModelError&) {
                     throw CatalogError("fiedler: hypothesis Xi invertible violated");
                   }
                   const Expression fe = fiedler_f(f);
                   if (fe.uses_variable(0) || fe.uses_variable(f.nu + 1)) {
                     throw CatalogError("fiedler: f must depend only on u1..u" + std::to_string(f.nu));
                   }
                 },
                 [](const LorentzMfParams& l) {
                   const Expression fe = lorentz_f(l);
                   if (fe.uses_variable(0) || fe.uses_variable(1)) throw CatalogError("lorentz_mf: f must depend only on y");
                 },
             },
             spec.params);
}

Chart build(const FamilySpec& spec) {
  validate(spec);
  return std::visit(
      overloaded{
          [](const Warped3dParams& w) {
            const int map[2] = {0, 1};
            const Expression alpha = surface_alpha(w.alpha).remap(3, map);
            const Expression t = Expression::variable(3, 2);
            const Expression g = pow(t, 2) * exp(2.0 * alpha);
            auto c = zero_components(3);
            c[0][0] = g;
            c[1][1] = g;
            c[2][2] = Expression::constant(3, 1.0);
            const VariableTable names = table_of(kWarpedNames);
            return Chart({0, 3}, c, {parse_guard("t > 0", 3, names)}, kWarpedNames);
          },
          [](const MBetaParams& m) {
            const Expression x3 = Expression::variable(4, 2), x4 = Expression::variable(4, 3);
            auto c = zero_components(4);
            c[0][0] = pow(x3, 2);
            c[1][1] = pow(x3 + m.beta * x4, 2);
            c[2][2] = Expression::constant(4, 1.0);
            c[3][3] = Expression::constant(4, 1.0);
            const VariableTable names = default_variables(4);
            return Chart({0, 4}, c, {parse_guard("x3 > 0", 4, names), parse_guard("x4 > 0", 4, names)});
          },
          [](const DunnParams& d) {
            const std::size_t p = static_cast<std::size_t>(d.p);
            const auto psi = dunn_psi(d);
            auto c = zero_components(2 * p);
            for (std::size_t i = 0; i < p; ++i) {
              for (std::size_t j = 0; j < p; ++j) c[i][j] = psi[i][j];
              set_sym(c, i, p + i, Expression::constant(2 * p, 1.0));
            }
            return Chart({d.p, d.p}, c, {}, dunn_names(d.p));
          },
          [](const FiedlerParams& f) {
            const std::size_t nu = static_cast<std::size_t>(f.nu), n = nu + 2;
            const Matrix xi = fiedler_xi(f);
            const Signature s = signature_of(xi);
            auto c = zero_components(n);
            c[0][0] = -2.0 * fiedler_f(f);
            set_sym(c, 0, n - 1, Expression::constant(n, 1.0));
            for (std::size_t a = 0; a < nu; ++a) {
              for (std::size_t b = 0; b < nu; ++b) c[1 + a][1 + b] = Expression::constant(n, xi(a, b));
            }
            return Chart({s.p + 1, s.q + 1}, c, {}, fiedler_names(f.nu));
          },
          [](const LorentzMfParams& l) {
            auto c = zero_components(3);
            c[0][0] = -2.0 * lorentz_f(l);
            set_sym(c, 0, 1, Expression::constant(3, 1.0));
            c[2][2] = Expression::constant(3, 1.0);
            return Chart({1, 2}, c, {}, kLorentzNames);
          },
      },
      spec.params);
}

CurvatureData oracle_curvature(const FamilySpec& spec, std::span<const double> point) {
  validate(spec);
  require_domain(spec, point);
  return std::visit(overloaded{
                        [&](const Warped3dParams& w) { return warped_oracle(w, point); },
                        [&](const MBetaParams& m) { return mbeta_oracle(m, point); },
                        [&](const DunnParams& d) { return dunn_oracle(d, point); },
                        [&](const FiedlerParams& f) { return fiedler_oracle(f, point); },
                        [&](const LorentzMfParams& l) { return lorentz_oracle(l, point); },
                    },
                    spec.params);
}

double surface_scalar_closed_form(const std::string& alpha, std::span<const double> point) {
  const Jet2<double> a = surface_alpha(alpha).eval_jet2(point.first(2));
  return -2.0 * std::exp(-2.0 * a.value) * (a.hessian(0, 0) + a.hessian(1, 1));
}

double scalar_curvature_closed_form(const FamilySpec& spec, std::span<const double> point) {
  validate(spec);
  require_domain(spec, point);
  return std::visit(overloaded{
                        [&](const Warped3dParams& w) {
                          const double t = point[2];
                          return (surface_scalar_closed_form(w.alpha, point.first(2)) - 2.0) / (t * t);
                        },
                        [&](const MBetaParams& m) { return -2.0 / (point[2] * (point[2] + m.beta * point[3])); },
                        [](const auto&) { return 0.0; },
                    },
                    spec.params);
}

Chart surface_chart(const std::string& alpha) {
  const Expression g = exp(2.0 * surface_alpha(alpha));
  std::vector<std::vector<Expression>> c{{g, Expression::constant(2, 0.0)}, {Expression::constant(2, 0.0), g}};
  return Chart({0, 2}, c, {}, {"x1", "x2"});
}

std::vector<double> sample_domain_point(const FamilySpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  std::uniform_real_distribution<double> positive(0.5, 2.0);
  std::vector<double> p(spec.dimension());
  for (double& v : p) v = box(rng);
  if (std::holds_alternative<Warped3dParams>(spec.params)) {
    p[2] = positive(rng);
  } else if (std::holds_alternative<MBetaParams>(spec.params)) {
    p[2] = positive(rng);
    p[3] = positive(rng);
  }
  return p;
}

}  // namespace skt
