#include "kmsh/corrfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace kmsh {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

CMat mat_pow(const CMat& m, int p) {
  CMat out = CMat::Identity(m.rows(), m.cols());
  for (int k = 0; k < p; ++k) out = out * m;
  return out;
}

Rational rationalize(double x, long max_den) {
  if (!std::isfinite(x)) throw std::invalid_argument("cannot rationalize a non-finite value");
  // Continued fraction convergents p/q until the denominator bound or exactness.
  Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    double fl = std::floor(r);
    Integer t(fl);
    Integer p2 = t * p1 + p0;
    Integer q2 = t * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    double frac = r - fl;
    if (frac < 1e-15 || std::abs(x - p1.get_d() / q1.get_d()) < 1e-15 * std::max(1.0, std::abs(x))) break;
    r = 1.0 / frac;
  }
  Rational q(p1, q1);
  q.canonicalize();
  return q;
}

}  // namespace

UnipotentLog unipotent_log(const CMat& M, double tol) {
  const int n = static_cast<int>(M.rows());
  if (n != M.cols() || n == 0) throw std::invalid_argument("monodromy must be a nonempty square matrix");
  if (n > 8) throw std::invalid_argument("monodromy size is limited to 8");
  Eigen::ComplexEigenSolver<CMat> es(M, false);
  const auto& ev = es.eigenvalues();
  const double scale = std::max(1.0, M.norm());
  for (int i = 0; i < n; ++i)
    if (std::abs(ev(i)) < 1e-12 * scale) throw std::invalid_argument("monodromy is singular");

  // Rounding splits a Jordan block of size k by about eps^(1/k), so the merge radius grows with the cluster.
  std::vector<std::vector<cplx>> clusters;
  for (int i = 0; i < n; ++i) clusters.push_back({ev(i)});
  auto centre = [](const std::vector<cplx>& cl) {
    cplx w = 0;
    for (auto z : cl) w += z;
    return w / static_cast<double>(cl.size());
  };
  auto radius = [&](std::size_t k) {
    return std::max(tol, 10.0 * std::pow(std::numeric_limits<double>::epsilon(), 1.0 / static_cast<double>(k))) * scale;
  };
  for (bool merged = true; merged;) {
    merged = false;
    for (std::size_t a = 0; a < clusters.size() && !merged; ++a)
      for (std::size_t b = a + 1; b < clusters.size() && !merged; ++b)
        if (std::abs(centre(clusters[a]) - centre(clusters[b])) <= radius(clusters[a].size() + clusters[b].size())) {
          clusters[a].insert(clusters[a].end(), clusters[b].begin(), clusters[b].end());
          clusters.erase(clusters.begin() + static_cast<long>(b));
          merged = true;
        }
  }

  UnipotentLog out;
  CMat S(n, n);
  Eigen::VectorXcd d(n);
  int col = 0;
  for (const auto& cl : clusters) {
    cplx w = centre(cl);
    Eigen::FullPivLU<CMat> lu(mat_pow(M - w * CMat::Identity(n, n), n));
    lu.setThreshold(std::sqrt(tol));
    CMat K = lu.kernel();
    if (K.cols() != static_cast<long>(cl.size()))
      throw std::runtime_error("generalized eigenspace dimension does not match multiplicity");
    S.middleCols(col, K.cols()) = K;
    d.segment(col, K.cols()).setConstant(w);
    col += static_cast<int>(K.cols());
    out.eigen.emplace_back(w, K);
  }
  out.Ms = S * d.asDiagonal() * S.inverse();
  out.Mu = out.Ms.inverse() * M;
  CMat X = out.Mu - CMat::Identity(n, n);
  CMat log = CMat::Zero(n, n);
  CMat Xk = CMat::Identity(n, n);
  for (int k = 1; k <= n; ++k) {
    Xk = Xk * X;
    log += ((k % 2 == 1) ? 1.0 : -1.0) / k * Xk;
  }
  out.N = -log / cplx(0, two_pi);
  return out;
}

cplx alpha_of(cplx omega) {
  if (omega == cplx(0)) throw std::invalid_argument("omega must be nonzero");
  double phi = std::arg(omega);
  double re = -phi / two_pi;
  re -= std::floor(re);
  if (re >= 1.0) re -= 1.0;
  return {re, std::log(std::abs(omega)) / two_pi};
}

Omega omega_from_value(cplx omega, long max_den) {
  cplx a = alpha_of(omega);
  return Omega::from_exponent(QComplex(rationalize(a.real(), max_den), rationalize(a.imag(), max_den)));
}

FlatLocalDatum phi_local(const MonodromyDatum& datum, const Rational& c, double tol) {
  const int n = static_cast<int>(datum.M.rows());
  if (static_cast<int>(datum.b.size()) != n) throw std::invalid_argument("one weight per basis vector is required");
  UnipotentLog ul = unipotent_log(datum.M, tol);
  FlatLocalDatum out;
  out.c = c;
  out.N = ul.N;
  for (int k = 0; k < n; ++k) {
    const cplx* omega = nullptr;
    for (const auto& [w, basis] : ul.eigen) {
      Eigen::VectorXcd v = mat_pow(datum.M - w * CMat::Identity(n, n), n).col(k);
      if (v.norm() <= std::sqrt(tol) * std::max(1.0, datum.M.norm())) {
        omega = &w;
        break;
      }
    }
    if (!omega)
      throw std::invalid_argument("basis vector " + std::to_string(k) + " is not in a generalized eigenspace");
    cplx alpha = alpha_of(*omega);
    Rational re_alpha = omega_from_value(*omega).exponent().re;
    Integer shift = canonical_shift(datum.b[k] - re_alpha, c);
    double nd = shift.get_d();
    out.n.push_back(shift.get_si());
    out.a.push_back(datum.b[k].get_d() - alpha.real() + nd);
    out.residue.push_back(alpha - nd);
  }
  return out;
}

KmsPair phi_local(const LsPair& u, const Rational& c) {
  const QComplex& alpha = u.omega.exponent();
  Rational x = u.b - alpha.re;
  Rational n(canonical_shift(x, c));
  return {x + n, alpha - QComplex(n)};
}

KmsPoint phi_local(const LsPoint& u, const Rational& c) {
  KmsPair p = phi_local(u.pair(), c);
  return {p.a, p.alpha, u.r};
}

LsImage phi_inverse_kms(const Rational& a, const QComplex& alpha) {
  return {a + alpha.re, Omega::from_exponent(alpha)};
}

ParabolicFlatData kms_table_transport(const FilteredLocalSystemData& ls, const QComplex& lambda,
                                      const std::map<Label, Rational>& c) {
  if (lambda.is_zero()) throw std::invalid_argument("lambda must be nonzero");
  auto errs = validate(ls);
  if (!errs.empty()) throw std::invalid_argument(errs.front().path + ": " + errs.front().message);
  auto trunc = [&](const Label& i) {
    auto it = c.find(i);
    return it == c.end() ? Rational(0) : it->second;
  };
  auto flat = [&](const LsPair& u, const Label& i) {
    KmsPair p = phi_local(u, trunc(i));
    p.alpha = lambda * p.alpha;
    return p;
  };
  ParabolicFlatData d;
  d.lambda = lambda;
  d.rank = ls.rank;
  d.geometry = ls.geometry;
  for (const auto& i : ls.geometry.components) d.truncation[i] = trunc(i);
  for (const auto& [i, spec] : ls.divisor_spectra)
    for (const auto& u : spec) {
      KmsPair p = flat(u.pair(), i);
      d.divisor_spectra[i].push_back({p.a, p.alpha, u.r});
    }
  for (const auto& [label, entries] : ls.point_spectra) {
    const PointRecord* P = ls.geometry.find_point(label);
    auto& dst = d.point_spectra[label];
    for (const auto& e : entries) dst.push_back({flat(e.u_i, P->i), flat(e.u_j, P->j), e.r});
  }
  return d;
}

FilteredLocalSystemData kms_table_inverse(const ParabolicFlatData& d) {
  const QComplex inv = d.lambda.inverse();
  auto back = [&](const KmsPair& u) {
    LsImage im = phi_inverse_kms(u.a, inv * u.alpha);
    return LsPair{im.b, im.omega};
  };
  FilteredLocalSystemData ls;
  ls.rank = d.rank;
  ls.geometry = d.geometry;
  for (const auto& [i, spec] : d.divisor_spectra)
    for (const auto& u : spec) {
      LsPair p = back(u.pair());
      ls.divisor_spectra[i].push_back({p.b, p.omega, u.r});
    }
  for (const auto& [label, entries] : d.point_spectra)
    for (const auto& e : entries) ls.point_spectra[label].push_back({back(e.u_i), back(e.u_j), e.r});
  return ls;
}

ParabolicFlatData rescale_lambda(const ParabolicFlatData& d, const QComplex& lambda2) {
  if (lambda2.is_zero()) throw std::invalid_argument("lambda must be nonzero");
  const QComplex f = lambda2 / d.lambda;
  ParabolicFlatData out = d;
  out.lambda = lambda2;
  for (auto& [i, spec] : out.divisor_spectra)
    for (auto& u : spec) u.alpha = f * u.alpha;
  for (auto& [label, entries] : out.point_spectra)
    for (auto& e : entries) {
      e.u_i.alpha = f * e.u_i.alpha;
      e.u_j.alpha = f * e.u_j.alpha;
    }
  return out;
}

}  // namespace kmsh
