#pragma once

// Exact front-door adjustment over finite joint distributions of (X, M, Y),
// and a generative structural world with a hidden confounder U whose
// truncated factorization gives the interventional ground truth.

#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fdlab/error.hpp"

namespace fdlab {

inline constexpr double kMassTolerance = 1e-12;
inline constexpr double kPositivityFloor = 1e-15;

using Distribution = std::vector<double>;
using Labels = std::vector<std::string>;

inline Labels default_labels(std::size_t n) {
  Labels out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

namespace detail {
inline void check_distribution(const std::vector<double>& row, std::size_t expected,
                               const std::string& what) {
  if (row.size() != expected)
    throw precondition_error(what + ": expected " + std::to_string(expected) +
                             " entries, got " + std::to_string(row.size()));
  double total = 0.0;
  for (double p : row) {
    if (!(p >= 0.0)) throw precondition_error(what + ": negative or NaN probability");
    total += p;
  }
  if (std::abs(total - 1.0) > kMassTolerance)
    throw precondition_error(what + ": probabilities sum to " + std::to_string(total));
}
}  // namespace detail

// Probability table over (x, m, y) cells, stored x-major.
class JointXMY {
 public:
  JointXMY(Labels x_labels, Labels m_labels, Labels y_labels, std::vector<double> mass)
      : x_(std::move(x_labels)), m_(std::move(m_labels)), y_(std::move(y_labels)),
        mass_(std::move(mass)) {
    if (x_.empty() || m_.empty() || y_.empty())
      throw precondition_error("joint: every support must be non-empty");
    detail::check_distribution(mass_, x_.size() * m_.size() * y_.size(), "joint table");
  }

  std::size_t nx() const { return x_.size(); }
  std::size_t nm() const { return m_.size(); }
  std::size_t ny() const { return y_.size(); }
  const Labels& x_labels() const { return x_; }
  const Labels& m_labels() const { return m_; }
  const Labels& y_labels() const { return y_; }
  const std::vector<double>& table() const { return mass_; }

  double operator()(std::size_t x, std::size_t m, std::size_t y) const {
    return mass_[(x * nm() + m) * ny() + y];
  }

  double p_xm(std::size_t x, std::size_t m) const {
    double s = 0.0;
    for (std::size_t y = 0; y < ny(); ++y) s += (*this)(x, m, y);
    return s;
  }

  double p_x(std::size_t x) const {
    double s = 0.0;
    for (std::size_t m = 0; m < nm(); ++m) s += p_xm(x, m);
    return s;
  }

 private:
  Labels x_, m_, y_;
  std::vector<double> mass_;
};

// Raised when P(x, m) is (numerically) zero for some cell.
class positivity_error : public precondition_error {
 public:
  positivity_error(std::size_t x, std::size_t m, const std::string& x_label,
                   const std::string& m_label)
      : precondition_error("positivity violated: P(x=" + x_label + ", m=" + m_label +
                           ") = 0"),
        x_(x), m_(m) {}
  std::size_t x() const { return x_; }
  std::size_t m() const { return m_; }

 private:
  std::size_t x_, m_;
};

inline bool check_positivity(const JointXMY& joint) {
  for (std::size_t x = 0; x < joint.nx(); ++x)
    for (std::size_t m = 0; m < joint.nm(); ++m)
      if (!(joint.p_xm(x, m) > kPositivityFloor)) return false;
  return true;
}

// P(y | do(x)) = sum_m P(m|x) sum_x' P(y|x',m) P(x').
inline Distribution front_door_adjust(const JointXMY& joint, std::size_t x) {
  if (x >= joint.nx()) throw precondition_error("front_door_adjust: x out of range");
  for (std::size_t xi = 0; xi < joint.nx(); ++xi)
    for (std::size_t m = 0; m < joint.nm(); ++m)
      if (!(joint.p_xm(xi, m) > kPositivityFloor))
        throw positivity_error(xi, m, joint.x_labels()[xi], joint.m_labels()[m]);

  std::vector<double> px(joint.nx());
  for (std::size_t xi = 0; xi < joint.nx(); ++xi) px[xi] = joint.p_x(xi);

  Distribution out(joint.ny(), 0.0);
  for (std::size_t m = 0; m < joint.nm(); ++m) {
    const double pm_given_x = joint.p_xm(x, m) / px[x];
    for (std::size_t xp = 0; xp < joint.nx(); ++xp) {
      const double pxm = joint.p_xm(xp, m);
      for (std::size_t y = 0; y < joint.ny(); ++y)
        out[y] += pm_given_x * (joint(xp, m, y) / pxm) * px[xp];
    }
  }
  return out;
}

// Generative model U -> X, X -> M, (X, M, U) -> Y with explicit conditional tables.
// The M-mechanism has no U argument, so X and M never share a back-door path.
class StructuralWorld {
 public:
  using Table2 = std::vector<std::vector<double>>;
  using Table4 = std::vector<std::vector<std::vector<std::vector<double>>>>;

  struct Supports {
    Labels u, x, m, y;
  };

  // p_y_given_xmu is indexed [x][m][u][y].
  StructuralWorld(Supports supports, std::vector<double> p_u, Table2 p_x_given_u,
                  Table2 p_m_given_x, Table4 p_y_given_xmu)
      : s_(std::move(supports)), p_u_(std::move(p_u)), p_x_u_(std::move(p_x_given_u)),
        p_m_x_(std::move(p_m_given_x)), p_y_xmu_(std::move(p_y_given_xmu)) {
    if (s_.u.empty() || s_.x.empty() || s_.m.empty() || s_.y.empty())
      throw precondition_error("world: every support must be non-empty");
    detail::check_distribution(p_u_, nu(), "P(u)");
    if (p_x_u_.size() != nu()) throw precondition_error("P(x|u): one row per u required");
    for (const auto& row : p_x_u_) detail::check_distribution(row, nx(), "P(x|u)");
    if (p_m_x_.size() != nx()) throw precondition_error("P(m|x): one row per x required");
    for (const auto& row : p_m_x_) detail::check_distribution(row, nm(), "P(m|x)");
    if (p_y_xmu_.size() != nx()) throw precondition_error("P(y|x,m,u): bad x dimension");
    for (const auto& by_m : p_y_xmu_) {
      if (by_m.size() != nm()) throw precondition_error("P(y|x,m,u): bad m dimension");
      for (const auto& by_u : by_m) {
        if (by_u.size() != nu()) throw precondition_error("P(y|x,m,u): bad u dimension");
        for (const auto& row : by_u) detail::check_distribution(row, ny(), "P(y|x,m,u)");
      }
    }
  }

  std::size_t nu() const { return s_.u.size(); }
  std::size_t nx() const { return s_.x.size(); }
  std::size_t nm() const { return s_.m.size(); }
  std::size_t ny() const { return s_.y.size(); }
  const Supports& supports() const { return s_; }
  const std::vector<double>& p_u() const { return p_u_; }
  const Table2& p_x_given_u() const { return p_x_u_; }
  const Table2& p_m_given_x() const { return p_m_x_; }
  const Table4& p_y_given_xmu() const { return p_y_xmu_; }

  double p_y(std::size_t y, std::size_t x, std::size_t m, std::size_t u) const {
    return p_y_xmu_[x][m][u][y];
  }

  // True when the Y-mechanism ignores x, i.e. every directed X -> Y path runs through M.
  bool mediator_intercepts_all_paths() const {
    for (std::size_t m = 0; m < nm(); ++m)
      for (std::size_t u = 0; u < nu(); ++u)
        for (std::size_t y = 0; y < ny(); ++y)
          for (std::size_t x = 1; x < nx(); ++x)
            if (std::abs(p_y(y, x, m, u) - p_y(y, 0, m, u)) > kMassTolerance) return false;
    return true;
  }

 private:
  Supports s_;
  std::vector<double> p_u_;
  Table2 p_x_u_;
  Table2 p_m_x_;
  Table4 p_y_xmu_;
};

// Marginalizes U: P(x,m,y) = sum_u P(u) P(x|u) P(m|x) P(y|x,m,u).
inline JointXMY world_to_joint(const StructuralWorld& w) {
  const std::size_t nx = w.nx(), nm = w.nm(), ny = w.ny();
  std::vector<double> mass(nx * nm * ny, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t m = 0; m < nm; ++m)
      for (std::size_t y = 0; y < ny; ++y) {
        double s = 0.0;
        for (std::size_t u = 0; u < w.nu(); ++u)
          s += w.p_u()[u] * w.p_x_given_u()[u][x] * w.p_y(y, x, m, u);
        mass[(x * nm + m) * ny + y] = s * w.p_m_given_x()[x][m];
      }
  const auto& s = w.supports();
  return JointXMY(s.x, s.m, s.y, std::move(mass));
}

// Truncated factorization: P(y|do(x)) = sum_u sum_m P(u) P(m|x) P(y|x,m,u).
inline Distribution interventional_oracle(const StructuralWorld& w, std::size_t x) {
  if (x >= w.nx()) throw precondition_error("interventional_oracle: x out of range");
  Distribution out(w.ny(), 0.0);
  for (std::size_t u = 0; u < w.nu(); ++u)
    for (std::size_t m = 0; m < w.nm(); ++m) {
      const double weight = w.p_u()[u] * w.p_m_given_x()[x][m];
      for (std::size_t y = 0; y < w.ny(); ++y) out[y] += weight * w.p_y(y, x, m, u);
    }
  return out;
}

namespace detail {
template <class Rng>
std::vector<double> random_simplex(Rng& rng, std::size_t k) {
  // Entries bounded away from zero keep every (x, m) cell positive.
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  std::vector<double> v(k);
  double s = 0.0;
  for (double& p : v) s += (p = unif(rng));
  for (double& p : v) p /= s;
  return v;
}
}  // namespace detail

struct RandomWorldOptions {
  std::size_t max_support = 4;
  // When false the Y-mechanism gets its own table per x (front-door Condition 1 fails).
  bool mediator_intercepts = true;
};

template <class Rng>
StructuralWorld random_world(Rng& rng, const RandomWorldOptions& opt = {}) {
  std::uniform_int_distribution<std::size_t> size_dist(2, std::max<std::size_t>(2, opt.max_support));
  const std::size_t nu = size_dist(rng), nx = size_dist(rng), nm = size_dist(rng),
                    ny = size_dist(rng);
  StructuralWorld::Supports s{default_labels(nu), default_labels(nx), default_labels(nm),
                              default_labels(ny)};
  auto p_u = detail::random_simplex(rng, nu);
  StructuralWorld::Table2 p_x_u(nu);
  for (auto& row : p_x_u) row = detail::random_simplex(rng, nx);
  StructuralWorld::Table2 p_m_x(nx);
  for (auto& row : p_m_x) row = detail::random_simplex(rng, nm);

  StructuralWorld::Table4 p_y(nx, std::vector<std::vector<std::vector<double>>>(
                                      nm, std::vector<std::vector<double>>(nu)));
  for (std::size_t m = 0; m < nm; ++m)
    for (std::size_t u = 0; u < nu; ++u) {
      const auto shared = detail::random_simplex(rng, ny);
      for (std::size_t x = 0; x < nx; ++x)
        p_y[x][m][u] = opt.mediator_intercepts ? shared : detail::random_simplex(rng, ny);
    }
  return StructuralWorld(std::move(s), std::move(p_u), std::move(p_x_u), std::move(p_m_x),
                         std::move(p_y));
}

}  // namespace fdlab
