#pragma once

// Ordinary least squares with classical inference, the two-step linear
// front-door estimator, and a single-instrument 2SLS comparator.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>

#include "fdlab/dataset.hpp"
#include "fdlab/error.hpp"

namespace fdlab {

inline constexpr double kConditionLimit = 1e10;
inline constexpr double kWeakInstrumentT = 3.0;
inline constexpr const char* kInterceptName = "Intercept";

// Two-sided Student-t tail probability P(|T| > |t|) with df degrees of freedom.
inline double t_pvalue(double t, double df) {
  if (!(df > 0.0)) throw precondition_error("t_pvalue: degrees of freedom must be positive");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(0.5 * df, 0.5, x);
}

struct Coefficient {
  std::string name;
  double estimate = 0.0;
  double std_error = 0.0;
  double t_value = 0.0;
  double p_value = 1.0;
  bool dropped = false;  // removed by the collinearity screen; numbers are NaN
};

struct FitResult {
  std::vector<Coefficient> coefficients;  // intercept first, then regressors in input order
  std::vector<double> residuals;
  double residual_variance = 0.0;
  std::size_t df = 0;
  std::size_t n = 0;

  bool has(const std::string& name) const {
    for (const auto& c : coefficients)
      if (c.name == name) return true;
    return false;
  }

  const Coefficient& operator[](const std::string& name) const {
    for (const auto& c : coefficients)
      if (c.name == name) return c;
    throw precondition_error("fit has no coefficient named '" + name + "'");
  }

  bool dropped(const std::string& name) const { return (*this)[name].dropped; }
};

struct Regressor {
  std::string name;
  std::span<const double> values;
};

namespace detail {

inline void fill_inference(Coefficient& c, double df) {
  if (c.std_error > 0.0) {
    c.t_value = c.estimate / c.std_error;
    c.p_value = t_pvalue(c.t_value, df);
  } else if (c.estimate == 0.0) {
    c.t_value = 0.0;
    c.p_value = 1.0;
  } else {
    c.t_value = std::copysign(std::numeric_limits<double>::infinity(), c.estimate);
    c.p_value = 0.0;
  }
}

// Condition number of the cross-product block after scaling to unit diagonal.
inline double equilibrated_condition(const Eigen::MatrixXd& block) {
  const Eigen::VectorXd d = block.diagonal();
  if ((d.array() <= 0.0).any()) return std::numeric_limits<double>::infinity();
  const Eigen::VectorXd s = d.array().rsqrt();
  const Eigen::MatrixXd scaled = s.asDiagonal() * block * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

struct CoreFit {
  std::vector<std::size_t> kept;  // column indices of the full design that survived
  Eigen::VectorXd beta;           // over kept columns
  Eigen::MatrixXd xtx_inverse;    // over kept columns
  Eigen::VectorXd residuals;
};

// Screens columns in order, dropping any whose inclusion pushes the condition
// number over the limit, then solves the normal equations with one step of
// iterative refinement.
inline CoreFit fit_core(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                        double condition_limit) {
  const Eigen::MatrixXd full_xtx = design.transpose() * design;
  CoreFit out;
  for (Eigen::Index j = 0; j < design.cols(); ++j) {
    auto trial = out.kept;
    trial.push_back(static_cast<std::size_t>(j));
    Eigen::MatrixXd block(trial.size(), trial.size());
    for (std::size_t a = 0; a < trial.size(); ++a)
      for (std::size_t b = 0; b < trial.size(); ++b)
        block(a, b) = full_xtx(trial[a], trial[b]);
    if (equilibrated_condition(block) <= condition_limit) out.kept = std::move(trial);
  }
  if (out.kept.empty()) throw precondition_error("ols: every regressor was collinear");

  const auto k = static_cast<Eigen::Index>(out.kept.size());
  Eigen::MatrixXd xk(design.rows(), k);
  for (Eigen::Index j = 0; j < k; ++j) xk.col(j) = design.col(out.kept[j]);

  const Eigen::MatrixXd xtx = xk.transpose() * xk;
  const Eigen::VectorXd s = xtx.diagonal().array().rsqrt();
  const Eigen::MatrixXd scaled = s.asDiagonal() * xtx * s.asDiagonal();
  Eigen::LLT<Eigen::MatrixXd> llt(scaled);
  if (llt.info() != Eigen::Success) throw precondition_error("ols: cross-product not positive definite");
  auto solve = [&](const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
    return s.asDiagonal() * llt.solve(s.asDiagonal() * rhs);
  };

  out.beta = solve(xk.transpose() * y);
  out.residuals = y - xk * out.beta;
  out.beta += solve(xk.transpose() * out.residuals);
  out.residuals = y - xk * out.beta;
  out.xtx_inverse = s.asDiagonal() * llt.solve(Eigen::MatrixXd::Identity(k, k)) * s.asDiagonal();
  return out;
}

inline Eigen::MatrixXd design_matrix(const std::vector<Regressor>& regressors, std::size_t n,
                                     bool intercept) {
  const auto cols = static_cast<Eigen::Index>(regressors.size() + (intercept ? 1 : 0));
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), cols);
  Eigen::Index c = 0;
  if (intercept) x.col(c++).setOnes();
  for (const auto& r : regressors) {
    if (r.values.size() != n)
      throw precondition_error("ols: regressor '" + r.name + "' has the wrong length");
    for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i), c) = r.values[i];
    ++c;
  }
  return x;
}

inline std::vector<std::string> coefficient_names(const std::vector<Regressor>& regressors,
                                                  bool intercept) {
  std::vector<std::string> names;
  if (intercept) names.emplace_back(kInterceptName);
  for (const auto& r : regressors) names.push_back(r.name);
  return names;
}

// Assembles a FitResult from a core solve and a residual vector used for the variance.
inline FitResult assemble(const std::vector<std::string>& names, const CoreFit& core,
                          const Eigen::VectorXd& residuals) {
  FitResult fit;
  fit.n = static_cast<std::size_t>(residuals.size());
  fit.df = fit.n - core.kept.size();
  fit.residuals.assign(residuals.data(), residuals.data() + residuals.size());
  fit.residual_variance = residuals.squaredNorm() / static_cast<double>(fit.df);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t j = 0; j < names.size(); ++j) {
    Coefficient c{names[j], nan, nan, nan, nan, true};
    for (std::size_t a = 0; a < core.kept.size(); ++a) {
      if (core.kept[a] != j) continue;
      const auto ai = static_cast<Eigen::Index>(a);
      c.dropped = false;
      c.estimate = core.beta(ai);
      c.std_error = std::sqrt(std::max(0.0, fit.residual_variance * core.xtx_inverse(ai, ai)));
      fill_inference(c, static_cast<double>(fit.df));
    }
    fit.coefficients.push_back(std::move(c));
  }
  return fit;
}

}  // namespace detail

struct OlsOptions {
  bool intercept = true;
  double condition_limit = kConditionLimit;
};

// Least squares of y on the given regressors. Regressors that are (near)
// collinear with earlier ones are flagged as dropped and the fit proceeds.
inline FitResult ols_fit(std::span<const double> y, const std::vector<Regressor>& regressors,
                         const OlsOptions& opt = {}) {
  const std::size_t n = y.size();
  const std::size_t k = regressors.size() + (opt.intercept ? 1 : 0);
  if (k == 0) throw precondition_error("ols: no regressors");
  if (n <= k)
    throw precondition_error("ols: need more than " + std::to_string(k) +
                             " observations, got " + std::to_string(n));
  const Eigen::MatrixXd x = detail::design_matrix(regressors, n, opt.intercept);
  const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(n));
  const auto core = detail::fit_core(x, yv, opt.condition_limit);
  return detail::assemble(detail::coefficient_names(regressors, opt.intercept), core,
                          core.residuals);
}

inline double column_variance(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

struct FrontDoorColumns {
  std::string treatment = "X";
  std::string mediator = "M";
  std::string outcome = "Y";
};

struct TwoStepResult {
  FitResult step1;  // mediator ~ treatment
  FitResult step2;  // outcome ~ mediator + treatment
  double fdc_estimate = 0.0;
  std::string treatment;
  std::string mediator;

  double step1_slope() const { return step1[treatment].estimate; }
  double mediator_coefficient() const { return step2[mediator].estimate; }
  bool treatment_dropped() const { return step2.dropped(treatment); }
};

// Two-step linear front-door estimator: beta-hat from M ~ X times delta-hat
// from Y ~ M + X. X is the regressor dropped if the two are collinear.
inline TwoStepResult fdc_two_step(const Dataset& data, const FrontDoorColumns& cols = {}) {
  const auto& x = data.column(cols.treatment);
  const auto& m = data.column(cols.mediator);
  const auto& y = data.column(cols.outcome);
  if (!(column_variance(x) > 0.0))
    throw precondition_error("treatment column '" + cols.treatment +
                             "' has zero variance: the X -> M effect is not identifiable "
                             "(Assumption 1, identifiability)");
  if (!(column_variance(m) > 0.0))
    throw precondition_error("mediator column '" + cols.mediator +
                             "' has zero variance: the M -> Y effect is not identifiable "
                             "(Assumption 1, identifiability)");

  TwoStepResult r;
  r.treatment = cols.treatment;
  r.mediator = cols.mediator;
  r.step1 = ols_fit(m, {{cols.treatment, x}});
  r.step2 = ols_fit(y, {{cols.mediator, m}, {cols.treatment, x}});
  if (r.step1.dropped(cols.treatment) || r.step2.dropped(cols.mediator))
    throw precondition_error("two-step fit lost the treatment or mediator coefficient");
  r.fdc_estimate = r.step1_slope() * r.mediator_coefficient();
  return r;
}

struct IvColumns {
  std::string instrument = "Z";
  std::string treatment = "X";
  std::string outcome = "Y";
};

struct IvResult {
  FitResult first_stage;  // treatment ~ instrument
  FitResult fit;          // outcome on predicted treatment, structural-residual errors
  bool weak_instrument = false;
  std::string treatment;

  double estimate() const { return fit[treatment].estimate; }
};

// Single-instrument two-stage least squares. Standard errors use the
// structural residuals y - b0 - b1 * x rather than the second-stage ones.
inline IvResult iv_2sls(const Dataset& data, const IvColumns& cols = {}) {
  const auto& z = data.column(cols.instrument);
  const auto& x = data.column(cols.treatment);
  const auto& y = data.column(cols.outcome);
  if (!(column_variance(z) > 0.0))
    throw precondition_error("instrument column '" + cols.instrument + "' has zero variance");

  IvResult r;
  r.treatment = cols.treatment;
  r.first_stage = ols_fit(x, {{cols.instrument, z}});
  const auto& slope = r.first_stage[cols.instrument];
  r.weak_instrument = slope.dropped || !(std::abs(slope.t_value) >= kWeakInstrumentT);

  const std::size_t n = x.size();
  std::vector<double> x_hat(n);
  for (std::size_t i = 0; i < n; ++i)
    x_hat[i] = x[i] - r.first_stage.residuals[i];

  const std::vector<Regressor> stage2{{cols.treatment, x_hat}};
  const Eigen::MatrixXd design = detail::design_matrix(stage2, n, true);
  const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(n));
  const auto core = detail::fit_core(design, yv, kConditionLimit);
  if (core.kept.size() != 2)
    throw precondition_error("2SLS: predicted treatment is constant (instrument has no first-stage effect)");

  Eigen::VectorXd structural(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    structural(static_cast<Eigen::Index>(i)) = y[i] - core.beta(0) - core.beta(1) * x[i];
  r.fit = detail::assemble(detail::coefficient_names(stage2, true), core, structural);
  return r;
}

}  // namespace fdlab
