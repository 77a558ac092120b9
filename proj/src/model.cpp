#include "zilr/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace zilr {

namespace {

void check_dims(const Dataset& data, const ParamPair& params) {
  if (data.X.rows() != data.y.size() || data.zmat().rows() != data.y.size())
    throw std::invalid_argument("design rows do not match response length");
  if (params.beta.size() != data.d())
    throw std::invalid_argument("beta has length " + std::to_string(params.beta.size()) +
                                ", design has " + std::to_string(data.d()) + " columns");
  if (params.gamma.size() != data.p())
    throw std::invalid_argument("gamma has length " + std::to_string(params.gamma.size()) +
                                ", design has " + std::to_string(data.p()) + " columns");
}

}  // namespace

void validate(const Dataset& data, bool require_intercept) {
  const auto n = data.y.size();
  if (n < 1) throw std::invalid_argument("dataset has no observations");
  if (data.X.cols() < 1) throw std::invalid_argument("design has no columns");
  if (data.X.rows() != n) throw std::invalid_argument("X rows do not match y length");
  if (data.Z && (data.Z->rows() != n || data.Z->cols() < 1))
    throw std::invalid_argument("Z has the wrong shape");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (data.y[i] != 0.0 && data.y[i] != 1.0)
      throw std::invalid_argument("response " + std::to_string(i) + " is not 0/1");
  }
  if (!data.X.allFinite() || (data.Z && !data.Z->allFinite()))
    throw std::invalid_argument("design contains non-finite entries");
  if (require_intercept) {
    if (!(data.X.col(0).array() == 1.0).all())
      throw std::invalid_argument("first column of X must be the intercept (all ones)");
    if (data.Z && !(data.Z->col(0).array() == 1.0).all())
      throw std::invalid_argument("first column of Z must be the intercept (all ones)");
  }
}

Vector ParamPair::stacked() const {
  Vector v(beta.size() + gamma.size());
  v << beta, gamma;
  return v;
}

ParamPair ParamPair::from_stacked(const Eigen::Ref<const Vector>& v, int d) {
  return {v.head(d), v.tail(v.size() - d)};
}

double inv_logit(double mu) {
  if (mu >= 0.0) return 1.0 / (1.0 + std::exp(-mu));
  const double e = std::exp(mu);
  return e / (1.0 + e);
}

double softplus(double mu) {
  if (mu > 0.0) return mu + std::log1p(std::exp(-mu));
  return std::log1p(std::exp(mu));
}

double log_inv_logit(double mu) { return -softplus(-mu); }

double log1m_inv_logit(double mu) { return -softplus(mu); }

double log1m_prod_inv_logit(double a, double b) {
  const double prod = inv_logit(a) * inv_logit(b);
  if (prod < 0.5) return std::log1p(-prod);
  // 1 - F(a)F(b) = (e^-a + e^-b + e^-a-b) / ((1 + e^-a)(1 + e^-b))
  double t[3] = {-a, -b, -a - b};
  std::sort(t, t + 3);
  const double lse = t[2] + std::log1p(std::exp(t[0] - t[2]) + std::exp(t[1] - t[2]));
  return std::min(0.0, lse - (softplus(-a) + softplus(-b)));
}

double loglik_and_grad(const Dataset& data, const ParamPair& params, Gradient& grad) {
  check_dims(data, params);
  const Matrix& Z = data.zmat();
  const Vector eta_b = data.X * params.beta;
  const Vector eta_g = Z * params.gamma;
  // d/d eta of each observation's contribution
  Vector db(data.n());
  Vector dg(data.n());
  double total = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    const double b = eta_b[i];
    const double a = eta_g[i];
    if (data.y[i] == 1.0) {
      total += log_inv_logit(a) + log_inv_logit(b);
      db[i] = inv_logit(-b);
      dg[i] = inv_logit(-a);
    } else {
      const double l0 = log1m_prod_inv_logit(a, b);
      total += l0;
      // -F(a)F(b)(1-F(b)) / (1 - F(a)F(b)) and its mirror, in log space
      const double lfa = log_inv_logit(a);
      const double lfb = log_inv_logit(b);
      db[i] = -std::exp(lfa + lfb + log1m_inv_logit(b) - l0);
      dg[i] = -std::exp(lfa + lfb + log1m_inv_logit(a) - l0);
    }
  }
  grad.beta = data.X.transpose() * db;
  grad.gamma = Z.transpose() * dg;
  return total;
}

double loglik(const Dataset& data, const ParamPair& params) {
  check_dims(data, params);
  const Vector eta_b = data.X * params.beta;
  const Vector eta_g = data.zmat() * params.gamma;
  double total = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    if (data.y[i] == 1.0)
      total += log_inv_logit(eta_g[i]) + log_inv_logit(eta_b[i]);
    else
      total += log1m_prod_inv_logit(eta_g[i], eta_b[i]);
  }
  return total;
}

Gradient grad_loglik(const Dataset& data, const ParamPair& params) {
  Gradient g;
  loglik_and_grad(data, params, g);
  return g;
}

double logistic_loglik_and_grad(const Matrix& X, const Vector& y, const Vector& beta,
                                Vector& grad) {
  if (X.rows() != y.size() || X.cols() != beta.size())
    throw std::invalid_argument("logistic: dimension mismatch");
  const Vector eta = X * beta;
  Vector resid(y.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    total += y[i] == 1.0 ? log_inv_logit(eta[i]) : log1m_inv_logit(eta[i]);
    resid[i] = y[i] == 1.0 ? inv_logit(-eta[i]) : -inv_logit(eta[i]);
  }
  grad = X.transpose() * resid;
  return total;
}

double logistic_loglik(const Matrix& X, const Vector& y, const Vector& beta) {
  Vector g;
  return logistic_loglik_and_grad(X, y, beta, g);
}

EquivClass canonicalize(const ParamPair& params) {
  if (params.beta.size() != params.gamma.size())
    throw std::invalid_argument("canonicalize requires a shared design (equal block lengths)");
  const Vector a = params.stacked();
  const Vector b = params.swapped().stacked();
  const bool swap = std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
  return {swap ? params.swapped() : params, swap};
}

}  // namespace zilr
