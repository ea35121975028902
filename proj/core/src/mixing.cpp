#include "otb/mixing.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "otb/errors.hpp"

namespace otb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-state total variation between the k-step rows and the stationary law.
Eigen::VectorXd row_tv(const MarkovChain& chain, int k) {
  const Eigen::MatrixXd m = chain.power(k);
  const Eigen::VectorXd& pi = chain.stationary_distribution().mass();
  Eigen::VectorXd tv(m.rows());
  for (int i = 0; i < m.rows(); ++i) {
    tv(i) = 0.5 * (m.row(i).transpose() - pi).cwiseAbs().sum();
  }
  return tv;
}

double sse_at(const std::vector<double>& y, const std::vector<int>& k, double r,
              double* ln_k_out) {
  double mean = 0.0;
  for (size_t i = 0; i < y.size(); ++i) mean += y[i] + std::pow(k[i], r);
  mean /= static_cast<double>(y.size());
  double sse = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] + std::pow(k[i], r) - mean;
    sse += d * d;
  }
  if (ln_k_out) *ln_k_out = mean;
  return sse;
}

}  // namespace

double phi_coefficient(const MarkovChain& chain, int k) {
  if (k < 1) throw ValidationError("phi_coefficient: gap must be >= 1");
  if (chain.is_iid()) return 0.0;  // conditional and marginal laws coincide
  return 2.0 * row_tv(chain, k).maxCoeff();
}

double beta_coefficient(const MarkovChain& chain, int k, int horizon) {
  if (k < 1) throw ValidationError("beta_coefficient: gap must be >= 1");
  if (horizon < 1) throw ValidationError("beta_coefficient: horizon must be >= 1");
  if (chain.is_iid()) return 0.0;
  const Eigen::VectorXd tv = row_tv(chain, k);
  Eigen::VectorXd mu = chain.initial().mass();
  double best = mu.dot(tv);
  for (int t = 2; t <= horizon; ++t) {
    mu = chain.transition().transpose() * mu;
    mu /= mu.sum();
    best = std::max(best, mu.dot(tv));
  }
  return 2.0 * best;
}

GeometricFit fit_geometric_rate(const std::vector<double>& phi) {
  if (phi.empty()) throw ValidationError("fit_geometric_rate: empty phi sequence");
  std::vector<int> ks;
  std::vector<double> ys;
  for (size_t i = 0; i < phi.size(); ++i) {
    if (!(phi[i] >= 0.0) || phi[i] > 2.0 + 1e-12) {
      std::ostringstream msg;
      msg << "fit_geometric_rate: phi(" << i + 1 << ") = " << phi[i] << " outside [0, 2]";
      throw ValidationError(msg.str());
    }
    if (phi[i] > 0.0) {
      ks.push_back(static_cast<int>(i) + 1);
      ys.push_back(std::log(phi[i]));
    }
  }

  GeometricFit fit;
  fit.residuals.assign(phi.size(), -kInf);
  if (ks.empty()) {
    fit.K = 0.0;
    fit.r = 1.0;
    return fit;
  }

  double ln_k = 0.0;
  if (ks.size() == 1) {
    // One positive point determines K only; any r reproduces it, keep r = 1.
    fit.r = 1.0;
    ln_k = ys[0] + static_cast<double>(ks[0]);
  } else {
    // 1-D search over r (the concentrated objective has a closed-form ln K):
    // coarse grid, then golden-section refinement around the best cell.
    double best_r = 0.05, best_sse = kInf;
    for (double r = 0.05; r <= 4.0 + 1e-9; r += 0.05) {
      const double sse = sse_at(ys, ks, r, nullptr);
      if (sse < best_sse) {
        best_sse = sse;
        best_r = r;
      }
    }
    double lo = std::max(0.01, best_r - 0.05), hi = best_r + 0.05;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
    double fa = sse_at(ys, ks, a, nullptr), fb = sse_at(ys, ks, b, nullptr);
    while (hi - lo > 1e-12) {
      if (fa < fb) {
        hi = b;
        b = a;
        fb = fa;
        a = hi - gr * (hi - lo);
        fa = sse_at(ys, ks, a, nullptr);
      } else {
        lo = a;
        a = b;
        fa = fb;
        b = lo + gr * (hi - lo);
        fb = sse_at(ys, ks, b, nullptr);
      }
    }
    fit.r = 0.5 * (lo + hi);
    sse_at(ys, ks, fit.r, &ln_k);
  }

  // Inflate K to the smallest value with all residuals <= 0, so the envelope
  // phi(k) <= K exp(-k^r) holds at every fitted gap.
  double max_res = -kInf;
  for (size_t i = 0; i < ks.size(); ++i) {
    max_res = std::max(max_res, ys[i] - (ln_k - std::pow(ks[i], fit.r)));
  }
  if (max_res > 0.0) ln_k += max_res;
  for (size_t i = 0; i < ks.size(); ++i) {
    fit.residuals[ks[i] - 1] = ys[i] - (ln_k - std::pow(ks[i], fit.r));
  }
  fit.K = std::exp(ln_k);
  return fit;
}

MixingProfile mixing_profile(const MarkovChain& chain, int k_max, int beta_horizon) {
  if (k_max < 1) throw ValidationError("mixing_profile: k_max must be >= 1");
  MixingProfile p;
  p.k.reserve(k_max);
  for (int k = 1; k <= k_max; ++k) {
    p.k.push_back(k);
    p.phi.push_back(phi_coefficient(chain, k));
    p.beta.push_back(beta_coefficient(chain, k, beta_horizon));
  }
  p.fit = fit_geometric_rate(p.phi);
  return p;
}

CertificateCheck verify_geometric_certificate(const MarkovChain& chain,
                                              const GeometricCertificate& cert, int k_max) {
  if (!(cert.K >= 0.0) || !std::isfinite(cert.K)) {
    throw ValidationError("geometric certificate: K must be finite and >= 0");
  }
  if (!(cert.r > 0.0) || !std::isfinite(cert.r)) {
    throw ValidationError("geometric certificate: r must be finite and > 0");
  }
  if (k_max < 1) throw ValidationError("geometric certificate: k_max must be >= 1");

  CertificateCheck out;
  std::vector<double> head;
  for (int k = 1; k <= k_max; ++k) {
    const double p = phi_coefficient(chain, k);
    if (p == 0.0) {
      out.k_zero = k;
      break;
    }
    head.push_back(p);
  }
  if (out.k_zero < 0) {
    std::ostringstream msg;
    msg << "phi stays positive through k_max = " << k_max
        << "; a finite window cannot certify the envelope's tail";
    out.reason = msg.str();
    return out;
  }
  for (size_t i = 0; i < head.size(); ++i) {
    const int k = static_cast<int>(i) + 1;
    const double envelope = cert.K * std::exp(-std::pow(k, cert.r));
    if (head[i] > envelope + 1e-12) {
      std::ostringstream msg;
      msg << "phi(" << k << ") = " << head[i] << " exceeds K exp(-k^r) = " << envelope;
      out.reason = msg.str();
      return out;
    }
  }
  out.valid = true;
  return out;
}

}  // namespace otb
