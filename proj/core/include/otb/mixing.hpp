#pragma once

#include <optional>
#include <string>
#include <vector>

#include "otb/markov_chain.hpp"

namespace otb {

/// Uniform mixing coefficient at gap k >= 1,
///   phi(k) = 2 * max_i TV(T^k(i, .), stationary).
/// For Markov chains the sup over histories and conditioning events reduces
/// to a max over current states (conditional laws are convex combinations of
/// the rows). Exactly 0 for i.i.d. chains.
double phi_coefficient(const MarkovChain& chain, int k);

/// Beta (absolute regularity) coefficient at gap k >= 1,
///   beta(k) = 2 * max_{t <= horizon} sum_i P(Z_t = i) TV(T^k(i, .), stationary),
/// the expected-over-history counterpart of phi; always <= phi(k).
double beta_coefficient(const MarkovChain& chain, int k, int horizon);

/// Least-squares fit of ln phi(k) = ln K - k^r on the strictly positive
/// entries, then K inflated so every residual
///   residual_k = ln phi(k) - (ln K - k^r)
/// is <= 0, i.e. phi(k) <= K exp(-k^r) holds at every fitted point.
struct GeometricFit {
  double K = 0.0;
  double r = 1.0;
  /// Post-inflation residuals per input index (-inf where phi(k) == 0).
  std::vector<double> residuals;
};

/// `phi[i]` is the coefficient at gap k = i+1. Entries must be in [0, 2];
/// with fewer than two positive entries the rate r is not identifiable and
/// defaults to 1.
GeometricFit fit_geometric_rate(const std::vector<double>& phi);

struct MixingProfile {
  std::vector<int> k;       // 1..k_max
  std::vector<double> phi;  // phi(k)
  std::vector<double> beta; // beta(k) at the given horizon
  GeometricFit fit;         // diagnostic fit of the phi sequence
};

MixingProfile mixing_profile(const MarkovChain& chain, int k_max, int beta_horizon);

/// A claimed envelope phi(k) <= K exp(-k^r). Only claims that can be checked
/// completely are accepted: phi must reach exactly 0 at some k0 <= k_max
/// (monotonicity of phi then covers every k >= k0), and the envelope must
/// hold at the finitely many positive values before k0. A finite fit window
/// can never certify the tail of a strictly positive sequence.
struct GeometricCertificate {
  double K = 0.0;
  double r = 1.0;
};

struct CertificateCheck {
  bool valid = false;
  int k_zero = -1;      ///< first gap with phi exactly 0 (-1 if none)
  std::string reason;   ///< empty when valid
};

CertificateCheck verify_geometric_certificate(const MarkovChain& chain,
                                              const GeometricCertificate& cert, int k_max);

}  // namespace otb
