#include "backstep/controller.hpp"

#include <cmath>
#include <string>

#include "backstep/errors.hpp"

namespace backstep {

namespace {

void require_positive(const std::vector<double>& v, std::size_t want, const char* name) {
  if (v.size() != want)
    throw ConfigError(std::string(name) + " must have " + std::to_string(want) + " entries");
  for (double x : v)
    if (!(x > 0.0)) throw ConfigError(std::string(name) + " entries must be positive");
}

}  // namespace

void ControllerGains::validate(int n) const {
  if (n < 2) throw ConfigError("controller needs at least two plant states");
  require_positive(K, static_cast<std::size_t>(n) + 1, "K");
  require_positive(k_b, static_cast<std::size_t>(n), "k_b");
  require_positive(sigma, static_cast<std::size_t>(n), "sigma");
  require_positive(gamma, static_cast<std::size_t>(n), "gamma");
  require_positive(beta, static_cast<std::size_t>(n), "beta");
  require_positive(upsilon, static_cast<std::size_t>(n), "upsilon");
  require_positive(filter_tau, static_cast<std::size_t>(n), "filter_tau");
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
}

double checked_margin(double z, double k_b, int index) {
  const double margin = k_b * k_b - z * z;
  if (!(margin > kBarrierGuardFraction * k_b * k_b)) throw BarrierViolation(index, z, k_b);
  return margin;
}

double robust_tanh_term(double p, double upsilon) { return std::tanh(p / upsilon); }

double virtual_control_first(double z1, double k_b1, double K1, double theta_hat, double xi_sq,
                             double delta_hat, double upsilon) {
  const double margin = checked_margin(z1, k_b1, 1);
  const double q = z1 / margin;
  return -K1 * z1 - z1 * theta_hat * xi_sq / margin - delta_hat * robust_tanh_term(q, upsilon) - q;
}

double virtual_control_mid(double z_i, double z_prev, double k_bi, double k_b_prev, double K_i,
                           double theta_hat, double xi_sq, double delta_hat, double upsilon,
                           int index) {
  const double margin = checked_margin(z_i, k_bi, index);
  const double margin_prev = checked_margin(z_prev, k_b_prev, index - 1);
  const double q = z_i / margin;
  return -K_i * z_i - z_i * theta_hat * xi_sq / margin - delta_hat * robust_tanh_term(q, upsilon) -
         q - margin * z_prev / margin_prev;
}

double virtual_control_last(double z_n, double z_prev, double k_bn, double k_b_prev, double K_n,
                            double theta_hat, double xi_sq, double delta_hat, double upsilon,
                            int index) {
  const double margin = checked_margin(z_n, k_bn, index);
  const double margin_prev = checked_margin(z_prev, k_b_prev, index - 1);
  const double q = z_n / margin;
  // No -z/margin term on the final stage; its backstepped successor is the
  // delay-surrogate coordinate, which carries no barrier.
  return -K_n * z_n - z_n * theta_hat * xi_sq / margin - delta_hat * robust_tanh_term(q, upsilon) -
         margin * z_prev / margin_prev;
}

double control_v(double z_last, double K_last, double lambda, double chi, double kappa, double u,
                 double e_last, double tau_last) {
  return -K_last * z_last + lambda * chi - (2.0 * lambda + kappa) * u - e_last / tau_last;
}

double delta_hat_rate(double z, double k_b, double gamma, double sigma, double upsilon,
                      double delta_hat, int index) {
  const double q = z / checked_margin(z, k_b, index);
  return gamma * q * robust_tanh_term(q, upsilon) - sigma * gamma * delta_hat;
}

double theta_hat_rate(double z, double k_b, double beta, double sigma, double xi_sq,
                      double theta_hat, int index) {
  const double margin = checked_margin(z, k_b, index);
  return beta * z * z * xi_sq / margin - sigma * beta * theta_hat;
}

double dsc_filter_deriv(double w, double alpha_prev, double tau) { return (alpha_prev - w) / tau; }

double pade_state_deriv(double chi, double u, double lambda) { return -lambda * chi + 2.0 * lambda * u; }

double input_filter_deriv(double u, double v, double kappa) { return -kappa * u + v; }

BacksteppingController::BacksteppingController(int n, ControllerGains gains,
                                               std::vector<FuzzyBasis> bases)
    : n_(n), gains_(std::move(gains)), bases_(std::move(bases)) {
  gains_.validate(n_);
  if (static_cast<int>(bases_.size()) != n_)
    throw ConfigError("controller needs one fuzzy basis per stage");
  for (int i = 0; i < n_; ++i) {
    bases_[i].validate();
    if (bases_[i].dim != i + 2)
      throw ConfigError("stage " + std::to_string(i + 1) + " basis must have dimension " +
                        std::to_string(i + 2));
  }
  if (n_ > 14) throw ConfigError("state dimension beyond the supported range");
}

void BacksteppingController::evaluate_into(std::span<const double> x, double chi, double u,
                                           std::span<const double> w, const AdaptiveState& a,
                                           double y_d, double y_d_dot, ControlOutput& out) const {
  const int n = n_;
  const ControllerGains& g = gains_;
  out.z.resize(n + 1);
  out.margin.resize(n);
  out.e.resize(n);
  out.alpha.resize(n);
  out.wdot.resize(n);
  out.xi_sq.resize(n);
  out.delta_dot.resize(n);
  out.theta_dot.resize(n);

  // Tracking coordinates z_1..z_n and their (guarded) barrier margins.
  out.z[0] = x[0] - y_d;
  for (int i = 1; i < n; ++i) out.z[i] = x[i] - w[i - 1];
  for (int i = 0; i < n; ++i) out.margin[i] = checked_margin(out.z[i], g.k_b[i], i + 1);

  double Z[16];
  for (int i = 0; i < n; ++i) {  // stage i+1
    // Fuzzy input: (x1, y_d') on the first stage, (x_1..x_i, w_i') after.
    for (int d = 0; d <= i; ++d) Z[d] = x[d];
    Z[i + 1] = (i == 0) ? y_d_dot : out.wdot[i - 1];
    out.xi_sq[i] = regressor_norm(bases_[i], std::span<const double>(Z, i + 2));

    const double zi = out.z[i];
    if (i == 0) {
      out.alpha[0] = virtual_control_first(zi, g.k_b[0], g.K[0], a.theta_hat[0], out.xi_sq[0],
                                           a.delta_hat[0], g.upsilon[0]);
    } else if (i < n - 1) {
      out.alpha[i] = virtual_control_mid(zi, out.z[i - 1], g.k_b[i], g.k_b[i - 1], g.K[i],
                                         a.theta_hat[i], out.xi_sq[i], a.delta_hat[i],
                                         g.upsilon[i], i + 1);
    } else {
      out.alpha[i] = virtual_control_last(zi, out.z[i - 1], g.k_b[i], g.k_b[i - 1], g.K[i],
                                          a.theta_hat[i], out.xi_sq[i], a.delta_hat[i],
                                          g.upsilon[i], i + 1);
    }

    // e_{i+2} and the filter derivative feeding the next stage's fuzzy input.
    out.e[i] = w[i] - out.alpha[i];
    out.wdot[i] = dsc_filter_deriv(w[i], out.alpha[i], g.filter_tau[i]);

    out.delta_dot[i] = delta_hat_rate(zi, g.k_b[i], g.gamma[i], g.sigma[i], g.upsilon[i],
                                      a.delta_hat[i], i + 1);
    out.theta_dot[i] =
        theta_hat_rate(zi, g.k_b[i], g.beta[i], g.sigma[i], out.xi_sq[i], a.theta_hat[i], i + 1);
  }

  out.z[n] = chi - u - w[n - 1];
  out.v = control_v(out.z[n], g.K[n], g.lambda, chi, g.kappa, u, out.e[n - 1], g.filter_tau[n - 1]);
}

ControlOutput BacksteppingController::evaluate(std::span<const double> x, double chi, double u,
                                               std::span<const double> w, const AdaptiveState& a,
                                               double y_d, double y_d_dot) const {
  ControlOutput out;
  evaluate_into(x, chi, u, w, a, y_d, y_d_dot, out);
  return out;
}

std::vector<double> BacksteppingController::initial_filter_states(std::span<const double> x0,
                                                                  const AdaptiveState& a0,
                                                                  double y_d0,
                                                                  double y_d_dot0) const {
  const int n = n_;
  const ControllerGains& g = gains_;
  std::vector<double> w(n, 0.0);
  double z_prev = 0.0;
  double Z[16];
  for (int i = 0; i < n; ++i) {
    const double zi = (i == 0) ? x0[0] - y_d0 : x0[i] - w[i - 1];
    for (int d = 0; d <= i; ++d) Z[d] = x0[d];
    Z[i + 1] = (i == 0) ? y_d_dot0 : 0.0;  // w_i(0) = alpha_{i-1}(0) makes w_i'(0) = 0
    const double xi_sq = regressor_norm(bases_[i], std::span<const double>(Z, i + 2));
    double alpha;
    if (i == 0)
      alpha = virtual_control_first(zi, g.k_b[0], g.K[0], a0.theta_hat[0], xi_sq, a0.delta_hat[0],
                                    g.upsilon[0]);
    else if (i < n - 1)
      alpha = virtual_control_mid(zi, z_prev, g.k_b[i], g.k_b[i - 1], g.K[i], a0.theta_hat[i],
                                  xi_sq, a0.delta_hat[i], g.upsilon[i], i + 1);
    else
      alpha = virtual_control_last(zi, z_prev, g.k_b[i], g.k_b[i - 1], g.K[i], a0.theta_hat[i],
                                   xi_sq, a0.delta_hat[i], g.upsilon[i], i + 1);
    w[i] = alpha;
    z_prev = zi;
  }
  return w;
}

std::vector<double> BacksteppingController::states_for_initial_offsets(std::span<const double> z0,
                                                                       const AdaptiveState& a0,
                                                                       double y_d0,
                                                                       double y_d_dot0) const {
  const int n = n_;
  const ControllerGains& g = gains_;
  std::vector<double> x(n, 0.0);
  double Z[16];
  // Sequential construction: x_1 from z_1, then alpha_1 -> w_2 -> x_2, ...
  double w_prev = 0.0;
  for (int i = 0; i < n; ++i) {
    x[i] = (i == 0) ? y_d0 + z0[0] : w_prev + z0[i];
    for (int d = 0; d <= i; ++d) Z[d] = x[d];
    Z[i + 1] = (i == 0) ? y_d_dot0 : 0.0;
    const double xi_sq = regressor_norm(bases_[i], std::span<const double>(Z, i + 2));
    double alpha;
    if (i == 0)
      alpha = virtual_control_first(z0[0], g.k_b[0], g.K[0], a0.theta_hat[0], xi_sq,
                                    a0.delta_hat[0], g.upsilon[0]);
    else if (i < n - 1)
      alpha = virtual_control_mid(z0[i], z0[i - 1], g.k_b[i], g.k_b[i - 1], g.K[i],
                                  a0.theta_hat[i], xi_sq, a0.delta_hat[i], g.upsilon[i], i + 1);
    else
      alpha = virtual_control_last(z0[i], z0[i - 1], g.k_b[i], g.k_b[i - 1], g.K[i],
                                   a0.theta_hat[i], xi_sq, a0.delta_hat[i], g.upsilon[i], i + 1);
    w_prev = alpha;  // w_{i+2}(0)
  }
  return x;
}

}  // namespace backstep
