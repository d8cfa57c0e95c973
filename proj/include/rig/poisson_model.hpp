#ifndef RIG_POISSON_MODEL_HPP
#define RIG_POISSON_MODEL_HPP

#include <cstdint>
#include <vector>

#include <rig/encoding.hpp>
#include <rig/weights.hpp>

namespace rig {

struct PoissonCoupling {
    std::vector<double> black_clocks;
    std::vector<double> x;
    std::vector<double> white_clocks;
    std::vector<double> y;
    long n = 0;
    long m = 0;
    double z = 1.0;

    long count_b() const { return static_cast<long>(x.size()); }
    long count_w() const { return static_cast<long>(y.size()); }
    ClockSet clocks() const { return {black_clocks, white_clocks}; }
};

// Exactly n and m atoms: X_i ~ F_b, then E_i | X_i ~ Exp(X_i / sqrt(mn)); same for whites.
PoissonCoupling sample_conditioned(const CriticalPair& pair, std::uint64_t seed);
// Poisson(n) and Poisson(m) atoms, each i.i.d. with law pi / n (resp. pi / m).
PoissonCoupling sample_unconditioned(const CriticalPair& pair, std::uint64_t seed);

// int pi_b(dt, dx) by nested quadrature.
double intensity_total_b(const CriticalPair& pair);

struct ScalingExponents {
    double a = 1.0;  // space scale a_n
    double b = 1.0;  // time scale b_n
};

ScalingExponents scaling_for(Regime regime, double alpha, double n);

class LaplaceExponentTable {
  public:
    explicit LaplaceExponentTable(const CriticalPair& pair);

    double phi_b(double lambda) const;
    double phi_w(double lambda) const;
    double phi_hat_b(double lambda) const;  // phi_b(lambda) + sqrt(n/m) sigma2_b lambda
    double phi_hat_w(double lambda) const;
    // Laplace exponent of L^{n,m}, assembled from compensated pieces.
    double phi(double lambda) const;
    // Same quantity as phi_b(-phi_w(lambda)) + lambda, evaluated literally.
    double phi_by_composition(double lambda) const;
    double q_n() const { return q_n_; }
    ScalingExponents scaling() const { return scaling_; }
    // Psi_n(u) = (b_n / q_n) phi(u q_n / a_n).
    double psi_n(double u) const;
    // g_n(s) = 1 + (phi((1-s) q_n) - (1-s) q_n) / q_n.
    double g_n(double s) const;

    const CriticalPair& pair() const { return pair_; }
    double ratio_bw() const { return sqrt_n_over_m_; }

  private:
    CriticalPair pair_;
    CriticalReport report_;
    double sqrt_n_over_m_ = 1.0;
    double sigma2_b_ = 1.0;
    double sigma2_w_ = 1.0;
    double q_n_ = 0.0;
    ScalingExponents scaling_;
};

struct ReferencePaths {
    StepPath lb;   // L^(b)
    StepPath lw;   // L^(w), simulated up to L^(b) at the horizon
    StepPath lnm;  // -t + L^(w)(L^(b)(t))
    double horizon = 0.0;
};

ReferencePaths reference_paths(const CriticalPair& pair, double horizon, std::uint64_t seed);
ReferencePaths reference_paths(const CriticalPair& pair, double horizon, Rng& rng);

double tilt_density(const ReferencePaths& paths, const LaplaceExponentTable& table, double t);
double log_tilt_density(const ReferencePaths& paths, const LaplaceExponentTable& table, double t);

enum class AppendixCase { ThirdMoment, PowerTail };

struct AppendixAResult {
    double n = 0.0;
    double lambda = 0.0;
    double value = 0.0;
    double target = 0.0;
    double relative_error = 0.0;
};

// Third moment: n^{2/3} phi(n^{-1/3} lambda) vs sigma_3 lambda^2 / 2.
// Power tail:   n^{g/(g+1)} phi(n^{-1/(g+1)} lambda) vs C_F C(g) lambda^g.
AppendixAResult appendix_a_check(const WeightSpec& spec, AppendixCase which, double lambda, double n);

struct PsiBoundResult {
    double constant = 0.0;   // C' * int_{lambda0}^inf (1 - e^{-y}) y^{-gamma} dy
    double min_ratio = 0.0;  // min over the grid of phi(lambda) / lambda^gamma
    bool holds = false;
};

PsiBoundResult psi_bound_check(const WeightSpec& spec, double lambda0, int grid = 200);

// C(a) = (a+1) Gamma(2-a) / (a (a-1)) for a in (1,2), and 1/2 at a = 2.
double stable_constant(double alpha);

struct DlgCondition {
    double value = 0.0;
    bool flagged = false;  // Psi_n was nonpositive somewhere on [y, a_n]
};

DlgCondition dlg_condition(const LaplaceExponentTable& table, double y);

}  // namespace rig

#endif
