#pragma once

#include <string>
#include <vector>

#include "msl/dcmm.hpp"
#include "msl/linalg.hpp"
#include "msl/rng.hpp"

namespace msl {

// Generator family for degree parameters (the F of theta0_i ~ F).
struct DegreeProfile {
    enum class Kind { Uniform, Pareto, Gamma, PointMixture };

    Kind kind = Kind::Uniform;
    double a = 0.0;  // uniform lower / pareto scale / gamma shape
    double b = 0.0;  // uniform upper / pareto shape / gamma rate
    std::vector<double> weights;  // point mixture
    std::vector<double> atoms;

    static DegreeProfile uniform(double lo, double hi);
    static DegreeProfile pareto(double scale, double shape);
    static DegreeProfile gamma(double shape, double rate);
    static DegreeProfile point_mixture(std::vector<double> weights, std::vector<double> atoms);
    static DegreeProfile point_mass(double atom) { return point_mixture({1.0}, {atom}); }

    // Case-insensitive: uniform(a,b), pareto(scale,shape), gamma(shape,rate),
    // mixture(w:x, w:x, ...), pointmass(x).
    static DegreeProfile parse(const std::string& text);
    std::string to_string() const;
    void validate() const;
};

// theta0 ~ profile iid, then theta = target_norm * theta0 / ||theta0||_2.
DegreeParams sample_degrees(const DegreeProfile& profile, int n, double target_norm,
                            RandomSeed seed);

// Empirical CDF of eta_i = theta_i / theta_bar; a right-continuous step
// function whose atoms average to 1 by construction.
struct EmpiricalCdf {
    Vector eta;  // sorted ascending

    double operator()(double t) const;
    int n() const { return static_cast<int>(eta.size()); }
};

EmpiricalCdf empirical_cdf(const DegreeParams& theta);

struct RateInputs {
    int n = 0;
    int k = 0;
    double theta_bar = 0.0;
    double delta_n = 0.0;
    double alpha_n = 0.0;
    double beta_n = 0.0;
};

// err_n = K^{3/2} / (delta_n * sqrt(n * theta_bar^2)).
double baseline_rate(const RateInputs& inputs);

// integral of min{ err_n / sqrt(t ^ 1), 1 } dF_n(t), evaluated as the exact
// finite sum over the atoms of the discrete F_n.
double optimal_rate_integral(const EmpiricalCdf& cdf, double err_n);

// G = K * Pi' Theta H0^{-1} Theta Pi with H0(i,i) = E[d_i] + tau * E[dbar].
Matrix compute_G(const DegreeParams& theta, const MembershipMatrix& pi,
                 const ExpectedAdjacency& omega, double tau);

// Spectrum of PG (real since G is PSD), with the rate quantities of the
// eigengap statistic: alpha_n = lambda_1(PG), beta_n = |lambda_K(PG)|,
// delta_n = min{ alpha_n / sqrt(K), beta_n }.
struct PgSpectrum {
    Vector eigenvalues;  // decreasing magnitude
    Vector perron;       // leading right eigenvector of PG, nonnegative
    double alpha_n = 0.0;
    double beta_n = 0.0;
    double delta_n = 0.0;
};

PgSpectrum delta_n(const MixingMatrix& p, const Matrix& g);

// Measured values for the regularity conditions on (G, PG); consumers decide
// what counts as a pass since the paper's constants are unspecified.
struct ConditionReport {
    double g_norm = 0.0;
    double g_inv_norm = 0.0;
    double degree_balance = 0.0;     // min_k sum_i theta_i pi_i(k) / ||theta||_1
    double alpha_n = 0.0;
    double beta_n = 0.0;
    double delta_n = 0.0;
    double eigengap_ratio = 0.0;     // max_{k != 1} |lambda_k(PG)| / lambda_1(PG)
    double perron_ratio = 0.0;       // min eta_1 / max eta_1
    double pure_degree_ratio = 0.0;  // min over communities of max pure-node theta_i/theta_bar
    std::string summary() const;
};

ConditionReport check_conditions(const DegreeParams& theta, const MembershipMatrix& pi,
                                 const MixingMatrix& p, double tau);

}  // namespace msl
