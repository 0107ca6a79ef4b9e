#pragma once

#include "rdbc/grid.hpp"
#include "rdbc/kernels.hpp"

#include <optional>
#include <span>
#include <vector>

namespace rdbc {

/// Root of nu cot(nu) = -theta inside ((2n-1) pi/2, n pi), by bisection.
double sl_root(double theta, int n);

/// Eigen-data of -eps f'' - omega f on {f(0) = 0, f'(1) + theta f(1) = 0}.
struct SLSpectrum {
    double theta = 0.0;
    double omega = 0.0;
    double epsilon = 1.0;
    std::vector<double> nu;    ///< nu[n-1], n = 1..N
    std::vector<double> mu;    ///< eps nu^2 - omega
    std::vector<double> scale; ///< sqrt(2 theta / (theta + cos^2 nu))

    int size() const noexcept { return static_cast<int>(nu.size()); }
    /// Orthonormal eigenfunction n (1-based) at x.
    double phi(int n, double x) const;
};

SLSpectrum sl_spectrum(double theta, double omega, double epsilon, int count);

/// Eigenvalue n of -eps f'' + 2 eps q f with f'(0) = f(1) = 0.
double tilde_mu(const PlantParams& p, int n);

struct LemmaConstants {
    double M1 = 0.0;
    double C1 = 0.0;
    double C2 = 0.0;
    double mu_tilde1 = 0.0; ///< smallest eigenvalue of the Neumann/Dirichlet shifted operator
    double mu_q1 = 0.0;     ///< eps nu_{q,1}^2
    double mu_r1 = 0.0;     ///< eps nu_{r,1}^2
};

/// Decay-estimate constants. Throws RangeError if sigma1 is outside [0, min(mu_tilde1, mu_q1)) or
/// sigma2 outside [0, mu_r1).
LemmaConstants lemma_constants(const PlantParams& p, double sigma1, double sigma2, double norm_g);
LemmaConstants lemma_constants(const KernelSet& ks, double sigma1, double sigma2);

struct ModalGains {
    std::vector<double> k_n;
    double tail = 0.0;          ///< ||k - h|| by quadrature of (k - h)^2
    double tail_parseval = 0.0; ///< sqrt(max(0, ||k||^2 - sum k_n^2))
};

/// Projects `k` onto the first N eigenfunctions of `spectrum` (trapezoid quadrature).
ModalGains modal_gains(std::span<const double> k, const Grid& grid, const SLSpectrum& spectrum, int N);

/// gamma1(T), gamma2(T): the small-gain margins of a sample-and-hold schedule with diameter T.
class GammaCurves {
public:
    GammaCurves(const KernelSet& ks, const SLSpectrum& spectrum, const ModalGains& modal, double C1,
                double sigma);

    double gamma1(double T) const;
    double gamma2(double T) const;
    double xi(double T) const;

    double C1() const noexcept { return C1_; }
    double sigma() const noexcept { return sigma_; }
    double Ltilde() const noexcept { return Ltilde_; }
    double tail() const noexcept { return tail_; }
    /// sum_n (eps ||k|| |k_n phi_n(1)| + |mu_n k_n|)
    double hold_sum() const noexcept { return hold_sum_; }
    /// sum_n (lambda/2 |k_n phi_n(1)| + ||p1|| |k_n|)
    double output_sum() const noexcept { return output_sum_; }

private:
    double C1_;
    double sigma_;
    double Ltilde_;
    double tail_;
    double hold_sum_ = 0.0;
    double output_sum_ = 0.0;
};

/// Supremum of {T in (0,1] : gamma1(T) > 0 and gamma2(T) > 0}, located by bisection.
/// Throws PreconditionError("increase N") when gamma1(0) <= 0.
double find_Tstar(const GammaCurves& curves);

struct CertificateConstants {
    double Omega1 = 0.0;
    double Omega2 = 0.0;
    double Xi = 0.0;
    double M_of_T = 0.0; ///< Omega1 Omega2 / Xi
};

CertificateConstants certificate_constants(const KernelSet& ks, const LemmaConstants& lc,
                                           const GammaCurves& curves, double T);

struct CertificateOptions {
    std::optional<double> sigma; ///< default 0.01 min(mu_tilde1, mu_q1, mu_r1)
    std::optional<int> modes;    ///< default smallest N <= 64 with 2 C1 Ltilde tail < 0.9
};

struct SamplingCertificate {
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double sigma = 0.0;
    LemmaConstants lemma;
    int N = 0;
    ModalGains modal;
    double small_gain = 0.0; ///< 2 C1 Ltilde ||k - h||, must stay below 1
    double gamma1_at_0 = 0.0;
    double gamma2_at_0 = 0.0;
    double Tstar = 0.0;
    CertificateConstants constants; ///< evaluated at Tstar
    SLSpectrum spectrum;            ///< theta = q, omega = lambda
};

SamplingCertificate build_certificate(const KernelSet& ks, const CertificateOptions& opts = {});

/// Curves for an existing certificate.
GammaCurves gamma_curves(const KernelSet& ks, const SamplingCertificate& cert);

} // namespace rdbc
