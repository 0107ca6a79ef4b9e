#include "rdbc/spectral.hpp"

#include "rdbc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace rdbc {

namespace {

constexpr int kBisectionSteps = 60;
constexpr int kMaxModes = 64;
constexpr double kModeMargin = 0.9;

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

} // namespace

double sl_root(double theta, int n)
{
    if (!(theta > 0.0) || n < 1) {
        throw DomainError("sl_root needs theta > 0 and n >= 1");
    }
    // nu cos(nu) + theta sin(nu) has the same roots as nu cot(nu) + theta inside the bracket,
    // and is positive at the left end, negative at the right end when n is odd (flipped when even).
    auto f = [theta](double nu) { return nu * std::cos(nu) + theta * std::sin(nu); };
    double lo = (2 * n - 1) * std::numbers::pi / 2.0;
    double hi = n * std::numbers::pi;
    const double flo = f(lo);
    for (int it = 0; it < kBisectionSteps; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if ((f(mid) > 0.0) == (flo > 0.0)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double SLSpectrum::phi(int n, double x) const
{
    return scale.at(n - 1) * std::sin(nu[n - 1] * x);
}

SLSpectrum sl_spectrum(double theta, double omega, double epsilon, int count)
{
    SLSpectrum s;
    s.theta = theta;
    s.omega = omega;
    s.epsilon = epsilon;
    for (int n = 1; n <= count; ++n) {
        const double nu = sl_root(theta, n);
        const double c = std::cos(nu);
        s.nu.push_back(nu);
        s.mu.push_back(epsilon * nu * nu - omega);
        s.scale.push_back(std::sqrt(2.0 * theta / (theta + c * c)));
    }
    return s;
}

double tilde_mu(const PlantParams& p, int n)
{
    const double a = (n - 0.5) * std::numbers::pi;
    return p.epsilon * a * a + 2.0 * p.epsilon * p.q;
}

LemmaConstants lemma_constants(const PlantParams& p, double sigma1, double sigma2, double norm_g)
{
    p.require_assumption();
    LemmaConstants lc;
    lc.mu_tilde1 = tilde_mu(p, 1);
    lc.mu_q1 = p.epsilon * std::pow(sl_root(p.q, 1), 2);
    lc.mu_r1 = p.epsilon * std::pow(sl_root(p.r(), 1), 2);

    const double sigma1_cap = std::min(lc.mu_tilde1, lc.mu_q1);
    if (!(sigma1 >= 0.0 && sigma1 < sigma1_cap)) {
        throw RangeError("sigma1 = " + fmt(sigma1) + " must lie in [0, min(mu_tilde1, mu_q1)) = [0, " +
                         fmt(sigma1_cap) + ")");
    }
    if (!(sigma2 >= 0.0 && sigma2 < lc.mu_r1)) {
        throw RangeError("sigma2 = " + fmt(sigma2) + " must lie in [0, mu_r1) = [0, " + fmt(lc.mu_r1) + ")");
    }

    const double eps = p.epsilon;
    const double q = p.q;
    const double r = p.r();
    const double root3 = std::sqrt(3.0);
    lc.M1 = 2.0 * q + 2.0 * eps * q * q / (lc.mu_tilde1 - sigma1);
    lc.C1 = lc.mu_r1 / (root3 * (1.0 + r) * (lc.mu_r1 - sigma2));
    lc.C2 = (lc.mu_r1 * p.lambda + 2.0 * root3 * eps * (1.0 + r) * norm_g) /
            (2.0 * root3 * eps * (1.0 + r) * (lc.mu_r1 - sigma2));
    return lc;
}

LemmaConstants lemma_constants(const KernelSet& ks, double sigma1, double sigma2)
{
    return lemma_constants(ks.params, sigma1, sigma2, std::sqrt(ks.norm_g_sq));
}

ModalGains modal_gains(std::span<const double> k, const Grid& grid, const SLSpectrum& spectrum, int N)
{
    if (N < 1 || N > spectrum.size()) {
        throw DomainError("modal_gains needs 1 <= N <= spectrum size");
    }
    const double h = grid.step();
    ModalGains out;
    std::vector<double> prod(grid.nodes());
    std::vector<double> residual(k.begin(), k.end());
    for (int n = 1; n <= N; ++n) {
        for (int i = 0; i < grid.nodes(); ++i) {
            prod[i] = k[i] * spectrum.phi(n, grid.x(i));
        }
        const double kn = trapezoid(prod, h);
        out.k_n.push_back(kn);
        for (int i = 0; i < grid.nodes(); ++i) {
            residual[i] -= kn * spectrum.phi(n, grid.x(i));
        }
    }
    out.tail = l2_norm(residual, h);
    double parseval = std::pow(l2_norm(k, h), 2);
    for (double kn : out.k_n) {
        parseval -= kn * kn;
    }
    out.tail_parseval = std::sqrt(std::max(0.0, parseval));
    return out;
}

GammaCurves::GammaCurves(const KernelSet& ks, const SLSpectrum& spectrum, const ModalGains& modal, double C1,
                         double sigma)
    : C1_(C1), sigma_(sigma), Ltilde_(ks.norms.Ltilde), tail_(modal.tail)
{
    const PlantParams& p = ks.params;
    for (std::size_t i = 0; i < modal.k_n.size(); ++i) {
        const int n = static_cast<int>(i) + 1;
        const double kn = modal.k_n[i];
        const double at_one = std::fabs(kn * spectrum.phi(n, 1.0));
        hold_sum_ += p.epsilon * ks.norm_k * at_one + std::fabs(spectrum.mu[i] * kn);
        output_sum_ += 0.5 * p.lambda * at_one + ks.norm_p1 * std::fabs(kn);
    }
}

double GammaCurves::gamma1(double T) const
{
    const double grow = std::exp(sigma_ * T);
    return 1.0 - C1_ * Ltilde_ * T * grow * hold_sum_ - C1_ * Ltilde_ * tail_ * (grow + 1.0);
}

double GammaCurves::gamma2(double T) const
{
    return 1.0 - C1_ * T / std::numbers::sqrt2 * std::exp(sigma_ * T) * output_sum_;
}

double GammaCurves::xi(double T) const
{
    return std::min(gamma1(T), gamma2(T));
}

double find_Tstar(const GammaCurves& curves)
{
    if (!(curves.gamma1(0.0) > 0.0)) {
        throw PreconditionError("gamma1(0) = " + fmt(curves.gamma1(0.0)) +
                                " <= 0: small-gain condition fails, increase N");
    }
    double lo = 0.0;
    double hi = 1.0;
    if (curves.xi(hi) > 0.0) {
        return hi;
    }
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if (curves.xi(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

CertificateConstants certificate_constants(const KernelSet& ks, const LemmaConstants& lc,
                                           const GammaCurves& curves, double T)
{
    const PlantParams& p = ks.params;
    const KernelNorms& kn = ks.norms;
    const double half_ratio = p.lambda / (2.0 * p.epsilon);
    const double c2_factor = lc.C2 / std::numbers::sqrt2 + 1.0;

    CertificateConstants cc;
    cc.Omega1 = std::max({kn.Ltilde, kn.Ptilde + half_ratio + std::sqrt(kn.Px_sq_int), 1.0});
    cc.Omega2 = std::max({kn.Ktilde,
                          c2_factor * ((lc.M1 + 1.0) * kn.Qtilde + half_ratio + std::sqrt(kn.Qx_sq_int)),
                          c2_factor});
    cc.Xi = curves.xi(T);
    cc.M_of_T = cc.Omega1 * cc.Omega2 / cc.Xi;
    return cc;
}

GammaCurves gamma_curves(const KernelSet& ks, const SamplingCertificate& cert)
{
    return GammaCurves(ks, cert.spectrum, cert.modal, cert.lemma.C1, cert.sigma);
}

SamplingCertificate build_certificate(const KernelSet& ks, const CertificateOptions& opts)
{
    const PlantParams& p = ks.params;
    SamplingCertificate cert;

    if (opts.sigma) {
        cert.sigma = *opts.sigma;
    } else {
        const double mu_q1 = p.epsilon * std::pow(sl_root(p.q, 1), 2);
        const double mu_r1 = p.epsilon * std::pow(sl_root(p.r(), 1), 2);
        cert.sigma = 0.01 * std::min({tilde_mu(p, 1), mu_q1, mu_r1});
    }
    cert.sigma1 = cert.sigma;
    cert.sigma2 = cert.sigma;
    cert.lemma = lemma_constants(ks, cert.sigma1, cert.sigma2);

    const int max_modes = opts.modes ? std::max(*opts.modes, 1) : kMaxModes;
    cert.spectrum = sl_spectrum(p.q, p.lambda, p.epsilon, max_modes);

    const double gain_factor = 2.0 * cert.lemma.C1 * ks.norms.Ltilde;
    if (opts.modes) {
        cert.N = *opts.modes;
        cert.modal = modal_gains(ks.k, ks.grid, cert.spectrum, cert.N);
    } else {
        for (int N = 1; N <= kMaxModes; ++N) {
            cert.N = N;
            cert.modal = modal_gains(ks.k, ks.grid, cert.spectrum, N);
            if (gain_factor * cert.modal.tail < kModeMargin) {
                break;
            }
        }
    }
    cert.small_gain = gain_factor * cert.modal.tail;

    const GammaCurves curves = gamma_curves(ks, cert);
    cert.gamma1_at_0 = curves.gamma1(0.0);
    cert.gamma2_at_0 = curves.gamma2(0.0);
    cert.Tstar = find_Tstar(curves);
    cert.constants = certificate_constants(ks, cert.lemma, curves, cert.Tstar);
    return cert;
}

} // namespace rdbc
