#pragma once

#include "rdbc/grid.hpp"

#include <Eigen/Dense>

#include <span>

namespace rdbc {

/// Coefficients of u_t = eps u_xx + lambda u, u(0)=0, u_x(1) + q u(1) = U.
struct PlantParams {
    double epsilon = 1.0;
    double lambda = 10.0;
    double q = 5.1;

    /// Throws DomainError unless epsilon > 0, lambda >= 0, q > 0.
    void validate() const;
    /// q > lambda/(2 eps), needed to synthesize the controller.
    bool satisfies_assumption() const noexcept { return r() > 0.0; }
    /// Throws AssumptionViolation when satisfies_assumption() is false.
    void require_assumption() const;

    double r() const noexcept { return q - lambda / (2.0 * epsilon); }
    double p10() const noexcept { return lambda / (2.0 * epsilon); }
};

// Closed-form kernels. P, Q live on 0 <= x <= y <= 1; K, L on 0 <= y <= x <= 1.
// Calling one on the wrong triangle throws DomainError.
double kernel_P(double x, double y, const PlantParams& p);
double kernel_Q(double x, double y, const PlantParams& p);
double kernel_K(double x, double y, const PlantParams& p);
double kernel_L(double x, double y, const PlantParams& p);

double kernel_P_x(double x, double y, const PlantParams& p);
double kernel_P_y(double x, double y, const PlantParams& p);
double kernel_Q_x(double x, double y, const PlantParams& p);
double kernel_K_x(double x, double y, const PlantParams& p);

/// Observer output-injection gain p1(x) = -eps q P(x,1) - eps P_y(x,1).
double gain_p1(double x, const PlantParams& p);

/// Control gain k(y) = r K(1,y) + K_x(1,y) and its first two y-derivatives.
double gain_k(double y, const PlantParams& p);
double gain_k_prime(double y, const PlantParams& p);
double gain_k_second(double y, const PlantParams& p);

/// Coupling gain g(x_i) = p1(x_i) - int_0^{x_i} K(x_i,y) p1(y) dy on every grid node (trapezoid).
GridFunction gain_g(const PlantParams& p, const Grid& grid);

struct KernelNorms {
    double Ltilde = 1.0;    ///< 1 + ||L|| over 0<=y<=x<=1
    double Ptilde = 1.0;    ///< 1 + ||P|| over 0<=x<=y<=1
    double Qtilde = 1.0;
    double Ktilde = 1.0;
    double Px_sq_int = 0.0; ///< double integral of P_x^2 over its triangle
    double Qx_sq_int = 0.0;
};

/// Triangle norms by double trapezoid, inner integral first. Requires grid.intervals() >= 64.
KernelNorms kernel_norms(const PlantParams& p, const Grid& grid);

/// Precomputed discrete Volterra operators on one grid.
///
/// Each operator is a dense matrix of kernel values times trapezoid weights, so a transform is one
/// matrix-vector product.
class VolterraTransforms {
public:
    VolterraTransforms() = default;
    VolterraTransforms(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q, const Eigen::MatrixXd& K,
                       const Eigen::MatrixXd& L, double h);

    /// w_hat = f - int_0^x K(x,y) f(y) dy
    GridFunction controller_forward(std::span<const double> f) const;
    /// u_hat = w + int_0^x L(x,y) w(y) dy
    GridFunction controller_inverse(std::span<const double> w) const;
    /// w_tilde = f + int_x^1 Q(x,y) f(y) dy
    GridFunction observer_forward(std::span<const double> f) const;
    /// u_tilde = w - int_x^1 P(x,y) w(y) dy
    GridFunction observer_inverse(std::span<const double> w) const;

private:
    Eigen::MatrixXd wK_, wL_, wQ_, wP_;
};

/// All kernel tables, gains and derived constants for one parameter set and grid.
struct KernelSet {
    PlantParams params;
    Grid grid{1};

    // (M+1)x(M+1) tables indexed [i][j] = kernel(x_i, x_j); zero off the kernel's triangle.
    Eigen::MatrixXd P, Q, K, L;

    GridFunction k, k_prime, k_second;
    GridFunction p1;
    GridFunction g;

    double r = 0.0;
    double p10 = 0.0;
    KernelNorms norms;
    double norm_g_sq = 0.0;
    double norm_k = 0.0;
    double norm_p1 = 0.0;

    VolterraTransforms transforms;
};

/// Builds every table. Throws AssumptionViolation if q <= lambda/(2 eps), DomainError if M < 16.
KernelSet build_kernel_set(const PlantParams& p, int intervals);

} // namespace rdbc
