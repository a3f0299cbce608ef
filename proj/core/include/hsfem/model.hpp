#pragma once

#include <numbers>
#include <utility>
#include <vector>

namespace hsfem {

/// Proliferation rate G as a function of pressure.
///
/// `Arctan` is G(p) = scale * atan(slope * (P_max - p)_+). `Table` linearly
/// interpolates (p, G) knots starting at p = 0 and drops linearly to zero at
/// P_max. `Zero` switches growth off and exists for verification runs; it is
/// not an admissible law (G(0) = 0).
struct GrowthLaw {
    enum class Kind { Arctan, Table, Zero };

    Kind kind = Kind::Arctan;
    double scale = 200.0 / std::numbers::pi;
    double slope = 4.0;
    std::vector<std::pair<double, double>> table;

    static GrowthLaw arctan(double scale = 200.0 / std::numbers::pi, double slope = 4.0);
    static GrowthLaw from_table(std::vector<std::pair<double, double>> knots);
    static GrowthLaw zero();
};

double growth(double p, const GrowthLaw& law, double p_max);

/// Checks G(0) > 0, G = 0 beyond P_max and strict decrease on (0, P_max) at
/// `samples` points. Throws DomainError naming the failed condition. The zero
/// law is accepted without checks.
void validate_growth(const GrowthLaw& law, double p_max, int samples = 1024);

struct ModelParams {
    int k = 100;
    double nu = 0.5;
    double p_max = 1.0;
    GrowthLaw growth;
    double alpha = 1.0;
    double tau = 1e-5;
    double t_final = 0.1;
    /// When false the pressure-driven diffusion term is dropped (pure nu-diffusion).
    bool nonlinear_diffusion = true;

    /// Throws DomainError on k < 2, P_max <= 0, tau <= 0, nu < 0, ...
    void validate() const;
};

/// p(n) = k/(k-1) n^(k-1), evaluated in the log domain.
double pressure(double n, int k);

/// Inverse of pressure(): n(p) = ((k-1)/k p)^(1/(k-1)).
double density_of_pressure(double p, int k);

/// Saturation density N_max(k) = n(P_max).
double n_max(int k, double p_max);

/// n^k in the log domain; exact zero at n = 0.
double power_k(double n, int k);

/// alpha * exp(-(x^2 + y^2)).
struct GaussianDatum {
    double alpha = 1.0;
    double operator()(double x, double y) const;
};

inline GaussianDatum initial_gaussian(double alpha) { return GaussianDatum{alpha}; }

} // namespace hsfem
