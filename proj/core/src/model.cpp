#include "hsfem/model.hpp"

#include "hsfem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hsfem {

GrowthLaw GrowthLaw::arctan(double scale, double slope)
{
    GrowthLaw law;
    law.kind = Kind::Arctan;
    law.scale = scale;
    law.slope = slope;
    return law;
}

GrowthLaw GrowthLaw::from_table(std::vector<std::pair<double, double>> knots)
{
    if (knots.empty() || knots.front().first != 0.0) {
        throw DomainError("growth table must start at p = 0");
    }
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (!(knots[i].first > knots[i - 1].first)) {
            throw DomainError("growth table pressures must be strictly increasing");
        }
    }
    GrowthLaw law;
    law.kind = Kind::Table;
    law.table = std::move(knots);
    return law;
}

GrowthLaw GrowthLaw::zero()
{
    GrowthLaw law;
    law.kind = Kind::Zero;
    return law;
}

double growth(double p, const GrowthLaw& law, double p_max)
{
    if (p >= p_max) {
        return 0.0;
    }
    switch (law.kind) {
    case GrowthLaw::Kind::Zero:
        return 0.0;
    case GrowthLaw::Kind::Arctan:
        return law.scale * std::atan(law.slope * (p_max - p));
    case GrowthLaw::Kind::Table: {
        const auto& t = law.table;
        if (p <= 0.0) {
            return t.front().second;
        }
        // Knots at or past P_max are ignored; the last segment ends at (P_max, 0).
        std::size_t i = 0;
        while (i + 1 < t.size() && t[i + 1].first < p_max && t[i + 1].first <= p) {
            ++i;
        }
        double p1 = p_max, g1 = 0.0;
        if (i + 1 < t.size() && t[i + 1].first < p_max) {
            p1 = t[i + 1].first;
            g1 = t[i + 1].second;
        }
        const double w = (p - t[i].first) / (p1 - t[i].first);
        return (1.0 - w) * t[i].second + w * g1;
    }
    }
    return 0.0;
}

void validate_growth(const GrowthLaw& law, double p_max, int samples)
{
    if (law.kind == GrowthLaw::Kind::Zero) {
        return;
    }
    if (!(growth(0.0, law, p_max) > 0.0)) {
        throw DomainError("growth law: G(0) must be positive");
    }
    if (growth(p_max, law, p_max) != 0.0 || growth(2.0 * p_max, law, p_max) != 0.0) {
        throw DomainError("growth law: G must vanish for p >= P_max");
    }
    double prev = growth(0.0, law, p_max);
    for (int i = 1; i <= samples; ++i) {
        const double p = p_max * static_cast<double>(i) / (samples + 1);
        const double g = growth(p, law, p_max);
        if (!(g < prev)) {
            throw DomainError("growth law: not strictly decreasing near p = " + std::to_string(p));
        }
        prev = g;
    }
}

void ModelParams::validate() const
{
    if (k < 2) {
        throw DomainError("k must be an integer >= 2");
    }
    if (!(p_max > 0.0) || !std::isfinite(p_max)) {
        throw DomainError("P_max must be positive");
    }
    if (!(nu >= 0.0) || !std::isfinite(nu)) {
        throw DomainError("nu must be nonnegative");
    }
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw DomainError("tau must be positive");
    }
    if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
        throw DomainError("t_final must be nonnegative");
    }
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw DomainError("alpha must be positive");
    }
    validate_growth(growth, p_max);
}

double power_k(double n, int k)
{
    if (n < 0.0) {
        throw DomainError("power_k: negative density");
    }
    if (n == 0.0) {
        return 0.0;
    }
    return std::exp(static_cast<double>(k) * std::log(n));
}

double pressure(double n, int k)
{
    if (n < 0.0) {
        throw DomainError("pressure: negative density");
    }
    if (k < 2) {
        throw DomainError("pressure: k must be >= 2");
    }
    if (n == 0.0) {
        return 0.0;
    }
    const double km1 = static_cast<double>(k - 1);
    return std::exp(km1 * std::log(n)) * static_cast<double>(k) / km1;
}

double density_of_pressure(double p, int k)
{
    if (p < 0.0) {
        throw DomainError("density_of_pressure: negative pressure");
    }
    if (k < 2) {
        throw DomainError("density_of_pressure: k must be >= 2");
    }
    if (p == 0.0) {
        return 0.0;
    }
    const double km1 = static_cast<double>(k - 1);
    return std::exp(std::log(km1 / static_cast<double>(k) * p) / km1);
}

double n_max(int k, double p_max)
{
    if (!(p_max > 0.0)) {
        throw DomainError("n_max: P_max must be positive");
    }
    return density_of_pressure(p_max, k);
}

double GaussianDatum::operator()(double x, double y) const
{
    return alpha * std::exp(-(x * x + y * y));
}

} // namespace hsfem
