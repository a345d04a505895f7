#include "d2dcache/scaling_laws.hpp"

#include <cmath>
#include <stdexcept>

namespace d2dcache {

std::string_view to_string(Regime r)
{
    switch (r) {
    case Regime::R1:
        return "R1";
    case Regime::R2:
        return "R2";
    case Regime::R3:
        return "R3";
    case Regime::R4:
        return "R4";
    }
    return "?";
}

double scaling_alpha(double gamma)
{
    return (1.0 - gamma) / (2.0 - gamma);
}

double rho2_min(double gamma, double M)
{
    return std::pow((1.0 - gamma) / (std::pow(gamma, gamma) * std::pow(M, 1.0 - gamma)),
                    1.0 / (2.0 - gamma));
}

namespace {

double need(const std::optional<double>& v, const char* name, const char* regime)
{
    if (!v) {
        throw std::invalid_argument(std::string("regime ") + regime + " needs constant " + name +
                                    ", which the closed form leaves unspecified; supply it "
                                    "explicitly");
    }
    return *v;
}

} // namespace

std::vector<TradeoffBound> d2d_tradeoff_bound(const TradeoffParams& q)
{
    if (!(q.gamma > 0.0 && q.gamma < 1.0)) {
        throw std::invalid_argument("d2d_tradeoff_bound: gamma must be in (0, 1)");
    }
    if (!(q.M > 0.0) || !(q.m > 0.0) || q.K < 1 || !(q.C_r > 0.0)) {
        throw std::invalid_argument("d2d_tradeoff_bound: M, m, K and C_r must be positive");
    }
    const double g = q.gamma;
    const double alpha = scaling_alpha(g);
    const double base = q.C_r / q.K;
    std::vector<TradeoffBound> out;

    for (double rho1 : q.rho1_grid) {
        if (rho1 < g) {
            throw std::invalid_argument("d2d_tradeoff_bound: rho1 must be >= gamma");
        }
        out.push_back({Regime::R1, (1.0 - g) * std::exp(g - rho1), base * q.M / (rho1 * q.m), rho1});
    }
    if (!q.g_c_grid.empty()) {
        const double A = need(q.A, "A", "R2");
        for (double gc : q.g_c_grid) {
            if (gc > g * q.m / q.M) {
                throw std::invalid_argument("d2d_tradeoff_bound: regime 2 needs g_c <= gamma m / M");
            }
            const double p = 1.0 - std::pow(g, g) * std::pow(q.M * gc / q.m, 1.0 - g);
            const double T = base * A * q.M / (q.m * std::pow(1.0 - p, 1.0 / (1.0 - g)));
            out.push_back({Regime::R2, p, T, gc});
        }
    }
    if (!q.rho2_grid.empty()) {
        const double B = need(q.B, "B", "R3");
        const double lo = rho2_min(g, q.M);
        for (double rho2 : q.rho2_grid) {
            if (rho2 < lo) {
                throw std::invalid_argument("d2d_tradeoff_bound: rho2 below its admissible minimum");
            }
            const double p = 1.0 - std::pow(g, g) * std::pow(q.M, 1.0 - g) *
                                       std::pow(rho2, 1.0 - g) * std::pow(q.m, -alpha);
            out.push_back({Regime::R3, p, base * B * std::pow(q.m, -alpha), rho2});
        }
    }
    if (q.include_r4) {
        const double D = need(q.D, "D", "R4");
        const double a = need(q.a_gamma, "a(gamma)", "R4");
        out.push_back({Regime::R4, 1.0 - a * std::pow(q.m, -alpha), base * D * std::pow(q.m, -alpha), 0.0});
    }
    return out;
}

ScalingSummary scaling_summary(double n, double m, double M, double gamma, double L, double tau)
{
    if (!(n > 0 && m > 0 && M >= 0 && M < m && tau > 0 && L >= tau)) {
        throw std::invalid_argument("scaling_summary: need n, m > 0, 0 <= M < m, 0 < tau <= L");
    }
    (void)gamma;
    ScalingSummary s;
    s.small_storage = M * n < 10.0 * m;
    const double log_ratio = std::log(L / tau);
    s.entries = {
        {"d2d", "Theta(M/m)", M / m},
        {"coded", "Theta(M/m)", M / m},
        {"unicast", "Theta(1/n)", 1.0 / n},
        {"unicast-local-cache", "Theta(1/n)", 1.0 / (n * (1.0 - M / m))},
        {"harmonic", "Theta(1/(m' log(L/tau)))", log_ratio > 0.0 ? 1.0 / (m * log_ratio) : 1.0 / m},
    };
    return s;
}

} // namespace d2dcache
