#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace d2dcache {

enum class Regime { R1, R2, R3, R4 };

std::string_view to_string(Regime r);

/// Inputs of the one-hop D2D throughput-outage bound (dominant terms only).
struct TradeoffParams {
    double gamma = 0.4;
    double M = 20.0;
    double m = 300.0;
    double C_r = 1.0; ///< link rate
    int K = 9;        ///< reuse factor
    std::vector<double> rho1_grid;  ///< regime 1 sweep (each >= gamma)
    std::vector<double> g_c_grid;   ///< regime 2 sweep
    std::vector<double> rho2_grid;  ///< regime 3 sweep (each >= rho2_min)
    bool include_r4 = false;
    std::optional<double> A;
    std::optional<double> B;
    std::optional<double> D;
    std::optional<double> a_gamma;
};

struct TradeoffBound {
    Regime regime = Regime::R1;
    double p = 0.0;
    double T = 0.0;
    double knob = 0.0; ///< rho1, g_c or rho2 that produced the point
};

/// alpha = (1 - gamma) / (2 - gamma).
double scaling_alpha(double gamma);

/// Smallest admissible rho2: ((1-gamma) / (gamma^gamma M^(1-gamma)))^(1/(2-gamma)).
double rho2_min(double gamma, double M);

/**
 * Evaluates the dominant terms of the bound over the configured grids.
 * Regime 1 needs no constants. Regimes 2-4 throw std::invalid_argument
 * naming the missing constant when their grid is non-empty but the
 * constant is unset; those constants are not given by the closed form.
 */
std::vector<TradeoffBound> d2d_tradeoff_bound(const TradeoffParams& params);

struct ScalingEntry {
    std::string scheme;
    std::string order;   ///< symbolic dominant order
    double proxy = 0.0;  ///< order evaluated at the given parameters
};

struct ScalingSummary {
    std::vector<ScalingEntry> entries;
    bool small_storage = false; ///< Mn < 10 m: the aggregate-cache regime does not hold
};

ScalingSummary scaling_summary(double n, double m, double M, double gamma, double L, double tau);

} // namespace d2dcache
