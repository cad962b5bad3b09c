#pragma once

#include <Eigen/Core>
#include <iosfwd>

namespace magres::synapse {

/// Differential conductance realization of a signed weight matrix. Positive
/// weights live in g_plus, negative magnitudes in g_minus; for every entry
/// at most one of the pair is nonzero and all values sit in [0, g_max].
struct ConductanceNetwork {
    Eigen::MatrixXd g_plus;   // siemens
    Eigen::MatrixXd g_minus;  // siemens
    double g_scale = 0.0;     // siemens per unit weight
    double g_max = 0.0;       // siemens
    int quant_levels = 0;     // 0 = unquantized
};

inline constexpr double default_g_max = 1e-3;  // siemens, the 1/(kOhm-scale) normalization

/// Map signed weights onto conductance pairs with g_scale = g_max / max|W|.
/// Reconstruction (g_plus - g_minus) / g_scale equals W exactly.
ConductanceNetwork weights_to_conductances(const Eigen::MatrixXd& w, double g_max = default_g_max);

/// Snap every conductance to the nearest of the `levels` equispaced values
/// {0, g_max/(levels-1), ..., g_max}. Idempotent; per-entry error is at most
/// g_max / (2*(levels-1)).
ConductanceNetwork quantize(const ConductanceNetwork& net, int levels);

/// Kirchhoff current summation at each row node: i = (g_plus - g_minus) * v.
Eigen::VectorXd input_currents(const ConductanceNetwork& net, const Eigen::VectorXd& v);

/// CSV serialization, one line per entry: row,col,g_plus,g_minus (siemens).
void write_csv(const ConductanceNetwork& net, std::ostream& os);

}  // namespace magres::synapse
