#include "magres/synapse.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "magres/errors.hpp"
#include "magres/io.hpp"

namespace magres::synapse {

ConductanceNetwork weights_to_conductances(const Eigen::MatrixXd& w, double g_max) {
    if (!(g_max > 0.0)) throw config_error("weights_to_conductances: g_max must be > 0");
    const double w_abs_max = w.size() > 0 ? w.cwiseAbs().maxCoeff() : 0.0;
    if (!(w_abs_max > 0.0)) {
        throw config_error("weights_to_conductances: degenerate scale, all-zero weight matrix");
    }
    ConductanceNetwork net;
    net.g_scale = g_max / w_abs_max;
    net.g_max = g_max;
    net.g_plus = w.cwiseMax(0.0) * net.g_scale;
    net.g_minus = (-w).cwiseMax(0.0) * net.g_scale;
    return net;
}

ConductanceNetwork quantize(const ConductanceNetwork& net, int levels) {
    if (levels < 2) throw config_error("quantize: levels must be >= 2");
    const double step = net.g_max / (levels - 1);
    auto snap = [step, g_max = net.g_max](double g) {
        const double q = std::round(g / step) * step;
        return std::clamp(q, 0.0, g_max);
    };
    ConductanceNetwork out = net;
    out.g_plus = net.g_plus.unaryExpr(snap);
    out.g_minus = net.g_minus.unaryExpr(snap);
    out.quant_levels = levels;
    return out;
}

Eigen::VectorXd input_currents(const ConductanceNetwork& net, const Eigen::VectorXd& v) {
    if (net.g_plus.rows() != net.g_minus.rows() || net.g_plus.cols() != net.g_minus.cols()) {
        throw config_error("input_currents: g_plus/g_minus shape mismatch");
    }
    if (net.g_plus.cols() != v.size()) {
        throw config_error("input_currents: voltage vector length does not match network columns");
    }
    return (net.g_plus - net.g_minus) * v;
}

void write_csv(const ConductanceNetwork& net, std::ostream& os) {
    os << "row,col,g_plus,g_minus\n";
    for (Eigen::Index r = 0; r < net.g_plus.rows(); ++r) {
        for (Eigen::Index c = 0; c < net.g_plus.cols(); ++c) {
            os << r << ',' << c << ',' << io::fmt_g9(net.g_plus(r, c)) << ','
               << io::fmt_g9(net.g_minus(r, c)) << '\n';
        }
    }
}

}  // namespace magres::synapse
