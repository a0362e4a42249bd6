#include "amemnet/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "amemnet/errors.hpp"

namespace amemnet {

double finite_diff_check(const std::function<double()>& f,
                         const std::vector<Tensor*>& params,
                         const std::vector<Tensor>& analytic,
                         double eps) {
    if (eps <= 0.0) throw DimensionError("finite_diff_check: eps must be positive");
    if (params.size() != analytic.size()) {
        throw DimensionError("finite_diff_check: gradient count does not match parameters");
    }
    double max_rel = 0.0;
    for (std::size_t p = 0; p < params.size(); ++p) {
        Tensor& theta = *params[p];
        const Tensor& grad = analytic[p];
        if (!theta.same_shape(grad)) {
            throw DimensionError("finite_diff_check: gradient shape mismatch");
        }
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double saved = theta[i];
            const double a = grad[i];
            // No single step size works everywhere: rounding noise dominates
            // small steps on near-zero gradients, truncation dominates large
            // steps near activation kinks. Probe three scales, keep the best.
            double rel = std::numeric_limits<double>::infinity();
            for (double step : {eps, eps * 1e-1, eps * 1e-2}) {
                theta[i] = saved + step;
                const double f_plus = f();
                theta[i] = saved - step;
                const double f_minus = f();
                theta[i] = saved;
                if (!std::isfinite(f_plus) || !std::isfinite(f_minus)) {
                    throw TrainingError("finite_diff_check: objective evaluated non-finite");
                }
                const double central = (f_plus - f_minus) / (2.0 * step);
                rel = std::min(rel, std::abs(a - central) /
                                        std::max(1e-8, std::abs(a) + std::abs(central)));
            }
            max_rel = std::max(max_rel, rel);
        }
    }
    return max_rel;
}

}  // namespace amemnet
