#pragma once

// Adaptive Dormand-Prince 5(4) integrator.  Deliberately independent of the
// solvers under test: it is the relaxation oracle the Newton results are
// checked against.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace eitsim_test {

template <typename Vec, typename F>
Vec integrate_rk45(F&& f, Vec y, double t0, double t1, double rtol = 1e-9,
                   double atol = 1e-12) {
    double t = t0;
    double h = (t1 - t0) * 1e-4;
    const double h_min = (t1 - t0) * 1e-14;
    Vec k1 = f(y);

    long guard = 0;
    while (t < t1) {
        if (++guard > 5'000'000) throw std::runtime_error("rk45: step budget exhausted");
        if (t + h > t1) h = t1 - t;

        const Vec k2 = f(y + h * (1.0 / 5.0) * k1);
        const Vec k3 = f(y + h * ((3.0 / 40.0) * k1 + (9.0 / 40.0) * k2));
        const Vec k4 = f(y + h * ((44.0 / 45.0) * k1 + (-56.0 / 15.0) * k2 + (32.0 / 9.0) * k3));
        const Vec k5 = f(y + h * ((19372.0 / 6561.0) * k1 + (-25360.0 / 2187.0) * k2 +
                                  (64448.0 / 6561.0) * k3 + (-212.0 / 729.0) * k4));
        const Vec k6 = f(y + h * ((9017.0 / 3168.0) * k1 + (-355.0 / 33.0) * k2 +
                                  (46732.0 / 5247.0) * k3 + (49.0 / 176.0) * k4 +
                                  (-5103.0 / 18656.0) * k5));
        const Vec ynew = y + h * ((35.0 / 384.0) * k1 + (500.0 / 1113.0) * k3 +
                                  (125.0 / 192.0) * k4 + (-2187.0 / 6784.0) * k5 +
                                  (11.0 / 84.0) * k6);
        const Vec k7 = f(ynew);
        const Vec err = h * ((35.0 / 384.0 - 5179.0 / 57600.0) * k1 +
                             (500.0 / 1113.0 - 7571.0 / 16695.0) * k3 +
                             (125.0 / 192.0 - 393.0 / 640.0) * k4 +
                             (-2187.0 / 6784.0 + 92097.0 / 339200.0) * k5 +
                             (11.0 / 84.0 - 187.0 / 2100.0) * k6 + (-1.0 / 40.0) * k7);

        double err_norm = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double scale =
                atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double e = std::abs(err[i]) / scale;
            err_norm += e * e;
        }
        err_norm = std::sqrt(err_norm / static_cast<double>(y.size()));

        if (err_norm <= 1.0) {
            t += h;
            y = ynew;
            k1 = k7;  // FSAL
        }
        const double factor =
            std::clamp(0.9 * std::pow(std::max(err_norm, 1e-10), -0.2), 0.2, 5.0);
        h *= factor;
        if (h < h_min) throw std::runtime_error("rk45: step underflow");
    }
    return y;
}

}  // namespace eitsim_test
