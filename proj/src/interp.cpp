#include "longfd/interp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "longfd/errors.hpp"

namespace longfd {

PeriodicPchip::PeriodicPchip(std::vector<double> x, std::vector<double> y, double period)
    : x_(std::move(x)), y_(std::move(y)), period_(period) {
    const std::size_t n = x_.size();
    if (n < 4) {
        throw ConfigError("periodic interpolant needs at least 4 knots, got " +
                          std::to_string(n));
    }
    if (y_.size() != n) {
        throw ConfigError("interpolant knot/value count mismatch");
    }
    if (period_ <= 0.0) {
        throw ConfigError("interpolant period must be positive");
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(x_[i + 1] > x_[i])) {
            throw ConfigError("interpolant knots not strictly increasing at index " +
                              std::to_string(i + 1));
        }
    }
    if (!(x_.back() - x_.front() < period_)) {
        throw ConfigError("interpolant knots span a full period or more");
    }
    x0_ = x_.front();

    h_.resize(n);
    for (std::size_t i = 0; i + 1 < n; ++i) h_[i] = x_[i + 1] - x_[i];
    h_[n - 1] = (x_.front() + period_) - x_.back();  // closing interval

    // Secant slopes per interval (periodic), then Fritsch-Carlson limited
    // knot slopes: zero at local extrema, weighted harmonic mean otherwise.
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ynext = y_[(i + 1) % n];
        d[i] = (ynext - y_[i]) / h_[i];
    }
    m_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double dm = d[(i + n - 1) % n];
        const double dp = d[i];
        if (dm * dp <= 0.0) {
            m_[i] = 0.0;
        } else {
            const double hm = h_[(i + n - 1) % n];
            const double hp = h_[i];
            const double w1 = 2.0 * hp + hm;
            const double w2 = hp + 2.0 * hm;
            m_[i] = (w1 + w2) / (w1 / dm + w2 / dp);
        }
    }
}

std::size_t PeriodicPchip::locate(double x, double& t, double& h) const {
    // Reduce into [x0, x0 + period).
    double xr = std::fmod(x - x0_, period_);
    if (xr < 0.0) xr += period_;
    xr += x0_;
    // Last knot <= xr.
    const auto it = std::upper_bound(x_.begin(), x_.end(), xr);
    std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin() - 1);
    if (i >= x_.size()) i = x_.size() - 1;
    h = h_[i];
    t = (xr - x_[i]) / h;
    return i;
}

double PeriodicPchip::value(double x) const {
    double t, h;
    const std::size_t i = locate(x, t, h);
    const std::size_t j = (i + 1) % x_.size();
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[j] + h11 * h * m_[j];
}

double PeriodicPchip::deriv1(double x) const {
    double t, h;
    const std::size_t i = locate(x, t, h);
    const std::size_t j = (i + 1) % x_.size();
    const double t2 = t * t;
    const double d00 = 6.0 * t2 - 6.0 * t;
    const double d10 = 3.0 * t2 - 4.0 * t + 1.0;
    const double d01 = -6.0 * t2 + 6.0 * t;
    const double d11 = 3.0 * t2 - 2.0 * t;
    return (d00 * y_[i] + d10 * h * m_[i] + d01 * y_[j] + d11 * h * m_[j]) / h;
}

double PeriodicPchip::deriv2(double x) const {
    double t, h;
    const std::size_t i = locate(x, t, h);
    const std::size_t j = (i + 1) % x_.size();
    const double s00 = 12.0 * t - 6.0;
    const double s10 = 6.0 * t - 4.0;
    const double s01 = -12.0 * t + 6.0;
    const double s11 = 6.0 * t - 2.0;
    return (s00 * y_[i] + s10 * h * m_[i] + s01 * y_[j] + s11 * h * m_[j]) / (h * h);
}

}  // namespace longfd
