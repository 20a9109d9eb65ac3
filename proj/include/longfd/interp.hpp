#pragma once

// Periodic shape-preserving cubic interpolation (Fritsch-Carlson slopes,
// Hermite evaluation). C1 across knots; first/second derivatives come from
// the piecewise cubic. Used by the tabulated aerodynamic model.

#include <cstddef>
#include <vector>

namespace longfd {

class PeriodicPchip {
  public:
    PeriodicPchip() = default;

    // Knots must be strictly increasing and span less than one period; the
    // closing interval [x.back(), x.front() + period] wraps around.
    // Throws ConfigError on fewer than 4 knots or non-increasing knots.
    PeriodicPchip(std::vector<double> x, std::vector<double> y, double period);

    double value(double x) const;
    double deriv1(double x) const;
    double deriv2(double x) const;

    std::size_t size() const { return x_.size(); }

  private:
    // Locates the interval containing x (after periodic reduction) and
    // returns the local coordinate t in [0,1) plus the interval width.
    std::size_t locate(double x, double& t, double& h) const;

    std::vector<double> x_, y_;  // knots and values
    std::vector<double> h_;      // interval widths, h_[i] = x_[i+1] - x_[i] (periodic)
    std::vector<double> m_;      // limited knot slopes
    double period_ = 0.0;
    double x0_ = 0.0;
};

}  // namespace longfd
