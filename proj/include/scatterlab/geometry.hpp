#ifndef SCATTERLAB_GEOMETRY_HPP
#define SCATTERLAB_GEOMETRY_HPP

#include <Eigen/Dense>
#include <cmath>

#include "scatterlab/common.hpp"

namespace scatterlab {

// Torus R^2 / 2pi*L0 with L0 = Z(1/a,0) + Z(0,a); a = 1 is the square torus
// R^2 / 2pi*Z^2. Dual-lattice vectors are indexed by integer pairs (m,k)
// with physical components (a*m, k/a) and norm a^2 m^2 + k^2/a^2.
//
// Two scattering points x1 != x2 live on the torus; everything downstream
// depends on them through x0 = x2 - x1 (lattice sums) and, for Fourier
// matrix elements, through the absolute positions as well.
struct TorusGeometry {
    Rational aspect_sq = Rational{1, 1};  // a^2 as an exact fraction
    Eigen::Vector2d x1 = Eigen::Vector2d::Zero();
    Eigen::Vector2d x2 = Eigen::Vector2d::Zero();
    Eigen::Vector2d x0 = Eigen::Vector2d::Zero();  // x2 - x1, reduced

    double aspect() const { return std::sqrt(aspect_sq.value()); }
    bool is_square() const { return aspect_sq.num == 1 && aspect_sq.den == 1; }

    // Physical components of the dual-lattice vector indexed by (m, k).
    Eigen::Vector2d dual_vector(std::int64_t m, std::int64_t k) const {
        const double a = aspect();
        return {a * static_cast<double>(m), static_cast<double>(k) / a};
    }
    // <xi, x> for the dual vector indexed by (m, k) and a torus point x.
    double dual_dot(std::int64_t m, std::int64_t k, const Eigen::Vector2d& x) const {
        const double a = aspect();
        return a * static_cast<double>(m) * x[0] + static_cast<double>(k) * x[1] / a;
    }
};

// Fundamental periods are (2pi/a, 2pi*a).
inline Eigen::Vector2d torus_periods(const Rational& aspect_sq) {
    const double a = std::sqrt(aspect_sq.value());
    return {kTwoPi / a, kTwoPi * a};
}

inline double reduce_mod(double x, double period) {
    double r = std::fmod(x, period);
    if (r < 0) r += period;
    return r;
}

inline TorusGeometry make_geometry(const Rational& aspect_sq, const Eigen::Vector2d& x1,
                                   const Eigen::Vector2d& x2) {
    if (!aspect_sq.positive()) throw std::invalid_argument("geometry: aspect_sq must be positive");
    TorusGeometry g;
    g.aspect_sq = aspect_sq;
    const Eigen::Vector2d per = torus_periods(aspect_sq);
    g.x1 = {reduce_mod(x1[0], per[0]), reduce_mod(x1[1], per[1])};
    g.x2 = {reduce_mod(x2[0], per[0]), reduce_mod(x2[1], per[1])};
    g.x0 = {reduce_mod(g.x2[0] - g.x1[0], per[0]), reduce_mod(g.x2[1] - g.x1[1], per[1])};
    if (g.x0.norm() < 1e-12) throw std::invalid_argument("geometry: coincident scatterers");
    return g;
}

// Default configuration: square torus, x0/pi = (sqrt2 - 1, sqrt3 - 1),
// a Diophantine pair (estimate_type gives a finite type over Q = 1e5).
inline TorusGeometry default_geometry() {
    const Eigen::Vector2d x0{kPi * (std::sqrt(2.0) - 1.0), kPi * (std::sqrt(3.0) - 1.0)};
    return make_geometry(Rational{1, 1}, Eigen::Vector2d::Zero(), x0);
}

// Rectangular-torus configuration with the same Diophantine data: the pair
// (alpha1*a/pi, alpha2/(pi*a)) equals (sqrt2 - 1, sqrt3 - 1).
inline TorusGeometry rectangular_geometry(const Rational& aspect_sq) {
    const double a = std::sqrt(aspect_sq.value());
    const Eigen::Vector2d x0{kPi * (std::sqrt(2.0) - 1.0) / a, kPi * a * (std::sqrt(3.0) - 1.0)};
    return make_geometry(aspect_sq, Eigen::Vector2d::Zero(), x0);
}

}  // namespace scatterlab

#endif
