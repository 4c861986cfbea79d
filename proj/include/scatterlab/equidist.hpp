#ifndef SCATTERLAB_EQUIDIST_HPP
#define SCATTERLAB_EQUIDIST_HPP

#include <Eigen/Dense>
#include <optional>

#include "scatterlab/greens.hpp"
#include "scatterlab/sieve.hpp"

namespace scatterlab::equidist {

struct StateEntry {
    lattice::LatticePoint xi;
    std::int64_t key = 0;
    cplx c{0.0, 0.0};    // d1 e^{-i<xi,x1>} + d2 e^{-i<xi,x2>}
    double denom = 0.0;  // norm(xi) - lambda, |denom| <= L
};

// Spectral window data of the truncated state g_{lambda,L}. norm_sq_trunc is
// the Parseval value (1/4pi^2) sum |c|^2 / denom^2.
struct TruncatedState {
    double lambda = 0.0;
    double L = 0.0;
    Eigen::Vector2cd d;
    TorusGeometry geom;
    std::vector<StateEntry> entries;  // lexicographic in xi
    double norm_sq_trunc = 0.0;
    bool empty_flagged = false;
};

TruncatedState truncated_state(double lambda, const Eigen::Vector2cd& d,
                               const TorusGeometry& geom, const sieve::FilterParams& p,
                               std::optional<double> L_override = {});

struct MatElem {
    cplx value{0.0, 0.0};
    std::size_t terms = 0;  // size of the window-intersection sum; 0 is an
                            // exact structural zero, not a small number
};

// <e^{i<zeta,x>} G_{lambda,L}, G_{lambda,L}> = (1/4pi^2) sum over window
// points xi with xi+zeta also in the window of
// c(xi) conj(c(xi+zeta)) / (denom(xi) denom(xi+zeta)).
MatElem matrix_element(const TruncatedState& state, const lattice::LatticePoint& zeta);

// Normalized variant (divides by norm_sq_trunc; requires a nonempty state).
MatElem matrix_element_normalized(const TruncatedState& state, const lattice::LatticePoint& zeta);

// Flat lattice-point table to a norm cutoff, for the untruncated Parseval
// sums. cos/sin carry <xi, x0>.
struct PointTable {
    TorusGeometry geom;
    double cutoff = 0.0;
    std::vector<std::int32_t> xi1, xi2;
    std::vector<std::int64_t> key;
    std::vector<double> cos_x0, sin_x0;

    static PointTable build(const TorusGeometry& geom, double cutoff);
    std::size_t size() const { return key.size(); }
};

// Untruncated Parseval sums for one (lambda, d): raw(zeta) is the numerator
// sum over all |xi|^2 <= R; normalized(zeta) = raw(zeta)/raw(0) so that
// zeta = 0 gives exactly 1.
class FullSummer {
  public:
    FullSummer(const PointTable& table, double lambda, const Eigen::Vector2cd& d, double R);
    cplx raw(const lattice::LatticePoint& zeta) const;
    cplx normalized(const lattice::LatticePoint& zeta) const;
    double raw0() const { return raw0_; }
    double tail_bound() const;  // on raw sums

  private:
    const PointTable& pts_;
    double lambda_;
    Eigen::Vector2cd d_;
    double R_;
    double raw0_ = 0.0;
};

struct FullElem {
    cplx value{0.0, 0.0};
    double tail_bound = 0.0;
};

// Normalized untruncated matrix element; absolutely convergent (terms decay
// like norm^-4). Requires R >= lambda + 1e5.
FullElem matrix_element_full(double lambda, const Eigen::Vector2cd& d,
                             const lattice::LatticePoint& zeta, const TorusGeometry& geom,
                             double R);

struct Observable {
    std::vector<std::pair<lattice::LatticePoint, cplx>> coeffs;  // finite support
    bool hermitian = true;

    cplx a_hat(const lattice::LatticePoint& zeta) const;
    // Bundled test observable: a_hat(zeta) = e^{-|zeta|^2} on |zeta| <= 8.
    static Observable bundled(const TorusGeometry& geom);
};

enum class ExpectationMode { Truncated, Full };

struct Expectation {
    cplx value{0.0, 0.0};
    bool empty_window = false;
};

// sum_zeta a_hat(zeta) <e^{i<zeta,x>} g, g> in the requested mode; the
// zeta = 0 term is a_hat(0) exactly.
Expectation observable_expectation(double lambda, const Eigen::Vector2cd& d, const Observable& a,
                                   ExpectationMode mode, const TorusGeometry& geom,
                                   const sieve::FilterParams& p, double R);

// ||g_lambda - g_{lambda,L}||^2 = 2 - 2 sqrt(raw_trunc / raw_full), computed
// from the two Parseval expansions on a common scale. Empty window gives 2.
double truncation_gap(double lambda, const Eigen::Vector2cd& d, const TorusGeometry& geom,
                      const sieve::FilterParams& p, double R,
                      std::optional<double> L_override = {});

// Window and full Parseval quadratic forms (raw scale): ||G_L||^2_raw = d* W d,
// ||G||^2_raw = d* F d. Exposes the exact worst case over coefficient pairs.
std::pair<Eigen::Matrix2d, Eigen::Matrix2d> parseval_grams(double lambda,
                                                           const TorusGeometry& geom,
                                                           const sieve::FilterParams& p, double R,
                                                           std::optional<double> L_override = {});

struct DecayRow {
    double lambda = 0.0;
    bool in_linf = false;
    double dev_full = 0.0;
    double dev_trunc = 0.0;
    double norm_sq = 0.0;      // 16 pi^4-normalized ||G_lambda||^2
    std::int64_t window_size = 0;
    bool empty_window = false;
};

struct DecayResult {
    std::vector<DecayRow> rows;
    double fitted_exponent = 0.0;  // log-log envelope fit over Lambda_inf rows
    std::int64_t fit_count = 0;
};

struct DecayOptions {
    Eigen::Vector2cd d = Eigen::Vector2cd(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
    double R_margin = 1e5;  // R = lambda + R_margin
    unsigned threads = 1;
};

DecayResult decay_experiment(const std::vector<double>& lambdas, const Observable& a,
                             const TorusGeometry& geom, const lattice::NormTable& table,
                             const sieve::FilterParams& p, const DecayOptions& opt = {});

std::string to_csv(const DecayResult& result);
std::string to_plot_data(const DecayResult& result);  // log10_lambda,log10_dev

}  // namespace scatterlab::equidist

#endif
