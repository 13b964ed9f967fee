#pragma once

#include "qrenew/grid.hpp"
#include "qrenew/wtd.hpp"

#include <optional>
#include <span>
#include <vector>

namespace qrenew {

// Pure-jump dynamics (no dephasing, jump = sigma_x conjugation). Since the jump squares to the
// identity, rho(t) = p_even(t) rho(0) + p_odd(t) E[rho(0)], and the trace distance of the
// optimal pair (0, +-1, 0) is |q(t)| with q = p_even - p_odd.

inline constexpr double kDefaultSeriesTolerance = 1e-8;

struct ParityCurve {
    TimeGrid grid;
    std::vector<double> p_even;
    std::vector<double> p_odd;
    std::vector<double> q;
};

/// Unmodified exponential process: q(t) = exp(-2 mu t).
double q_markov(double mu, double t);

/// Modified process, first waiting time Exponential(mu1), then Exponential(mu):
/// q(t) = [2(mu - mu1) e^{-mu1 t} + mu1 e^{-2 mu t}] / (2 mu - mu1).
/// Near mu1 = 2 mu the removable singularity is replaced by its first-order expansion.
double q_exp_2wtd(double mu, double mu1, double t);

/// Zero of q_exp_2wtd, which exists only for mu1 > mu.
std::optional<double> revival_time_exp_2wtd(double mu, double mu1);

/// Unmodified Erlang(r, mu) process. r = 1 and r = 2 use closed forms
/// (r = 2: q = e^{-mu t}(sin mu t + cos mu t)); larger r falls back to parity_series.
ParityCurve q_erlang_unmodified(double mu, int r, const TimeGrid& grid, double tol = kDefaultSeriesTolerance);

/// Modified process with Erlang(2, mu1) first and Erlang(2, mu) afterwards, in closed form.
double q_erlang_modified_22(double mu, double mu1, double t);

/// p_even and p_odd from the time-domain convolution series
///   p_n = (f_1 * ... * f_n) * g_{n+1},
/// truncated once the remaining mass at T drops below tol. Convolutions use the trapezoid
/// rule with two levels of Richardson extrapolation; the internal grid is refined until the
/// extrapolation error estimate is below tol. Throws NumericalError if that cannot be reached.
ParityCurve parity_series(const WtdSequence& seq, const TimeGrid& grid, double tol = kDefaultSeriesTolerance);

/// q(t) from the phase-type representation of Erlang/exponential sequences: the signed
/// occupation of the chain of exponential phases evolves under a triangular-plus-cycle
/// generator, and q is the sum of its entries after exponentiation.
std::vector<double> q_phase_type(const WtdSequence& seq, std::span<const double> times);
std::vector<double> q_phase_type(const WtdSequence& seq, const TimeGrid& grid);

/// Number of strict sign changes along the sequence (exact zeros are skipped).
int count_sign_changes(std::span<const double> values);

}  // namespace qrenew
