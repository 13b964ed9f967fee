#pragma once

#include "qrenew/rng.hpp"

#include <cstddef>
#include <vector>

namespace qrenew {

enum class WtdKind { Exponential, Erlang };

/// Waiting-time distribution: Erlang(r, mu), the r-fold convolution of Exponential(mu).
/// Exponential is the r = 1 case.
struct WtdSpec {
    WtdKind kind = WtdKind::Exponential;
    double mu = 1.0;
    int r = 1;

    static WtdSpec exponential(double mu);
    static WtdSpec erlang(int r, double mu);

    /// Number of exponential phases (1 for Exponential).
    int shape() const { return kind == WtdKind::Exponential ? 1 : r; }
    double mean() const { return shape() / mu; }
    double variance() const { return shape() / (mu * mu); }

    friend bool operator==(const WtdSpec&, const WtdSpec&) = default;
};

double pdf(const WtdSpec& w, double t);
double survival(const WtdSpec& w, double t);
/// Erlang draws are sums of `shape()` exponential draws.
double sample(const WtdSpec& w, Rng& rng);

/// Modified renewal sequence: the first k waiting times follow `modified[0..k)`,
/// all later ones follow `stationary`. k = 0 is the ordinary renewal process.
struct WtdSequence {
    std::vector<WtdSpec> modified;
    WtdSpec stationary;

    std::size_t k() const { return modified.size(); }
    bool all_exponential() const;
};

/// Distribution of the n-th waiting time, n >= 1.
const WtdSpec& nth_wtd(const WtdSequence& seq, std::size_t n);

}  // namespace qrenew
