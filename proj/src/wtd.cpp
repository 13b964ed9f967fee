#include "qrenew/wtd.hpp"

#include "qrenew/errors.hpp"

#include <cmath>

namespace qrenew {

namespace {

void require_time(double t) {
    if (!(t >= 0.0)) throw ParameterError("waiting-time distributions are defined for t >= 0");
}

}  // namespace

WtdSpec WtdSpec::exponential(double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw ParameterError("WTD rate mu must be positive and finite");
    return WtdSpec{WtdKind::Exponential, mu, 1};
}

WtdSpec WtdSpec::erlang(int r, double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw ParameterError("WTD rate mu must be positive and finite");
    if (r < 1) throw ParameterError("Erlang shape r must be >= 1");
    return WtdSpec{WtdKind::Erlang, mu, r};
}

double pdf(const WtdSpec& w, double t) {
    require_time(t);
    const int r = w.shape();
    if (r == 1) return w.mu * std::exp(-w.mu * t);
    // mu^r t^{r-1} e^{-mu t} / (r-1)!, evaluated in log space for large r.
    if (t == 0.0) return 0.0;
    return std::exp(r * std::log(w.mu) + (r - 1) * std::log(t) - w.mu * t - std::lgamma(static_cast<double>(r)));
}

double survival(const WtdSpec& w, double t) {
    require_time(t);
    const double x = w.mu * t;
    double term = 1.0;
    double sum = 1.0;
    for (int j = 1; j < w.shape(); ++j) {
        term *= x / j;
        sum += term;
    }
    return std::exp(-x) * sum;
}

double sample(const WtdSpec& w, Rng& rng) {
    double total = 0.0;
    for (int j = 0; j < w.shape(); ++j) total += rng.exponential(w.mu);
    return total;
}

bool WtdSequence::all_exponential() const {
    if (stationary.shape() != 1) return false;
    for (const auto& w : modified) {
        if (w.shape() != 1) return false;
    }
    return true;
}

const WtdSpec& nth_wtd(const WtdSequence& seq, std::size_t n) {
    if (n == 0) throw ParameterError("waiting times are numbered from 1");
    return n <= seq.modified.size() ? seq.modified[n - 1] : seq.stationary;
}

}  // namespace qrenew
