#include "tracelab/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tracelab/error.hpp"

namespace tracelab {

namespace {

double relative(double a, double b) {
    const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    return std::fabs(a - b) / scale;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

}  // namespace

Integrability Integrability::finite(double value) {
    require(std::isfinite(value) && value > 1.0, "integrability exponent must be a finite value > 1");
    return Integrability(value);
}

double Integrability::value() const {
    require(!infinite_, "integrability exponent is infinite");
    return value_;
}

double sobolev_conjugate(double p, int n) {
    require(n >= 1, "dimension must be positive");
    require(p >= 1.0 && p < n, "Sobolev conjugate requires 1 <= p < n");
    return n * p / (n - p);
}

double trace_exponent(double p, double q) {
    require(p > 1.0 && q > p && std::isfinite(q), "trace exponent requires 1 < p < q < inf");
    return 1.0 + q * (1.0 - 1.0 / p);
}

double beta_exponent(double p, double q) {
    require(p > 1.0 && q > p && std::isfinite(q), "beta requires 1 < p < q < inf");
    return q / p - 1.0;
}

double limiting_trace_exponent(double p, int n) {
    require(p >= 1.0 && p < n, "limiting trace exponent requires 1 <= p < n");
    return p * (n - 1.0) / (n - p);
}

InterpolationExponents interpolation_exponents(int n, double p, double q) {
    require(n >= 2, "dimension must be >= 2");
    require(p > 1.0 && p < n, "interpolation exponents require 1 < p < n");
    const double p_star = sobolev_conjugate(p, n);
    // q = p* is admitted as the endpoint where theta = 0.
    require(std::isfinite(q) && q >= p_star * (1.0 - 1e-15), "interpolation exponents require p* <= q < inf");

    InterpolationExponents out;
    out.theta = std::max(0.0, 1.0 - p_star / q);
    out.p_theta = 1.0 / (out.theta / p + (1.0 - out.theta) / q);
    out.r_tilde = (n - 1.0) * q / n;
    out.theta_min = p / (p * q - q + p);
    out.p_max = 1.0 / out.theta_min;
    return out;
}

ExponentSet ExponentSet::make(int n, double p, Integrability q) {
    require(n >= 2, "dimension must be >= 2");
    require(p > 1.0 && p < n, "exponent set requires 1 < p < n");
    ExponentSet e;
    e.n_ = n;
    e.p_ = p;
    e.q_ = q;
    e.p_star_ = sobolev_conjugate(p, n);
    e.p_bar_ = limiting_trace_exponent(p, n);
    if (q.is_infinite()) {
        e.r_ = std::numeric_limits<double>::infinity();
        e.beta_ = std::numeric_limits<double>::infinity();
    } else {
        require(q.value() > e.p_star_, "exponent set requires q > p*");
        e.r_ = trace_exponent(p, q.value());
        e.beta_ = beta_exponent(p, q.value());
    }
    return e;
}

double ExponentSet::q_finite() const { return q_.value(); }

double ExponentSet::r() const {
    require(!q_.is_infinite(), "r is undefined for q = inf");
    return r_;
}

double ExponentSet::beta() const {
    require(!q_.is_infinite(), "beta is undefined for q = inf");
    return beta_;
}

double IdentityResiduals::max() const noexcept {
    return std::max({r_equals_q_minus_beta, holder_pairing, q_over_beta, p_beta_plus_one,
                     p_max_equals_r, limit_at_p_star});
}

IdentityResiduals identity_residuals(const ExponentSet& e) {
    const double p = e.p();
    const double q = e.q_finite();
    const double r = e.r();
    const double beta = e.beta();
    const auto interp = interpolation_exponents(e.n(), p, q);

    IdentityResiduals out;
    out.r_equals_q_minus_beta = relative(r, q - beta);
    out.holder_pairing = relative((r - 1.0) * e.p_conjugate(), q);
    out.q_over_beta = relative(q / beta, p * q / (q - p));
    out.p_beta_plus_one = relative(p * (beta + 1.0), q);
    out.p_max_equals_r = relative(interp.p_max, r);
    out.limit_at_p_star = relative(trace_exponent(p, e.p_star()), e.p_bar());
    return out;
}

}  // namespace tracelab
