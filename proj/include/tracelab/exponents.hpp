#pragma once

// Exponent algebra for the trace space of W^{1,p} ∩ L^q on half-spaces.
//
// With 1 < p < n and p* = np/(n-p) < q, the boundary integrability of traces
// is r = 1 + q(1 - 1/p); the truncation lifting uses beta = q/p - 1, so that
// r = q - beta. All functions are pure.

#include <limits>

namespace tracelab {

/// An integrability exponent in (1, ∞]. The infinite case is a tag, not a
/// large float; callers that need a finite value must ask for it.
class Integrability {
public:
    static Integrability infinity() noexcept { return Integrability(); }
    static Integrability finite(double value);

    bool is_infinite() const noexcept { return infinite_; }
    /// Throws DomainError for the infinite tag.
    double value() const;
    /// +inf for the infinite tag; useful for comparisons only.
    double as_double() const noexcept {
        return infinite_ ? std::numeric_limits<double>::infinity() : value_;
    }

    friend bool operator==(const Integrability&, const Integrability&) = default;

private:
    Integrability() = default;
    explicit Integrability(double v) : infinite_(false), value_(v) {}

    bool infinite_ = true;
    double value_ = 0.0;
};

/// n p / (n - p); requires 1 <= p < n.
double sobolev_conjugate(double p, int n);

/// r = 1 + q (1 - 1/p); requires p > 1, q > p.
double trace_exponent(double p, double q);

/// beta = q/p - 1; requires q > p > 1.
double beta_exponent(double p, double q);

/// p (n-1) / (n-p): the limit of r as q decreases to p*.
double limiting_trace_exponent(double p, int n);

/// Exponents of the two interpolation routes that fall short of r.
struct InterpolationExponents {
    double theta = 0.0;      // 1/q = (1 - theta)/p*
    double p_theta = 0.0;    // 1/p_theta = theta/p + (1 - theta)/q
    double r_tilde = 0.0;    // (n-1) q / n, complex-interpolation target
    double theta_min = 0.0;  // p / (pq - q + p)
    double p_max = 0.0;      // 1/theta_min, equals r
};

/// Requires 1 < p < n and p* <= q < ∞ (q = p* is the degenerate endpoint).
InterpolationExponents interpolation_exponents(int n, double p, double q);

/// Validated (n, p, q) with every derived exponent.
class ExponentSet {
public:
    /// Requires n >= 2, 1 < p < n, q > p* (or q = ∞).
    static ExponentSet make(int n, double p, Integrability q);
    static ExponentSet make(int n, double p, double q) { return make(n, p, Integrability::finite(q)); }

    int n() const noexcept { return n_; }
    double p() const noexcept { return p_; }
    const Integrability& q() const noexcept { return q_; }
    bool q_is_infinite() const noexcept { return q_.is_infinite(); }

    double p_star() const noexcept { return p_star_; }
    double p_bar() const noexcept { return p_bar_; }
    double p_conjugate() const noexcept { return p_ / (p_ - 1.0); }
    /// Trace smoothness 1 - 1/p.
    double s() const noexcept { return 1.0 - 1.0 / p_; }

    /// Throw DomainError when q = ∞.
    double q_finite() const;
    double r() const;
    double beta() const;

private:
    ExponentSet() = default;

    int n_ = 0;
    double p_ = 0.0;
    Integrability q_ = Integrability::infinity();
    double p_star_ = 0.0;
    double p_bar_ = 0.0;
    double r_ = 0.0;
    double beta_ = 0.0;
};

/// Residuals of the scalar identities tying the exponents together, relative
/// to the magnitude of the quantities involved. All vanish in exact arithmetic.
struct IdentityResiduals {
    double r_equals_q_minus_beta = 0.0;
    double holder_pairing = 0.0;       // (r - 1) p' = q
    double q_over_beta = 0.0;          // q/beta = pq/(q - p)
    double p_beta_plus_one = 0.0;      // p (beta + 1) = q
    double p_max_equals_r = 0.0;
    double limit_at_p_star = 0.0;      // r(p, p*) = p_bar

    double max() const noexcept;
};

IdentityResiduals identity_residuals(const ExponentSet& e);

}  // namespace tracelab
