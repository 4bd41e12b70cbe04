#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "aperiodic/errors.hpp"

// Exact arithmetic in a real quadratic field: values (a + b*sqrt(D))/c with
// integer a, b, c.  Sign tests, floors, and fractional parts are exact, which
// is what makes half-open interval membership on the circle decidable.

namespace aperiodic {

using int128 = __int128;

namespace detail {

inline int128 abs128(int128 v) { return v < 0 ? -v : v; }

inline int128 gcd128(int128 x, int128 y) {
    x = abs128(x);
    y = abs128(y);
    while (y != 0) {
        int128 t = x % y;
        x = y;
        y = t;
    }
    return x;
}

inline std::int64_t narrow128(int128 v) {
    constexpr int128 lim = int128(1) << 62;
    if (v >= lim || v <= -lim)
        throw domain_error("quadratic arithmetic overflow: coefficients too large");
    return static_cast<std::int64_t>(v);
}

inline std::int64_t isqrt64(std::int64_t n) {
    if (n < 0) throw domain_error("isqrt of negative");
    if (n == 0) return 0;
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

inline int128 isqrt128(int128 n) {
    if (n < 0) throw domain_error("isqrt of negative");
    if (n == 0) return 0;
    auto r = static_cast<int128>(std::sqrt(static_cast<long double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

} // namespace detail

// (a + b*sqrt(D)) / c, c > 0, gcd-reduced.  D == 0 marks a rational (b == 0).
struct Quad {
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::int64_t c = 1;
    std::int64_t D = 0;
};

inline Quad quad_reduce(int128 a, int128 b, int128 c, std::int64_t D) {
    if (c == 0) throw domain_error("quadratic value with zero denominator");
    if (c < 0) { a = -a; b = -b; c = -c; }
    if (b == 0) D = 0;
    int128 g = detail::gcd128(detail::gcd128(a, b), c);
    if (g > 1) { a /= g; b /= g; c /= g; }
    return Quad{detail::narrow128(a), detail::narrow128(b), detail::narrow128(c), D};
}

inline Quad quad_make(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t D) {
    if (b != 0) {
        if (D < 2) throw domain_error("sqrt argument must be >= 2 for an irrational value");
        std::int64_t s = detail::isqrt64(D);
        if (s * s == D) { // perfect square folds into the rational part
            a += b * s;
            b = 0;
            D = 0;
        }
    }
    return quad_reduce(a, b, c, D);
}

inline Quad quad_int(std::int64_t n) { return Quad{n, 0, 1, 0}; }

inline std::int64_t quad_field(const Quad& x, const Quad& y) {
    if (x.b != 0 && y.b != 0 && x.D != y.D)
        throw contract_error("mixing values from different quadratic fields");
    return x.b != 0 ? x.D : y.D;
}

inline Quad quad_add(const Quad& x, const Quad& y) {
    std::int64_t D = quad_field(x, y);
    int128 a = int128(x.a) * y.c + int128(y.a) * x.c;
    int128 b = int128(x.b) * y.c + int128(y.b) * x.c;
    return quad_reduce(a, b, int128(x.c) * y.c, D);
}

inline Quad quad_neg(const Quad& x) { return Quad{-x.a, -x.b, x.c, x.D}; }

inline Quad quad_sub(const Quad& x, const Quad& y) { return quad_add(x, quad_neg(y)); }

inline Quad quad_mul_int(const Quad& x, std::int64_t n) {
    return quad_reduce(int128(x.a) * n, int128(x.b) * n, x.c, x.D);
}

// Sign of p + q*sqrt(D) with 128-bit p, q.
inline int sign_linear(int128 p, int128 q, std::int64_t D) {
    if (q == 0) return p > 0 ? 1 : (p < 0 ? -1 : 0);
    if (p == 0) return q > 0 ? 1 : -1;
    if (p > 0 && q > 0) return 1;
    if (p < 0 && q < 0) return -1;
    constexpr int128 lim = int128(1) << 56;
    if (detail::abs128(p) >= lim || detail::abs128(q) >= lim)
        throw domain_error("quadratic comparison overflow");
    int128 pp = p * p;
    int128 qq = q * q * D;
    if (pp == qq) return 0; // cannot happen for non-square D
    bool p_dominates = pp > qq;
    return p_dominates ? (p > 0 ? 1 : -1) : (q > 0 ? 1 : -1);
}

inline int quad_cmp(const Quad& x, const Quad& y) {
    std::int64_t D = quad_field(x, y);
    int128 p = int128(x.a) * y.c - int128(y.a) * x.c;
    int128 q = int128(x.b) * y.c - int128(y.b) * x.c;
    return sign_linear(p, q, D);
}

inline int quad_sign(const Quad& x) { return sign_linear(x.a, x.b, x.D); }

inline long double quad_to_ld(const Quad& x) {
    long double v = static_cast<long double>(x.a);
    if (x.b != 0) v += static_cast<long double>(x.b) * std::sqrt(static_cast<long double>(x.D));
    return v / static_cast<long double>(x.c);
}

inline double quad_to_double(const Quad& x) { return static_cast<double>(quad_to_ld(x)); }

inline std::int64_t quad_floor(const Quad& x) {
    auto t = static_cast<std::int64_t>(std::floor(quad_to_ld(x))) - 2;
    int guard = 0;
    while (quad_cmp(x, quad_int(t + 1)) >= 0) {
        ++t;
        if (++guard > 8) throw domain_error("quad_floor failed to converge");
    }
    return t;
}

inline Quad quad_frac(const Quad& x) { return quad_sub(x, quad_int(quad_floor(x))); }

// ---------------------------------------------------------------------------
// Rotation numbers: irrational phi in (0,1), either exact quadratic or a
// decimal surrogate with a declared precision.  The decimal path carries a
// guard band; membership queries that fall inside the band raise
// ambiguity_error telling the caller to raise precision or use the quadratic
// form.
// ---------------------------------------------------------------------------
class RotationNumber {
public:
    enum class Repr { Quadratic, Decimal };

    static RotationNumber quadratic(std::int64_t a, std::int64_t b, std::int64_t c,
                                    std::int64_t D) {
        RotationNumber r;
        r.repr_ = Repr::Quadratic;
        r.value_ = quad_make(a, b, c, D);
        if (r.value_.b == 0)
            throw domain_error("rotation number must be irrational; got a rational value");
        r.qa_ = a; r.qb_ = b; r.qc_ = c; r.qD_ = D;
        r.check_range();
        return r;
    }

    // digits: "0.6180339887..."; declared_digits: how many fractional digits
    // the caller vouches for.
    static RotationNumber decimal(std::string_view text, int declared_digits) {
        RotationNumber r;
        r.repr_ = Repr::Decimal;
        r.decimal_text_ = std::string(text);
        r.declared_digits_ = declared_digits;
        std::size_t pos = 0;
        bool neg = false;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            neg = text[pos] == '-';
            ++pos;
        }
        std::int64_t ip = 0;
        std::size_t ip_digits = 0;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
            ip = ip * 10 + (text[pos] - '0');
            ++pos;
            ++ip_digits;
        }
        if (ip_digits == 0 || pos >= text.size() || text[pos] != '.')
            throw parse_error("decimal rotation number must look like 0.ddd...");
        ++pos;
        std::int64_t num = 0;
        std::int64_t den = 1;
        int stored = 0;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
            if (stored < 18) { // int64 capacity; further digits cannot be represented
                num = num * 10 + (text[pos] - '0');
                den *= 10;
                ++stored;
            }
            ++pos;
        }
        if (pos != text.size() || stored == 0)
            throw parse_error("trailing characters in decimal rotation number");
        if (neg || ip != 0)
            throw domain_error("rotation number must lie in (0,1)");
        if (declared_digits < 1) throw domain_error("declared precision must be >= 1");
        r.value_ = quad_reduce(num, 0, den, 0);
        r.effective_digits_ = std::min(declared_digits, stored);
        r.check_range();
        return r;
    }

    // Grammar: "quad:(A+B*sqrtD)/C" or "dec:<value>:<digits>".
    static RotationNumber parse(std::string_view text);
    std::string to_string() const;

    Repr repr() const { return repr_; }
    bool is_quadratic() const { return repr_ == Repr::Quadratic; }
    const Quad& as_quad() const { return value_; }
    double value() const { return quad_to_double(value_); }

    // Exact fractional part of n*phi.
    Quad frac_multiple(std::int64_t n) const {
        if (repr_ == Repr::Decimal) {
            int128 m = int128(n) % value_.c * value_.a % value_.c;
            if (m < 0) m += value_.c;
            return quad_reduce(m, 0, value_.c, 0);
        }
        return quad_frac(quad_mul_int(value_, n));
    }

    // Absolute width of the ambiguity band for index-n membership queries:
    // the fixed 1e-12 band plus the propagated uncertainty |n| * 10^-digits.
    long double guard_band(std::int64_t n) const {
        if (repr_ == Repr::Quadratic) return 0.0L;
        long double unit = std::pow(10.0L, -static_cast<long double>(effective_digits_));
        long double prop = static_cast<long double>(n < 0 ? -n : n) * unit;
        return std::max(1e-12L, prop);
    }

    int effective_digits() const { return effective_digits_; }

private:
    void check_range() const {
        if (quad_sign(value_) <= 0 || quad_cmp(value_, quad_int(1)) >= 0)
            throw domain_error("rotation number must lie in (0,1)");
    }

    Repr repr_ = Repr::Quadratic;
    Quad value_{};
    std::int64_t qa_ = 0, qb_ = 0, qc_ = 1, qD_ = 0;
    std::string decimal_text_;
    int declared_digits_ = 0;
    int effective_digits_ = 18;
};

inline RotationNumber RotationNumber::parse(std::string_view text) {
    auto bad = [&] { return parse_error("bad rotation number '" + std::string(text) +
                                        "'; expected quad:(A+B*sqrtD)/C or dec:value:digits"); };
    if (text.rfind("quad:", 0) == 0) {
        std::string_view body = text.substr(5);
        // (A+B*sqrtD)/C with optional signs on A and B
        if (body.empty() || body.front() != '(') throw bad();
        std::size_t close = body.find(')');
        if (close == std::string_view::npos) throw bad();
        std::string inner(body.substr(1, close - 1));
        std::string_view rest = body.substr(close + 1);
        if (rest.size() < 2 || rest[0] != '/') throw bad();
        std::int64_t a = 0, b = 0, D = 0, c = 0;
        // split inner at the '+' or '-' that starts the sqrt term
        std::size_t split = inner.find("*sqrt");
        if (split == std::string::npos) throw bad();
        std::size_t bstart = split;
        while (bstart > 0 && (std::isdigit(static_cast<unsigned char>(inner[bstart - 1]))))
            --bstart;
        if (bstart > 0 && (inner[bstart - 1] == '+' || inner[bstart - 1] == '-')) --bstart;
        if (bstart == 0) throw bad();
        try {
            a = std::stoll(inner.substr(0, bstart));
            b = std::stoll(inner.substr(bstart, split - bstart));
            D = std::stoll(inner.substr(split + 5));
            c = std::stoll(std::string(rest.substr(1)));
        } catch (const std::exception&) {
            throw bad();
        }
        return RotationNumber::quadratic(a, b, c, D);
    }
    if (text.rfind("dec:", 0) == 0) {
        std::string_view body = text.substr(4);
        std::size_t colon = body.rfind(':');
        if (colon == std::string_view::npos) throw bad();
        int digits = 0;
        try {
            digits = std::stoi(std::string(body.substr(colon + 1)));
        } catch (const std::exception&) {
            throw bad();
        }
        return RotationNumber::decimal(body.substr(0, colon), digits);
    }
    throw bad();
}

inline std::string RotationNumber::to_string() const {
    if (repr_ == Repr::Quadratic) {
        std::string s = "quad:(" + std::to_string(qa_);
        s += qb_ >= 0 ? "+" : "";
        s += std::to_string(qb_) + "*sqrt" + std::to_string(qD_) + ")/" + std::to_string(qc_);
        return s;
    }
    return "dec:" + decimal_text_ + ":" + std::to_string(declared_digits_);
}

inline RotationNumber golden_rotation() { return RotationNumber::quadratic(-1, 1, 2, 5); }

// ---------------------------------------------------------------------------
// Incremental orbit {n*phi}, {(n+1)*phi}, ...  Keeps the fractional part as
// exact numerators over a fixed denominator so stepping is a couple of
// integer additions.
// ---------------------------------------------------------------------------
class RotationOrbit {
public:
    RotationOrbit(const RotationNumber& phi, std::int64_t start)
        : phi_(&phi), n_(start) {
        Quad p = phi.as_quad();
        Quad f = phi.frac_multiple(start);
        // rebase both onto a common denominator
        int128 g = detail::gcd128(p.c, f.c);
        int128 c = int128(p.c) / g * f.c;
        c_ = detail::narrow128(c);
        pa_ = detail::narrow128(int128(p.a) * (c / p.c));
        pb_ = detail::narrow128(int128(p.b) * (c / p.c));
        a_ = detail::narrow128(int128(f.a) * (c / f.c));
        b_ = detail::narrow128(int128(f.b) * (c / f.c));
        D_ = p.D;
    }

    std::int64_t index() const { return n_; }

    // {n*phi} as an exact value.
    Quad frac() const { return quad_reduce(a_, b_, c_, b_ == 0 ? 0 : D_); }

    // true iff {n*phi} < phi, i.e. the Sturmian letter is 0.
    bool in_base_interval() const {
        check_band();
        return sign_linear(int128(a_) - pa_, int128(b_) - pb_, D_) < 0;
    }

    void step() {
        a_ += pa_;
        b_ += pb_;
        // wrap: frac >= 1  <=>  a + b*sqrt(D) - c >= 0
        if (sign_linear(int128(a_) - c_, b_, D_) >= 0) a_ -= c_;
        ++n_;
        constexpr std::int64_t lim = std::int64_t(1) << 55;
        if (a_ > lim || a_ < -lim || b_ > lim || b_ < -lim)
            throw domain_error("rotation orbit coefficient overflow; restart the orbit");
    }

private:
    void check_band() const {
        if (phi_->is_quadratic()) return;
        long double f = static_cast<long double>(a_) / c_; // rational path: b_ == 0
        long double p = quad_to_ld(phi_->as_quad());
        auto ambiguous = [&] {
            throw ambiguity_error(
                "decimal rotation number too coarse to decide membership at index " +
                std::to_string(n_) + "; raise the declared precision or use the quadratic form");
        };
        // {n*phi} against 0/1 carries uncertainty ~ n * 10^-digits; against the
        // endpoint phi the relevant difference is {(n-1)*phi}, so n = 0 and
        // n = 1 are exact identities and always decidable
        if (n_ != 0 && std::min(f, 1.0L - f) < phi_->guard_band(n_)) ambiguous();
        if (n_ != 1 && std::fabs(f - p) < phi_->guard_band(n_ - 1)) ambiguous();
    }

    const RotationNumber* phi_;
    std::int64_t a_, b_, c_, pa_, pb_, D_;
    std::int64_t n_;
};

// Rotation-coding letter: 0 iff {n*phi} lands in [0, phi).
inline bool sturmian_is_one(const RotationNumber& phi, std::int64_t n) {
    RotationOrbit orbit(phi, n);
    return !orbit.in_base_interval();
}

} // namespace aperiodic
