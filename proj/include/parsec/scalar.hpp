#pragma once

// Exact scalar arithmetic: rationals, root-of-unity exponents and the
// cyclotomic fields Q(zeta_N) they generate.  Field elements are stored as
// integer polynomials over a common denominator, reduced modulo Phi_N;
// values of different moduli combine by re-embedding into the lcm modulus.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace parsec {

using Int      = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational rat(long num, long den = 1) { return Rational(Int(num), Int(den)); }

inline std::string rat_str(const Rational& q) {
    std::ostringstream os;
    os << numerator(q);
    if (denominator(q) != 1) os << '/' << denominator(q);
    return os.str();
}

// ---------------------------------------------------------------------------
// Integer polynomials, ascending coefficients.

using IntPoly = std::vector<Int>;

inline IntPoly poly_mul_int(const IntPoly& a, const IntPoly& b) {
    IntPoly r(a.size() + b.size() - 1, Int(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

// Exact division of integer polynomials; requires b monic and b | a.
inline IntPoly poly_div_exact_int(IntPoly a, const IntPoly& b) {
    if (b.empty() || b.back() != 1) throw std::invalid_argument("divisor must be monic");
    if (a.size() < b.size()) {
        for (const auto& c : a)
            if (c != 0) throw std::invalid_argument("not divisible");
        return {Int(0)};
    }
    IntPoly q(a.size() - b.size() + 1, Int(0));
    for (size_t k = q.size(); k-- > 0;) {
        Int lead = a[k + b.size() - 1];
        q[k]     = lead;
        if (lead != 0)
            for (size_t j = 0; j < b.size(); ++j) a[k + j] -= lead * b[j];
    }
    for (const auto& c : a)
        if (c != 0) throw std::invalid_argument("not divisible");
    return q;
}

// N-th cyclotomic polynomial, computed by dividing x^N - 1 by the product
// of Phi_d over proper divisors d of N.
inline const IntPoly& cyclotomic_poly(unsigned n) {
    static std::vector<IntPoly> cache{IntPoly{}};  // index 0 unused
    if (n == 0) throw std::invalid_argument("cyclotomic_poly: N >= 1 required");
    if (n < cache.size() && !cache[n].empty()) return cache[n];
    if (n >= cache.size()) cache.resize(n + 1);
    IntPoly num(n + 1, Int(0));
    num[0] = -1;
    num[n] = 1;
    IntPoly den{Int(1)};
    for (unsigned d = 1; d < n; ++d)
        if (n % d == 0) den = poly_mul_int(den, cyclotomic_poly(d));
    cache[n] = poly_div_exact_int(num, den);
    return cache[n];
}

inline unsigned euler_phi(unsigned n) { return static_cast<unsigned>(cyclotomic_poly(n).size() - 1); }

// ---------------------------------------------------------------------------
// Root-of-unity exponents: zeta_N^k with 0 <= k < N.

struct RootExp {
    unsigned modulus = 1;
    unsigned exponent = 0;

    RootExp() = default;
    RootExp(unsigned n, long long k) : modulus(n) {
        if (n == 0) throw std::invalid_argument("RootExp: modulus must be positive");
        long long m = k % static_cast<long long>(n);
        if (m < 0) m += n;
        exponent = static_cast<unsigned>(m);
    }

    RootExp embed(unsigned m) const {
        if (m % modulus != 0) throw std::invalid_argument("RootExp: incompatible modulus");
        return RootExp(m, static_cast<long long>(exponent) * (m / modulus));
    }
    RootExp operator*(const RootExp& o) const {
        unsigned m = std::lcm(modulus, o.modulus);
        return RootExp(m, (long long)embed(m).exponent + o.embed(m).exponent);
    }
    RootExp inverse() const { return RootExp(modulus, -(long long)exponent); }
    bool operator==(const RootExp& o) const {
        unsigned m = std::lcm(modulus, o.modulus);
        return embed(m).exponent == o.embed(m).exponent;
    }
};

// ---------------------------------------------------------------------------
// Elements of Q(zeta_N): residues modulo Phi_N in the power basis, held as
// integer coefficients over one positive denominator in lowest terms.

class Cyclo {
public:
    Cyclo() : mod_(1), num_(1, Int(0)), den_(1) {}
    explicit Cyclo(const Rational& q) : mod_(1), num_{numerator(q)}, den_(denominator(q)) {}

    static Cyclo zero() { return Cyclo(); }
    static Cyclo one() { return Cyclo(Rational(1)); }
    static Cyclo from_rational(const Rational& q) { return Cyclo(q); }
    static Cyclo from_coeffs(unsigned n, const std::vector<Rational>& coeffs) {
        Int den = 1;
        for (const auto& q : coeffs) den = boost::multiprecision::lcm(den, denominator(q));
        IntPoly num(coeffs.size());
        for (size_t i = 0; i < coeffs.size(); ++i)
            num[i] = numerator(coeffs[i]) * (den / denominator(coeffs[i]));
        return Cyclo(n, std::move(num), den);
    }

    // zeta_N^k reduced modulo Phi_N
    static Cyclo root(const RootExp& r) {
        IntPoly p(r.exponent + 1, Int(0));
        p[r.exponent] = 1;
        return Cyclo(r.modulus, std::move(p), Int(1));
    }
    static Cyclo root(unsigned n, long long k) { return root(RootExp(n, k)); }

    unsigned modulus() const { return mod_; }
    std::vector<Rational> rational_coeffs() const {
        std::vector<Rational> out(num_.size());
        for (size_t i = 0; i < num_.size(); ++i) out[i] = Rational(num_[i], den_);
        return out;
    }

    bool is_zero() const {
        for (const auto& c : num_)
            if (c != 0) return false;
        return true;
    }
    bool is_rational() const {
        for (size_t i = 1; i < num_.size(); ++i)
            if (num_[i] != 0) return false;
        return true;
    }
    Rational rational_part() const { return Rational(num_[0], den_); }

    Cyclo embed(unsigned m) const {
        if (m == mod_) return *this;
        if (m % mod_ != 0) throw std::invalid_argument("Cyclo: incompatible modulus");
        unsigned step = m / mod_;
        IntPoly p((num_.size() - 1) * step + 1, Int(0));
        for (size_t i = 0; i < num_.size(); ++i) p[i * step] = num_[i];
        return Cyclo(m, std::move(p), den_);
    }

    friend Cyclo operator+(const Cyclo& a, const Cyclo& b) {
        if (a.mod_ != b.mod_) {
            unsigned m = std::lcm(a.mod_, b.mod_);
            return a.embed(m) + b.embed(m);
        }
        Int g = boost::multiprecision::gcd(a.den_, b.den_);
        Int fa = b.den_ / g, fb = a.den_ / g;
        Cyclo r;
        r.mod_ = a.mod_;
        r.den_ = a.den_ * fa;
        r.num_.resize(a.num_.size());
        for (size_t i = 0; i < a.num_.size(); ++i) r.num_[i] = a.num_[i] * fa + b.num_[i] * fb;
        r.normalize();
        return r;
    }
    friend Cyclo operator-(const Cyclo& a, const Cyclo& b) { return a + (-b); }
    Cyclo operator-() const {
        Cyclo r = *this;
        for (auto& c : r.num_) c = -c;
        return r;
    }
    friend Cyclo operator*(const Cyclo& a, const Cyclo& b) {
        if (a.is_rational()) {
            if (a.num_[0] == 0) return Cyclo::zero();
            Cyclo r = b;
            for (auto& c : r.num_) c *= a.num_[0];
            r.den_ *= a.den_;
            r.normalize();
            return r;
        }
        if (b.is_rational()) return b * a;
        if (a.mod_ != b.mod_) {
            unsigned m = std::lcm(a.mod_, b.mod_);
            return a.embed(m) * b.embed(m);
        }
        IntPoly p(a.num_.size() + b.num_.size() - 1, Int(0));
        for (size_t i = 0; i < a.num_.size(); ++i) {
            if (a.num_[i] == 0) continue;
            for (size_t j = 0; j < b.num_.size(); ++j) p[i + j] += a.num_[i] * b.num_[j];
        }
        return Cyclo(a.mod_, std::move(p), a.den_ * b.den_);
    }
    friend Cyclo operator*(const Rational& q, const Cyclo& a) { return Cyclo(q) * a; }

    Cyclo inverse() const {
        if (is_zero()) throw std::domain_error("Cyclo: division by zero");
        // extended Euclid in Q[x] against Phi_N on the rational view
        std::vector<Rational> r0 = phi_rational(mod_), r1 = trim(rational_coeffs());
        std::vector<Rational> s0{Rational(0)}, s1{Rational(1)};
        while (degree(r1) > 0) {
            auto [q, r] = poly_divmod(r0, r1);
            r0 = std::move(r1);
            r1 = trim(std::move(r));
            auto qs = poly_mul(q, s1);
            auto ns = poly_sub(s0, qs);
            s0      = std::move(s1);
            s1      = trim(std::move(ns));
        }
        if (r1.empty() || r1[0] == 0) throw std::domain_error("Cyclo: not invertible");
        Rational inv_lead = Rational(1) / r1[0];
        for (auto& q : s1) q *= inv_lead;
        s1.resize(euler_phi(mod_), Rational(0));
        return from_coeffs(mod_, s1);
    }
    friend Cyclo operator/(const Cyclo& a, const Cyclo& b) { return a * b.inverse(); }

    friend bool operator==(const Cyclo& a, const Cyclo& b) {
        if (a.mod_ == b.mod_ && a.den_ == b.den_) return a.num_ == b.num_;
        return (a - b).is_zero();
    }
    friend bool operator!=(const Cyclo& a, const Cyclo& b) { return !(a == b); }

    std::string str() const {
        if (is_rational()) return rat_str(rational_part());
        std::ostringstream os;
        bool first = true;
        auto cs = rational_coeffs();
        for (size_t i = 0; i < cs.size(); ++i) {
            if (cs[i] == 0) continue;
            if (!first) os << " + ";
            first = false;
            os << rat_str(cs[i]);
            if (i >= 1) os << "*z" << (i > 1 ? std::to_string(i) : "");
        }
        if (first) os << "0";
        return os.str();
    }

private:
    unsigned mod_;
    IntPoly num_;
    Int den_;

    Cyclo(unsigned n, IntPoly p, Int den) : mod_(n), num_(std::move(p)), den_(std::move(den)) {
        reduce_mod_phi();
        normalize();
    }

    void reduce_mod_phi() {
        size_t deg = euler_phi(mod_);
        const IntPoly& phi = cyclotomic_poly(mod_);
        while (num_.size() > deg) {
            Int lead = num_.back();
            size_t off = num_.size() - phi.size();
            if (lead != 0)
                for (size_t j = 0; j + 1 < phi.size(); ++j) num_[off + j] -= lead * phi[j];
            num_.pop_back();
        }
        num_.resize(deg, Int(0));
    }
    void normalize() {
        if (den_ < 0) {
            den_ = -den_;
            for (auto& c : num_) c = -c;
        }
        Int g = den_;
        for (const auto& c : num_) {
            g = boost::multiprecision::gcd(g, c);
            if (g == 1) break;
        }
        if (g > 1) {
            den_ /= g;
            for (auto& c : num_) c /= g;
        }
        if (is_zero()) den_ = 1;
    }

    static int degree(const std::vector<Rational>& p) {
        for (size_t i = p.size(); i-- > 0;)
            if (p[i] != 0) return static_cast<int>(i);
        return -1;
    }
    static std::vector<Rational> trim(std::vector<Rational> p) {
        int d = degree(p);
        p.resize(d + 1 > 0 ? d + 1 : 1, Rational(0));
        return p;
    }
    static std::vector<Rational> poly_mul(const std::vector<Rational>& a, const std::vector<Rational>& b) {
        std::vector<Rational> r(a.size() + b.size() - 1, Rational(0));
        for (size_t i = 0; i < a.size(); ++i)
            for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
        return r;
    }
    static std::vector<Rational> poly_sub(const std::vector<Rational>& a, const std::vector<Rational>& b) {
        std::vector<Rational> r(std::max(a.size(), b.size()), Rational(0));
        for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
        for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
        return r;
    }
    static std::pair<std::vector<Rational>, std::vector<Rational>> poly_divmod(std::vector<Rational> a,
                                                                               const std::vector<Rational>& b) {
        int db = degree(b);
        std::vector<Rational> q(std::max<int>(degree(a) - db + 1, 1), Rational(0));
        while (degree(a) >= db && db >= 0) {
            int da       = degree(a);
            Rational f   = a[da] / b[db];
            q[da - db]   = f;
            for (int j = 0; j <= db; ++j) a[da - db + j] -= f * b[j];
        }
        return {q, a};
    }
    static const std::vector<Rational>& phi_rational(unsigned n) {
        static std::vector<std::vector<Rational>> cache{{}};
        if (n >= cache.size()) cache.resize(n + 1);
        if (cache[n].empty()) {
            const IntPoly& p = cyclotomic_poly(n);
            std::vector<Rational> r(p.size());
            for (size_t i = 0; i < p.size(); ++i) r[i] = Rational(p[i]);
            cache[n] = std::move(r);
        }
        return cache[n];
    }
};

inline Cyclo root_scalar(unsigned n, long long k) { return Cyclo::root(n, k); }
inline Cyclo embed_root(const RootExp& r) { return Cyclo::root(r); }

}  // namespace parsec
