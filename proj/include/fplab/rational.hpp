#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fplab {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational number, always canonical: gcd-reduced with positive
/// denominator, so equality is structural and ties are detected exactly.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(long long n) : v_(n) {}        // NOLINT: implicit by design
    Rational(const BigInt& n) : v_(n) {}    // NOLINT
    Rational(const BigInt& num, const BigInt& den) {
        if (den == 0) throw std::domain_error("Rational: zero denominator");
        v_ = Value(num);
        v_ /= Value(den);
    }
    Rational(long long num, long long den)
        : Rational(BigInt(num), BigInt(den)) {}

    BigInt num() const { return boost::multiprecision::numerator(v_); }
    BigInt den() const { return boost::multiprecision::denominator(v_); }

    bool is_zero() const { return v_.is_zero(); }
    bool is_integer() const { return den() == 1; }
    int sign() const { return v_.sign(); }

    double to_double() const { return v_.convert_to<double>(); }

    /// "p/q", or just "p" when the denominator is 1.
    std::string str() const;

    /// Parses "p", "-p" or "p/q". Throws std::invalid_argument on malformed
    /// input or zero denominator; the message names the offending token.
    static Rational parse(std::string_view token);

    static Rational pow(const Rational& base, unsigned exp);

    Rational operator-() const { return Rational(Value(-v_)); }
    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw std::domain_error("Rational: division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

private:
    using Value = boost::multiprecision::cpp_rational;
    explicit Rational(Value v) : v_(std::move(v)) {}
    Value v_;
};

inline std::string Rational::str() const {
    std::string s = num().str();
    if (!is_integer()) {
        s += '/';
        s += den().str();
    }
    return s;
}

inline Rational Rational::parse(std::string_view token) {
    auto bad = [&](const char* why) {
        throw std::invalid_argument("bad rational token '" + std::string(token) +
                                    "': " + why);
    };
    if (token.empty()) bad("empty");
    auto slash = token.find('/');
    auto parse_int = [&](std::string_view part, bool allow_sign) -> BigInt {
        if (part.empty()) bad("missing digits");
        size_t i = 0;
        bool negative = false;
        if (allow_sign && (part[0] == '+' || part[0] == '-')) {
            negative = part[0] == '-';
            i = 1;
        }
        if (i == part.size()) bad("missing digits");
        for (size_t j = i; j < part.size(); ++j)
            if (part[j] < '0' || part[j] > '9') bad("non-digit character");
        BigInt v(std::string(part.substr(i)));
        return negative ? BigInt(-v) : v;
    };
    if (slash == std::string_view::npos)
        return Rational(parse_int(token, true));
    BigInt num = parse_int(token.substr(0, slash), true);
    BigInt den = parse_int(token.substr(slash + 1), false);
    if (den == 0) bad("zero denominator");
    return Rational(num, den);
}

inline Rational Rational::pow(const Rational& base, unsigned exp) {
    using boost::multiprecision::pow;
    return Rational(pow(base.num(), exp), pow(base.den(), exp));
}

}  // namespace fplab
