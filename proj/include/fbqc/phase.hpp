// fbqc: fusion-based photonic quantum computing toolkit.
//
// SPDX-License-Identifier: MIT
//
// Exact angles (rational multiples of pi with a real fallback) and spider
// phases carrying symbolic Boolean outcome variables (XOR semantics, each
// set variable contributing pi).
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

namespace fbqc {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTol = 1e-9;

// An angle in [0, 2pi). Stored as an exact rational multiple of pi
// (num/den * pi, den small) whenever possible; otherwise as a plain double.
// Exactness survives addition and negation, so the stabilizer fragment stays
// exact end to end.
class Angle {
  public:
    Angle() = default;

    static Angle of_pi(long long num, long long den) {
        if (den <= 0) throw std::invalid_argument("Angle: denominator must be positive");
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
        num %= 2 * den;  // reduce mod 2pi
        if (num < 0) num += 2 * den;
        Angle a;
        a.exact_ = true;
        a.num_ = num;
        a.den_ = den;
        a.val_ = static_cast<double>(num) / static_cast<double>(den) * kPi;
        return a;
    }

    static Angle radians(double r) {
        // Snap to a small-denominator rational multiple of pi when the value
        // is within tolerance; keeps phases arising from doubles exact too.
        for (long long den = 1; den <= 8; ++den) {
            double scaled = r / kPi * static_cast<double>(den);
            double rounded = std::round(scaled);
            if (std::abs(scaled - rounded) < 1e-12)
                return of_pi(static_cast<long long>(rounded), den);
        }
        Angle a;
        a.exact_ = false;
        a.val_ = std::fmod(r, 2 * kPi);
        if (a.val_ < 0) a.val_ += 2 * kPi;
        return a;
    }

    static Angle zero() { return of_pi(0, 1); }
    static Angle pi() { return of_pi(1, 1); }

    double value() const { return val_; }
    bool exact() const { return exact_; }
    long long num() const { return num_; }
    long long den() const { return den_; }

    bool is_zero() const { return exact_ ? num_ == 0 : std::abs(val_) < kTol; }

    Angle operator+(const Angle& o) const {
        if (exact_ && o.exact_) return of_pi(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
        return radians(val_ + o.val_);
    }
    Angle operator-() const {
        if (exact_) return of_pi(-num_, den_);
        return radians(-val_);
    }
    Angle operator-(const Angle& o) const { return *this + (-o); }

    bool approx_equal(const Angle& o, double tol = kTol) const {
        double d = std::fmod(std::abs(val_ - o.val_), 2 * kPi);
        return d < tol || d > 2 * kPi - tol;
    }

  private:
    bool exact_ = true;
    long long num_ = 0;
    long long den_ = 1;  // meaningful only when exact_
    double val_ = 0.0;
};

// Phase of a spider: a static angle plus pi * XOR(outcome variables).
struct Phase {
    Angle static_angle;
    std::set<std::string> pi_terms;

    Phase() = default;
    explicit Phase(Angle a) : static_angle(a) {}
    Phase(Angle a, std::set<std::string> vars) : static_angle(a), pi_terms(std::move(vars)) {}

    // XOR semantics: adding a variable twice removes it.
    void toggle_var(const std::string& v) {
        auto it = pi_terms.find(v);
        if (it == pi_terms.end())
            pi_terms.insert(v);
        else
            pi_terms.erase(it);
    }

    Phase operator+(const Phase& o) const {
        Phase r(static_angle + o.static_angle, pi_terms);
        for (const auto& v : o.pi_terms) r.toggle_var(v);
        return r;
    }

    bool symbolic() const { return !pi_terms.empty(); }
};

// Diagram scalar: factor * (1/sqrt 2)^stars * (-1)^XOR(sign variables).
// Kept separate from the amplitudes so "=" vs "up to scalar" checks are
// distinguishable and the stabilizer fragment remains exact.
struct Scalar {
    int star_count = 0;
    cplx factor{1.0, 0.0};
    std::set<std::string> sign_vars;

    void toggle_sign_var(const std::string& v) {
        auto it = sign_vars.find(v);
        if (it == sign_vars.end())
            sign_vars.insert(v);
        else
            sign_vars.erase(it);
    }

    Scalar operator*(const Scalar& o) const {
        Scalar r = *this;
        r.star_count += o.star_count;
        r.factor *= o.factor;
        for (const auto& v : o.sign_vars) r.toggle_sign_var(v);
        return r;
    }
};

inline cplx expi(double theta) { return {std::cos(theta), std::sin(theta)}; }

}  // namespace fbqc
