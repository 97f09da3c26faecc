#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <compare>
#include <string>
#include <string_view>

namespace fk {

using Q = boost::rational<std::int64_t>;

// Parses "p/q", an integer, or a decimal literal such as "-1.25" exactly.
// Throws std::invalid_argument on malformed text.
Q parse_rational(std::string_view text);

// Lowest terms, integers without a denominator.
std::string format_rational(const Q& q);

// Rational extended by -inf and +inf. Filtration of the zero vector is -inf,
// distances between incomparable barcodes are +inf.
class Ext {
public:
    enum class Kind { neg_inf, finite, pos_inf };

    Ext() : kind_(Kind::finite), value_(0) {}
    Ext(const Q& q) : kind_(Kind::finite), value_(q) {}
    Ext(std::int64_t n) : kind_(Kind::finite), value_(n) {}

    static Ext neg_inf() { Ext e; e.kind_ = Kind::neg_inf; return e; }
    static Ext pos_inf() { Ext e; e.kind_ = Kind::pos_inf; return e; }

    Kind kind() const { return kind_; }
    bool finite() const { return kind_ == Kind::finite; }
    bool is_neg_inf() const { return kind_ == Kind::neg_inf; }
    bool is_pos_inf() const { return kind_ == Kind::pos_inf; }
    // Throws std::logic_error when not finite.
    const Q& value() const;

    std::string str() const;

    friend bool operator==(const Ext& a, const Ext& b) {
        return a.kind_ == b.kind_ && (a.kind_ != Kind::finite || a.value_ == b.value_);
    }
    friend std::strong_ordering operator<=>(const Ext& a, const Ext& b);

    // -inf + +inf is rejected with std::logic_error.
    friend Ext operator+(const Ext& a, const Ext& b);
    friend Ext operator-(const Ext& a);
    friend Ext operator-(const Ext& a, const Ext& b) { return a + (-b); }

private:
    Kind kind_;
    Q value_;
};

Ext max(const Ext& a, const Ext& b);
Ext min(const Ext& a, const Ext& b);

}  // namespace fk
