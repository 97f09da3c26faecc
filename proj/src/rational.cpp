#include "fk/rational.hpp"

#include <charconv>
#include <stdexcept>

namespace fk {

namespace {

std::int64_t parse_int(std::string_view s, std::string_view whole) {
    if (s.empty()) throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
    return v;
}

}  // namespace

Q parse_rational(std::string_view text) {
    if (text.empty()) throw std::invalid_argument("empty rational");
    auto slash = text.find('/');
    if (slash != std::string_view::npos) {
        std::int64_t p = parse_int(text.substr(0, slash), text);
        std::string_view den = text.substr(slash + 1);
        if (!den.empty() && (den[0] == '-' || den[0] == '+'))
            throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
        std::int64_t q = parse_int(den, text);
        if (q == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
        return Q(p, q);
    }
    auto dot = text.find('.');
    if (dot == std::string_view::npos) return Q(parse_int(text, text));

    bool negative = false;
    std::string_view body = text;
    if (body[0] == '-' || body[0] == '+') {
        negative = body[0] == '-';
        body.remove_prefix(1);
    }
    dot = body.find('.');
    std::string_view ip = body.substr(0, dot);
    std::string_view fp = body.substr(dot + 1);
    if ((ip.empty() && fp.empty()) || fp.size() > 17)
        throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
    for (char c : fp)
        if (c < '0' || c > '9') throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
    std::int64_t whole = ip.empty() ? 0 : parse_int(ip, text);
    if (!ip.empty() && (ip[0] == '-' || ip[0] == '+'))
        throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
    std::int64_t frac = fp.empty() ? 0 : parse_int(fp, text);
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < fp.size(); ++i) scale *= 10;
    Q r = Q(whole) + Q(frac, scale);
    return negative ? -r : r;
}

std::string format_rational(const Q& q) {
    if (q.denominator() == 1) return std::to_string(q.numerator());
    return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

const Q& Ext::value() const {
    if (kind_ != Kind::finite) throw std::logic_error("value() of infinite filtration");
    return value_;
}

std::string Ext::str() const {
    switch (kind_) {
        case Kind::neg_inf: return "-inf";
        case Kind::pos_inf: return "inf";
        default: return format_rational(value_);
    }
}

std::strong_ordering operator<=>(const Ext& a, const Ext& b) {
    if (a.kind_ != b.kind_) return static_cast<int>(a.kind_) <=> static_cast<int>(b.kind_);
    if (a.kind_ != Ext::Kind::finite) return std::strong_ordering::equal;
    if (a.value_ < b.value_) return std::strong_ordering::less;
    if (b.value_ < a.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

Ext operator+(const Ext& a, const Ext& b) {
    if (a.finite() && b.finite()) return Ext(a.value_ + b.value_);
    if ((a.is_neg_inf() && b.is_pos_inf()) || (a.is_pos_inf() && b.is_neg_inf()))
        throw std::logic_error("-inf + inf is undefined");
    if (a.is_neg_inf() || b.is_neg_inf()) return Ext::neg_inf();
    return Ext::pos_inf();
}

Ext operator-(const Ext& a) {
    if (a.is_neg_inf()) return Ext::pos_inf();
    if (a.is_pos_inf()) return Ext::neg_inf();
    return Ext(-a.value_);
}

Ext max(const Ext& a, const Ext& b) { return a < b ? b : a; }
Ext min(const Ext& a, const Ext& b) { return b < a ? b : a; }

}  // namespace fk
