// Small recursive-descent parser for rotation-number expressions.

#include "evp/arithmetic.hpp"
#include "evp/errors.hpp"

#include <cctype>
#include <vector>

namespace evp {
namespace {

struct Value {
    bool exact = true;
    BigRational q;
    BigFloat f;

    static Value rational(const BigRational& r) {
        Value v;
        v.q = r;
        v.f = to_float(r);
        return v;
    }
    static Value approx(const BigFloat& x) {
        Value v;
        v.exact = false;
        v.f = x;
        return v;
    }
};

Value combine(const Value& a, const Value& b, char op) {
    if (a.exact && b.exact) {
        switch (op) {
            case '+': return Value::rational(a.q + b.q);
            case '-': return Value::rational(a.q - b.q);
            case '*': return Value::rational(a.q * b.q);
            case '/':
                if (b.q == 0) throw Error(ErrorCode::InvalidArgument, "division by zero in alpha expression");
                return Value::rational(a.q / b.q);
        }
    }
    switch (op) {
        case '+': return Value::approx(a.f + b.f);
        case '-': return Value::approx(a.f - b.f);
        case '*': return Value::approx(a.f * b.f);
        default:
            if (b.f == 0) throw Error(ErrorCode::InvalidArgument, "division by zero in alpha expression");
            return Value::approx(a.f / b.f);
    }
}

BigRational factorial_power_of_ten_inverse(int n) {
    BigInt fact = 1;
    for (int i = 2; i <= n; ++i) fact *= i;
    BigInt ten_pow = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(fact));
    return BigRational(BigInt(1), ten_pow);
}

/// [0; a_1, ..., a_k] as p_k / q_k together with (p_{k-1}, q_{k-1}).
void convergent_pair(const std::vector<BigInt>& quotients, BigInt& p, BigInt& q, BigInt& p_prev,
                     BigInt& q_prev) {
    p_prev = 1;
    q_prev = 0;
    p = 0;
    q = 1;
    for (const BigInt& a : quotients) {
        BigInt pn = a * p + p_prev;
        BigInt qn = a * q + q_prev;
        p_prev = p;
        q_prev = q;
        p = pn;
        q = qn;
    }
}

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    Value parse() {
        Value v = expression();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorCode::InvalidArgument,
                    "cannot parse alpha '" + text_ + "' at offset " + std::to_string(pos_) + ": " + what);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    Value expression() {
        Value v = term();
        for (;;) {
            if (accept('+')) {
                v = combine(v, term(), '+');
            } else if (accept('-')) {
                v = combine(v, term(), '-');
            } else {
                return v;
            }
        }
    }

    Value term() {
        Value v = factor();
        for (;;) {
            if (accept('*')) {
                v = combine(v, factor(), '*');
            } else if (accept('/')) {
                v = combine(v, factor(), '/');
            } else {
                return v;
            }
        }
    }

    Value factor() {
        skip_space();
        if (accept('-')) return combine(Value::rational(0), factor(), '-');
        if (accept('(')) {
            Value v = expression();
            expect(')');
            return v;
        }
        if (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
            return number();
        }
        if (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
            return named();
        }
        fail("expected a number, '(' or a name");
    }

    Value number() {
        BigInt digits = 0;
        BigInt scale = 1;
        bool seen_digit = false;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            digits = digits * 10 + (text_[pos_++] - '0');
            seen_digit = true;
        }
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                digits = digits * 10 + (text_[pos_++] - '0');
                scale *= 10;
                seen_digit = true;
            }
        }
        if (!seen_digit) fail("malformed number");
        BigRational value(digits, scale);
        if (pos_ + 1 < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E') &&
            (std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) || text_[pos_ + 1] == '-' ||
             text_[pos_ + 1] == '+')) {
            ++pos_;
            bool negative = false;
            if (text_[pos_] == '-' || text_[pos_] == '+') negative = text_[pos_++] == '-';
            int exponent = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                exponent = exponent * 10 + (text_[pos_++] - '0');
                if (exponent > 100000) fail("exponent too large");
            }
            BigRational p(boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(exponent)));
            if (negative) value /= p; else value *= p;
        }
        return Value::rational(value);
    }

    std::vector<BigInt> integer_list() {
        std::vector<BigInt> out;
        expect('(');
        do {
            Value v = expression();
            if (!v.exact || denominator(v.q) != 1 || v.q < 1) fail("continued-fraction entries must be positive integers");
            out.push_back(numerator(v.q));
        } while (accept(','));
        expect(')');
        return out;
    }

    Value named() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        const std::string name = text_.substr(start, pos_ - start);
        if (name == "golden") {
            return Value::approx((boost::multiprecision::sqrt(BigFloat(5)) - 1) / 2);
        }
        if (name == "sqrt") {
            expect('(');
            Value v = expression();
            expect(')');
            if (v.f < 0) fail("sqrt of a negative number");
            return Value::approx(boost::multiprecision::sqrt(v.f));
        }
        if (name == "liouville") {
            expect('(');
            Value v = expression();
            expect(')');
            if (!v.exact || denominator(v.q) != 1 || v.q < 1 || v.q > 7) fail("liouville(N) needs 1 <= N <= 7");
            const int n = static_cast<int>(numerator(v.q));
            BigRational sum = 0;
            for (int k = 1; k <= n; ++k) sum += factorial_power_of_ten_inverse(k);
            return Value::rational(sum);
        }
        if (name == "cf" || name == "cf_golden") {
            const std::vector<BigInt> quotients = integer_list();
            BigInt p, q, p_prev, q_prev;
            convergent_pair(quotients, p, q, p_prev, q_prev);
            if (name == "cf") return Value::rational(BigRational(p, q));
            // The tail [1; 1, 1, ...] equals the golden ratio phi.
            const BigFloat phi = (1 + boost::multiprecision::sqrt(BigFloat(5))) / 2;
            return Value::approx((BigFloat(p) * phi + BigFloat(p_prev)) / (BigFloat(q) * phi + BigFloat(q_prev)));
        }
        fail("unknown name '" + name + "'");
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

}  // namespace

RealEnclosure parse_alpha(const std::string& expression, unsigned bits) {
    Value v;
    {
        // Guard bits absorb the rounding of the approximate path.
        PrecisionScope scope(bits + 32);
        v = Parser(expression).parse();
    }
    if (v.exact) {
        if (v.q <= 0 || v.q >= 1) {
            throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1), got " + expression);
        }
        return RealEnclosure::exact_value(v.q, bits);
    }
    PrecisionScope scope(bits + 32);
    if (v.f <= 0 || v.f >= 1) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1), got " + expression);
    // Conservative radius: 2^-bits relative.
    const BigRational radius(BigInt(1), BigInt(1) << bits);
    return RealEnclosure::around(v.f, radius, bits);
}

}  // namespace evp
