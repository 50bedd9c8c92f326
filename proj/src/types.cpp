#include "types.hpp"

#include <cmath>
#include <cstring>

namespace sfg {

std::string NumericType::str() const {
    switch (kind) {
    case TypeKind::UInt: return "u" + std::to_string(bits);
    case TypeKind::Int: return "i" + std::to_string(bits);
    case TypeKind::Float: return "f" + std::to_string(bits);
    }
    return "?";
}

bool parse_type_name(const std::string &s, NumericType *out) {
    if (s.size() < 2) return false;
    TypeKind k;
    switch (s[0]) {
    case 'u': k = TypeKind::UInt; break;
    case 'i': k = TypeKind::Int; break;
    case 'f': k = TypeKind::Float; break;
    default: return false;
    }
    int bits = 0;
    for (size_t p = 1; p < s.size(); p++) {
        if (s[p] < '0' || s[p] > '9') return false;
        bits = bits * 10 + (s[p] - '0');
    }
    if (bits != 8 && bits != 16 && bits != 32) return false;
    if (k == TypeKind::Float && bits != 32) return false;
    *out = {k, bits};
    return true;
}

int64_t wrap_to_type(NumericType t, int64_t v) {
    SFG_INTERNAL_ASSERT(!t.is_float());
    uint64_t mask = (t.bits >= 64) ? ~0ull : ((1ull << t.bits) - 1);
    uint64_t u = uint64_t(v) & mask;
    if (t.kind == TypeKind::Int) {
        uint64_t sign_bit = 1ull << (t.bits - 1);
        if (u & sign_bit) return int64_t(u | ~mask);
    }
    return int64_t(u);
}

Scalar Scalar::make_int(NumericType t, int64_t v) {
    Scalar s;
    s.type = t;
    s.i = wrap_to_type(t, v);
    return s;
}

const char *binop_name(BinOp op) {
    switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::Shl: return "<<";
    case BinOp::Shr: return ">>";
    case BinOp::Min: return "min";
    case BinOp::Max: return "max";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
    }
    return "?";
}

namespace {

bool is_comparison(BinOp op) {
    switch (op) {
    case BinOp::Eq:
    case BinOp::Ne:
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Gt:
    case BinOp::Ge:
    case BinOp::And:
    case BinOp::Or:
        return true;
    default:
        return false;
    }
}

}  // namespace

Scalar eval_binop(BinOp op, NumericType result, const Scalar &a, const Scalar &b) {
    if (is_comparison(op)) {
        bool r = false;
        if (a.type.is_float() || b.type.is_float()) {
            float x = a.type.is_float() ? a.f : float(a.i);
            float y = b.type.is_float() ? b.f : float(b.i);
            switch (op) {
            case BinOp::Eq: r = x == y; break;
            case BinOp::Ne: r = x != y; break;
            case BinOp::Lt: r = x < y; break;
            case BinOp::Le: r = x <= y; break;
            case BinOp::Gt: r = x > y; break;
            case BinOp::Ge: r = x >= y; break;
            case BinOp::And: r = (x != 0.0f) && (y != 0.0f); break;
            case BinOp::Or: r = (x != 0.0f) || (y != 0.0f); break;
            default: break;
            }
        } else {
            switch (op) {
            case BinOp::Eq: r = a.i == b.i; break;
            case BinOp::Ne: r = a.i != b.i; break;
            case BinOp::Lt: r = a.i < b.i; break;
            case BinOp::Le: r = a.i <= b.i; break;
            case BinOp::Gt: r = a.i > b.i; break;
            case BinOp::Ge: r = a.i >= b.i; break;
            case BinOp::And: r = a.i != 0 && b.i != 0; break;
            case BinOp::Or: r = a.i != 0 || b.i != 0; break;
            default: break;
            }
        }
        return Scalar::make_int(result, r ? 1 : 0);
    }

    if (result.is_float()) {
        float x = a.type.is_float() ? a.f : float(a.i);
        float y = b.type.is_float() ? b.f : float(b.i);
        float r = 0.0f;
        switch (op) {
        case BinOp::Add: r = x + y; break;
        case BinOp::Sub: r = x - y; break;
        case BinOp::Mul: r = x * y; break;
        case BinOp::Div: r = x / y; break;
        case BinOp::Mod: r = std::fmod(x, y); break;
        case BinOp::Min: r = std::fmin(x, y); break;
        case BinOp::Max: r = std::fmax(x, y); break;
        default: throw InternalError("float op " + std::string(binop_name(op)));
        }
        return Scalar::make_float(r);
    }

    int64_t x = a.i, y = b.i, r = 0;
    switch (op) {
    case BinOp::Add: r = x + y; break;
    case BinOp::Sub: r = x - y; break;
    case BinOp::Mul: r = x * y; break;
    case BinOp::Div: r = (y == 0) ? 0 : x / y; break;
    case BinOp::Mod: r = (y == 0) ? 0 : x % y; break;
    case BinOp::Shl: r = x << (uint64_t(y) & 31); break;
    case BinOp::Shr:
        if (result.kind == TypeKind::UInt) {
            uint64_t mask = (result.bits >= 64) ? ~0ull : ((1ull << result.bits) - 1);
            r = int64_t((uint64_t(x) & mask) >> (uint64_t(y) & 31));
        } else {
            r = x >> (uint64_t(y) & 31);
        }
        break;
    case BinOp::Min: r = x < y ? x : y; break;
    case BinOp::Max: r = x > y ? x : y; break;
    default: throw InternalError("int op " + std::string(binop_name(op)));
    }
    return Scalar::make_int(result, r);
}

Scalar eval_unop(UnOp op, NumericType result, const Scalar &a) {
    if (result.is_float()) {
        float x = a.type.is_float() ? a.f : float(a.i);
        switch (op) {
        case UnOp::Neg: return Scalar::make_float(-x);
        case UnOp::Abs: return Scalar::make_float(std::fabs(x));
        case UnOp::Not: return Scalar::make_float(x == 0.0f ? 1.0f : 0.0f);
        }
    }
    switch (op) {
    case UnOp::Neg: return Scalar::make_int(result, -a.i);
    case UnOp::Abs: return Scalar::make_int(result, a.i < 0 ? -a.i : a.i);
    case UnOp::Not: return Scalar::make_int(result, a.i == 0 ? 1 : 0);
    }
    throw InternalError("unop");
}

Scalar eval_cast(NumericType to, const Scalar &a) {
    if (to.is_float()) {
        return Scalar::make_float(a.type.is_float() ? a.f : float(a.i));
    }
    if (a.type.is_float()) {
        // float -> int truncates toward zero, then wraps.
        float f = a.f;
        int64_t v;
        if (std::isnan(f)) {
            v = 0;
        } else if (f >= 9.2233718e18f) {
            v = INT64_MAX;
        } else if (f <= -9.2233718e18f) {
            v = INT64_MIN;
        } else {
            v = int64_t(f);
        }
        return Scalar::make_int(to, v);
    }
    return Scalar::make_int(to, a.i);
}

Scalar eval_select(const Scalar &cond, const Scalar &a, const Scalar &b) {
    bool c = cond.type.is_float() ? (cond.f != 0.0f) : (cond.i != 0);
    return c ? a : b;
}

void Rational::normalize() {
    if (den == 0) throw InternalError("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    if (num == 0) den = 1;
}

bool Rational::operator<(const Rational &o) const {
    return (__int128)num * o.den < (__int128)o.num * den;
}

std::string Rational::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

Error::Error(std::string file_, int line_, int col_, const std::string &msg)
    : std::runtime_error(file_ + ":" + std::to_string(line_) + ":" + std::to_string(col_) +
                         ": " + msg),
      file(std::move(file_)),
      line(line_),
      col(col_) {}

}  // namespace sfg
