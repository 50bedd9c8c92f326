#ifndef SFG_TYPES_HPP
#define SFG_TYPES_HPP

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sfg {

// Scalar element types. Integer arithmetic wraps modulo 2^bits; float is
// IEEE binary32 only, so simulator and reference interpreter agree bit for bit.
enum class TypeKind { UInt, Int, Float };

struct NumericType {
    TypeKind kind = TypeKind::UInt;
    int bits = 8;  // 8, 16 or 32

    bool is_float() const { return kind == TypeKind::Float; }
    bool is_signed() const { return kind == TypeKind::Int; }
    bool operator==(const NumericType &o) const { return kind == o.kind && bits == o.bits; }
    bool operator!=(const NumericType &o) const { return !(*this == o); }
    std::string str() const;
};

inline NumericType u8() { return {TypeKind::UInt, 8}; }
inline NumericType u16() { return {TypeKind::UInt, 16}; }
inline NumericType u32() { return {TypeKind::UInt, 32}; }
inline NumericType i8() { return {TypeKind::Int, 8}; }
inline NumericType i16() { return {TypeKind::Int, 16}; }
inline NumericType i32() { return {TypeKind::Int, 32}; }
inline NumericType f32() { return {TypeKind::Float, 32}; }

// Parses "u8", "i16", "f32", ...; returns false if not a type name.
bool parse_type_name(const std::string &s, NumericType *out);

// A runtime scalar. Integers are kept normalized to their type's value range
// (wrapped and sign-extended); floats live in the f member.
struct Scalar {
    NumericType type;
    int64_t i = 0;
    float f = 0.0f;

    static Scalar make_int(NumericType t, int64_t v);
    static Scalar make_float(float v) { Scalar s; s.type = f32(); s.f = v; return s; }
    double as_double() const { return type.is_float() ? double(f) : double(i); }
};

// Wrap v into the value range of t (two's complement for signed).
int64_t wrap_to_type(NumericType t, int64_t v);

enum class BinOp {
    Add, Sub, Mul, Div, Mod, Shl, Shr,
    Min, Max,
    Eq, Ne, Lt, Le, Gt, Ge,
    And, Or
};

enum class UnOp { Neg, Abs, Not };

const char *binop_name(BinOp op);

// Shared scalar semantics for the whole system: the reference interpreter,
// the dataflow executor and the constant folder all funnel through these.
// Integer division/modulo by zero yield zero (total functions).
Scalar eval_binop(BinOp op, NumericType result, const Scalar &a, const Scalar &b);
Scalar eval_unop(UnOp op, NumericType result, const Scalar &a);
Scalar eval_cast(NumericType to, const Scalar &a);
Scalar eval_select(const Scalar &cond, const Scalar &a, const Scalar &b);

// Exact rational, used for throughput so rate assertions never see rounding.
struct Rational {
    int64_t num = 0;
    int64_t den = 1;

    Rational() = default;
    Rational(int64_t n, int64_t d) : num(n), den(d) { normalize(); }
    void normalize();
    bool operator==(const Rational &o) const { return num == o.num && den == o.den; }
    bool operator!=(const Rational &o) const { return !(*this == o); }
    bool operator<(const Rational &o) const;
    double to_double() const { return den ? double(num) / double(den) : 0.0; }
    std::string str() const;
};

inline Rational rational_min(const Rational &a, const Rational &b) { return a < b ? a : b; }

// User-facing compile/runtime failure, carrying a source position when known.
struct Error : std::runtime_error {
    std::string file;
    int line = 0, col = 0;
    explicit Error(const std::string &msg) : std::runtime_error(msg) {}
    Error(std::string file_, int line_, int col_, const std::string &msg);
};

// Compiler bug. Never thrown for bad user input.
struct InternalError : std::logic_error {
    explicit InternalError(const std::string &msg) : std::logic_error("internal error: " + msg) {}
};

#define SFG_INTERNAL_ASSERT(cond)                                                      \
    do {                                                                               \
        if (!(cond)) throw ::sfg::InternalError(std::string(#cond) + " at " + __FILE__ + \
                                                ":" + std::to_string(__LINE__));       \
    } while (0)

}  // namespace sfg

#endif
