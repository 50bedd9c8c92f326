#ifndef SFG_TYPECHECK_HPP
#define SFG_TYPECHECK_HPP

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ast.hpp"

namespace sfg {

// Value range of an integer expression, tracked with 128-bit ends so that
// 32-bit products cannot overflow the analysis itself.
struct IntervalI {
    __int128 lo = 0;
    __int128 hi = 0;

    bool contains(const IntervalI &o) const { return lo <= o.lo && hi >= o.hi; }
    static IntervalI point(int64_t v) { return {v, v}; }
    static IntervalI of_type(NumericType t);
};

// A linear form  sum(coeff_i * var_i) + offset  over coordinate/reduction vars.
struct LinearForm {
    bool valid = false;
    std::map<std::string, int64_t> coeffs;
    int64_t offset = 0;

    int64_t coeff(const std::string &v) const {
        auto it = coeffs.find(v);
        return it == coeffs.end() ? 0 : it->second;
    }
};

// Tries to view e as a linear form. Only +, -, negation and multiplication
// by constants are linear.
LinearForm linear_form(const Expr &e);

enum class ArgClass {
    Affine,   // affine in coordinate (and possibly reduction) variables
    Clamped,  // clamp(affine, lo, hi) - legal only outside the accelerated scope
    DataDep,  // depends on computed values (or is otherwise non-affine in an update)
};

struct ArgInfo {
    ArgClass cls = ArgClass::Affine;
    LinearForm form;  // valid for Affine / Clamped
    int64_t clamp_lo = 0, clamp_hi = 0;
    bool uses_rdom = false;
};

struct FuncInfo {
    NumericType type;                 // element type of the function's values
    bool depends_on_input = false;    // transitively reads a pipeline input
    bool depends_on_tap = false;      // transitively reads a tap
    bool pure_of_coords = false;      // no input/tap dependence: ROM candidate
    std::set<std::string> callees;    // funcs and inputs referenced (excluding self)
};

struct TypedProgram {
    SourceProgram prog;  // with fully typed expression trees
    std::vector<std::string> topo_order;  // funcs, producers before consumers
    std::map<std::string, FuncInfo> info;
    // Classification of every call argument, keyed by the typed Call node.
    std::map<const ExprNode *, std::vector<ArgInfo>> call_args;

    const FuncDef &func(const std::string &name) const {
        const FuncDef *f = prog.find_func(name);
        SFG_INTERNAL_ASSERT(f);
        return *f;
    }
    bool is_input(const std::string &name) const { return prog.find_input(name) != nullptr; }
    NumericType value_type(const std::string &name) const;
    const std::vector<ArgInfo> &args_of(const ExprNode *call) const;
};

// Type checks and annotates a parsed program:
//  - assigns every expression the narrowest type that holds its value range
//    (so u8 sums widen to u16, etc.), with integer wrap beyond 32 bits
//  - classifies every call argument (affine / clamped / data dependent)
//  - rejects recursion, unknown names and non-affine pure-definition indices
TypedProgram typecheck(const SourceProgram &p);

// Interval of a typed expression under per-variable ranges; vars absent from
// the environment are treated as full i32 range. Used for ROM domains and for
// validating data-dependent store indices.
IntervalI interval_of(const Expr &e, const std::map<std::string, IntervalI> &env,
                      const TypedProgram &tp);

// Walks all Call nodes in an expression tree.
void for_each_call(const Expr &e, const std::function<void(const Expr &)> &fn);

}  // namespace sfg

#endif
