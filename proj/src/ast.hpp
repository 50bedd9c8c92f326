#ifndef SFG_AST_HPP
#define SFG_AST_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "types.hpp"

namespace sfg {

struct SourcePos {
    int line = 0;
    int col = 0;
};

enum class ExprKind {
    IntLit,
    FloatLit,
    Var,       // coordinate, reduction or let-bound variable
    Tap,       // runtime scalar constant
    Call,      // func or input access: f(e1, .., en)
    Binary,
    Unary,
    Select,
    Cast,
    Load,      // post-lowering: read of a local stencil / accumulator buffer
    RomLoad,   // post-folding: read of a constant table
};

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    ExprKind kind;
    NumericType type;  // filled by the type checker (and by lowering)
    SourcePos pos;

    int64_t int_value = 0;
    float float_value = 0.0f;
    std::string name;  // Var/Tap/Call/Load/RomLoad
    BinOp bin_op = BinOp::Add;
    UnOp un_op = UnOp::Neg;
    std::vector<Expr> args;  // Call/Load indices; Binary a,b; Unary a; Select c,a,b; Cast a
};

Expr make_int(int64_t v, NumericType t = i32());
Expr make_float(float v);
Expr make_var(const std::string &name, SourcePos pos = {});
Expr make_tap(const std::string &name, SourcePos pos = {});
Expr make_call(const std::string &callee, std::vector<Expr> args, SourcePos pos = {});
Expr make_binary(BinOp op, Expr a, Expr b, SourcePos pos = {});
Expr make_unary(UnOp op, Expr a, SourcePos pos = {});
Expr make_select(Expr c, Expr a, Expr b, SourcePos pos = {});
Expr make_cast(NumericType t, Expr a, SourcePos pos = {});
Expr make_load(const std::string &buffer, std::vector<Expr> idx, NumericType t);
Expr make_rom_load(const std::string &table, std::vector<Expr> idx, NumericType t);

// Retypes an expression tree node (value semantics; children shared).
Expr with_type(const Expr &e, NumericType t);

bool expr_equal(const Expr &a, const Expr &b);
std::string expr_to_string(const Expr &e);

// One reduction variable: name with [min, min+extent).
struct RVar {
    std::string name;
    int64_t min = 0;
    int64_t extent = 1;
};

struct ReductionDomain {
    std::vector<RVar> vars;
};

// An update definition: f(storeIdx...) <- value over rdom(...).
struct UpdateDef {
    ReductionDomain rdom;
    std::vector<Expr> store_index;
    Expr value;
    SourcePos pos;
};

struct FuncDef {
    std::string name;
    std::vector<std::string> vars;  // coordinate variables, innermost first
    Expr value;
    std::vector<UpdateDef> updates;
    SourcePos pos;
    int decl_index = 0;
};

struct InputDecl {
    std::string name;
    NumericType type;
    int dims = 2;
    // Extents for leading (non-spatial) dimensions, e.g. a channel count.
    // Spatial dimensions are sized at run time by the supplied images.
    std::vector<std::pair<std::string, int64_t>> fixed_dims;
    SourcePos pos;
};

struct TapDecl {
    std::string name;
    NumericType type;
    Scalar default_value;
    SourcePos pos;
};

// Scheduling directives, parsed from the schedule { ... } block.
enum class DirectiveKind {
    Tile,        // tile(f, x, y, xo, yo, xi, yi, sx, sy)
    Split,       // split(f, var, outer, inner, factor)
    Reorder,     // reorder(f, v...)
    Unroll,      // unroll(f, var, factor)
    Parallel,    // parallel(f, var)
    Accelerate,  // accelerate(f, [inputs...], innerVar, blockVar)
    LineBuffer,  // linebuffer(f)
    FifoDepth,   // fifo_depth(src, dst, n)
};

struct Directive {
    DirectiveKind kind;
    std::string func;
    std::vector<std::string> names;  // vars / input list, meaning depends on kind
    std::vector<int64_t> ints;
    SourcePos pos;
};

struct SourceProgram {
    std::string filename;
    std::vector<InputDecl> inputs;
    std::vector<TapDecl> taps;
    std::vector<FuncDef> funcs;
    std::vector<Directive> directives;
    std::string output;  // defaults to the last defined func

    const FuncDef *find_func(const std::string &name) const;
    const InputDecl *find_input(const std::string &name) const;
    const TapDecl *find_tap(const std::string &name) const;
};

// Canonical source form; parse(print(p)) reproduces p.
std::string print_program(const SourceProgram &p);

}  // namespace sfg

#endif
