#ifndef SFG_IR_HPP
#define SFG_IR_HPP

#include <memory>
#include <string>
#include <vector>

#include "bounds.hpp"

namespace sfg {

// Imperative IR used for both the loop form (Fig-style interleaved nest) and
// the dataflow form (per-kernel groups communicating through streams).

enum class StmtKind {
    Alloc,    // alloc name[box] : type
    For,      // for var in [min, min+extent)
    Store,    // name[idx...] = value
    Let,      // let name = value (scalar)
    If,       // if (cond) { ... } else { ... }
    Pop,      // pop stream -> local stencil buffer
    Push,     // push stream <- local stencil buffer
    Produce,  // produce func { ... }   (loop IR only)
};

// How a loop executes in hardware:
//   Scan:       iterates stream positions; one firing per iteration
//   Sequential: one cycle per iteration (reduction / intra-pixel loops)
//   Unrolled:   replicated in space; free within its parent's cycle
enum class LoopClass { Scan, Sequential, Unrolled };

struct StmtNode;
using Stmt = std::shared_ptr<const StmtNode>;

struct StmtNode {
    StmtKind kind;

    std::string name;  // Alloc/Store/Let buffer or var; Pop/Push stream; Produce func
    NumericType type;  // Alloc element type
    IntervalBox box;   // Alloc shape

    // For
    std::string var;
    int64_t min = 0;
    int64_t extent = 0;
    LoopClass loop_class = LoopClass::Sequential;

    Expr value;              // Store/Let value, If condition
    std::vector<Expr> idx;   // Store indices
    std::string buffer;      // Pop destination / Push source stencil

    std::vector<Stmt> body;       // For/If(then)/Produce
    std::vector<Stmt> else_body;  // If
};

Stmt make_alloc(const std::string &name, NumericType t, IntervalBox box);
Stmt make_for(const std::string &var, int64_t min, int64_t extent, LoopClass cls,
              std::vector<Stmt> body);
Stmt make_store(const std::string &buf, std::vector<Expr> idx, Expr value);
Stmt make_let(const std::string &name, Expr value);
Stmt make_if(Expr cond, std::vector<Stmt> then_body, std::vector<Stmt> else_body = {});
Stmt make_pop(const std::string &stream, const std::string &dest);
Stmt make_push(const std::string &stream, const std::string &src);
Stmt make_produce(const std::string &func, std::vector<Stmt> body);

// One dataflow pipeline stage group ("kernel"), executing its own scan nest.
struct KernelIR {
    std::string name;
    std::vector<Stmt> body;  // allocs followed by the scan loop nest
};

std::string print_stmts(const std::vector<Stmt> &stmts, int indent = 0);
std::string print_kernel(const KernelIR &k);

// Structural helpers used by the passes.
bool is_leaf(const Stmt &s);
Stmt with_body(const Stmt &s, std::vector<Stmt> body);

// Max operation depth (ops + loads on the critical path) of an expression:
// the pipeline fill depth of the datapath evaluating it.
int expr_depth(const Expr &e);

// Max expr depth over all statements in a subtree.
int stmts_depth(const std::vector<Stmt> &stmts);

}  // namespace sfg

#endif
