#ifndef SFG_INTERP_HPP
#define SFG_INTERP_HPP

#include <functional>
#include <map>
#include <string>

#include "image.hpp"
#include "typecheck.hpp"

namespace sfg {

// Small flat variable environment; kernels and loop nests bind a handful of
// variables, so linear scans beat hashing here.
struct EvalEnv {
    std::vector<std::pair<std::string, int64_t>> vars;

    int64_t lookup(const std::string &name) const {
        for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
            if (it->first == name) return it->second;
        }
        throw InternalError("unbound variable '" + name + "'");
    }
    void push(const std::string &name, int64_t v) { vars.emplace_back(name, v); }
    void pop() { vars.pop_back(); }
    void set_top(int64_t v) { vars.back().second = v; }
};

using AccessLogger = std::function<void(const std::string &, const std::vector<int64_t> &)>;

struct EvalContext {
    std::map<std::string, const Buffer *> buffers;  // funcs and inputs by name
    std::map<std::string, Scalar> taps;
    AccessLogger logger;  // optional: called on every func/input read
};

// Evaluates a typed expression; Call nodes read from ctx.buffers with
// bounds checking ("out of bounds read" errors name the func and coordinate).
Scalar eval_expr(const Expr &e, EvalEnv &env, const EvalContext &ctx);

// Resolves tap values: declared defaults overridden by `overrides`.
std::map<std::string, Scalar> resolve_taps(const TypedProgram &tp,
                                           const std::map<std::string, Scalar> &overrides);

struct ReferenceOptions {
    std::map<std::string, Scalar> tap_overrides;
    AccessLogger logger;
};

// Ground-truth oracle: direct functional evaluation of every func over its
// inferred box, whole-image at a time, producers before consumers.
// Returns every computed func buffer; the program output is included.
std::map<std::string, Buffer> reference_eval_all(const TypedProgram &tp,
                                                 const std::map<std::string, Buffer> &inputs,
                                                 const IntervalBox &output_box,
                                                 const ReferenceOptions &opts = {});

// Convenience wrapper returning just the output image.
Buffer reference_eval(const TypedProgram &tp, const std::map<std::string, Buffer> &inputs,
                      const IntervalBox &output_box, const ReferenceOptions &opts = {});

}  // namespace sfg

#endif
