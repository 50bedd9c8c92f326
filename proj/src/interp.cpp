#include "interp.hpp"

#include <set>
#include <sstream>

namespace sfg {

namespace {

std::string point_str(const std::vector<int64_t> &pt) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < pt.size(); i++) os << (i ? ", " : "") << pt[i];
    os << ")";
    return os.str();
}

}  // namespace

Scalar eval_expr(const Expr &e, EvalEnv &env, const EvalContext &ctx) {
    switch (e->kind) {
    case ExprKind::IntLit:
        return Scalar::make_int(e->type, e->int_value);
    case ExprKind::FloatLit:
        return Scalar::make_float(e->float_value);
    case ExprKind::Var:
        return Scalar::make_int(e->type, env.lookup(e->name));
    case ExprKind::Tap: {
        auto it = ctx.taps.find(e->name);
        if (it == ctx.taps.end()) throw InternalError("tap '" + e->name + "' has no value");
        return it->second;
    }
    case ExprKind::Cast:
        return eval_cast(e->type, eval_expr(e->args[0], env, ctx));
    case ExprKind::Unary:
        return eval_unop(e->un_op, e->type, eval_expr(e->args[0], env, ctx));
    case ExprKind::Select: {
        Scalar c = eval_expr(e->args[0], env, ctx);
        bool t = c.type.is_float() ? c.f != 0.0f : c.i != 0;
        Scalar v = eval_expr(e->args[t ? 1 : 2], env, ctx);
        return eval_cast(e->type, v);
    }
    case ExprKind::Binary: {
        Scalar a = eval_expr(e->args[0], env, ctx);
        Scalar b = eval_expr(e->args[1], env, ctx);
        return eval_binop(e->bin_op, e->type, a, b);
    }
    case ExprKind::Call:
    case ExprKind::Load:
    case ExprKind::RomLoad: {
        auto it = ctx.buffers.find(e->name);
        if (it == ctx.buffers.end() || !it->second->defined()) {
            throw Error("read of '" + e->name + "' which has not been computed");
        }
        const Buffer &buf = *it->second;
        std::vector<int64_t> pt(e->args.size());
        for (size_t i = 0; i < e->args.size(); i++) {
            Scalar s = eval_expr(e->args[i], env, ctx);
            pt[i] = s.type.is_float() ? int64_t(s.f) : s.i;
        }
        if (!buf.in_bounds(pt)) {
            throw Error("out of bounds read of '" + e->name + "' at " + point_str(pt) +
                        ", domain " + buf.box().str());
        }
        if (ctx.logger && e->kind == ExprKind::Call) ctx.logger(e->name, pt);
        return buf.get(pt);
    }
    }
    throw InternalError("unreachable expression kind");
}

std::map<std::string, Scalar> resolve_taps(const TypedProgram &tp,
                                           const std::map<std::string, Scalar> &overrides) {
    std::map<std::string, Scalar> taps;
    for (const auto &t : tp.prog.taps) taps[t.name] = t.default_value;
    for (const auto &[name, v] : overrides) {
        const TapDecl *t = tp.prog.find_tap(name);
        if (!t) throw Error("unknown tap '" + name + "'");
        taps[name] = t->type.is_float() ? Scalar::make_float(v.type.is_float() ? v.f : float(v.i))
                                        : Scalar::make_int(t->type, v.type.is_float() ? int64_t(v.f) : v.i);
    }
    return taps;
}

std::map<std::string, Buffer> reference_eval_all(const TypedProgram &tp,
                                                 const std::map<std::string, Buffer> &inputs,
                                                 const IntervalBox &output_box,
                                                 const ReferenceOptions &opts) {
    auto boxes = infer_program_boxes(tp, output_box);

    std::map<std::string, Buffer> bufs;
    EvalContext ctx;
    ctx.taps = resolve_taps(tp, opts.tap_overrides);
    ctx.logger = opts.logger;

    for (const auto &in : tp.prog.inputs) {
        auto it = inputs.find(in.name);
        auto needed = boxes.find(in.name);
        if (needed == boxes.end()) continue;  // input not consumed
        if (it == inputs.end()) throw Error("missing input image '" + in.name + "'");
        if (it->second.dims() != in.dims) {
            throw Error("input '" + in.name + "' has " + std::to_string(it->second.dims()) +
                        " dims, declared " + std::to_string(in.dims));
        }
        for (int d = 0; d < in.dims; d++) {
            if (needed->second.min[d] < it->second.box().min[d] ||
                needed->second.hi(d) > it->second.box().hi(d)) {
                throw Error("input '" + in.name + "' does not cover the required domain " +
                            needed->second.str() + " (got " + it->second.box().str() + ")");
            }
        }
        bufs[in.name] = it->second;
        ctx.buffers[in.name] = &bufs[in.name];
    }

    for (const auto &fname : tp.topo_order) {
        auto bit = boxes.find(fname);
        if (bit == boxes.end() && fname != tp.prog.output) continue;  // dead func
        const IntervalBox &box = fname == tp.prog.output ? output_box : bit->second;
        const FuncDef &f = tp.func(fname);
        SFG_INTERNAL_ASSERT(int(f.vars.size()) == box.dims());
        Buffer buf(tp.info.at(fname).type, box);

        // pure definition over the whole box; dim 0 innermost
        std::vector<int64_t> pt(box.dims());
        EvalEnv env;
        for (int d = box.dims() - 1; d >= 0; d--) env.push(f.vars[d], 0);
        std::function<void(int)> fill = [&](int d) {
            if (d < 0) {
                Scalar v = eval_expr(f.value, env, ctx);
                buf.set(pt, v);
                return;
            }
            for (int64_t i = box.min[d]; i <= box.hi(d); i++) {
                pt[d] = i;
                env.vars[size_t(box.dims() - 1 - d)].second = i;
                fill(d - 1);
            }
        };
        fill(box.dims() - 1);

        // updates: free pure vars outermost (y then x then leading dims),
        // reduction vars innermost (last rvar outermost)
        ctx.buffers[fname] = &buf;  // updates may read the accumulator
        for (const auto &u : f.updates) {
            std::set<std::string> used;
            auto collect = [&](const Expr &e) {
                std::function<void(const Expr &)> go = [&](const Expr &x) {
                    if (x->kind == ExprKind::Var) used.insert(x->name);
                    for (const auto &a : x->args) go(a);
                };
                go(e);
            };
            for (const auto &ix : u.store_index) collect(ix);
            collect(u.value);

            std::vector<int> free_dims;  // iterated dims, outermost first
            for (int d = box.dims() - 1; d >= 0; d--) {
                if (used.count(f.vars[d])) free_dims.push_back(d);
            }
            EvalEnv uenv;
            for (int d : free_dims) uenv.push(f.vars[d], 0);
            for (auto it = u.rdom.vars.rbegin(); it != u.rdom.vars.rend(); ++it) {
                uenv.push(it->name, it->min);
            }

            std::function<void(size_t)> run = [&](size_t level) {
                size_t nfree = free_dims.size(), nr = u.rdom.vars.size();
                if (level == nfree + nr) {
                    std::vector<int64_t> spt(size_t(box.dims()));
                    for (size_t i = 0; i < u.store_index.size(); i++) {
                        Scalar s = eval_expr(u.store_index[i], uenv, ctx);
                        spt[i] = s.type.is_float() ? int64_t(s.f) : s.i;
                    }
                    if (!box.contains(spt)) {
                        throw Error("update of '" + fname + "' stores out of bounds at " +
                                    point_str(spt) + ", domain " + box.str());
                    }
                    Scalar v = eval_expr(u.value, uenv, ctx);
                    buf.set(spt, v);
                    return;
                }
                if (level < nfree) {
                    int d = free_dims[level];
                    for (int64_t i = box.min[d]; i <= box.hi(d); i++) {
                        uenv.vars[level].second = i;
                        run(level + 1);
                    }
                } else {
                    const RVar &rv = u.rdom.vars[u.rdom.vars.size() - 1 - (level - nfree)];
                    for (int64_t i = rv.min; i < rv.min + rv.extent; i++) {
                        uenv.vars[level].second = i;
                        run(level + 1);
                    }
                }
            };
            run(0);
        }
        bufs[fname] = std::move(buf);
        ctx.buffers[fname] = &bufs[fname];
    }
    return bufs;
}

Buffer reference_eval(const TypedProgram &tp, const std::map<std::string, Buffer> &inputs,
                      const IntervalBox &output_box, const ReferenceOptions &opts) {
    auto all = reference_eval_all(tp, inputs, output_box, opts);
    return std::move(all.at(tp.prog.output));
}

}  // namespace sfg
