#include "bounds.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace sfg {

bool IntervalBox::contains(const std::vector<int64_t> &pt) const {
    if (int(pt.size()) != dims()) return false;
    for (int d = 0; d < dims(); d++) {
        if (pt[d] < min[d] || pt[d] > hi(d)) return false;
    }
    return true;
}

std::string IntervalBox::str() const {
    std::ostringstream os;
    os << "[";
    for (int d = 0; d < dims(); d++) {
        if (d) os << ", ";
        os << min[d] << ":" << min[d] + extent[d];
    }
    os << "]";
    return os.str();
}

std::string StencilFootprint::str() const {
    std::ostringstream os;
    os << "window(";
    for (int d = 0; d < dims(); d++) os << (d ? "," : "") << window[d];
    os << ") step(";
    for (int d = 0; d < dims(); d++) os << (d ? "," : "") << step[d];
    os << ") origin(";
    for (int d = 0; d < dims(); d++) os << (d ? "," : "") << origin[d];
    os << ")";
    return os.str();
}

namespace {

int callee_dims(const TypedProgram &tp, const std::string &name) {
    if (const InputDecl *in = tp.prog.find_input(name)) return in->dims;
    return int(tp.func(name).vars.size());
}

IntervalI sweep_linear(const LinearForm &lf, const std::map<std::string, IntervalI> &env,
                       const TypedProgram &tp, const Expr &arg) {
    __int128 lo = lf.offset, hi = lf.offset;
    for (const auto &[v, c] : lf.coeffs) {
        auto it = env.find(v);
        if (it == env.end()) {
            throw Error(tp.prog.filename, arg->pos.line, arg->pos.col,
                        "variable '" + v + "' has no known range");
        }
        if (c >= 0) {
            lo += __int128(c) * it->second.lo;
            hi += __int128(c) * it->second.hi;
        } else {
            lo += __int128(c) * it->second.hi;
            hi += __int128(c) * it->second.lo;
        }
    }
    return {lo, hi};
}

// Interval a call argument touches when swept over the consumer's ranges.
IntervalI sweep_arg(const TypedProgram &tp, const Expr &call, size_t arg_idx,
                    const ArgInfo &info, const std::map<std::string, IntervalI> &env) {
    const Expr &arg = call->args[arg_idx];
    if (info.cls == ArgClass::DataDep) {
        return interval_of(arg, env, tp);
    }
    IntervalI iv = sweep_linear(info.form, env, tp, arg);
    if (info.cls == ArgClass::Clamped) {
        iv.lo = std::clamp<__int128>(iv.lo, info.clamp_lo, info.clamp_hi);
        iv.hi = std::clamp<__int128>(iv.hi, info.clamp_lo, info.clamp_hi);
    }
    return iv;
}

// Enumerates call sites in f's definitions with the reduction ranges active.
void for_each_site(const TypedProgram &tp, const std::string &f, const IntervalBox &fbox,
                   const std::function<void(const Expr &, const std::map<std::string, IntervalI> &)> &fn) {
    const FuncDef &fd = tp.func(f);
    std::map<std::string, IntervalI> base;
    for (size_t d = 0; d < fd.vars.size(); d++) {
        base[fd.vars[d]] = {fbox.min[d], fbox.hi(int(d))};
    }
    auto walk = [&](const Expr &root, const std::map<std::string, IntervalI> &env) {
        for_each_call(root, [&](const Expr &call) { fn(call, env); });
    };
    walk(fd.value, base);
    for (const auto &u : fd.updates) {
        std::map<std::string, IntervalI> env = base;
        for (const auto &rv : u.rdom.vars) {
            env[rv.name] = {rv.min, rv.min + rv.extent - 1};
        }
        for (const auto &ix : u.store_index) walk(ix, env);
        walk(u.value, env);
    }
}

// Backward interval sweep shared by the scope and whole-program paths.
// `consumers` is topologically ordered (producers first); boxes for consumers
// are finalized before the sweep reaches them because every consumer of a
// func sits later in topological order.
std::map<std::string, IntervalBox> sweep_boxes(const TypedProgram &tp,
                                               const std::set<std::string> &producer_set,
                                               const std::vector<std::string> &consumers_topo,
                                               std::map<std::string, IntervalBox> boxes,
                                               const AcceleratedScope *strict_scope) {
    std::vector<std::string> order = consumers_topo;
    std::reverse(order.begin(), order.end());
    for (const auto &consumer : order) {
        auto cit = boxes.find(consumer);
        if (cit == boxes.end()) continue;  // never consumed, nothing to propagate
        const IntervalBox cbox = cit->second;
        for_each_site(tp, consumer, cbox, [&](const Expr &call, const std::map<std::string, IntervalI> &env) {
            const std::string &p = call->name;
            if (p == consumer || !producer_set.count(p)) return;
            int nd = callee_dims(tp, p);
            const auto &infos = tp.args_of(call.get());
            IntervalBox touched;
            touched.min.resize(nd);
            touched.extent.resize(nd);
            for (int d = 0; d < nd; d++) {
                if (strict_scope && infos[d].cls == ArgClass::DataDep && d >= nd - 2 &&
                    strict_scope->is_member(p)) {
                    throw Error(tp.prog.filename, call->pos.line, call->pos.col,
                                "unbounded domain: non-affine index into streamed function '" +
                                    p + "'");
                }
                IntervalI iv = sweep_arg(tp, call, size_t(d), infos[d], env);
                touched.min[d] = int64_t(iv.lo);
                touched.extent[d] = int64_t(iv.hi - iv.lo) + 1;
            }
            auto it = boxes.find(p);
            if (it == boxes.end()) {
                boxes[p] = touched;
            } else {
                IntervalBox &b = it->second;
                SFG_INTERNAL_ASSERT(b.dims() == nd);
                for (int d = 0; d < nd; d++) {
                    int64_t hi = std::max(b.hi(d), touched.hi(d));
                    b.min[d] = std::min(b.min[d], touched.min[d]);
                    b.extent[d] = hi - b.min[d] + 1;
                }
            }
        });
    }
    return boxes;
}

}  // namespace

int64_t forward_leading_extent(const TypedProgram &tp, const std::string &f, int dim) {
    std::set<std::string> visiting;
    std::function<int64_t(const std::string &, int)> go = [&](const std::string &name,
                                                              int d) -> int64_t {
        if (const InputDecl *in = tp.prog.find_input(name)) {
            if (d < int(in->fixed_dims.size())) return in->fixed_dims[d].second;
            return -1;
        }
        if (!visiting.insert(name).second) return -1;
        const FuncDef &fd = tp.func(name);
        const std::string &var = fd.vars[d];
        int64_t found = -1;

        // bounded (possibly data-dependent) update store index
        for (const auto &u : fd.updates) {
            const Expr &ix = u.store_index[d];
            LinearForm lf = linear_form(ix);
            if (lf.valid && lf.coeffs.size() == 1 && lf.coeff(var) == 1 && lf.offset == 0) continue;
            std::map<std::string, IntervalI> env;
            for (const auto &rv : u.rdom.vars) env[rv.name] = {rv.min, rv.min + rv.extent - 1};
            IntervalI iv = interval_of(ix, env, tp);
            if (iv.lo < 0) {
                throw Error(tp.prog.filename, u.pos.line, u.pos.col,
                            "update store index for dimension '" + var + "' may be negative");
            }
            found = std::max<int64_t>(found, int64_t(iv.hi) + 1);
        }
        if (found > 0) {
            visiting.erase(name);
            return found;
        }

        // identity pass-through into a callee dimension
        std::function<void(const Expr &)> scan = [&](const Expr &e) {
            if (e->kind == ExprKind::Call && e->name != name) {
                for (size_t a = 0; a < e->args.size(); a++) {
                    LinearForm lf = linear_form(e->args[a]);
                    if (lf.valid && lf.offset == 0 && lf.coeffs.size() == 1 && lf.coeff(var) == 1) {
                        int64_t sub = go(e->name, int(a));
                        if (sub > 0) found = found < 0 ? sub : std::min(found, sub);
                    }
                }
            }
            for (const auto &s : e->args) scan(s);
        };
        scan(fd.value);
        for (const auto &u : fd.updates) scan(u.value);
        visiting.erase(name);
        return found;
    };
    return go(f, dim);
}

Bounds infer_bounds(AcceleratedScope &scope, const ScheduledProgram &sp) {
    const TypedProgram &tp = sp.typed;
    const FuncDef &out = tp.func(scope.output);
    int nd = int(out.vars.size());
    SFG_INTERNAL_ASSERT(nd >= 2);

    IntervalBox obox;
    obox.min.resize(nd);
    obox.extent.resize(nd);
    obox.min[nd - 2] = 0;
    obox.extent[nd - 2] = scope.tile_x;
    obox.min[nd - 1] = 0;
    obox.extent[nd - 1] = scope.tile_y;
    for (int d = 0; d < nd - 2; d++) {
        int64_t e = forward_leading_extent(tp, scope.output, d);
        if (e <= 0) {
            throw Error(tp.prog.filename, out.pos.line, out.pos.col,
                        "cannot infer the extent of dimension '" + out.vars[d] + "' of '" +
                            scope.output + "'");
        }
        obox.min[d] = 0;
        obox.extent[d] = e;
    }

    std::set<std::string> producers;
    for (const auto &m : scope.members) producers.insert(m);
    for (const auto &in : scope.inputs) producers.insert(in);
    for (const auto &ax : scope.aux_funcs) producers.insert(ax);

    Bounds result;
    result.boxes = sweep_boxes(tp, producers, scope.members, {{scope.output, obox}}, &scope);

    for (const auto &in : scope.inputs) {
        if (!result.boxes.count(in)) {
            throw Error(tp.prog.filename, 1, 1,
                        "accelerate input '" + in + "' is never read inside the scope");
        }
    }

    // record leading-dim extents, check unroll/stride divisibility
    for (const auto &m : scope.members) {
        const FuncDef &fd = tp.func(m);
        const IntervalBox &b = result.box(m);
        std::vector<int64_t> intra(size_t(std::max(0, b.dims() - 2)));
        for (int d = 0; d + 2 < b.dims(); d++) intra[d] = b.extent[d];
        scope.intra_extents[m] = intra;
        for (size_t d = 0; d + 2 < fd.vars.size(); d++) {
            int u = scope.unroll_of(m, fd.vars[d]);
            if (intra[d] % u != 0) {
                throw Error(tp.prog.filename, fd.pos.line, fd.pos.col,
                            "unroll factor " + std::to_string(u) +
                                " does not divide the extent of '" + fd.vars[d] + "' on '" + m + "'");
            }
        }
        int stride = scope.stride_of(m);
        if (b.extent[b.dims() - 2] % stride != 0) {
            throw Error(tp.prog.filename, fd.pos.line, fd.pos.col,
                        "stride " + std::to_string(stride) + " does not divide the x extent of '" +
                            m + "'");
        }
    }
    return result;
}

std::map<std::string, IntervalBox> infer_program_boxes(const TypedProgram &tp,
                                                       const IntervalBox &output_box) {
    std::set<std::string> producers;
    std::vector<std::string> consumers = tp.topo_order;
    for (const auto &f : tp.topo_order) producers.insert(f);
    for (const auto &in : tp.prog.inputs) producers.insert(in.name);
    return sweep_boxes(tp, producers, consumers, {{tp.prog.output, output_box}}, nullptr);
}

StencilFootprint consumer_footprint(const ScheduledProgram &sp, const AcceleratedScope &scope,
                                    const Bounds &bounds, const std::string &consumer,
                                    const std::string &producer) {
    const TypedProgram &tp = sp.typed;
    const FuncDef &cf = tp.func(consumer);
    int pd = callee_dims(tp, producer);
    int cd = int(cf.vars.size());
    const std::string scan_x = cf.vars[cd - 2];
    const std::string scan_y = cf.vars[cd - 1];

    bool found = false;
    std::vector<bool> dim_seen(pd, false);
    std::vector<__int128> lo(pd, 0), hi(pd, 0);
    std::vector<int64_t> steps(pd, 0);

    const IntervalBox &cbox = bounds.box(consumer);
    for_each_site(tp, consumer, cbox, [&](const Expr &call, const std::map<std::string, IntervalI> &env) {
        if (call->name != producer) return;
        found = true;
        const auto &infos = tp.args_of(call.get());
        for (int d = 0; d < pd; d++) {
            const ArgInfo &info = infos[d];
            bool scan_dim = d >= pd - 2;
            const std::string &driver = (d == pd - 2) ? scan_x : scan_y;
            IntervalI iv;
            int64_t step;
            if (!scan_dim || info.cls == ArgClass::DataDep) {
                iv = sweep_arg(tp, call, size_t(d), info, env);
                step = int64_t(iv.hi - iv.lo) + 1;  // whole range each position
            } else {
                if (info.cls != ArgClass::Affine) {
                    throw Error(tp.prog.filename, call->pos.line, call->pos.col,
                                "scan access into '" + producer + "' must be affine");
                }
                LinearForm lf = info.form;
                step = lf.coeff(driver);
                if (step < 1) {
                    throw Error(tp.prog.filename, call->pos.line, call->pos.col,
                                "access into '" + producer + "' must advance with '" + driver +
                                    "' (coefficient >= 1)");
                }
                LinearForm rest = lf;
                rest.coeffs.erase(driver);
                iv = sweep_linear(rest, env, tp, call->args[d]);
            }
            if (!dim_seen[d]) {
                lo[d] = iv.lo;
                hi[d] = iv.hi;
                steps[d] = step;
                dim_seen[d] = true;
            } else {
                lo[d] = std::min(lo[d], iv.lo);
                hi[d] = std::max(hi[d], iv.hi);
                steps[d] = std::min(steps[d], step);
            }
        }
    });
    if (!found) {
        throw Error(tp.prog.filename, cf.pos.line, cf.pos.col,
                    "'" + consumer + "' does not call '" + producer + "'");
    }
    StencilFootprint fp;
    fp.window.resize(pd);
    fp.step.resize(pd);
    fp.origin.resize(pd);
    for (int d = 0; d < pd; d++) {
        fp.window[d] = int64_t(hi[d] - lo[d]) + 1;
        fp.origin[d] = int64_t(lo[d]);
        fp.step[d] = std::max<int64_t>(1, steps[d]);
    }
    (void)scope;
    return fp;
}

StencilFootprint union_output_stencil(const ScheduledProgram &sp, const AcceleratedScope &scope,
                                      const Bounds &bounds, const std::string &producer,
                                      const std::vector<std::string> &consumers) {
    SFG_INTERNAL_ASSERT(!consumers.empty());
    StencilFootprint u;
    bool first = true;
    for (const auto &c : consumers) {
        StencilFootprint fp = consumer_footprint(sp, scope, bounds, c, producer);
        if (first) {
            u = fp;
            first = false;
            continue;
        }
        SFG_INTERNAL_ASSERT(u.dims() == fp.dims());
        for (int d = 0; d < u.dims(); d++) {
            int64_t lo = std::min(u.origin[d], fp.origin[d]);
            int64_t hi = std::max(u.origin[d] + u.window[d], fp.origin[d] + fp.window[d]);
            u.origin[d] = lo;
            u.window[d] = hi - lo;
            u.step[d] = std::min(u.step[d], fp.step[d]);
        }
    }
    return u;
}

}  // namespace sfg
