#include "schedule.hpp"

#include <algorithm>

namespace sfg {

int AcceleratedScope::unroll_of(const std::string &f, const std::string &var) const {
    auto it = unrolls.find(f);
    if (it == unrolls.end()) return 1;
    auto jt = it->second.find(var);
    return jt == it->second.end() ? 1 : jt->second;
}

namespace {

struct Builder {
    const TypedProgram &tp;
    ScheduledProgram out;

    std::set<std::string> tiled_funcs;
    std::map<std::string, std::pair<std::string, std::string>> tile_outer;  // f -> (xo, yo)
    std::map<std::string, std::pair<int64_t, int64_t>> tile_sizes;

    [[noreturn]] void fail(SourcePos pos, const std::string &msg) {
        throw Error(tp.prog.filename, pos.line, pos.col, msg);
    }

    std::vector<LoopDim> *loops_of(const std::string &f) {
        auto it = out.loops.find(f);
        return it == out.loops.end() ? nullptr : &it->second;
    }

    int find_loop(const std::vector<LoopDim> &ls, const std::string &var) {
        for (size_t i = 0; i < ls.size(); i++) {
            if (ls[i].var == var) return int(i);
        }
        return -1;
    }

    void apply_directive(const Directive &d);
    void resolve_scope(const Directive &accel);
    void compute_members();
    void compute_strides();
    void validate_scope_indices();

    const Directive *accelerate = nullptr;
};

void Builder::apply_directive(const Directive &d) {
    if (d.kind == DirectiveKind::Accelerate) {
        if (accelerate) fail(d.pos, "accelerate may appear at most once per program");
        accelerate = &d;
        return;
    }
    if (d.kind == DirectiveKind::FifoDepth) {
        if (d.ints[0] < 0) fail(d.pos, "fifo_depth must be >= 0");
        out.scope.fifo_overrides[{d.func, d.names[0]}] = d.ints[0];
        return;
    }
    if (d.kind == DirectiveKind::LineBuffer) {
        if (!tp.prog.find_func(d.func)) fail(d.pos, "linebuffer on unknown function '" + d.func + "'");
        out.scope.linebuffered.insert(d.func);
        return;
    }

    auto *ls = loops_of(d.func);
    if (!ls) fail(d.pos, "directive references unknown function '" + d.func + "'");

    switch (d.kind) {
    case DirectiveKind::Tile: {
        // tile(f, x, y, xo, yo, xi, yi, sx, sy)
        int ix = find_loop(*ls, d.names[0]);
        int iy = find_loop(*ls, d.names[1]);
        if (ix < 0 || iy < 0) fail(d.pos, "tile variables not found on '" + d.func + "'");
        if (d.ints[0] < 1 || d.ints[1] < 1) fail(d.pos, "tile extents must be >= 1");
        std::string x = d.names[0], y = d.names[1];
        std::string xo = d.names[2], yo = d.names[3], xi = d.names[4], yi = d.names[5];
        std::string ox = (*ls)[ix].origin, oy = (*ls)[iy].origin;
        std::vector<LoopDim> nl;
        for (int i = 0; i < int(ls->size()); i++) {
            if (i == ix || i == iy) continue;
            if (i == std::min(ix, iy)) {
                // outer block loops take the place of the outermost tiled var
                nl.push_back({yo, oy, 0, false, 1, false});
                nl.push_back({xo, ox, 0, false, 1, false});
                nl.push_back({yi, oy, d.ints[1], false, 1, false});
                nl.push_back({xi, ox, d.ints[0], false, 1, false});
            }
            nl.push_back((*ls)[i]);
        }
        if (ls->size() == 2) {
            nl = {{yo, oy, 0, false, 1, false},
                  {xo, ox, 0, false, 1, false},
                  {yi, oy, d.ints[1], false, 1, false},
                  {xi, ox, d.ints[0], false, 1, false}};
        }
        *ls = nl;
        tiled_funcs.insert(d.func);
        tile_outer[d.func] = {xo, yo};
        tile_sizes[d.func] = {d.ints[0], d.ints[1]};
        break;
    }
    case DirectiveKind::Split: {
        int i = find_loop(*ls, d.names[0]);
        if (i < 0) fail(d.pos, "split variable '" + d.names[0] + "' not found on '" + d.func + "'");
        if (d.ints[0] < 1) fail(d.pos, "split factor must be >= 1");
        LoopDim orig = (*ls)[i];
        LoopDim outer{d.names[1], orig.origin, orig.extent > 0 ? orig.extent / d.ints[0] : 0,
                      false, 1, false};
        LoopDim inner{d.names[2], orig.origin, d.ints[0], false, 1, false};
        if (orig.extent > 0 && orig.extent % d.ints[0] != 0) {
            fail(d.pos, "split factor must divide the loop extent");
        }
        ls->erase(ls->begin() + i);
        ls->insert(ls->begin() + i, {outer, inner});
        break;
    }
    case DirectiveKind::Reorder: {
        // vars listed innermost first
        std::vector<int> idx;
        for (const auto &v : d.names) {
            int i = find_loop(*ls, v);
            if (i < 0) fail(d.pos, "reorder variable '" + v + "' not found on '" + d.func + "'");
            idx.push_back(i);
        }
        std::vector<int> sorted = idx;
        std::sort(sorted.begin(), sorted.end());
        std::vector<LoopDim> vals;
        for (auto i : idx) vals.push_back((*ls)[i]);
        // place reordered vars back into the same positions, innermost last
        for (size_t k = 0; k < sorted.size(); k++) {
            (*ls)[sorted[k]] = vals[vals.size() - 1 - k];
        }
        break;
    }
    case DirectiveKind::Unroll: {
        int i = find_loop(*ls, d.names[0]);
        bool is_rvar = false;
        const FuncDef &f = tp.func(d.func);
        for (const auto &u : f.updates) {
            for (const auto &rv : u.rdom.vars) {
                if (rv.name == d.names[0]) {
                    is_rvar = true;
                    if (d.ints[0] >= 1 && rv.extent % d.ints[0] != 0) {
                        fail(d.pos, "unroll factor must divide the reduction extent");
                    }
                }
            }
        }
        if (i < 0 && !is_rvar) {
            fail(d.pos, "unroll variable '" + d.names[0] + "' not found on '" + d.func + "'");
        }
        if (d.ints[0] < 1) fail(d.pos, "unroll factor must be >= 1");
        if (i >= 0) {
            (*ls)[i].unrolled = true;
            (*ls)[i].unroll_factor = int(d.ints[0]);
        }
        out.scope.unrolls[d.func][d.names[0]] = int(d.ints[0]);
        break;
    }
    case DirectiveKind::Parallel: {
        int i = find_loop(*ls, d.names[0]);
        if (i < 0) fail(d.pos, "parallel variable '" + d.names[0] + "' not found on '" + d.func + "'");
        (*ls)[i].parallel = true;
        out.scope.parallel_tiles = true;
        break;
    }
    default:
        break;
    }
}

void Builder::compute_members() {
    AcceleratedScope &s = out.scope;
    // transitive producer closure of every func
    std::map<std::string, std::set<std::string>> closure;
    for (const auto &name : tp.topo_order) {
        std::set<std::string> c = tp.info.at(name).callees;
        for (const auto &callee : tp.info.at(name).callees) {
            if (tp.prog.find_func(callee)) {
                const auto &sub = closure[callee];
                c.insert(sub.begin(), sub.end());
            }
        }
        closure[name] = std::move(c);
    }

    std::set<std::string> input_set(s.inputs.begin(), s.inputs.end());
    auto reaches_an_input = [&](const std::string &f) {
        if (input_set.count(f)) return true;
        for (const auto &c : closure[f]) {
            if (input_set.count(c)) return true;
        }
        return false;
    };

    // members: on a path from some scope input to the output
    std::set<std::string> member_set;
    if (!closure.count(s.output)) fail({}, "accelerate output '" + s.output + "' is not a function");
    for (const auto &name : tp.topo_order) {
        if (input_set.count(name)) continue;
        bool feeds_output = name == s.output || closure[s.output].count(name);
        if (feeds_output && reaches_an_input(name)) member_set.insert(name);
    }
    if (!member_set.count(s.output)) {
        fail(tp.func(s.output).pos,
             "accelerated scope is empty: output does not consume the declared inputs");
    }
    for (const auto &name : tp.topo_order) {
        if (member_set.count(name)) s.members.push_back(name);
    }

    // helper funcs referenced by members but carrying no input dependence
    std::set<std::string> aux;
    for (const auto &m : s.members) {
        const FuncDef &f = tp.func(m);
        auto visit = [&](const Expr &e) {
            for_each_call(e, [&](const Expr &c) {
                if (c->name == m || member_set.count(c->name) || input_set.count(c->name)) return;
                if (tp.is_input(c->name)) {
                    fail(c->pos, "kernel '" + m + "' reads input '" + c->name +
                                     "' which is not streamed into the accelerator");
                }
                const FuncInfo &fi = tp.info.at(c->name);
                if (fi.depends_on_input) {
                    fail(c->pos, "'" + m + "' references '" + c->name +
                                     "' which lies outside the accelerated scope; "
                                     "add it to the accelerate inputs");
                }
                aux.insert(c->name);
            });
        };
        visit(f.value);
        for (const auto &u : f.updates) {
            for (const auto &ix : u.store_index) visit(ix);
            visit(u.value);
        }
    }
    for (const auto &name : tp.topo_order) {
        if (aux.count(name)) s.aux_funcs.push_back(name);
    }

    for (const auto &lb : s.linebuffered) {
        if (!member_set.count(lb)) {
            fail({}, "linebuffer on '" + lb + "' which is outside the accelerated scope");
        }
    }
    for (const auto &[edge, depth] : s.fifo_overrides) {
        auto inside = [&](const std::string &f) {
            return member_set.count(f) || input_set.count(f);
        };
        if (!inside(edge.first) || !inside(edge.second)) {
            fail({}, "fifo_depth(" + edge.first + ", " + edge.second +
                         ") references functions outside the accelerated scope");
        }
    }
}

void Builder::compute_strides() {
    AcceleratedScope &s = out.scope;
    // output stride: fixed-extent x-origin loops strictly inside inner_var
    const auto &ls = out.loops.at(s.output);
    int inner_idx = -1;
    for (size_t i = 0; i < ls.size(); i++) {
        if (ls[i].var == s.inner_var) inner_idx = int(i);
    }
    SFG_INTERNAL_ASSERT(inner_idx >= 0);
    std::string x_origin = ls[inner_idx].origin;
    int64_t stride = 1;
    for (size_t i = inner_idx + 1; i < ls.size(); i++) {
        if (ls[i].origin == x_origin) {
            if (ls[i].extent <= 0) {
                fail({}, "loops below the accelerator stride variable must have fixed extents");
            }
            if (!ls[i].unrolled || ls[i].unroll_factor != ls[i].extent) {
                fail({}, "loop '" + ls[i].var + "' below the accelerator stride must be fully unrolled");
            }
            stride *= ls[i].extent;
        }
    }
    s.stride[s.output] = int(stride);

    // member strides come from unroll on their own x scan variable
    for (const auto &m : s.members) {
        if (m == s.output) continue;
        const FuncDef &f = tp.func(m);
        if (f.vars.size() >= 2) {
            const std::string &xv = f.vars[f.vars.size() - 2];
            s.stride[m] = s.unroll_of(m, xv);
        } else {
            s.stride[m] = 1;
        }
    }
}

void Builder::validate_scope_indices() {
    // Clamped index expressions are a host-side idiom (edge padding); inside
    // the accelerator every stream access must be plain affine.
    const AcceleratedScope &s = out.scope;
    for (const auto &m : s.members) {
        const FuncDef &f = tp.func(m);
        auto check = [&](const Expr &root) {
            for_each_call(root, [&](const Expr &call) {
                if (call->name == m) return;
                for (const auto &info : tp.args_of(call.get())) {
                    if (info.cls == ArgClass::Clamped) {
                        fail(call->pos,
                             "clamped index into '" + call->name + "' inside the accelerated "
                             "scope; provide a pre-padded input domain instead");
                    }
                }
            });
        };
        check(f.value);
        for (const auto &u : f.updates) {
            for (const auto &ix : u.store_index) check(ix);
            check(u.value);
        }
        if (f.vars.size() < 2) {
            fail(f.pos, "'" + m + "' has fewer than 2 dimensions and cannot be streamed");
        }
    }
}

void Builder::resolve_scope(const Directive &accel) {
    AcceleratedScope &s = out.scope;
    s.output = accel.func;
    if (!tp.prog.find_func(s.output)) fail(accel.pos, "accelerate on unknown function '" + s.output + "'");
    if (s.output != tp.prog.output) {
        fail(accel.pos, "accelerate target must be the program output function");
    }
    for (size_t i = 0; i + 2 < accel.names.size(); i++) {
        const std::string &in = accel.names[i];
        if (!tp.prog.find_func(in) && !tp.prog.find_input(in)) {
            fail(accel.pos, "accelerate input '" + in + "' is not defined");
        }
        if (in == s.output) {
            fail(accel.pos, "accelerate inputs must differ from the output (empty pipeline)");
        }
        s.inputs.push_back(in);
    }
    s.inner_var = accel.names[accel.names.size() - 2];
    s.block_var = accel.names.back();

    auto ot = tile_outer.find(s.output);
    if (ot == tile_outer.end()) {
        fail(accel.pos, "accelerate requires a prior tile() on '" + s.output + "'");
    }
    if (s.block_var != ot->second.first && s.block_var != ot->second.second) {
        fail(accel.pos, "accelerate block variable '" + s.block_var +
                            "' is not an outer tile variable of '" + s.output + "'");
    }
    const auto &ls = out.loops.at(s.output);
    bool have_inner = false;
    for (const auto &l : ls) {
        if (l.var == s.inner_var) have_inner = true;
    }
    if (!have_inner) {
        fail(accel.pos, "accelerate inner variable '" + s.inner_var + "' is not a loop of '" +
                            s.output + "'");
    }
    s.tile_x = tile_sizes[s.output].first;
    s.tile_y = tile_sizes[s.output].second;

    compute_members();
    compute_strides();
    validate_scope_indices();
}

}  // namespace

ScheduledProgram apply_schedule(const TypedProgram &p, const std::vector<Directive> &directives) {
    Builder b{p};
    b.out.typed = p;

    // initial loop nests: coordinate vars, innermost first -> loops outermost first
    for (const auto &f : p.prog.funcs) {
        std::vector<LoopDim> ls;
        for (auto it = f.vars.rbegin(); it != f.vars.rend(); ++it) {
            ls.push_back({*it, *it, 0, false, 1, false});
        }
        b.out.loops[f.name] = std::move(ls);
    }

    for (const auto &d : directives) b.apply_directive(d);
    if (b.accelerate) {
        b.out.has_accelerate = true;
        b.resolve_scope(*b.accelerate);
    } else {
        if (!b.out.scope.linebuffered.empty()) {
            throw Error(p.prog.filename, 1, 1, "linebuffer directives require an accelerate scope");
        }
        if (!b.out.scope.fifo_overrides.empty()) {
            throw Error(p.prog.filename, 1, 1, "fifo_depth directives require an accelerate scope");
        }
    }
    return std::move(b.out);
}

int64_t sequential_iterations(const AcceleratedScope &scope, const ScheduledProgram &sp,
                              const std::string &f) {
    const FuncDef &fd = sp.func(f);
    auto it = scope.intra_extents.find(f);
    SFG_INTERNAL_ASSERT(it != scope.intra_extents.end());
    // leading (non-scan) dims are computed within one firing; unrolled parts
    // become spatial hardware, the rest iterate sequentially
    int64_t intra = 1;
    const auto &exts = it->second;  // one entry per leading dim
    for (size_t d = 0; d < exts.size(); d++) {
        int u = scope.unroll_of(f, fd.vars[d]);
        intra *= std::max<int64_t>(1, exts[d] / u);
    }

    // loop segments after perfection: init / each reduction / flush,
    // unit-extent segments fold away under iteration guards
    int64_t total = 0;
    if (fd.updates.empty()) {
        if (intra > 1) total += intra;
    } else {
        if (intra > 1) total += intra;  // accumulator init
        for (const auto &u : fd.updates) {
            int64_t r = 1;
            for (const auto &rv : u.rdom.vars) {
                int uf = scope.unroll_of(f, rv.name);
                r *= std::max<int64_t>(1, rv.extent / uf);
            }
            if (r > 1) total += r;
        }
        if (intra > 1) total += intra;  // flush to the output stencil
    }
    return std::max<int64_t>(1, total);
}

Rational scope_rate(const AcceleratedScope &scope, const ScheduledProgram &sp,
                    const std::string &f) {
    SFG_INTERNAL_ASSERT(scope.is_member(f));
    return Rational(scope.stride_of(f), sequential_iterations(scope, sp, f));
}

Rational pipeline_scheduled_rate(const AcceleratedScope &scope, const ScheduledProgram &sp) {
    Rational r(1, 1);
    bool first = true;
    for (const auto &m : scope.members) {
        Rational mr = scope_rate(scope, sp, m);
        if (first || mr < r) r = mr;
        first = false;
    }
    return r;
}

}  // namespace sfg
