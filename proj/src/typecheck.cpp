#include "typecheck.hpp"

#include <algorithm>

namespace sfg {

IntervalI IntervalI::of_type(NumericType t) {
    SFG_INTERNAL_ASSERT(!t.is_float());
    if (t.kind == TypeKind::UInt) return {0, (__int128(1) << t.bits) - 1};
    __int128 half = __int128(1) << (t.bits - 1);
    return {-half, half - 1};
}

LinearForm linear_form(const Expr &e) {
    LinearForm r;
    switch (e->kind) {
    case ExprKind::IntLit:
        r.valid = true;
        r.offset = e->int_value;
        return r;
    case ExprKind::Var:
        r.valid = true;
        r.coeffs[e->name] = 1;
        return r;
    case ExprKind::Unary:
        if (e->un_op == UnOp::Neg) {
            LinearForm a = linear_form(e->args[0]);
            if (!a.valid) return r;
            for (auto &[v, c] : a.coeffs) c = -c;
            a.offset = -a.offset;
            return a;
        }
        return r;
    case ExprKind::Cast:
        // index casts between integer types don't change the linear form
        if (!e->type.is_float()) return linear_form(e->args[0]);
        return r;
    case ExprKind::Binary: {
        if (e->bin_op == BinOp::Add || e->bin_op == BinOp::Sub) {
            LinearForm a = linear_form(e->args[0]);
            LinearForm b = linear_form(e->args[1]);
            if (!a.valid || !b.valid) return r;
            int sign = e->bin_op == BinOp::Add ? 1 : -1;
            for (const auto &[v, c] : b.coeffs) {
                a.coeffs[v] += sign * c;
                if (a.coeffs[v] == 0) a.coeffs.erase(v);
            }
            a.offset += sign * b.offset;
            return a;
        }
        if (e->bin_op == BinOp::Mul) {
            LinearForm a = linear_form(e->args[0]);
            LinearForm b = linear_form(e->args[1]);
            if (!a.valid || !b.valid) return r;
            const LinearForm *k = nullptr, *lin = nullptr;
            if (a.coeffs.empty()) k = &a, lin = &b;
            else if (b.coeffs.empty()) k = &b, lin = &a;
            else return r;
            LinearForm out;
            out.valid = true;
            out.offset = lin->offset * k->offset;
            for (const auto &[v, c] : lin->coeffs) {
                if (c * k->offset != 0) out.coeffs[v] = c * k->offset;
            }
            return out;
        }
        return r;
    }
    default:
        return r;
    }
}

void for_each_call(const Expr &e, const std::function<void(const Expr &)> &fn) {
    if (e->kind == ExprKind::Call) fn(e);
    for (const auto &a : e->args) for_each_call(a, fn);
}

namespace {

// Interval transfer functions. Everything stays finite because leaves are
// typed and types cap at 32 bits.
IntervalI iv_binop(BinOp op, const IntervalI &a, const IntervalI &b) {
    auto mm = [](std::initializer_list<__int128> vs) {
        IntervalI r{*vs.begin(), *vs.begin()};
        for (auto v : vs) {
            r.lo = std::min(r.lo, v);
            r.hi = std::max(r.hi, v);
        }
        return r;
    };
    switch (op) {
    case BinOp::Add: return {a.lo + b.lo, a.hi + b.hi};
    case BinOp::Sub: return {a.lo - b.hi, a.hi - b.lo};
    case BinOp::Mul:
        return mm({a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi});
    case BinOp::Div: {
        if (b.lo == b.hi && b.lo != 0) {
            IntervalI r = mm({a.lo / b.lo, a.hi / b.lo});
            return r;
        }
        // divisor range may include 0 (-> 0); bound by |a| either way
        IntervalI r = mm({a.lo, a.hi, -a.lo, -a.hi, 0});
        return r;
    }
    case BinOp::Mod: {
        __int128 m = std::max(b.hi < 0 ? -b.hi : b.hi, b.lo < 0 ? -b.lo : b.lo);
        if (m == 0) return {0, 0};
        __int128 lo = a.lo < 0 ? -(m - 1) : 0;
        return {lo, m - 1};
    }
    case BinOp::Shl: {
        int smax = int(std::clamp<__int128>(b.hi, 0, 31));
        int smin = int(std::clamp<__int128>(b.lo, 0, 31));
        return mm({a.lo << smin, a.lo << smax, a.hi << smin, a.hi << smax});
    }
    case BinOp::Shr: {
        int smax = int(std::clamp<__int128>(b.hi, 0, 31));
        int smin = int(std::clamp<__int128>(b.lo, 0, 31));
        return mm({a.lo >> smin, a.lo >> smax, a.hi >> smin, a.hi >> smax});
    }
    case BinOp::Min: return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)};
    case BinOp::Max: return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)};
    default: return {0, 1};  // comparisons
    }
}

NumericType narrowest_type(const IntervalI &iv, bool prefer_signed) {
    if (iv.lo >= 0) {
        if (!prefer_signed) {
            if (iv.hi <= 255) return u8();
            if (iv.hi <= 65535) return u16();
            if (iv.hi <= 4294967295ll) return u32();
        } else {
            if (iv.hi <= 127) return i8();
            if (iv.hi <= 32767) return i16();
            if (iv.hi <= 2147483647ll) return i32();
        }
    }
    if (iv.lo >= -128 && iv.hi <= 127) return i8();
    if (iv.lo >= -32768 && iv.hi <= 32767) return i16();
    if (iv.lo >= -2147483648ll && iv.hi <= 2147483647ll) return i32();
    // wraps; fall back to a full 32-bit type
    return prefer_signed || iv.lo < 0 ? i32() : u32();
}

struct Checker {
    const SourceProgram &src;
    TypedProgram out;
    std::map<std::string, int> state;  // 0 unvisited, 1 visiting, 2 done

    explicit Checker(const SourceProgram &p) : src(p) { out.prog = p; }

    [[noreturn]] void fail(SourcePos pos, const std::string &msg) {
        throw Error(src.filename, pos.line, pos.col, msg);
    }

    FuncDef *mutable_func(const std::string &name) {
        for (auto &f : out.prog.funcs) {
            if (f.name == name) return &f;
        }
        return nullptr;
    }

    void run();
    void visit_func(const std::string &name);

    struct Env {
        std::map<std::string, IntervalI> ranges;  // var -> value range
        std::set<std::string> rdom_vars;
        const FuncDef *self = nullptr;  // for update definitions
        bool in_update = false;
    };

    Expr type_expr(const Expr &e, Env &env, IntervalI *iv_out);
    void classify_call(const Expr &typed_call, Env &env);
};

Expr Checker::type_expr(const Expr &e, Env &env, IntervalI *iv_out) {
    auto ret = [&](Expr t, IntervalI iv) {
        *iv_out = iv;
        return t;
    };
    switch (e->kind) {
    case ExprKind::IntLit: {
        IntervalI iv = IntervalI::point(e->int_value);
        return ret(make_int(e->int_value, narrowest_type(iv, e->int_value < 0)), iv);
    }
    case ExprKind::FloatLit:
        return ret(e, {0, 0});
    case ExprKind::Var: {
        auto it = env.ranges.find(e->name);
        if (it == env.ranges.end()) fail(e->pos, "unknown variable '" + e->name + "'");
        NumericType t = narrowest_type(it->second, it->second.lo < 0);
        // coordinate variables stay i32: their runtime extent is not known yet
        if (!env.rdom_vars.count(e->name)) t = i32();
        return ret(with_type(e, t), it->second);
    }
    case ExprKind::Tap: {
        const TapDecl *tap = src.find_tap(e->name);
        SFG_INTERNAL_ASSERT(tap);
        IntervalI iv = tap->type.is_float() ? IntervalI{0, 0} : IntervalI::of_type(tap->type);
        return ret(with_type(e, tap->type), iv);
    }
    case ExprKind::Cast: {
        IntervalI sub;
        Expr a = type_expr(e->args[0], env, &sub);
        auto n = std::make_shared<ExprNode>(*e);
        n->args = {a};
        if (e->type.is_float()) return ret(n, {0, 0});
        IntervalI tv = IntervalI::of_type(e->type);
        IntervalI iv = a->type.is_float() ? tv
                       : tv.contains(sub) ? sub
                                          : tv;  // narrowing may wrap
        return ret(n, iv);
    }
    case ExprKind::Unary: {
        IntervalI sub;
        Expr a = type_expr(e->args[0], env, &sub);
        IntervalI iv;
        if (e->un_op == UnOp::Neg) {
            iv = {-sub.hi, -sub.lo};
        } else if (e->un_op == UnOp::Abs) {
            __int128 hi = std::max(sub.hi < 0 ? -sub.hi : sub.hi, sub.lo < 0 ? -sub.lo : sub.lo);
            __int128 lo = (sub.lo <= 0 && sub.hi >= 0) ? 0 : std::min(sub.lo < 0 ? -sub.hi : sub.lo, sub.hi < 0 ? -sub.lo : sub.hi);
            iv = {lo, hi};
        } else {
            iv = {0, 1};
        }
        NumericType t = a->type.is_float() && e->un_op != UnOp::Not
                            ? f32()
                            : narrowest_type(iv, iv.lo < 0);
        auto n = std::make_shared<ExprNode>(*e);
        n->args = {a};
        n->type = t;
        return ret(n, t.is_float() ? IntervalI{0, 0} : iv);
    }
    case ExprKind::Select: {
        IntervalI ci, ai, bi;
        Expr c = type_expr(e->args[0], env, &ci);
        Expr a = type_expr(e->args[1], env, &ai);
        Expr b = type_expr(e->args[2], env, &bi);
        if (a->type.is_float() != b->type.is_float()) {
            fail(e->pos, "select branches mix float and integer; add an explicit cast");
        }
        auto n = std::make_shared<ExprNode>(*e);
        n->args = {c, a, b};
        if (a->type.is_float()) {
            n->type = f32();
            return ret(n, {0, 0});
        }
        IntervalI iv{std::min(ai.lo, bi.lo), std::max(ai.hi, bi.hi)};
        n->type = narrowest_type(iv, iv.lo < 0);
        return ret(n, iv);
    }
    case ExprKind::Binary: {
        IntervalI ai, bi;
        Expr a = type_expr(e->args[0], env, &ai);
        Expr b = type_expr(e->args[1], env, &bi);
        bool fa = a->type.is_float(), fb = b->type.is_float();
        auto n = std::make_shared<ExprNode>(*e);
        n->args = {a, b};
        bool cmp = false;
        switch (e->bin_op) {
        case BinOp::Eq:
        case BinOp::Ne:
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Gt:
        case BinOp::Ge:
        case BinOp::And:
        case BinOp::Or:
            cmp = true;
            break;
        default:
            break;
        }
        if (cmp) {
            n->type = u8();
            return ret(n, {0, 1});
        }
        if (fa || fb) {
            if (e->bin_op == BinOp::Shl || e->bin_op == BinOp::Shr) {
                fail(e->pos, "shift is not defined on f32");
            }
            // ints mix with floats only as literals or via explicit casts
            auto is_lit = [](const Expr &x) { return x->kind == ExprKind::IntLit; };
            if ((fa && !fb && !is_lit(b)) || (fb && !fa && !is_lit(a))) {
                fail(e->pos, "type mismatch: mixing f32 and integer operands; add an explicit cast");
            }
            n->type = f32();
            return ret(n, {0, 0});
        }
        IntervalI iv = iv_binop(e->bin_op, ai, bi);
        n->type = narrowest_type(iv, iv.lo < 0);
        IntervalI cap = IntervalI::of_type(n->type);
        if (!cap.contains(iv)) iv = cap;  // wrapped
        return ret(n, iv);
    }
    case ExprKind::Call: {
        // resolve callee type
        NumericType ct;
        IntervalI civ;
        size_t want_args = 0;
        if (const InputDecl *in = src.find_input(e->name)) {
            ct = in->type;
            want_args = size_t(in->dims);
        } else if (src.find_func(e->name)) {
            if (e->name != (env.self ? env.self->name : "")) visit_func(e->name);
            else if (!env.in_update) fail(e->pos, "recursion detected: '" + e->name + "' calls itself");
            ct = out.value_type(e->name);
            want_args = out.func(e->name).vars.size();
        } else {
            fail(e->pos, "unknown identifier '" + e->name + "'");
        }
        civ = ct.is_float() ? IntervalI{0, 0} : IntervalI::of_type(ct);
        if (e->args.size() != want_args) {
            fail(e->pos, "'" + e->name + "' expects " + std::to_string(want_args) +
                             " index arguments, got " + std::to_string(e->args.size()));
        }
        std::vector<Expr> targs;
        for (const auto &arg : e->args) {
            IntervalI tmp;
            targs.push_back(type_expr(arg, env, &tmp));
        }
        auto n = std::make_shared<ExprNode>(*e);
        n->args = std::move(targs);
        n->type = ct;
        Expr typed = n;
        classify_call(typed, env);
        return ret(typed, civ);
    }
    default:
        throw InternalError("unexpected expression kind in source program");
    }
}

bool contains_value_dep(const Expr &e) {
    if (e->kind == ExprKind::Call || e->kind == ExprKind::Tap) return true;
    for (const auto &a : e->args) {
        if (contains_value_dep(a)) return true;
    }
    return false;
}

// Recognizes min(max(X, lo), hi) and max(min(X, hi), lo) with constant bounds.
bool match_clamp(const Expr &e, Expr *inner, int64_t *lo, int64_t *hi) {
    if (e->kind != ExprKind::Binary) return false;
    auto lit = [](const Expr &x, int64_t *v) {
        if (x->kind == ExprKind::IntLit) {
            *v = x->int_value;
            return true;
        }
        return false;
    };
    BinOp outer = e->bin_op;
    if (outer != BinOp::Min && outer != BinOp::Max) return false;
    for (int swap = 0; swap < 2; swap++) {
        const Expr &l = e->args[swap ? 1 : 0];
        const Expr &r = e->args[swap ? 0 : 1];
        int64_t bound;
        if (!lit(r, &bound)) continue;
        if (l->kind != ExprKind::Binary) continue;
        BinOp in_op = l->bin_op;
        if ((outer == BinOp::Min && in_op != BinOp::Max) ||
            (outer == BinOp::Max && in_op != BinOp::Min))
            continue;
        for (int swap2 = 0; swap2 < 2; swap2++) {
            const Expr &il = l->args[swap2 ? 1 : 0];
            const Expr &ir = l->args[swap2 ? 0 : 1];
            int64_t bound2;
            if (!lit(ir, &bound2)) continue;
            *inner = il;
            if (outer == BinOp::Min) {
                *hi = bound;
                *lo = bound2;
            } else {
                *lo = bound;
                *hi = bound2;
            }
            return *lo <= *hi;
        }
    }
    return false;
}

void Checker::classify_call(const Expr &call, Env &env) {
    std::vector<ArgInfo> infos;
    bool self_call = env.self && call->name == env.self->name;
    for (const auto &arg : call->args) {
        ArgInfo info;
        LinearForm lf = linear_form(arg);
        auto uses_rdom = [&](const LinearForm &f) {
            for (const auto &[v, c] : f.coeffs) {
                if (env.rdom_vars.count(v)) return true;
            }
            return false;
        };
        if (lf.valid) {
            info.cls = ArgClass::Affine;
            info.form = lf;
            info.uses_rdom = uses_rdom(lf);
        } else {
            Expr inner;
            int64_t lo, hi;
            LinearForm ilf;
            if (match_clamp(arg, &inner, &lo, &hi) && (ilf = linear_form(inner)).valid) {
                info.cls = ArgClass::Clamped;
                info.form = ilf;
                info.clamp_lo = lo;
                info.clamp_hi = hi;
                info.uses_rdom = uses_rdom(ilf);
            } else if (contains_value_dep(arg) || env.in_update) {
                info.cls = ArgClass::DataDep;
            } else {
                fail(arg->pos, "non-affine index into '" + call->name +
                                   "' in a pure definition: " + expr_to_string(arg));
            }
        }
        if (info.cls == ArgClass::DataDep && !env.in_update && !self_call) {
            // in a pure definition a computed index may only address a
            // constant function (it becomes a ROM)
            const FuncDef *callee = src.find_func(call->name);
            if (!callee) {
                fail(arg->pos, "data-dependent index into input '" + call->name + "'");
            }
        }
        infos.push_back(std::move(info));
    }
    out.call_args[call.get()] = std::move(infos);
}

void Checker::visit_func(const std::string &name) {
    auto it = state.find(name);
    if (it != state.end()) {
        if (it->second == 1) {
            const FuncDef *f = src.find_func(name);
            fail(f ? f->pos : SourcePos{}, "recursion detected involving '" + name + "'");
        }
        return;
    }
    state[name] = 1;
    FuncDef *f = mutable_func(name);
    SFG_INTERNAL_ASSERT(f);

    FuncInfo fi;
    Env env;
    env.self = f;
    for (const auto &v : f->vars) env.ranges[v] = IntervalI::of_type(i32());

    IntervalI iv;
    f->value = type_expr(f->value, env, &iv);
    fi.type = f->value->type;

    for (auto &u : f->updates) {
        Env uenv = env;
        uenv.in_update = true;
        for (const auto &rv : u.rdom.vars) {
            if (uenv.ranges.count(rv.name)) {
                fail(u.pos, "reduction variable '" + rv.name + "' shadows a coordinate");
            }
            uenv.ranges[rv.name] = {rv.min, rv.min + rv.extent - 1};
            uenv.rdom_vars.insert(rv.name);
        }
        for (auto &idx : u.store_index) {
            IntervalI tmp;
            idx = type_expr(idx, uenv, &tmp);
        }
        IntervalI uv;
        u.value = type_expr(u.value, uenv, &uv);
        if (u.value->type.is_float() != fi.type.is_float()) {
            fail(u.pos, "update value type " + u.value->type.str() +
                            " does not match function type " + fi.type.str());
        }
        if (u.value->type != fi.type) {
            u.value = make_cast(fi.type, u.value, u.pos);
        }
    }

    // dependence summary
    auto scan = [&](const Expr &e) {
        for_each_call(e, [&](const Expr &c) {
            if (c->name == name) return;
            fi.callees.insert(c->name);
            if (src.find_input(c->name)) {
                fi.depends_on_input = true;
            } else {
                const auto &sub = out.info.at(c->name);
                fi.depends_on_input |= sub.depends_on_input;
                fi.depends_on_tap |= sub.depends_on_tap;
            }
        });
        std::function<void(const Expr &)> taps = [&](const Expr &x) {
            if (x->kind == ExprKind::Tap) fi.depends_on_tap = true;
            for (const auto &a : x->args) taps(a);
        };
        taps(e);
    };
    scan(f->value);
    for (const auto &u : f->updates) {
        for (const auto &idx : u.store_index) scan(idx);
        scan(u.value);
    }
    fi.pure_of_coords = !fi.depends_on_input && !fi.depends_on_tap && f->updates.empty();

    out.info[name] = std::move(fi);
    state[name] = 2;
    out.topo_order.push_back(name);
}

void Checker::run() {
    if (src.funcs.empty()) {
        throw Error(src.filename, 1, 1, "no output function");
    }
    // visit in declaration order so topological ties break deterministically
    for (const auto &f : src.funcs) visit_func(f.name);
}

}  // namespace

NumericType TypedProgram::value_type(const std::string &name) const {
    if (const InputDecl *in = prog.find_input(name)) return in->type;
    auto it = info.find(name);
    SFG_INTERNAL_ASSERT(it != info.end());
    return it->second.type;
}

const std::vector<ArgInfo> &TypedProgram::args_of(const ExprNode *call) const {
    auto it = call_args.find(call);
    SFG_INTERNAL_ASSERT(it != call_args.end());
    return it->second;
}

TypedProgram typecheck(const SourceProgram &p) {
    Checker c(p);
    c.run();
    return std::move(c.out);
}

IntervalI interval_of(const Expr &e, const std::map<std::string, IntervalI> &env,
                      const TypedProgram &tp) {
    switch (e->kind) {
    case ExprKind::IntLit:
        return IntervalI::point(e->int_value);
    case ExprKind::FloatLit:
        return {0, 0};
    case ExprKind::Var: {
        auto it = env.find(e->name);
        if (it != env.end()) return it->second;
        return IntervalI::of_type(i32());
    }
    case ExprKind::Tap:
        return e->type.is_float() ? IntervalI{0, 0} : IntervalI::of_type(e->type);
    case ExprKind::Call:
    case ExprKind::Load:
    case ExprKind::RomLoad:
        return e->type.is_float() ? IntervalI{0, 0} : IntervalI::of_type(e->type);
    case ExprKind::Cast: {
        if (e->type.is_float()) return {0, 0};
        IntervalI sub = interval_of(e->args[0], env, tp);
        IntervalI cap = IntervalI::of_type(e->type);
        return cap.contains(sub) ? sub : cap;
    }
    case ExprKind::Unary: {
        IntervalI a = interval_of(e->args[0], env, tp);
        if (e->un_op == UnOp::Neg) return {-a.hi, -a.lo};
        if (e->un_op == UnOp::Abs) {
            __int128 hi = std::max(a.hi < 0 ? -a.hi : a.hi, a.lo < 0 ? -a.lo : a.lo);
            __int128 lo = (a.lo <= 0 && a.hi >= 0) ? 0 : std::min(a.lo < 0 ? -a.hi : a.lo, a.hi < 0 ? -a.lo : a.hi);
            return {lo, hi};
        }
        return {0, 1};
    }
    case ExprKind::Select: {
        IntervalI a = interval_of(e->args[1], env, tp);
        IntervalI b = interval_of(e->args[2], env, tp);
        return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
    }
    case ExprKind::Binary: {
        IntervalI a = interval_of(e->args[0], env, tp);
        IntervalI b = interval_of(e->args[1], env, tp);
        IntervalI iv = iv_binop(e->bin_op, a, b);
        if (!e->type.is_float()) {
            IntervalI cap = IntervalI::of_type(e->type);
            if (!cap.contains(iv)) iv = cap;
        }
        return iv;
    }
    }
    return IntervalI::of_type(i32());
}

}  // namespace sfg
