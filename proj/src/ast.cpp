#include "ast.hpp"

#include <sstream>

namespace sfg {

namespace {

std::shared_ptr<ExprNode> node(ExprKind k, SourcePos pos) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->pos = pos;
    return n;
}

}  // namespace

Expr make_int(int64_t v, NumericType t) {
    auto n = node(ExprKind::IntLit, {});
    n->int_value = v;
    n->type = t;
    return n;
}

Expr make_float(float v) {
    auto n = node(ExprKind::FloatLit, {});
    n->float_value = v;
    n->type = f32();
    return n;
}

Expr make_var(const std::string &name, SourcePos pos) {
    auto n = node(ExprKind::Var, pos);
    n->name = name;
    n->type = i32();
    return n;
}

Expr make_tap(const std::string &name, SourcePos pos) {
    auto n = node(ExprKind::Tap, pos);
    n->name = name;
    return n;
}

Expr make_call(const std::string &callee, std::vector<Expr> args, SourcePos pos) {
    auto n = node(ExprKind::Call, pos);
    n->name = callee;
    n->args = std::move(args);
    return n;
}

Expr make_binary(BinOp op, Expr a, Expr b, SourcePos pos) {
    auto n = node(ExprKind::Binary, pos);
    n->bin_op = op;
    n->args = {std::move(a), std::move(b)};
    return n;
}

Expr make_unary(UnOp op, Expr a, SourcePos pos) {
    auto n = node(ExprKind::Unary, pos);
    n->un_op = op;
    n->args = {std::move(a)};
    return n;
}

Expr make_select(Expr c, Expr a, Expr b, SourcePos pos) {
    auto n = node(ExprKind::Select, pos);
    n->args = {std::move(c), std::move(a), std::move(b)};
    return n;
}

Expr make_cast(NumericType t, Expr a, SourcePos pos) {
    auto n = node(ExprKind::Cast, pos);
    n->type = t;
    n->args = {std::move(a)};
    return n;
}

Expr make_load(const std::string &buffer, std::vector<Expr> idx, NumericType t) {
    auto n = node(ExprKind::Load, {});
    n->name = buffer;
    n->args = std::move(idx);
    n->type = t;
    return n;
}

Expr make_rom_load(const std::string &table, std::vector<Expr> idx, NumericType t) {
    auto n = node(ExprKind::RomLoad, {});
    n->name = table;
    n->args = std::move(idx);
    n->type = t;
    return n;
}

Expr with_type(const Expr &e, NumericType t) {
    if (e->type == t) return e;
    auto n = std::make_shared<ExprNode>(*e);
    n->type = t;
    return n;
}

bool expr_equal(const Expr &a, const Expr &b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind || a->type != b->type) return false;
    switch (a->kind) {
    case ExprKind::IntLit:
        if (a->int_value != b->int_value) return false;
        break;
    case ExprKind::FloatLit:
        if (a->float_value != b->float_value) return false;
        break;
    case ExprKind::Var:
    case ExprKind::Tap:
    case ExprKind::Call:
    case ExprKind::Load:
    case ExprKind::RomLoad:
        if (a->name != b->name) return false;
        break;
    case ExprKind::Binary:
        if (a->bin_op != b->bin_op) return false;
        break;
    case ExprKind::Unary:
        if (a->un_op != b->un_op) return false;
        break;
    default:
        break;
    }
    if (a->args.size() != b->args.size()) return false;
    for (size_t i = 0; i < a->args.size(); i++) {
        if (!expr_equal(a->args[i], b->args[i])) return false;
    }
    return true;
}

namespace {

int precedence(BinOp op) {
    switch (op) {
    case BinOp::Or: return 1;
    case BinOp::And: return 2;
    case BinOp::Eq:
    case BinOp::Ne:
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Gt:
    case BinOp::Ge: return 3;
    case BinOp::Shl:
    case BinOp::Shr: return 4;
    case BinOp::Add:
    case BinOp::Sub: return 5;
    case BinOp::Mul:
    case BinOp::Div:
    case BinOp::Mod: return 6;
    default: return 7;
    }
}

void print_expr(std::ostream &os, const Expr &e, int parent_prec);

void print_args(std::ostream &os, const std::vector<Expr> &args) {
    os << "(";
    for (size_t i = 0; i < args.size(); i++) {
        if (i) os << ", ";
        print_expr(os, args[i], 0);
    }
    os << ")";
}

void print_expr(std::ostream &os, const Expr &e, int parent_prec) {
    switch (e->kind) {
    case ExprKind::IntLit:
        os << e->int_value;
        return;
    case ExprKind::FloatLit: {
        std::ostringstream tmp;
        tmp.precision(9);
        tmp << e->float_value;
        std::string s = tmp.str();
        if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
            s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
            s += ".0";
        }
        os << s << "f";
        return;
    }
    case ExprKind::Var:
    case ExprKind::Tap:
        os << e->name;
        return;
    case ExprKind::Call:
    case ExprKind::Load:
    case ExprKind::RomLoad:
        os << e->name;
        print_args(os, e->args);
        return;
    case ExprKind::Binary: {
        BinOp op = e->bin_op;
        if (op == BinOp::Min || op == BinOp::Max) {
            os << (op == BinOp::Min ? "min" : "max");
            print_args(os, e->args);
            return;
        }
        int prec = precedence(op);
        if (prec < parent_prec) os << "(";
        print_expr(os, e->args[0], prec);
        os << " " << binop_name(op) << " ";
        print_expr(os, e->args[1], prec + 1);
        if (prec < parent_prec) os << ")";
        return;
    }
    case ExprKind::Unary:
        if (e->un_op == UnOp::Abs) {
            os << "abs";
            print_args(os, e->args);
        } else if (e->un_op == UnOp::Not) {
            os << "!";
            print_expr(os, e->args[0], 8);
        } else {
            os << "-";
            print_expr(os, e->args[0], 8);
        }
        return;
    case ExprKind::Select:
        os << "select";
        print_args(os, e->args);
        return;
    case ExprKind::Cast:
        os << e->type.str();
        print_args(os, e->args);
        return;
    }
}

}  // namespace

std::string expr_to_string(const Expr &e) {
    std::ostringstream os;
    print_expr(os, e, 0);
    return os.str();
}

const FuncDef *SourceProgram::find_func(const std::string &name) const {
    for (const auto &f : funcs) {
        if (f.name == name) return &f;
    }
    return nullptr;
}

const InputDecl *SourceProgram::find_input(const std::string &name) const {
    for (const auto &in : inputs) {
        if (in.name == name) return &in;
    }
    return nullptr;
}

const TapDecl *SourceProgram::find_tap(const std::string &name) const {
    for (const auto &t : taps) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

namespace {

void print_directive(std::ostream &os, const Directive &d) {
    switch (d.kind) {
    case DirectiveKind::Tile:
        os << "tile(" << d.func;
        for (const auto &n : d.names) os << ", " << n;
        os << ", " << d.ints[0] << ", " << d.ints[1] << ");";
        break;
    case DirectiveKind::Split:
        os << "split(" << d.func << ", " << d.names[0] << ", " << d.names[1] << ", "
           << d.names[2] << ", " << d.ints[0] << ");";
        break;
    case DirectiveKind::Reorder:
        os << "reorder(" << d.func;
        for (const auto &n : d.names) os << ", " << n;
        os << ");";
        break;
    case DirectiveKind::Unroll:
        os << "unroll(" << d.func << ", " << d.names[0] << ", " << d.ints[0] << ");";
        break;
    case DirectiveKind::Parallel:
        os << "parallel(" << d.func << ", " << d.names[0] << ");";
        break;
    case DirectiveKind::Accelerate: {
        os << "accelerate(" << d.func << ", [";
        for (size_t i = 0; i + 2 < d.names.size(); i++) {
            if (i) os << ", ";
            os << d.names[i];
        }
        os << "], " << d.names[d.names.size() - 2] << ", " << d.names.back() << ");";
        break;
    }
    case DirectiveKind::LineBuffer:
        os << "linebuffer(" << d.func << ");";
        break;
    case DirectiveKind::FifoDepth:
        os << "fifo_depth(" << d.func << ", " << d.names[0] << ", " << d.ints[0] << ");";
        break;
    }
}

}  // namespace

std::string print_program(const SourceProgram &p) {
    std::ostringstream os;
    for (const auto &in : p.inputs) {
        os << "input " << in.name << " : " << in.type.str() << "[" << in.dims << "d";
        for (const auto &[nm, ext] : in.fixed_dims) os << ", " << nm << "=" << ext;
        os << "];\n";
    }
    for (const auto &t : p.taps) {
        os << "tap " << t.name << " : " << t.type.str() << " = ";
        if (t.type.is_float()) {
            os << expr_to_string(make_float(t.default_value.f));
        } else {
            os << t.default_value.i;
        }
        os << ";\n";
    }
    for (const auto &f : p.funcs) {
        os << "func " << f.name << "(";
        for (size_t i = 0; i < f.vars.size(); i++) {
            if (i) os << ", ";
            os << f.vars[i];
        }
        os << ") = " << expr_to_string(f.value) << ";\n";
        for (const auto &u : f.updates) {
            os << "update " << f.name << "(";
            for (size_t i = 0; i < u.store_index.size(); i++) {
                if (i) os << ", ";
                os << expr_to_string(u.store_index[i]);
            }
            os << ") <- " << expr_to_string(u.value) << " over rdom(";
            for (size_t i = 0; i < u.rdom.vars.size(); i++) {
                if (i) os << ", ";
                os << u.rdom.vars[i].name << " = " << u.rdom.vars[i].min << ".."
                   << (u.rdom.vars[i].min + u.rdom.vars[i].extent);
            }
            os << ");\n";
        }
    }
    if (!p.output.empty()) os << "output " << p.output << ";\n";
    if (!p.directives.empty()) {
        os << "schedule {\n";
        for (const auto &d : p.directives) {
            os << "  ";
            print_directive(os, d);
            os << "\n";
        }
        os << "}\n";
    }
    return os.str();
}

}  // namespace sfg
