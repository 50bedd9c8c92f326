#include "parser.hpp"

#include <cctype>
#include <set>

namespace sfg {

namespace {

enum class Tok {
    End,
    Ident,
    Int,
    Float,
    Punct,  // single or multi char punctuation in `text`
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int64_t int_value = 0;
    float float_value = 0.0f;
    SourcePos pos;
};

class Lexer {
public:
    Lexer(const std::string &src, std::string file) : src_(src), file_(std::move(file)) {
        advance();
    }

    const Token &peek() const { return tok_; }
    Token next() {
        Token t = tok_;
        advance();
        return t;
    }
    const std::string &file() const { return file_; }

private:
    void advance();
    char cur() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
    char lookahead(size_t n = 1) const {
        return pos_ + n < src_.size() ? src_[pos_ + n] : '\0';
    }
    void bump() {
        if (cur() == '\n') {
            line_++;
            col_ = 1;
        } else {
            col_++;
        }
        pos_++;
    }

    const std::string &src_;
    std::string file_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

void Lexer::advance() {
    for (;;) {
        while (isspace((unsigned char)cur())) bump();
        if (cur() == '/' && lookahead() == '/') {
            while (cur() && cur() != '\n') bump();
            continue;
        }
        if (cur() == '/' && lookahead() == '*') {
            bump();
            bump();
            while (cur() && !(cur() == '*' && lookahead() == '/')) bump();
            if (cur()) {
                bump();
                bump();
            }
            continue;
        }
        break;
    }

    tok_ = Token();
    tok_.pos = {line_, col_};
    char c = cur();
    if (!c) {
        tok_.kind = Tok::End;
        return;
    }
    if (isalpha((unsigned char)c) || c == '_') {
        std::string s;
        while (isalnum((unsigned char)cur()) || cur() == '_') {
            s += cur();
            bump();
        }
        tok_.kind = Tok::Ident;
        tok_.text = s;
        return;
    }
    if (isdigit((unsigned char)c)) {
        std::string s;
        while (isdigit((unsigned char)cur())) {
            s += cur();
            bump();
        }
        bool is_float = false;
        if (cur() == '.' && isdigit((unsigned char)lookahead())) {
            is_float = true;
            s += cur();
            bump();
            while (isdigit((unsigned char)cur())) {
                s += cur();
                bump();
            }
        }
        if (cur() == 'e' || cur() == 'E') {
            size_t k = 1;
            if (lookahead() == '+' || lookahead() == '-') k = 2;
            if (isdigit((unsigned char)lookahead(k))) {
                is_float = true;
                for (size_t j = 0; j <= k; j++) {
                    s += cur();
                    bump();
                }
                while (isdigit((unsigned char)cur())) {
                    s += cur();
                    bump();
                }
            }
        }
        if (cur() == 'f') bump(), is_float = true;
        if (is_float) {
            tok_.kind = Tok::Float;
            tok_.float_value = std::stof(s);
        } else {
            tok_.kind = Tok::Int;
            tok_.int_value = std::stoll(s);
        }
        return;
    }

    // Multi-char punctuation first.
    static const char *two_char[] = {"<-", "<<", ">>", "<=", ">=", "==", "!=", "..", "&&", "||"};
    for (const char *t : two_char) {
        if (c == t[0] && lookahead() == t[1]) {
            tok_.kind = Tok::Punct;
            tok_.text = t;
            bump();
            bump();
            return;
        }
    }
    tok_.kind = Tok::Punct;
    tok_.text = std::string(1, c);
    bump();
}

class Parser {
public:
    Parser(const std::string &src, const std::string &file) : lex_(src, file) {}

    SourceProgram parse();

private:
    [[noreturn]] void fail(SourcePos pos, const std::string &msg) {
        throw Error(lex_.file(), pos.line, pos.col, msg);
    }
    [[noreturn]] void fail_here(const std::string &msg) { fail(lex_.peek().pos, msg); }

    bool at_punct(const std::string &p) const {
        return lex_.peek().kind == Tok::Punct && lex_.peek().text == p;
    }
    bool at_ident(const std::string &s) const {
        return lex_.peek().kind == Tok::Ident && lex_.peek().text == s;
    }
    void expect_punct(const std::string &p) {
        if (!at_punct(p)) fail_here("expected '" + p + "'");
        lex_.next();
    }
    std::string expect_ident(const char *what) {
        if (lex_.peek().kind != Tok::Ident) fail_here(std::string("expected ") + what);
        return lex_.next().text;
    }
    int64_t expect_int(const char *what) {
        bool neg = false;
        if (at_punct("-")) {
            lex_.next();
            neg = true;
        }
        if (lex_.peek().kind != Tok::Int) fail_here(std::string("expected ") + what);
        int64_t v = lex_.next().int_value;
        return neg ? -v : v;
    }

    void parse_input(SourceProgram &p);
    void parse_tap(SourceProgram &p);
    void parse_func(SourceProgram &p);
    void parse_update(SourceProgram &p);
    void parse_schedule(SourceProgram &p);
    Directive parse_directive();

    Expr parse_expr() { return parse_binary(0); }
    Expr parse_binary(int min_prec);
    Expr parse_primary();
    std::vector<Expr> parse_call_args();

    void check_defined(const SourceProgram &p, const Expr &e);

    Lexer lex_;
    std::set<std::string> known_names_;  // funcs + inputs + taps, for use-before-def checks
};

int binop_prec(const std::string &t) {
    if (t == "||") return 1;
    if (t == "&&") return 2;
    if (t == "==" || t == "!=" || t == "<" || t == "<=" || t == ">" || t == ">=") return 3;
    if (t == "<<" || t == ">>") return 4;
    if (t == "+" || t == "-") return 5;
    if (t == "*" || t == "/" || t == "%") return 6;
    return -1;
}

BinOp binop_from(const std::string &t) {
    if (t == "||") return BinOp::Or;
    if (t == "&&") return BinOp::And;
    if (t == "==") return BinOp::Eq;
    if (t == "!=") return BinOp::Ne;
    if (t == "<") return BinOp::Lt;
    if (t == "<=") return BinOp::Le;
    if (t == ">") return BinOp::Gt;
    if (t == ">=") return BinOp::Ge;
    if (t == "<<") return BinOp::Shl;
    if (t == ">>") return BinOp::Shr;
    if (t == "+") return BinOp::Add;
    if (t == "-") return BinOp::Sub;
    if (t == "*") return BinOp::Mul;
    if (t == "/") return BinOp::Div;
    return BinOp::Mod;
}

Expr Parser::parse_binary(int min_prec) {
    Expr lhs = parse_primary();
    for (;;) {
        if (lex_.peek().kind != Tok::Punct) return lhs;
        int prec = binop_prec(lex_.peek().text);
        if (prec < 0 || prec < min_prec) return lhs;
        Token op = lex_.next();
        Expr rhs = parse_binary(prec + 1);
        lhs = make_binary(binop_from(op.text), lhs, rhs, op.pos);
    }
}

std::vector<Expr> Parser::parse_call_args() {
    expect_punct("(");
    std::vector<Expr> args;
    if (!at_punct(")")) {
        for (;;) {
            args.push_back(parse_expr());
            if (at_punct(",")) {
                lex_.next();
                continue;
            }
            break;
        }
    }
    expect_punct(")");
    return args;
}

Expr Parser::parse_primary() {
    Token t = lex_.peek();
    if (t.kind == Tok::Int) {
        lex_.next();
        return make_int(t.int_value);
    }
    if (t.kind == Tok::Float) {
        lex_.next();
        return make_float(t.float_value);
    }
    if (t.kind == Tok::Punct && t.text == "(") {
        lex_.next();
        Expr e = parse_expr();
        expect_punct(")");
        return e;
    }
    if (t.kind == Tok::Punct && t.text == "-") {
        lex_.next();
        return make_unary(UnOp::Neg, parse_primary(), t.pos);
    }
    if (t.kind == Tok::Punct && t.text == "!") {
        lex_.next();
        return make_unary(UnOp::Not, parse_primary(), t.pos);
    }
    if (t.kind != Tok::Ident) fail_here("expected expression");
    lex_.next();
    const std::string &name = t.text;

    NumericType nt;
    if (parse_type_name(name, &nt)) {
        auto args = parse_call_args();
        if (args.size() != 1) fail(t.pos, "cast takes one argument");
        return make_cast(nt, args[0], t.pos);
    }
    if (name == "select") {
        auto args = parse_call_args();
        if (args.size() != 3) fail(t.pos, "select takes (cond, a, b)");
        return make_select(args[0], args[1], args[2], t.pos);
    }
    if (name == "min" || name == "max") {
        auto args = parse_call_args();
        if (args.size() != 2) fail(t.pos, name + " takes two arguments");
        return make_binary(name == "min" ? BinOp::Min : BinOp::Max, args[0], args[1], t.pos);
    }
    if (name == "abs") {
        auto args = parse_call_args();
        if (args.size() != 1) fail(t.pos, "abs takes one argument");
        return make_unary(UnOp::Abs, args[0], t.pos);
    }
    if (name == "clamp") {
        // clamp(e, lo, hi) is sugar for min(max(e, lo), hi)
        auto args = parse_call_args();
        if (args.size() != 3) fail(t.pos, "clamp takes (e, lo, hi)");
        return make_binary(BinOp::Min,
                           make_binary(BinOp::Max, args[0], args[1], t.pos), args[2], t.pos);
    }
    if (at_punct("(")) {
        auto args = parse_call_args();
        if (args.empty()) fail(t.pos, "call needs at least one index argument");
        return make_call(name, std::move(args), t.pos);
    }
    return make_var(name, t.pos);
}

void Parser::parse_input(SourceProgram &p) {
    InputDecl in;
    in.pos = lex_.peek().pos;
    in.name = expect_ident("input name");
    expect_punct(":");
    std::string ty = expect_ident("element type");
    if (!parse_type_name(ty, &in.type)) fail(in.pos, "unknown element type '" + ty + "'");
    expect_punct("[");
    in.dims = int(expect_int("dimension count"));
    std::string d = expect_ident("'d'");
    if (d != "d") fail(in.pos, "expected 'd' after dimension count");
    if (in.dims < 1 || in.dims > 4) fail(in.pos, "dimension count must be 1..4");
    while (at_punct(",")) {
        lex_.next();
        std::string nm = expect_ident("dimension name");
        expect_punct("=");
        int64_t ext = expect_int("extent");
        if (ext < 1) fail(in.pos, "dimension extent must be >= 1");
        in.fixed_dims.emplace_back(nm, ext);
    }
    expect_punct("]");
    expect_punct(";");
    if (known_names_.count(in.name)) fail(in.pos, "duplicate definition of '" + in.name + "'");
    known_names_.insert(in.name);
    p.inputs.push_back(std::move(in));
}

void Parser::parse_tap(SourceProgram &p) {
    TapDecl tap;
    tap.pos = lex_.peek().pos;
    tap.name = expect_ident("tap name");
    expect_punct(":");
    std::string ty = expect_ident("tap type");
    if (!parse_type_name(ty, &tap.type)) fail(tap.pos, "unknown tap type '" + ty + "'");
    expect_punct("=");
    if (tap.type.is_float()) {
        bool neg = at_punct("-");
        if (neg) lex_.next();
        Token v = lex_.next();
        float f = v.kind == Tok::Float ? v.float_value
                  : v.kind == Tok::Int ? float(v.int_value)
                                       : (fail(v.pos, "expected tap default value"), 0.0f);
        tap.default_value = Scalar::make_float(neg ? -f : f);
    } else {
        tap.default_value = Scalar::make_int(tap.type, expect_int("tap default value"));
    }
    expect_punct(";");
    if (known_names_.count(tap.name)) fail(tap.pos, "duplicate definition of '" + tap.name + "'");
    known_names_.insert(tap.name);
    p.taps.push_back(std::move(tap));
}

void Parser::check_defined(const SourceProgram &p, const Expr &e) {
    if (e->kind == ExprKind::Call && !known_names_.count(e->name)) {
        fail(e->pos, "unknown identifier '" + e->name + "'");
    }
    for (const auto &a : e->args) check_defined(p, a);
}

void Parser::parse_func(SourceProgram &p) {
    FuncDef f;
    f.pos = lex_.peek().pos;
    f.name = expect_ident("function name");
    expect_punct("(");
    for (;;) {
        f.vars.push_back(expect_ident("coordinate variable"));
        if (at_punct(",")) {
            lex_.next();
            continue;
        }
        break;
    }
    expect_punct(")");
    if (f.vars.size() > 4) fail(f.pos, "at most 4 coordinate dimensions are supported");
    expect_punct("=");
    f.value = parse_expr();
    expect_punct(";");
    if (known_names_.count(f.name)) fail(f.pos, "duplicate definition of '" + f.name + "'");
    check_defined(p, f.value);
    known_names_.insert(f.name);
    f.decl_index = int(p.funcs.size());
    p.funcs.push_back(std::move(f));
}

void Parser::parse_update(SourceProgram &p) {
    SourcePos pos = lex_.peek().pos;
    std::string name = expect_ident("function name");
    FuncDef *f = nullptr;
    for (auto &fd : p.funcs) {
        if (fd.name == name) f = &fd;
    }
    if (!f) fail(pos, "update of undefined function '" + name + "'");
    UpdateDef u;
    u.pos = pos;
    expect_punct("(");
    for (;;) {
        u.store_index.push_back(parse_expr());
        if (at_punct(",")) {
            lex_.next();
            continue;
        }
        break;
    }
    expect_punct(")");
    expect_punct("<-");
    u.value = parse_expr();
    if (!at_ident("over")) fail_here("expected 'over rdom(...)'");
    lex_.next();
    if (!at_ident("rdom")) fail_here("expected 'rdom'");
    lex_.next();
    expect_punct("(");
    if (!at_punct(")")) {
        for (;;) {
            RVar rv;
            rv.name = expect_ident("reduction variable");
            expect_punct("=");
            rv.min = expect_int("range start");
            expect_punct("..");
            int64_t end = expect_int("range end");
            rv.extent = end - rv.min;
            if (rv.extent < 1) fail(pos, "reduction extent must be >= 1");
            u.rdom.vars.push_back(rv);
            if (at_punct(",")) {
                lex_.next();
                continue;
            }
            break;
        }
    }
    expect_punct(")");
    expect_punct(";");
    if (u.store_index.size() != f->vars.size()) {
        fail(pos, "update of '" + name + "' needs " + std::to_string(f->vars.size()) +
                      " store indices");
    }
    for (const auto &e : u.store_index) check_defined(p, e);
    check_defined(p, u.value);
    f->updates.push_back(std::move(u));
}

Directive Parser::parse_directive() {
    Directive d;
    d.pos = lex_.peek().pos;
    std::string kw = expect_ident("directive");
    auto func_arg = [&] {
        expect_punct("(");
        d.func = expect_ident("function name");
    };
    if (kw == "tile") {
        d.kind = DirectiveKind::Tile;
        func_arg();
        for (int i = 0; i < 6; i++) {
            expect_punct(",");
            d.names.push_back(expect_ident("variable"));
        }
        expect_punct(",");
        d.ints.push_back(expect_int("tile width"));
        expect_punct(",");
        d.ints.push_back(expect_int("tile height"));
        expect_punct(")");
    } else if (kw == "split") {
        d.kind = DirectiveKind::Split;
        func_arg();
        for (int i = 0; i < 3; i++) {
            expect_punct(",");
            d.names.push_back(expect_ident("variable"));
        }
        expect_punct(",");
        d.ints.push_back(expect_int("split factor"));
        expect_punct(")");
    } else if (kw == "reorder") {
        d.kind = DirectiveKind::Reorder;
        func_arg();
        while (at_punct(",")) {
            lex_.next();
            d.names.push_back(expect_ident("variable"));
        }
        expect_punct(")");
    } else if (kw == "unroll") {
        d.kind = DirectiveKind::Unroll;
        func_arg();
        expect_punct(",");
        d.names.push_back(expect_ident("variable"));
        expect_punct(",");
        d.ints.push_back(expect_int("unroll factor"));
        expect_punct(")");
    } else if (kw == "parallel") {
        d.kind = DirectiveKind::Parallel;
        func_arg();
        expect_punct(",");
        d.names.push_back(expect_ident("variable"));
        expect_punct(")");
    } else if (kw == "accelerate") {
        d.kind = DirectiveKind::Accelerate;
        func_arg();
        expect_punct(",");
        expect_punct("[");
        for (;;) {
            d.names.push_back(expect_ident("input function"));
            if (at_punct(",")) {
                lex_.next();
                continue;
            }
            break;
        }
        expect_punct("]");
        expect_punct(",");
        d.names.push_back(expect_ident("inner variable"));
        expect_punct(",");
        d.names.push_back(expect_ident("block variable"));
        expect_punct(")");
    } else if (kw == "linebuffer") {
        d.kind = DirectiveKind::LineBuffer;
        func_arg();
        expect_punct(")");
    } else if (kw == "fifo_depth") {
        d.kind = DirectiveKind::FifoDepth;
        func_arg();
        expect_punct(",");
        d.names.push_back(expect_ident("destination function"));
        expect_punct(",");
        d.ints.push_back(expect_int("depth"));
        expect_punct(")");
    } else {
        fail(d.pos, "unknown scheduling directive '" + kw + "'");
    }
    expect_punct(";");
    return d;
}

void Parser::parse_schedule(SourceProgram &p) {
    expect_punct("{");
    while (!at_punct("}")) {
        if (lex_.peek().kind == Tok::End) fail_here("unterminated schedule block");
        p.directives.push_back(parse_directive());
    }
    lex_.next();
}

SourceProgram Parser::parse() {
    SourceProgram p;
    p.filename = lex_.file();
    while (lex_.peek().kind != Tok::End) {
        if (lex_.peek().kind != Tok::Ident) fail_here("expected declaration");
        std::string kw = lex_.peek().text;
        if (kw == "input") {
            lex_.next();
            parse_input(p);
        } else if (kw == "tap") {
            lex_.next();
            parse_tap(p);
        } else if (kw == "func") {
            lex_.next();
            parse_func(p);
        } else if (kw == "update") {
            lex_.next();
            parse_update(p);
        } else if (kw == "output") {
            Token t = lex_.next();
            p.output = expect_ident("output function");
            expect_punct(";");
            if (!p.find_func(p.output)) fail(t.pos, "unknown output function '" + p.output + "'");
        } else if (kw == "schedule") {
            lex_.next();
            parse_schedule(p);
        } else {
            fail_here("expected 'input', 'tap', 'func', 'update', 'output' or 'schedule'");
        }
    }
    if (p.output.empty()) {
        if (p.funcs.empty()) throw Error(p.filename, 1, 1, "no output function");
        p.output = p.funcs.back().name;
    }
    return p;
}

}  // namespace

SourceProgram parse_program(const std::string &text, const std::string &filename) {
    Parser parser(text, filename);
    return parser.parse();
}

}  // namespace sfg
