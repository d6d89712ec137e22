#include "crforge/manifest.hpp"

#include <cctype>
#include <sstream>

namespace crforge {

// ---- lexer -----------------------------------------------------------

namespace {

struct Token {
    enum class Kind { Ident, Number, Punct, End };
    Kind kind = Kind::End;
    std::string text;
    int line = 0, col = 0;
};

struct Lexer {
    const std::string& src;
    std::size_t pos = 0;
    int line = 1, col = 1;
    Token cur;

    explicit Lexer(const std::string& s) : src(s) { advance(); }

    void bump(char c) {
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }

    void skip_space() {
        while (pos < src.size()) {
            char c = src[pos];
            if (c == '#') {
                while (pos < src.size() && src[pos] != '\n') bump(src[pos]);
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                bump(c);
            } else {
                break;
            }
        }
    }

    void advance() {
        skip_space();
        cur = Token{};
        cur.line = line;
        cur.col = col;
        if (pos >= src.size()) {
            cur.kind = Token::Kind::End;
            return;
        }
        char c = src[pos];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            cur.kind = Token::Kind::Ident;
            while (pos < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_')) {
                cur.text += src[pos];
                bump(src[pos]);
            }
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            cur.kind = Token::Kind::Number;
            while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
                cur.text += src[pos];
                bump(src[pos]);
            }
        } else {
            cur.kind = Token::Kind::Punct;
            if (c == '-' && pos + 1 < src.size() && src[pos + 1] == '>') {
                cur.text = "->";
                bump(c);
                bump('>');
            } else {
                cur.text = std::string(1, c);
                bump(c);
            }
        }
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, cur.line, cur.col); }

    bool is_punct(const std::string& p) const {
        return cur.kind == Token::Kind::Punct && cur.text == p;
    }
    bool is_ident(const std::string& w) const {
        return cur.kind == Token::Kind::Ident && cur.text == w;
    }
    void expect_punct(const std::string& p) {
        if (!is_punct(p)) fail("expected '" + p + "'");
        advance();
    }
    std::string expect_ident(const std::string& what) {
        if (cur.kind != Token::Kind::Ident) fail("expected " + what);
        std::string t = cur.text;
        advance();
        return t;
    }
    long expect_int(const std::string& what) {
        if (cur.kind != Token::Kind::Number) fail("expected " + what);
        long v = std::stol(cur.text);
        advance();
        return v;
    }
};

// expression grammar:
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := base ('^' integer)?
//   base   := number | 'i' | ident | ident '(' expr ')' | '(' expr ')'
//           | '-' base | '|' expr '|' '^' '2'
ExprPtr parse_expr(Lexer& lx);

ExprPtr make(Expr::Kind k, int line, int col) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->line = line;
    e->col = col;
    return e;
}

ExprPtr parse_base(Lexer& lx) {
    int line = lx.cur.line, col = lx.cur.col;
    if (lx.cur.kind == Token::Kind::Number) {
        auto e = make(Expr::Kind::Num, line, col);
        const_cast<Expr*>(e.get())->num = parse_rational(lx.cur.text);
        lx.advance();
        return e;
    }
    if (lx.is_punct("(")) {
        lx.advance();
        ExprPtr inner = parse_expr(lx);
        lx.expect_punct(")");
        return inner;
    }
    if (lx.is_punct("-")) {
        lx.advance();
        auto e = make(Expr::Kind::Neg, line, col);
        const_cast<Expr*>(e.get())->a = parse_base(lx);
        return e;
    }
    if (lx.is_punct("|")) {
        lx.advance();
        ExprPtr inner = parse_expr(lx);
        lx.expect_punct("|");
        lx.expect_punct("^");
        if (lx.cur.kind != Token::Kind::Number || lx.cur.text != "2")
            lx.fail("|e| is only available as |e|^2");
        lx.advance();
        auto e = make(Expr::Kind::Abs2, line, col);
        const_cast<Expr*>(e.get())->a = inner;
        return e;
    }
    if (lx.cur.kind == Token::Kind::Ident) {
        std::string name = lx.cur.text;
        lx.advance();
        if (name == "i") return make(Expr::Kind::ImagUnit, line, col);
        if (lx.is_punct("(")) {
            Expr::Kind k;
            if (name == "conj") k = Expr::Kind::Conj;
            else if (name == "Im") k = Expr::Kind::Im;
            else if (name == "Re") k = Expr::Kind::Re;
            else if (name == "exp") k = Expr::Kind::Exp;
            else throw ParseError("unknown function '" + name + "'", line, col);
            lx.advance();
            ExprPtr inner = parse_expr(lx);
            lx.expect_punct(")");
            auto e = make(k, line, col);
            const_cast<Expr*>(e.get())->a = inner;
            return e;
        }
        auto e = make(Expr::Kind::Var, line, col);
        const_cast<Expr*>(e.get())->name = name;
        return e;
    }
    lx.fail("expected an expression");
    return nullptr;
}

ExprPtr parse_factor(Lexer& lx) {
    ExprPtr b = parse_base(lx);
    if (lx.is_punct("^")) {
        int line = lx.cur.line, col = lx.cur.col;
        lx.advance();
        if (lx.cur.kind != Token::Kind::Number)
            throw ParseError("exponent must be a nonnegative integer", line, col);
        auto e = make(Expr::Kind::Pow, line, col);
        const_cast<Expr*>(e.get())->a = b;
        const_cast<Expr*>(e.get())->ipow = static_cast<unsigned>(std::stoul(lx.cur.text));
        lx.advance();
        return e;
    }
    return b;
}

ExprPtr parse_term(Lexer& lx) {
    ExprPtr acc = parse_factor(lx);
    while (lx.is_punct("*") || lx.is_punct("/")) {
        bool mul = lx.is_punct("*");
        int line = lx.cur.line, col = lx.cur.col;
        lx.advance();
        auto e = make(mul ? Expr::Kind::Mul : Expr::Kind::Div, line, col);
        const_cast<Expr*>(e.get())->a = acc;
        const_cast<Expr*>(e.get())->b = parse_factor(lx);
        acc = e;
    }
    return acc;
}

ExprPtr parse_expr(Lexer& lx) {
    ExprPtr acc = parse_term(lx);
    while (lx.is_punct("+") || lx.is_punct("-")) {
        bool add = lx.is_punct("+");
        int line = lx.cur.line, col = lx.cur.col;
        lx.advance();
        auto e = make(add ? Expr::Kind::Add : Expr::Kind::Sub, line, col);
        const_cast<Expr*>(e.get())->a = acc;
        const_cast<Expr*>(e.get())->b = parse_term(lx);
        acc = e;
    }
    return acc;
}

// ---- elaboration ------------------------------------------------------

struct EvalContext {
    int nvars = 0;
    int order = 0;
    int N = 0;             // pairing size for conj (2N-variable rings)
    bool allow_conj = false;
    std::map<std::string, int> vars;
    const Manifest* manifest = nullptr;
    std::vector<std::string>* in_progress = nullptr; // series cycle detection
};

Series eval_expr(const ExprPtr& e, EvalContext& cx);

Series eval_series_ref(const std::string& name, int line, int col, EvalContext& cx) {
    for (const auto& sd : cx.manifest->series_decls) {
        if (sd.name != name) continue;
        for (const auto& act : *cx.in_progress)
            if (act == name)
                throw ParseError("series '" + name + "' is defined through itself", line, col);
        cx.in_progress->push_back(name);
        Series s = eval_expr(sd.expr, cx);
        cx.in_progress->pop_back();
        return s;
    }
    throw ParseError("unknown name '" + name + "'", line, col);
}

Series eval_expr(const ExprPtr& e, EvalContext& cx) {
    const int nv = cx.nvars, k = cx.order;
    switch (e->kind) {
    case Expr::Kind::Num:
        return Series::constant(nv, k, Coeff(e->num));
    case Expr::Kind::ImagUnit:
        return Series::constant(nv, k, Coeff::i());
    case Expr::Kind::Var: {
        auto it = cx.vars.find(e->name);
        if (it != cx.vars.end()) return Series::variable(nv, k, it->second);
        return eval_series_ref(e->name, e->line, e->col, cx);
    }
    case Expr::Kind::Add:
        return eval_expr(e->a, cx) + eval_expr(e->b, cx);
    case Expr::Kind::Sub:
        return eval_expr(e->a, cx) - eval_expr(e->b, cx);
    case Expr::Kind::Mul:
        return eval_expr(e->a, cx) * eval_expr(e->b, cx);
    case Expr::Kind::Div: {
        Series den = eval_expr(e->b, cx);
        if (den.constant_term().is_zero())
            throw ParseError("division by a non-unit series", e->line, e->col);
        return eval_expr(e->a, cx) * den.unit_inverse();
    }
    case Expr::Kind::Pow: {
        Series b = eval_expr(e->a, cx);
        return b.pow(e->ipow);
    }
    case Expr::Kind::Neg:
        return -eval_expr(e->a, cx);
    case Expr::Kind::Conj:
    case Expr::Kind::Im:
    case Expr::Kind::Re:
    case Expr::Kind::Abs2: {
        if (!cx.allow_conj)
            throw ParseError("conj/Im/Re/|.|^2 are not allowed in holomorphic map or "
                             "series bodies",
                             e->line, e->col);
        Series a = eval_expr(e->a, cx);
        Series ac = a.sigma(VariableSplit::pairing(cx.N));
        switch (e->kind) {
        case Expr::Kind::Conj: return ac;
        case Expr::Kind::Abs2: return a * ac;
        case Expr::Kind::Im:
            // (a - conj a) / 2i
            return (a - ac).scaled(Coeff(0, 1, -1, 2));
        default:
            return (a + ac).scaled(Coeff(1, 2));
        }
    }
    case Expr::Kind::Exp: {
        Series a = eval_expr(e->a, cx);
        if (!a.constant_term().is_zero())
            throw ParseError("exp() needs a series vanishing at 0", e->line, e->col);
        return a.exp();
    }
    }
    throw ParseError("unreachable expression kind", e->line, e->col);
}

void register_Z_names(std::map<std::string, int>& vars, int N, int d, int offset_Z) {
    const int n = N - d;
    for (int i = 0; i < N; ++i) vars["Z" + std::to_string(i + 1)] = offset_Z + i;
    for (int i = 0; i < n; ++i) vars["z" + std::to_string(i + 1)] = offset_Z + i;
    for (int j = 0; j < d; ++j) vars["w" + std::to_string(j + 1)] = offset_Z + n + j;
    if (n == 1) vars["z"] = offset_Z;
    if (d == 1) vars["w"] = offset_Z + n;
}

void register_zeta_names(std::map<std::string, int>& vars, int N, int d, int offset) {
    const int n = N - d;
    for (int i = 0; i < N; ++i) vars["zeta" + std::to_string(i + 1)] = offset + i;
    for (int i = 0; i < n; ++i) vars["chi" + std::to_string(i + 1)] = offset + i;
    for (int j = 0; j < d; ++j) vars["tau" + std::to_string(j + 1)] = offset + n + j;
    if (n == 1) vars["chi"] = offset;
    if (d == 1) vars["tau"] = offset + n;
}

} // namespace

// ---- manifest ----------------------------------------------------------

const GenericManifold& Manifest::manifold(const std::string& name) const {
    auto it = manifolds.find(name);
    if (it == manifolds.end())
        throw std::invalid_argument("manifest: no manifold named '" + name + "'");
    return it->second;
}

const BuiltMap& Manifest::map(const std::string& name) const {
    auto it = maps.find(name);
    if (it == maps.end())
        throw std::invalid_argument("manifest: no map named '" + name + "'");
    return it->second;
}

Manifest parse_manifest(const std::string& text) {
    Lexer lx(text);
    Manifest m;
    bool saw_order = false;

    while (lx.cur.kind != Token::Kind::End) {
        if (lx.is_ident("order")) {
            int line = lx.cur.line;
            lx.advance();
            long k = lx.expect_int("truncation order");
            if (k < 1 || k > 64) throw ParseError("order out of range", line, 1);
            m.order = static_cast<int>(k);
            saw_order = true;
        } else if (lx.is_ident("manifold")) {
            ManifoldDecl d;
            d.line = lx.cur.line;
            lx.advance();
            d.name = lx.expect_ident("manifold name");
            if (!lx.is_ident("dim")) lx.fail("expected 'dim'");
            lx.advance();
            d.N = static_cast<int>(lx.expect_int("dimension"));
            if (!lx.is_ident("codim")) lx.fail("expected 'codim'");
            lx.advance();
            d.d = static_cast<int>(lx.expect_int("codimension"));
            if (lx.is_ident("complexified")) {
                d.complexified = true;
                lx.advance();
            }
            lx.expect_punct("{");
            while (true) {
                d.exprs.push_back(parse_expr(lx));
                if (lx.is_punct(",")) {
                    lx.advance();
                    continue;
                }
                break;
            }
            lx.expect_punct("}");
            if (static_cast<int>(d.exprs.size()) != d.d)
                throw ParseError("manifold '" + d.name + "' declares codim " +
                                     std::to_string(d.d) + " but has " +
                                     std::to_string(d.exprs.size()) + " defining expressions",
                                 d.line, 1);
            m.manifold_decls.push_back(std::move(d));
        } else if (lx.is_ident("series")) {
            SeriesDecl s;
            s.line = lx.cur.line;
            lx.advance();
            s.name = lx.expect_ident("series name");
            lx.expect_punct("=");
            s.expr = parse_expr(lx);
            m.series_decls.push_back(std::move(s));
        } else if (lx.is_ident("map")) {
            MapDecl md;
            md.line = lx.cur.line;
            lx.advance();
            md.name = lx.expect_ident("map name");
            lx.expect_punct(":");
            md.src = lx.expect_ident("source manifold");
            if (!lx.is_punct("->")) lx.fail("expected '->'");
            lx.advance();
            md.tgt = lx.expect_ident("target manifold");
            lx.expect_punct("{");
            while (true) {
                md.exprs.push_back(parse_expr(lx));
                if (lx.is_punct(",")) {
                    lx.advance();
                    continue;
                }
                break;
            }
            lx.expect_punct("}");
            m.map_decls.push_back(std::move(md));
        } else {
            lx.fail("expected a declaration (order / manifold / series / map)");
        }
    }
    (void)saw_order;

    // name uniqueness across all declaration kinds
    {
        std::map<std::string, int> seen;
        auto claim = [&](const std::string& name, int line) {
            if (!seen.emplace(name, line).second)
                throw ParseError("duplicate name '" + name + "'", line, 1);
        };
        for (const auto& d : m.manifold_decls) claim(d.name, d.line);
        for (const auto& s : m.series_decls) claim(s.name, s.line);
        for (const auto& md : m.map_decls) claim(md.name, md.line);
    }

    // elaborate manifolds
    std::vector<std::string> in_progress;
    for (const auto& d : m.manifold_decls) {
        EvalContext cx;
        cx.nvars = 2 * d.N;
        cx.order = m.order;
        cx.N = d.N;
        cx.allow_conj = true;
        cx.manifest = &m;
        cx.in_progress = &in_progress;
        register_Z_names(cx.vars, d.N, d.d, 0);
        if (d.complexified) register_zeta_names(cx.vars, d.N, d.d, d.N);
        std::vector<Series> rho;
        for (const auto& e : d.exprs) rho.push_back(eval_expr(e, cx));
        try {
            m.manifolds.emplace(d.name, GenericManifold::from_defining(SeriesMap(std::move(rho)),
                                                                       d.N, d.d, m.order, d.name));
        } catch (const DefiningError& err) {
            throw ParseError("manifold '" + d.name + "': " + err.what(), d.line, 1);
        }
    }

    // elaborate maps (holomorphic bodies in the source Z-variables)
    for (const auto& md : m.map_decls) {
        auto si = m.manifolds.find(md.src);
        auto ti = m.manifolds.find(md.tgt);
        if (si == m.manifolds.end())
            throw ParseError("map '" + md.name + "': unknown source '" + md.src + "'", md.line, 1);
        if (ti == m.manifolds.end())
            throw ParseError("map '" + md.name + "': unknown target '" + md.tgt + "'", md.line, 1);
        const GenericManifold& src = si->second;
        const GenericManifold& tgt = ti->second;
        if (static_cast<int>(md.exprs.size()) != tgt.N())
            throw ParseError("map '" + md.name + "' needs " + std::to_string(tgt.N()) +
                                 " components for its target",
                             md.line, 1);
        EvalContext cx;
        cx.nvars = src.N();
        cx.order = m.order;
        cx.N = src.N();
        cx.allow_conj = false;
        cx.manifest = &m;
        cx.in_progress = &in_progress;
        register_Z_names(cx.vars, src.N(), src.d(), 0);
        std::vector<Series> comps;
        for (const auto& e : md.exprs) comps.push_back(eval_expr(e, cx));
        for (const auto& c : comps)
            if (!c.constant_term().is_zero())
                throw ParseError("map '" + md.name + "' must fix the origin", md.line, 1);
        m.maps.emplace(md.name,
                       BuiltMap{MapGerm(SeriesMap(std::move(comps)), src.N(), tgt.N()), md.src,
                                md.tgt});
    }
    return m;
}

// ---- rendering ----------------------------------------------------------

std::string Expr::render() const {
    switch (kind) {
    case Kind::Num: {
        if (num < 0) return "(-" + mpq_class(-num).get_str() + ")";
        return num.get_str();
    }
    case Kind::ImagUnit: return "i";
    case Kind::Var: return name;
    case Kind::Add: return "(" + a->render() + " + " + b->render() + ")";
    case Kind::Sub: return "(" + a->render() + " - " + b->render() + ")";
    case Kind::Mul: return "(" + a->render() + " * " + b->render() + ")";
    case Kind::Div: return "(" + a->render() + " / " + b->render() + ")";
    case Kind::Pow: return "(" + a->render() + "^" + std::to_string(ipow) + ")";
    case Kind::Neg: return "(-" + a->render() + ")";
    case Kind::Conj: return "conj(" + a->render() + ")";
    case Kind::Im: return "Im(" + a->render() + ")";
    case Kind::Re: return "Re(" + a->render() + ")";
    case Kind::Abs2: return "|" + a->render() + "|^2";
    case Kind::Exp: return "exp(" + a->render() + ")";
    }
    return "?";
}

std::string Manifest::render() const {
    std::ostringstream os;
    os << "order " << order << "\n";
    for (const auto& d : manifold_decls) {
        os << "manifold " << d.name << " dim " << d.N << " codim " << d.d;
        if (d.complexified) os << " complexified";
        os << " { ";
        for (std::size_t i = 0; i < d.exprs.size(); ++i) {
            if (i) os << ", ";
            os << d.exprs[i]->render();
        }
        os << " }\n";
    }
    for (const auto& s : series_decls)
        os << "series " << s.name << " = " << s.expr->render() << "\n";
    for (const auto& md : map_decls) {
        os << "map " << md.name << " : " << md.src << " -> " << md.tgt << " { ";
        for (std::size_t i = 0; i < md.exprs.size(); ++i) {
            if (i) os << ", ";
            os << md.exprs[i]->render();
        }
        os << " }\n";
    }
    return os.str();
}

// ---- fixture corpus -------------------------------------------------------

namespace {

const std::map<std::string, std::string>& fixture_table() {
    static const std::map<std::string, std::string> table = {
        {"hyperplane",
         "# Levi-flat hyperplane Im w = 0 in C^2\n"
         "order 10\n"
         "manifold M dim 2 codim 1 { Im(w) }\n"
         "map Id : M -> M { z, w }\n"},
        {"quadric",
         "# Im w = |z|^2 in C^2\n"
         "order 10\n"
         "manifold M dim 2 codim 1 { Im(w) - |z|^2 }\n"
         "map Id : M -> M { z, w }\n"
         "map Scale : M -> M { 2*z, 4*w }\n"
         "map Stretch : M -> M { 2*z, w }\n"},
        {"twist",
         "# Im Z3 = |Z1 Z2|^2 in C^3, with the non-convergent twist map\n"
         "order 10\n"
         "manifold M dim 3 codim 1 { Im(Z3) - |Z1*Z2|^2 }\n"
         "series h = Z1 + 2*Z1^2 + 6*Z1^3 + 24*Z1^4 + 120*Z1^5 + 720*Z1^6 + 5040*Z1^7"
         " + 40320*Z1^8 + 362880*Z1^9 + 3628800*Z1^10\n"
         "map H : M -> M { Z1*exp(h), Z2*exp(-h), Z3 }\n"
         "map Id : M -> M { Z1, Z2, Z3 }\n"
         "map Swap : M -> M { Z2, Z1, Z3 }\n"},
        {"nonfinite",
         "# the pair Im Z3 = |Z1^2 Z2|^2 + |Z1|^2 and Im Z3 = |Z1 Z2|^2 + |Z1|^2\n"
         "order 10\n"
         "manifold M dim 3 codim 1 { Im(Z3) - |Z1^2*Z2|^2 - |Z1|^2 }\n"
         "manifold Mp dim 3 codim 1 { Im(Z3) - |Z1*Z2|^2 - |Z1|^2 }\n"
         "map H : M -> Mp { Z1, Z1*Z2, Z3 }\n"},
    };
    return table;
}

} // namespace

std::vector<std::string> fixture_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : fixture_table()) names.push_back(k);
    return names;
}

const std::string& fixture_source(const std::string& name) {
    auto it = fixture_table().find(name);
    if (it == fixture_table().end())
        throw std::invalid_argument("no fixture named '" + name + "'");
    return it->second;
}

} // namespace crforge
