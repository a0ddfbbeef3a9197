#include "geoproj/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace geoproj {

namespace {

NodePtr leaf(Op op, double value = 0.0) {
    return std::make_shared<const Node>(op, value, 0, nullptr, nullptr);
}

const NodePtr& zero_node() {
    static const NodePtr n = leaf(Op::Const, 0.0);
    return n;
}

const NodePtr& x_node() {
    static const NodePtr n = leaf(Op::X);
    return n;
}

const NodePtr& y_node() {
    static const NodePtr n = leaf(Op::Y);
    return n;
}

bool is_binary(Op op) {
    switch (op) {
    case Op::Add: case Op::Sub: case Op::Mul: case Op::Div:
        return true;
    default:
        return false;
    }
}

// Coefficients of P_k with e^(k)(t) = P_k(1/t) exp(-1/t); P_{k+1}(u) = u^2 (P_k(u) - P_k'(u)).
const std::vector<double>& bump_poly(int order) {
    static std::mutex m;
    static std::vector<std::vector<double>> table{{1.0}};
    std::lock_guard lock(m);
    while (static_cast<int>(table.size()) <= order) {
        const auto& p = table.back();
        std::vector<double> q(p.size() + 2, 0.0);
        for (std::size_t i = 0; i < p.size(); ++i) {
            q[i + 2] += p[i];
            if (i > 0) q[i + 1] -= static_cast<double>(i) * p[i];
        }
        table.push_back(std::move(q));
    }
    return table[static_cast<std::size_t>(order)];
}

double apply(Op op, double value, int order, double a, double b) {
    switch (op) {
    case Op::Const: return value;
    case Op::X: case Op::Y: return 0.0;  // handled by caller
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div: return a / b;
    case Op::Neg: return -a;
    case Op::Pow: return std::pow(a, value);
    case Op::Sin: return std::sin(a);
    case Op::Cos: return std::cos(a);
    case Op::Sinh: return std::sinh(a);
    case Op::Cosh: return std::cosh(a);
    case Op::Exp: return std::exp(a);
    case Op::Log: return std::log(a);
    case Op::Asin: return std::asin(a);
    case Op::Sqrt: return std::sqrt(a);
    case Op::Cbrt: return std::cbrt(a);
    case Op::Abs: return std::fabs(a);
    case Op::Sign: return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
    case Op::Bump: return bump_derivative(a, order);
    case Op::Mod: return a - value * std::floor(a / value);
    case Op::Floor: return std::floor(a / value);
    }
    return std::nan("");
}

}  // namespace

const char* op_name(Op op) {
    switch (op) {
    case Op::Const: return "const";
    case Op::X: return "x";
    case Op::Y: return "y";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Neg: return "neg";
    case Op::Pow: return "^";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Sinh: return "sinh";
    case Op::Cosh: return "cosh";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Asin: return "asin";
    case Op::Sqrt: return "sqrt";
    case Op::Cbrt: return "cbrt";
    case Op::Abs: return "abs";
    case Op::Sign: return "sign";
    case Op::Bump: return "bump";
    case Op::Mod: return "mod";
    case Op::Floor: return "floor";
    }
    return "?";
}

double bump_derivative(double t, int order) {
    if (t <= 0.0) return 0.0;
    const double u = 1.0 / t;
    if (u > 700.0) return 0.0;
    const auto& p = bump_poly(order);
    double acc = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * u + p[i];
    return acc * std::exp(-u);
}

ScalarField::ScalarField() : node_(zero_node()) {}

ScalarField::ScalarField(double c) : node_(c == 0.0 ? zero_node() : leaf(Op::Const, c)) {}

ScalarField ScalarField::x() { return ScalarField(x_node()); }
ScalarField ScalarField::y() { return ScalarField(y_node()); }

ScalarField make_node(Op op, const ScalarField& a, const ScalarField& b, double value, int order) {
    const Node& na = *a.node();
    const Node& nb = *b.node();
    const bool binary = is_binary(op);

    if (op == Op::Div && nb.is_const(0.0)) throw ConstructionError("division by constant zero");
    if (na.is_const() && (!binary || nb.is_const())) {
        if ((op != Op::Bump || order >= 0) && ((op != Op::Mod && op != Op::Floor) || value > 0.0)) {
            return ScalarField(apply(op, value, order, na.value, nb.value));
        }
    }
    switch (op) {
    case Op::Add:
        if (na.is_const(0.0)) return b;
        if (nb.is_const(0.0)) return a;
        break;
    case Op::Sub:
        if (nb.is_const(0.0)) return a;
        if (na.is_const(0.0)) return make_node(Op::Neg, b);
        if (a.node() == b.node()) return ScalarField(0.0);
        break;
    case Op::Mul:
        if (na.is_const(0.0) || nb.is_const(0.0)) return ScalarField(0.0);
        if (na.is_const(1.0)) return b;
        if (nb.is_const(1.0)) return a;
        if (na.is_const(-1.0)) return make_node(Op::Neg, b);
        if (nb.is_const(-1.0)) return make_node(Op::Neg, a);
        break;
    case Op::Div:
        if (na.is_const(0.0)) return ScalarField(0.0);
        if (nb.is_const(1.0)) return a;
        break;
    case Op::Neg:
        if (na.op == Op::Neg) return ScalarField(na.a);
        break;
    case Op::Pow:
        if (value == 0.0) return ScalarField(1.0);
        if (value == 1.0) return a;
        break;
    case Op::Mod:
    case Op::Floor:
        if (!(value > 0.0) || !std::isfinite(value)) throw ConstructionError("period must be positive and finite");
        break;
    case Op::Bump:
        if (order < 0) throw ConstructionError("bump derivative order must be nonnegative");
        break;
    case Op::Const: case Op::X: case Op::Y:
        throw ConstructionError("leaf nodes are not built through make_node");
    default:
        break;
    }
    return ScalarField(std::make_shared<const Node>(op, value, order, a.node(), binary ? b.node() : nullptr));
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) { return make_node(Op::Add, a, b); }
ScalarField operator-(const ScalarField& a, const ScalarField& b) { return make_node(Op::Sub, a, b); }
ScalarField operator*(const ScalarField& a, const ScalarField& b) { return make_node(Op::Mul, a, b); }
ScalarField operator/(const ScalarField& a, const ScalarField& b) { return make_node(Op::Div, a, b); }
ScalarField operator-(const ScalarField& a) { return make_node(Op::Neg, a); }

ScalarField pow(const ScalarField& a, double p) { return make_node(Op::Pow, a, {}, p); }
ScalarField sin(const ScalarField& a) { return make_node(Op::Sin, a); }
ScalarField cos(const ScalarField& a) { return make_node(Op::Cos, a); }
ScalarField sinh(const ScalarField& a) { return make_node(Op::Sinh, a); }
ScalarField cosh(const ScalarField& a) { return make_node(Op::Cosh, a); }
ScalarField exp(const ScalarField& a) { return make_node(Op::Exp, a); }
ScalarField log(const ScalarField& a) { return make_node(Op::Log, a); }
ScalarField asin(const ScalarField& a) { return make_node(Op::Asin, a); }
ScalarField sqrt(const ScalarField& a) { return make_node(Op::Sqrt, a); }
ScalarField cbrt(const ScalarField& a) { return make_node(Op::Cbrt, a); }
ScalarField abs(const ScalarField& a) { return make_node(Op::Abs, a); }
ScalarField sign(const ScalarField& a) { return make_node(Op::Sign, a); }
ScalarField bump(const ScalarField& a, int order) { return make_node(Op::Bump, a, {}, 0.0, order); }
ScalarField mod(const ScalarField& a, double period) { return make_node(Op::Mod, a, {}, period); }
ScalarField floor_div(const ScalarField& a, double period) { return make_node(Op::Floor, a, {}, period); }

ScalarField smooth_step(const ScalarField& t) {
    const ScalarField e0 = bump(t);
    const ScalarField e1 = bump(ScalarField(1.0) - t);
    return e0 / (e0 + e1);
}

ScalarField periodic(const ScalarField& f, Var v, double period) {
    if (v == Var::X) return f.substitute(mod(ScalarField::x(), period), ScalarField::y());
    return f.substitute(ScalarField::x(), mod(ScalarField::y(), period));
}

ScalarField ScalarField::diff(Var v) const {
    const Node& n = *node_;
    const auto idx = static_cast<std::size_t>(v);
    {
        std::lock_guard lock(n.mutex_);
        if (n.deriv_[idx]) return ScalarField(n.deriv_[idx]);
    }

    const ScalarField self(node_);
    const ScalarField a = n.a ? ScalarField(n.a) : ScalarField();
    const ScalarField b = n.b ? ScalarField(n.b) : ScalarField();
    const auto da = [&] { return a.diff(v); };
    const auto db = [&] { return b.diff(v); };

    ScalarField d;
    switch (n.op) {
    case Op::Const: d = ScalarField(0.0); break;
    case Op::X: d = ScalarField(v == Var::X ? 1.0 : 0.0); break;
    case Op::Y: d = ScalarField(v == Var::Y ? 1.0 : 0.0); break;
    case Op::Add: d = da() + db(); break;
    case Op::Sub: d = da() - db(); break;
    case Op::Mul: d = da() * b + a * db(); break;
    case Op::Div: d = da() / b - a * db() / (b * b); break;
    case Op::Neg: d = -da(); break;
    case Op::Pow: d = ScalarField(n.value) * pow(a, n.value - 1.0) * da(); break;
    case Op::Sin: d = cos(a) * da(); break;
    case Op::Cos: d = -(sin(a) * da()); break;
    case Op::Sinh: d = cosh(a) * da(); break;
    case Op::Cosh: d = sinh(a) * da(); break;
    case Op::Exp: d = self * da(); break;
    case Op::Log: d = da() / a; break;
    case Op::Asin: d = da() / sqrt(ScalarField(1.0) - a * a); break;
    case Op::Sqrt: d = da() / (ScalarField(2.0) * self); break;
    case Op::Cbrt: d = da() / (ScalarField(3.0) * self * self); break;
    case Op::Abs: d = sign(a) * da(); break;
    case Op::Sign: d = ScalarField(0.0); break;
    case Op::Bump: d = bump(a, n.order + 1) * da(); break;
    case Op::Mod: d = da(); break;
    case Op::Floor: d = ScalarField(0.0); break;
    }

    std::lock_guard lock(n.mutex_);
    if (!n.deriv_[idx]) n.deriv_[idx] = d.node();
    return ScalarField(n.deriv_[idx]);
}

ScalarField ScalarField::substitute(const ScalarField& xs, const ScalarField& ys) const {
    std::unordered_map<const Node*, ScalarField> memo;
    auto rec = [&](auto&& self, const NodePtr& p) -> ScalarField {
        if (auto it = memo.find(p.get()); it != memo.end()) return it->second;
        ScalarField out;
        switch (p->op) {
        case Op::Const: out = ScalarField(p); break;
        case Op::X: out = xs; break;
        case Op::Y: out = ys; break;
        default: {
            const ScalarField a = self(self, p->a);
            const ScalarField b = p->b ? self(self, p->b) : ScalarField();
            out = make_node(p->op, a, b, p->value, p->order);
        }
        }
        memo.emplace(p.get(), out);
        return out;
    };
    return rec(rec, node_);
}

namespace {

void print_number(std::ostringstream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

void print_node(std::ostringstream& os, const Node& n) {
    switch (n.op) {
    case Op::Const: print_number(os, n.value); return;
    case Op::X: os << 'x'; return;
    case Op::Y: os << 'y'; return;
    case Op::Pow:
        os << "(^ ";
        print_node(os, *n.a);
        os << ' ';
        print_number(os, n.value);
        os << ')';
        return;
    case Op::Bump:
        os << "(bump " << n.order << ' ';
        print_node(os, *n.a);
        os << ')';
        return;
    case Op::Mod:
    case Op::Floor:
        os << '(' << op_name(n.op) << ' ';
        print_node(os, *n.a);
        os << ' ';
        print_number(os, n.value);
        os << ')';
        return;
    default:
        os << '(' << op_name(n.op) << ' ';
        print_node(os, *n.a);
        if (n.b) {
            os << ' ';
            print_node(os, *n.b);
        }
        os << ')';
    }
}

}  // namespace

std::string ScalarField::to_string() const {
    std::ostringstream os;
    print_node(os, *node_);
    return os.str();
}

std::size_t ScalarField::node_count() const {
    std::unordered_set<const Node*> seen;
    std::vector<const Node*> stack{node_.get()};
    while (!stack.empty()) {
        const Node* n = stack.back();
        stack.pop_back();
        if (!seen.insert(n).second) continue;
        if (n->a) stack.push_back(n->a.get());
        if (n->b) stack.push_back(n->b.get());
    }
    return seen.size();
}

double ScalarField::eval_raw(double x, double y) const {
    const Node& n = *node_;
    switch (n.op) {
    case Op::Const: return n.value;
    case Op::X: return x;
    case Op::Y: return y;
    default: break;
    }
    std::shared_ptr<const Tape> tape;
    {
        std::lock_guard lock(n.mutex_);
        if (!n.tape_) n.tape_ = std::make_shared<const Tape>(std::span<const ScalarField>(this, 1));
        tape = n.tape_;
    }
    double out = 0.0;
    tape->eval(x, y, std::span<double>(&out, 1));
    return out;
}

double ScalarField::eval(double x, double y) const {
    const double v = eval_raw(x, y);
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "non-finite field value at (" << x << ", " << y << ")";
        throw DomainError(os.str());
    }
    return v;
}

Tape::Tape(std::span<const ScalarField> roots) {
    std::unordered_map<const Node*, int> slot;
    // Iterative post-order so deep trees do not exhaust the stack.
    for (const auto& root : roots) {
        std::vector<std::pair<const Node*, bool>> stack{{root.node().get(), false}};
        while (!stack.empty()) {
            auto [n, expanded] = stack.back();
            stack.pop_back();
            if (slot.count(n)) continue;
            if (!expanded) {
                stack.emplace_back(n, true);
                if (n->b && !slot.count(n->b.get())) stack.emplace_back(n->b.get(), false);
                if (n->a && !slot.count(n->a.get())) stack.emplace_back(n->a.get(), false);
                continue;
            }
            Instr ins{n->op, n->value, n->order, -1, -1};
            if (n->a) ins.a = slot.at(n->a.get());
            if (n->b) ins.b = slot.at(n->b.get());
            slot.emplace(n, static_cast<int>(instrs_.size()));
            instrs_.push_back(ins);
        }
        roots_.push_back(slot.at(root.node().get()));
    }
}

void Tape::eval(double x, double y, std::span<double> out) const {
    thread_local std::vector<double> regs;
    if (regs.size() < instrs_.size()) regs.resize(instrs_.size());
    for (std::size_t i = 0; i < instrs_.size(); ++i) {
        const Instr& ins = instrs_[i];
        switch (ins.op) {
        case Op::X: regs[i] = x; break;
        case Op::Y: regs[i] = y; break;
        case Op::Const: regs[i] = ins.value; break;
        default: {
            const double a = ins.a >= 0 ? regs[static_cast<std::size_t>(ins.a)] : 0.0;
            const double b = ins.b >= 0 ? regs[static_cast<std::size_t>(ins.b)] : 0.0;
            regs[i] = apply(ins.op, ins.value, ins.order, a, b);
        }
        }
    }
    for (std::size_t r = 0; r < roots_.size(); ++r) out[r] = regs[static_cast<std::size_t>(roots_[r])];
}

// ---------------------------------------------------------------------------
// Prefix parser

namespace {

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    ScalarField parse_all() {
        ScalarField f = parse();
        skip_ws();
        if (pos_ != s_.size()) fail("trailing input");
        return f;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ConstructionError("expression parse error at offset " + std::to_string(pos_) + ": " + what);
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    std::string atom() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '(' &&
               s_[pos_] != ')')
            ++pos_;
        if (start == pos_) fail("expected atom");
        return s_.substr(start, pos_ - start);
    }

    double constant_arg() {
        const ScalarField f = parse();
        if (!f.is_constant()) fail("argument must be a constant");
        return f.constant_value();
    }

    ScalarField parse() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        if (s_[pos_] == ')') fail("unexpected ')'");
        if (s_[pos_] != '(') return parse_atom(atom());
        ++pos_;
        const std::string head = atom();
        ScalarField out;
        if (head == "^" || head == "pow") {
            const ScalarField base = parse();
            out = pow(base, constant_arg());
        } else if (head == "bump") {
            const double k = constant_arg();
            if (k < 0 || k != std::floor(k)) fail("bump order must be a nonnegative integer");
            out = bump(parse(), static_cast<int>(k));
        } else if (head == "mod" || head == "floor") {
            const ScalarField a = parse();
            const double p = constant_arg();
            out = head == "mod" ? mod(a, p) : floor_div(a, p);
        } else {
            std::vector<ScalarField> args;
            for (;;) {
                skip_ws();
                if (pos_ >= s_.size()) fail("unterminated list");
                if (s_[pos_] == ')') break;
                args.push_back(parse());
            }
            out = apply_head(head, args);
        }
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != ')') fail("expected ')'");
        ++pos_;
        return out;
    }

    ScalarField apply_head(const std::string& head, const std::vector<ScalarField>& args) {
        const auto need = [&](std::size_t n) {
            if (args.size() != n) fail("'" + head + "' takes " + std::to_string(n) + " argument(s)");
        };
        if (head == "+" || head == "*") {
            if (args.empty()) fail("'" + head + "' needs arguments");
            ScalarField acc = args[0];
            for (std::size_t i = 1; i < args.size(); ++i) acc = head == "+" ? acc + args[i] : acc * args[i];
            return acc;
        }
        if (head == "-") {
            if (args.size() == 1) return -args[0];
            need(2);
            return args[0] - args[1];
        }
        if (head == "/") { need(2); return args[0] / args[1]; }
        if (head == "neg") { need(1); return -args[0]; }
        if (head == "smoothstep") { need(1); return smooth_step(args[0]); }
        static const std::unordered_map<std::string, ScalarField (*)(const ScalarField&)> unary{
            {"sin", &geoproj::sin},   {"cos", &geoproj::cos},   {"sinh", &geoproj::sinh},
            {"cosh", &geoproj::cosh}, {"exp", &geoproj::exp},   {"log", &geoproj::log},
            {"asin", &geoproj::asin}, {"sqrt", &geoproj::sqrt}, {"cbrt", &geoproj::cbrt},
            {"abs", &geoproj::abs},   {"sign", &geoproj::sign},
        };
        if (auto it = unary.find(head); it != unary.end()) {
            need(1);
            return it->second(args[0]);
        }
        fail("unknown operator '" + head + "'");
    }

    ScalarField parse_atom(const std::string& a) {
        if (a == "x") return ScalarField::x();
        if (a == "y") return ScalarField::y();
        if (a == "pi") return ScalarField(std::numbers::pi);
        if (a == "e") return ScalarField(std::numbers::e);
        char* end = nullptr;
        const double v = std::strtod(a.c_str(), &end);
        if (end != a.c_str() + a.size()) fail("bad atom '" + a + "'");
        return ScalarField(v);
    }
};

}  // namespace

ScalarField parse_field(const std::string& text) { return Parser(text).parse_all(); }

}  // namespace geoproj
