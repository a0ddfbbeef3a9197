// Expression trees for smooth scalar fields on the plane.
//
// A ScalarField is an immutable, shared DAG of nodes over the two chart
// variables x and y. Partial derivatives are built symbolically and memoized
// per (node, variable), so repeated differentiation shares structure instead
// of copying it. Evaluation goes through a compiled Tape that visits every
// distinct node once.

#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace geoproj {

class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConstructionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Var { X = 0, Y = 1 };

enum class Op {
    Const, X, Y,
    Add, Sub, Mul, Div, Neg,
    Pow,    // a^p, p stored in value
    Sin, Cos, Sinh, Cosh, Exp, Log, Asin, Sqrt, Cbrt,
    Abs, Sign,
    Bump,   // k-th derivative of exp(-1/t) (0 for t <= 0), k stored in order
    Mod,    // a mod period, period stored in value
    Floor,  // floor(a / period)
};

const char* op_name(Op op);

struct Node;
class Tape;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Op op = Op::Const;
    double value = 0.0;
    int order = 0;
    NodePtr a;
    NodePtr b;

    Node(Op op_, double value_, int order_, NodePtr a_, NodePtr b_)
        : op(op_), value(value_), order(order_), a(std::move(a_)), b(std::move(b_)) {}

    bool is_const() const { return op == Op::Const; }
    bool is_const(double v) const { return op == Op::Const && value == v; }

private:
    friend class ScalarField;
    mutable std::mutex mutex_;
    mutable std::array<NodePtr, 2> deriv_;
    mutable std::shared_ptr<const Tape> tape_;
};

class ScalarField {
public:
    ScalarField();  // constant zero
    ScalarField(double c);  // NOLINT(google-explicit-constructor)
    explicit ScalarField(NodePtr node) : node_(std::move(node)) {}

    static ScalarField x();
    static ScalarField y();
    static ScalarField constant(double c) { return ScalarField(c); }

    const NodePtr& node() const { return node_; }
    bool is_constant() const { return node_->is_const(); }
    // Only meaningful when is_constant().
    double constant_value() const { return node_->value; }

    // Throws DomainError on a non-finite result.
    double eval(double x, double y) const;
    double operator()(double x, double y) const { return eval(x, y); }
    // No finiteness check.
    double eval_raw(double x, double y) const;

    ScalarField diff(Var v) const;
    ScalarField dx() const { return diff(Var::X); }
    ScalarField dy() const { return diff(Var::Y); }

    // Replace x and y by the given fields.
    ScalarField substitute(const ScalarField& xs, const ScalarField& ys) const;

    // Prefix (s-expression) form; parse_field() reads it back.
    std::string to_string() const;

    // Count of distinct nodes in the DAG.
    std::size_t node_count() const;

private:
    NodePtr node_;
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator/(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a);

ScalarField pow(const ScalarField& a, double p);
ScalarField sin(const ScalarField& a);
ScalarField cos(const ScalarField& a);
ScalarField sinh(const ScalarField& a);
ScalarField cosh(const ScalarField& a);
ScalarField exp(const ScalarField& a);
ScalarField log(const ScalarField& a);
ScalarField asin(const ScalarField& a);
ScalarField sqrt(const ScalarField& a);
ScalarField cbrt(const ScalarField& a);
ScalarField abs(const ScalarField& a);
ScalarField sign(const ScalarField& a);
ScalarField bump(const ScalarField& a, int order = 0);
ScalarField mod(const ScalarField& a, double period);
ScalarField floor_div(const ScalarField& a, double period);

// s(t) = e(t) / (e(t) + e(1 - t)), e(t) = exp(-1/t) for t > 0 and 0 otherwise.
// s = 0 for t <= 0, s = 1 for t >= 1, C-infinity everywhere.
ScalarField smooth_step(const ScalarField& t);

// Wraps the x (or y) argument of f into [0, period).
ScalarField periodic(const ScalarField& f, Var v, double period);

// Builds a node for the given op with constant folding and trivial identities.
ScalarField make_node(Op op, const ScalarField& a, const ScalarField& b = {}, double value = 0.0, int order = 0);

// k-th derivative of exp(-1/t); exposed for tests.
double bump_derivative(double t, int order);

// Linear program over a DAG: every distinct node becomes one slot.
class Tape {
public:
    explicit Tape(std::span<const ScalarField> roots);

    std::size_t size() const { return instrs_.size(); }
    std::size_t root_count() const { return roots_.size(); }

    // out.size() must equal root_count(). Values are not checked for finiteness.
    void eval(double x, double y, std::span<double> out) const;

private:
    struct Instr {
        Op op;
        double value;
        int order;
        int a;
        int b;
    };
    std::vector<Instr> instrs_;
    std::vector<int> roots_;
};

ScalarField parse_field(const std::string& text);

// Infix form, e.g. "sin^2(pi x) + 0.1 x^3". Grammar in docs/chart-format.md.
ScalarField parse_infix(const std::string& text);

// Prefix form when the text parses as one, infix otherwise.
ScalarField parse_expression(const std::string& text);

}  // namespace geoproj
