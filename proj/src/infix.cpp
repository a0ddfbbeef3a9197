// Conventional infix notation for scalar fields:
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary | unary)*        juxtaposition multiplies
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?                      exponent must be constant
//   primary := number | x | y | pi | e | '(' expr ')'
//            | name ('^' number)? '(' expr (',' expr)* ')'
// "sin^2(t)" means sin(t)^2.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>
#include <vector>

#include "geoproj/expr.hpp"

namespace geoproj {

namespace {

class InfixParser {
public:
    explicit InfixParser(const std::string& s) : s_(s) {}

    ScalarField parse_all() {
        ScalarField f = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
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

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    bool accept(char c) {
        if (peek() != c) return false;
        ++pos_;
        return true;
    }

    bool starts_primary() {
        const char c = peek();
        return c == '(' || c == '.' || std::isalnum(static_cast<unsigned char>(c));
    }

    ScalarField expr() {
        ScalarField acc = term();
        for (;;) {
            if (accept('+')) acc = acc + term();
            else if (accept('-')) acc = acc - term();
            else return acc;
        }
    }

    ScalarField term() {
        ScalarField acc = unary();
        for (;;) {
            if (accept('*')) acc = acc * unary();
            else if (accept('/')) acc = acc / unary();
            else if (starts_primary()) acc = acc * power();
            else return acc;
        }
    }

    ScalarField unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    double constant(const ScalarField& f) {
        if (!f.is_constant()) fail("exponent must be a constant");
        return f.constant_value();
    }

    ScalarField raise(const ScalarField& base, const ScalarField& ex) {
        if (base.is_constant() && !ex.is_constant()) {
            const double b = base.constant_value();
            if (b == std::numbers::e) return exp(ex);
            if (!(b > 0.0)) fail("a variable exponent needs a positive constant base");
            return exp(ex * std::log(b));
        }
        return pow(base, constant(ex));
    }

    ScalarField power() {
        const ScalarField base = primary();
        if (accept('^')) return raise(base, unary());
        return base;
    }

    std::string ident() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        return s_.substr(start, pos_ - start);
    }

    std::vector<ScalarField> arguments() {
        if (!accept('(')) fail("expected '('");
        std::vector<ScalarField> args{expr()};
        while (accept(',')) args.push_back(expr());
        if (!accept(')')) fail("expected ')'");
        return args;
    }

    ScalarField primary() {
        const char c = peek();
        if (c == '(') {
            ++pos_;
            ScalarField f = expr();
            if (!accept(')')) fail("expected ')'");
            return f;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) fail("bad number");
            pos_ += static_cast<std::size_t>(end - begin);
            return ScalarField(v);
        }
        if (!std::isalpha(static_cast<unsigned char>(c))) fail(c ? "unexpected '" + std::string(1, c) + "'" : "unexpected end");
        const std::string name = ident();
        if (name == "x") return ScalarField::x();
        if (name == "y") return ScalarField::y();
        if (name == "pi") return ScalarField(std::numbers::pi);
        if (name == "e") return ScalarField(std::numbers::e);

        std::optional<double> fpow;
        if (peek() == '^') {
            ++pos_;
            fpow = constant(unary_number());
        }
        const std::vector<ScalarField> args = arguments();
        ScalarField out = call(name, args);
        return fpow ? pow(out, *fpow) : out;
    }

    // The exponent in "sin^2(...)": a signed number only, so that the
    // argument list is not swallowed by juxtaposition.
    ScalarField unary_number() {
        double sgn = 1.0;
        while (peek() == '-' || peek() == '+') sgn *= s_[pos_++] == '-' ? -1.0 : 1.0;
        skip_ws();
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("expected a number after '^'");
        pos_ += static_cast<std::size_t>(end - begin);
        return ScalarField(sgn * v);
    }

    ScalarField call(const std::string& name, const std::vector<ScalarField>& args) {
        const auto need = [&](std::size_t n) {
            if (args.size() != n) fail("'" + name + "' takes " + std::to_string(n) + " argument(s)");
        };
        if (name == "mod" || name == "floor") {
            need(2);
            const double p = constant(args[1]);
            return name == "mod" ? mod(args[0], p) : floor_div(args[0], p);
        }
        if (name == "bump") {
            need(2);
            const double k = constant(args[0]);
            if (k < 0 || k != std::floor(k)) fail("bump order must be a nonnegative integer");
            return bump(args[1], static_cast<int>(k));
        }
        need(1);
        const ScalarField& a = args[0];
        if (name == "sin") return sin(a);
        if (name == "cos") return cos(a);
        if (name == "tan") return sin(a) / cos(a);
        if (name == "sinh") return sinh(a);
        if (name == "cosh") return cosh(a);
        if (name == "exp") return exp(a);
        if (name == "log" || name == "ln") return log(a);
        if (name == "asin") return asin(a);
        if (name == "sqrt") return sqrt(a);
        if (name == "cbrt") return cbrt(a);
        if (name == "abs") return abs(a);
        if (name == "sign") return sign(a);
        if (name == "smoothstep") return smooth_step(a);
        fail("unknown function '" + name + "'");
    }
};

}  // namespace

ScalarField parse_infix(const std::string& text) { return InfixParser(text).parse_all(); }

ScalarField parse_expression(const std::string& text) {
    std::size_t i = text.find_first_not_of(" \t");
    if (i != std::string::npos && text[i] == '(') {
        try {
            return parse_field(text);
        } catch (const ConstructionError&) {
            // Parenthesised infix such as "(x + 1)^2".
        }
    }
    return parse_infix(text);
}

}  // namespace geoproj
