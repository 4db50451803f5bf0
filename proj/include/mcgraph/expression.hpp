#pragma once

#include "mcgraph/common.hpp"
#include "mcgraph/jet.hpp"

#include <map>
#include <string>
#include <vector>

namespace mcgraph {

/// Closed-form scalar expression in the variables x and y.
///
/// Grammar: + - * / ^ with the usual precedence (^ is right associative),
/// unary minus, parentheses, numbers, the constants pi and e, named
/// parameters supplied at parse time, and the functions
/// sin cos tan exp log sqrt abs sinh cosh tanh atan asin acos acosh
/// (one argument) and atan2 pow (two arguments).
///
/// Evaluation over Jet2 yields the exact gradient and Hessian.
class Expression {
public:
    Expression() = default;

    /// Throws ExpressionError naming the offending position.
    static Expression parse(const std::string& text, const std::map<std::string, double>& parameters = {});
    static Expression constant(double value);

    double operator()(double x, double y) const { return evaluate<double>(x, y); }
    double operator()(Vec2 p) const { return evaluate<double>(p.x, p.y); }
    Jet2 jet(Vec2 p) const { return evaluate<Jet2>(Jet2::variable_x(p.x), Jet2::variable_y(p.y)); }

    const std::string& text() const { return text_; }
    bool empty() const { return code_.empty(); }
    /// True when the expression does not reference x or y.
    bool is_constant() const;

private:
    enum class Op : unsigned char {
        Const, VarX, VarY, Add, Sub, Mul, Div, Neg, Pow,
        Sin, Cos, Tan, Exp, Log, Sqrt, Abs, Sinh, Cosh, Tanh, Atan, Asin, Acos, Acosh,
        Atan2, Pow2
    };
    struct Instr {
        Op op;
        double value = 0.0;
    };

    template <class T>
    T evaluate(T x, T y) const;

    friend class ExpressionParser;
    std::string text_;
    std::vector<Instr> code_;
};

template <class T>
T Expression::evaluate(T x, T y) const {
    using std::abs, std::acos, std::acosh, std::asin, std::atan, std::atan2, std::cos, std::cosh, std::exp,
        std::log, std::pow, std::sin, std::sinh, std::sqrt, std::tan, std::tanh;
    T stack[64];
    int top = 0;
    for (const Instr& in : code_) {
        switch (in.op) {
        case Op::Const: stack[top++] = T(in.value); break;
        case Op::VarX: stack[top++] = x; break;
        case Op::VarY: stack[top++] = y; break;
        case Op::Add: --top; stack[top - 1] = stack[top - 1] + stack[top]; break;
        case Op::Sub: --top; stack[top - 1] = stack[top - 1] - stack[top]; break;
        case Op::Mul: --top; stack[top - 1] = stack[top - 1] * stack[top]; break;
        case Op::Div: --top; stack[top - 1] = stack[top - 1] / stack[top]; break;
        case Op::Pow:
        case Op::Pow2: --top; stack[top - 1] = pow(stack[top - 1], stack[top]); break;
        case Op::Atan2: --top; stack[top - 1] = atan2(stack[top - 1], stack[top]); break;
        case Op::Neg: stack[top - 1] = -stack[top - 1]; break;
        case Op::Sin: stack[top - 1] = sin(stack[top - 1]); break;
        case Op::Cos: stack[top - 1] = cos(stack[top - 1]); break;
        case Op::Tan: stack[top - 1] = tan(stack[top - 1]); break;
        case Op::Exp: stack[top - 1] = exp(stack[top - 1]); break;
        case Op::Log: stack[top - 1] = log(stack[top - 1]); break;
        case Op::Sqrt: stack[top - 1] = sqrt(stack[top - 1]); break;
        case Op::Abs: stack[top - 1] = abs(stack[top - 1]); break;
        case Op::Sinh: stack[top - 1] = sinh(stack[top - 1]); break;
        case Op::Cosh: stack[top - 1] = cosh(stack[top - 1]); break;
        case Op::Tanh: stack[top - 1] = tanh(stack[top - 1]); break;
        case Op::Atan: stack[top - 1] = atan(stack[top - 1]); break;
        case Op::Asin: stack[top - 1] = asin(stack[top - 1]); break;
        case Op::Acos: stack[top - 1] = acos(stack[top - 1]); break;
        case Op::Acosh: stack[top - 1] = acosh(stack[top - 1]); break;
        }
    }
    return top == 1 ? stack[0] : T(0.0);
}

} // namespace mcgraph
