#include "mcgraph/expression.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

namespace mcgraph {

class ExpressionParser {
public:
    ExpressionParser(const std::string& text, const std::map<std::string, double>& params)
        : text_(text), params_(params) {}

    Expression run() {
        Expression e;
        e.text_ = text_;
        out_ = &e.code_;
        parse_expr();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected character");
        if (max_depth_ > 60) fail("expression too deeply nested");
        return e;
    }

private:
    using Op = Expression::Op;

    [[noreturn]] void fail(const std::string& what) const {
        std::ostringstream os;
        os << "expression '" << text_ << "': " << what << " at position " << pos_;
        throw ExpressionError(os.str());
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void emit(Op op, double v = 0.0, int stack_delta = 0) {
        out_->push_back({op, v});
        depth_ += stack_delta;
        max_depth_ = std::max(max_depth_, depth_);
    }

    void parse_expr() {
        parse_term();
        for (;;) {
            if (accept('+')) { parse_term(); emit(Op::Add, 0, -1); }
            else if (accept('-')) { parse_term(); emit(Op::Sub, 0, -1); }
            else break;
        }
    }
    void parse_term() {
        parse_unary();
        for (;;) {
            if (accept('*')) { parse_unary(); emit(Op::Mul, 0, -1); }
            else if (accept('/')) { parse_unary(); emit(Op::Div, 0, -1); }
            else break;
        }
    }
    void parse_unary() {
        if (accept('-')) { parse_unary(); emit(Op::Neg); return; }
        if (accept('+')) { parse_unary(); return; }
        parse_power();
    }
    void parse_power() {
        parse_primary();
        if (accept('^')) { parse_unary(); emit(Op::Pow, 0, -1); }
    }
    void parse_primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end");
        const char c = text_[pos_];
        if (accept('(')) {
            parse_expr();
            if (!accept(')')) fail("expected ')'");
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = text_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) fail("malformed number");
            pos_ += static_cast<std::size_t>(end - begin);
            emit(Op::Const, v, +1);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            const std::string name = text_.substr(start, pos_ - start);
            if (accept('(')) {
                parse_call(name);
                return;
            }
            if (name == "x") emit(Op::VarX, 0, +1);
            else if (name == "y") emit(Op::VarY, 0, +1);
            else if (name == "pi") emit(Op::Const, kPi, +1);
            else if (name == "e") emit(Op::Const, std::exp(1.0), +1);
            else if (auto it = params_.find(name); it != params_.end()) emit(Op::Const, it->second, +1);
            else fail("unknown identifier '" + name + "'");
            return;
        }
        fail("unexpected character");
    }
    void parse_call(const std::string& name) {
        static const std::map<std::string, Op> unary = {
            {"sin", Op::Sin},   {"cos", Op::Cos},   {"tan", Op::Tan},   {"exp", Op::Exp},   {"log", Op::Log},
            {"sqrt", Op::Sqrt}, {"abs", Op::Abs},   {"sinh", Op::Sinh}, {"cosh", Op::Cosh}, {"tanh", Op::Tanh},
            {"atan", Op::Atan}, {"asin", Op::Asin}, {"acos", Op::Acos}, {"acosh", Op::Acosh}};
        parse_expr();
        if (auto it = unary.find(name); it != unary.end()) {
            if (!accept(')')) fail("expected ')' after argument of " + name);
            emit(it->second);
            return;
        }
        if (name == "atan2" || name == "pow") {
            if (!accept(',')) fail("expected ',' in " + name);
            parse_expr();
            if (!accept(')')) fail("expected ')' after arguments of " + name);
            emit(name == "pow" ? Op::Pow2 : Op::Atan2, 0, -1);
            return;
        }
        fail("unknown function '" + name + "'");
    }

    const std::string& text_;
    const std::map<std::string, double>& params_;
    std::vector<Expression::Instr>* out_ = nullptr;
    std::size_t pos_ = 0;
    int depth_ = 0;
    int max_depth_ = 0;
};

Expression Expression::parse(const std::string& text, const std::map<std::string, double>& parameters) {
    return ExpressionParser(text, parameters).run();
}

Expression Expression::constant(double value) {
    Expression e;
    std::ostringstream os;
    os.precision(17);
    os << value;
    e.text_ = os.str();
    e.code_.push_back({Op::Const, value});
    return e;
}

bool Expression::is_constant() const {
    for (const Instr& in : code_)
        if (in.op == Op::VarX || in.op == Op::VarY) return false;
    return true;
}

} // namespace mcgraph
