#include "mfharvest/expression.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

#include "mfharvest/errors.hpp"

namespace mfharvest {

namespace {

class Parser {
public:
    Parser(std::string_view text, std::string_view variable) : text_(text), variable_(variable) {}

    std::vector<Expression::Instr> run() {
        parse_expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
        return std::move(out_);
    }

private:
    using Op = Expression::Op;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("expression error at position " + std::to_string(pos_) + ": " + msg, pos_);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void emit(Op op, double v = 0.0) { out_.push_back({op, v}); }

    void parse_expr() {
        parse_term();
        for (;;) {
            if (accept('+')) {
                parse_term();
                emit(Op::Add);
            } else if (accept('-')) {
                parse_term();
                emit(Op::Sub);
            } else {
                return;
            }
        }
    }

    void parse_term() {
        parse_unary();
        for (;;) {
            if (accept('*')) {
                parse_unary();
                emit(Op::Mul);
            } else if (accept('/')) {
                parse_unary();
                emit(Op::Div);
            } else {
                return;
            }
        }
    }

    void parse_unary() {
        if (accept('-')) {
            parse_unary();
            emit(Op::Neg);
        } else if (accept('+')) {
            parse_unary();
        } else {
            parse_power();
        }
    }

    void parse_power() {
        parse_primary();
        if (accept('^')) {
            parse_unary();
            emit(Op::Pow);
        }
    }

    void parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            parse_expr();
            if (!accept(')')) fail("expected ')'");
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            parse_number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            const std::string_view name = text_.substr(start, pos_ - start);
            if (name == variable_) {
                emit(Op::Var);
                return;
            }
            Op fn;
            if (name == "exp") {
                fn = Op::Exp;
            } else if (name == "log") {
                fn = Op::Log;
            } else {
                pos_ = start;
                fail("unknown identifier '" + std::string(name) + "'");
            }
            if (!accept('(')) fail("expected '(' after " + std::string(name));
            parse_expr();
            if (!accept(')')) fail("expected ')'");
            emit(fn);
            return;
        }
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    void parse_number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
            if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
                pos_ = p;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            }
        }
        const std::string token(text_.substr(start, pos_ - start));
        char* end = nullptr;
        const double v = std::strtod(token.c_str(), &end);
        if (end != token.c_str() + token.size()) {
            pos_ = start;
            fail("malformed number '" + token + "'");
        }
        emit(Op::Const, v);
    }

    std::string_view text_;
    std::string_view variable_;
    std::size_t pos_ = 0;
    std::vector<Expression::Instr> out_;
};

}  // namespace

Expression Expression::compile(std::string_view text, std::string_view variable) {
    Expression e;
    e.text_ = std::string(text);
    e.variable_ = std::string(variable);
    e.program_ = Parser(e.text_, e.variable_).run();

    std::size_t depth = 0;
    for (const auto& ins : e.program_) {
        switch (ins.op) {
            case Op::Const:
            case Op::Var:
                ++depth;
                break;
            case Op::Neg:
            case Op::Exp:
            case Op::Log:
                break;
            default:
                --depth;
        }
        e.max_stack_ = std::max(e.max_stack_, depth);
    }
    return e;
}

double Expression::operator()(double value) const {
    // Small fixed buffer covers every realistic formula; fall back to the heap otherwise.
    constexpr std::size_t kInline = 32;
    double inline_stack[kInline] = {};
    std::vector<double> heap;
    double* st = inline_stack;
    if (max_stack_ > kInline) {
        heap.resize(max_stack_);
        st = heap.data();
    }
    std::size_t sp = 0;
    for (const auto& ins : program_) {
        switch (ins.op) {
            case Op::Const: st[sp++] = ins.value; break;
            case Op::Var: st[sp++] = value; break;
            case Op::Add: --sp; st[sp - 1] += st[sp]; break;
            case Op::Sub: --sp; st[sp - 1] -= st[sp]; break;
            case Op::Mul: --sp; st[sp - 1] *= st[sp]; break;
            case Op::Div: --sp; st[sp - 1] /= st[sp]; break;
            case Op::Pow: --sp; st[sp - 1] = std::pow(st[sp - 1], st[sp]); break;
            case Op::Neg: st[sp - 1] = -st[sp - 1]; break;
            case Op::Exp: st[sp - 1] = std::exp(st[sp - 1]); break;
            case Op::Log: st[sp - 1] = std::log(st[sp - 1]); break;
        }
    }
    return st[0];
}

}  // namespace mfharvest
