#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mfharvest {

/// A compiled arithmetic expression in one variable.
///
/// Grammar (whitespace ignored):
///
///     expr    := term (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := ('+' | '-') unary | power
///     power   := primary ('^' unary)?          // right associative
///     primary := number | VAR | FUNC '(' expr ')' | '(' expr ')'
///     FUNC    := 'exp' | 'log'
///
/// `VAR` is the single variable name given at compile time (`x` for drift and
/// volatility, `z` for price functions). Numbers use the usual decimal/exponent
/// notation (`1`, `0.5`, `1e-3`). `-x^2` parses as `-(x^2)`.
class Expression {
public:
    /// Throws ParseError (with character position) on malformed input.
    static Expression compile(std::string_view text, std::string_view variable = "x");

    [[nodiscard]] double operator()(double value) const;
    [[nodiscard]] const std::string& text() const noexcept { return text_; }
    [[nodiscard]] const std::string& variable() const noexcept { return variable_; }

    enum class Op : unsigned char { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Exp, Log };
    struct Instr {
        Op op;
        double value;
    };

private:
    Expression() = default;

    std::string text_;
    std::string variable_;
    std::vector<Instr> program_;  // postfix
    std::size_t max_stack_ = 0;
};

}  // namespace mfharvest
