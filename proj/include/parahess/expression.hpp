#pragma once

// Minimal arithmetic expressions for configuration data.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?
//   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Functions: exp log sqrt abs sin cos (one argument), pow min max (two).
// Constants: pi. Names are resolved against a caller-supplied variable list
// at compile time; evaluation is read-only and safe to call concurrently.

#include <span>
#include <string>
#include <vector>

namespace parahess {

class Expression {
public:
    /// Throws ConfigError with the offending position or name.
    static Expression compile(const std::string& text, const std::vector<std::string>& variables);

    double eval(std::span<const double> values) const;
    const std::string& text() const { return text_; }
    /// True when the variable with this index is referenced.
    bool uses(std::size_t variable) const;

    enum class Op : unsigned char {
        push, load, neg, add, sub, mul, div, pow, exp, log, sqrt, abs, sin, cos, min, max
    };
    struct Instr {
        Op op;
        double value = 0.0;
        std::size_t index = 0;
    };

private:
    std::string text_;
    std::vector<Instr> code_;
    std::vector<bool> used_;
    std::size_t depth_ = 0;
};

}  // namespace parahess
